"""Pebble transducers: a two-way head plus a stack of up to ``k`` pebbles.

Positions are 0-based internally; pebble indices are 1-based (pebble 1 is
the bottom of the stack, the topmost placed pebble is the head).  Rules are
tried in order and the first one whose letter set and guard match fires.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .atomic import IterRev, SequentialTransducer
from .core import (
    Alphabet,
    FiniteMonoid,
    LetterHom,
    Word,
    as_word,
    iter_lines,
    quote_word,
    tokenize,
    underline,
    unquote,
)
from .errors import CapExceeded, ParseError, RejectedInput, ValidationError

FIRST, LAST = "first", "last"


# ---------------------------------------------------------------------------
# guards
# ---------------------------------------------------------------------------


class Guard:
    def holds(self, stack: Sequence[int], first: int, last: int) -> bool:  # pragma: no cover
        raise NotImplementedError

    def pebbles(self) -> set[int]:
        return set()

    def __and__(self, other: "Guard") -> "Guard":
        return And((self, other))

    def __or__(self, other: "Guard") -> "Guard":
        return Or((self, other))

    def __invert__(self) -> "Guard":
        return Not(self)


@dataclass(frozen=True)
class TrueGuard(Guard):
    def holds(self, stack, first, last):
        return True

    def __str__(self):
        return "true"


def _operand(stack, x, first, last):
    if x == FIRST:
        return first
    if x == LAST:
        return last
    return stack[x - 1] if x <= len(stack) else None


def _show(x) -> str:
    return x if isinstance(x, str) else f"p{x}"


@dataclass(frozen=True)
class Le(Guard):
    """``a <= b`` for pebble indices or the endpoints; false if a pebble is absent."""

    a: int | str
    b: int | str

    def holds(self, stack, first, last):
        x = _operand(stack, self.a, first, last)
        y = _operand(stack, self.b, first, last)
        return x is not None and y is not None and x <= y

    def pebbles(self):
        return {x for x in (self.a, self.b) if isinstance(x, int)}

    def __str__(self):
        return f"{_show(self.a)}<={_show(self.b)}"


@dataclass(frozen=True)
class Height(Guard):
    h: int

    def holds(self, stack, first, last):
        return len(stack) == self.h

    def __str__(self):
        return f"height={self.h}"


@dataclass(frozen=True)
class Placed(Guard):
    i: int

    def holds(self, stack, first, last):
        return self.i <= len(stack)

    def pebbles(self):
        return {self.i}

    def __str__(self):
        return f"placed(p{self.i})"


@dataclass(frozen=True)
class Not(Guard):
    g: Guard

    def holds(self, stack, first, last):
        return not self.g.holds(stack, first, last)

    def pebbles(self):
        return self.g.pebbles()

    def __str__(self):
        return f"!{_paren(self.g)}"


@dataclass(frozen=True)
class And(Guard):
    parts: tuple[Guard, ...]

    def holds(self, stack, first, last):
        return all(g.holds(stack, first, last) for g in self.parts)

    def pebbles(self):
        return set().union(*(g.pebbles() for g in self.parts))

    def __str__(self):
        return " & ".join(_paren(g) for g in self.parts)


@dataclass(frozen=True)
class Or(Guard):
    parts: tuple[Guard, ...]

    def holds(self, stack, first, last):
        return any(g.holds(stack, first, last) for g in self.parts)

    def pebbles(self):
        return set().union(*(g.pebbles() for g in self.parts))

    def __str__(self):
        return " | ".join(_paren(g) for g in self.parts)


def _paren(g: Guard) -> str:
    return f"({g})" if isinstance(g, (And, Or)) else str(g)


TRUE = TrueGuard()


def at_first(i: int = 1) -> Guard:
    return Le(i, FIRST)


def at_last(i: int = 1) -> Guard:
    return Le(LAST, i)


def same(i: int, j: int) -> Guard:
    return Le(i, j) & Le(j, i)


def all_of(*gs: Guard) -> Guard:
    gs = tuple(g for g in gs if not isinstance(g, TrueGuard))
    if not gs:
        return TRUE
    return gs[0] if len(gs) == 1 else And(gs)


# guard text: atoms, !, &, |, parentheses
_GTOK = re.compile(r"\s*(p\d+|first|last|<=|=|\d+|height|placed|true|false|[!&|()])")


def parse_guard(text: str) -> Guard:
    toks: list[str] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _GTOK.match(text, pos)
        if not m:
            raise ParseError(f"bad guard near {text[pos:]!r}")
        toks.append(m.group(1))
        pos = m.end()
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def take(expected=None):
        nonlocal i
        if i >= len(toks):
            raise ParseError(f"unexpected end of guard {text!r}")
        t = toks[i]
        if expected is not None and t != expected:
            raise ParseError(f"expected {expected!r} in guard, found {t!r}")
        i += 1
        return t

    def operand(t):
        if t in (FIRST, LAST):
            return t
        if t.startswith("p") and t[1:].isdigit():
            return int(t[1:])
        raise ParseError(f"bad guard operand {t!r}")

    def atom():
        t = take()
        if t == "!":
            return Not(atom())
        if t == "(":
            g = disj()
            take(")")
            return g
        if t == "true":
            return TRUE
        if t == "false":
            return Not(TRUE)
        if t == "height":
            take("=")
            return Height(int(take()))
        if t == "placed":
            take("(")
            p = operand(take())
            take(")")
            return Placed(p)
        a = operand(t)
        take("<=")
        return Le(a, operand(take()))

    def conj():
        parts = [atom()]
        while peek() == "&":
            take()
            parts.append(atom())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def disj():
        parts = [conj()]
        while peek() == "|":
            take()
            parts.append(conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    g = disj()
    if i != len(toks):
        raise ParseError(f"trailing tokens in guard {text!r}")
    return g


# ---------------------------------------------------------------------------
# transducers
# ---------------------------------------------------------------------------

MOVE_LEFT, STAY, MOVE_RIGHT, PUSH, POP = "move -1", "move 0", "move +1", "push", "pop"
ACTIONS = (MOVE_LEFT, STAY, MOVE_RIGHT, PUSH, POP)
_OFFSET = {MOVE_LEFT: -1, STAY: 0, MOVE_RIGHT: 1}


@dataclass(frozen=True)
class GuardedRule:
    source: str
    letters: frozenset | None  # None matches every letter
    guard: Guard
    target: str
    action: str

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise ValidationError(f"unknown action {self.action!r}")
        if self.letters is not None:
            object.__setattr__(self, "letters", frozenset(self.letters))

    def matches(self, letter: str, stack, first, last) -> bool:
        return (self.letters is None or letter in self.letters) and self.guard.holds(stack, first, last)


def rule(source, target, action=STAY, letters=None, guard: Guard = TRUE) -> GuardedRule:
    if isinstance(letters, str):
        letters = (letters,)
    return GuardedRule(source, None if letters is None else frozenset(letters), guard, target, action)


@dataclass(frozen=True, eq=False)
class PebbleTransducer:
    input_alphabet: Alphabet
    output_alphabet: Alphabet
    k: int
    states: tuple[str, ...]
    initial: str
    final: str
    rules: tuple[GuardedRule, ...]
    outputs: dict  # state -> Word
    empty_output: Word = ()
    first_order: bool | None = None
    _by_state: dict = field(init=False, repr=False)

    def __post_init__(self):
        states = tuple(self.states)
        object.__setattr__(self, "states", states)
        if self.k < 1:
            raise ValidationError("a pebble transducer needs at least one pebble")
        known = set(states)
        if len(known) != len(states):
            raise ValidationError("duplicate state names")
        for q in (self.initial, self.final):
            if q not in known:
                raise ValidationError(f"unknown state {q!r}")
        by_state: dict[str, list[GuardedRule]] = {q: [] for q in states}
        for r in self.rules:
            if r.source not in known or r.target not in known:
                raise ValidationError(f"rule {r.source} -> {r.target} references an undeclared state")
            if r.letters is not None:
                for a in r.letters:
                    if a not in self.input_alphabet:
                        raise ValidationError(f"rule letter {a!r} not in input alphabet")
            if any(i > self.k for i in r.guard.pebbles()):
                raise ValidationError(f"guard {r.guard} mentions a pebble beyond {self.k}")
            by_state[r.source].append(r)
        outputs = {q: self.output_alphabet.check(tuple(self.outputs.get(q, ()))) for q in states}
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "empty_output", self.output_alphabet.check(tuple(self.empty_output)))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "_by_state", {q: tuple(rs) for q, rs in by_state.items()})

    @property
    def n_states(self) -> int:
        return len(self.states)

    def config_bound(self, n: int) -> int:
        """Number of configurations on a word of length ``n``."""
        return self.n_states * sum(n**h for h in range(1, self.k + 1))

    def step(self, word: Sequence[str], state: str, stack: tuple[int, ...]):
        """Successor configuration, or None when the run cannot continue."""
        n = len(word)
        head = stack[-1]
        letter = word[head]
        for r in self._by_state[state]:
            if (r.letters is None or letter in r.letters) and r.guard.holds(stack, 0, n - 1):
                act = r.action
                if act == PUSH:
                    if len(stack) == self.k:
                        return None
                    return r.target, stack + (head,)
                if act == POP:
                    if len(stack) == 1:
                        return None
                    return r.target, stack[:-1]
                pos = head + _OFFSET[act]
                if pos < 0 or pos >= n:
                    return None
                return r.target, stack[:-1] + (pos,)
        return None

    def run(self, word: Sequence[str] | str) -> tuple[list[tuple[str, tuple[int, ...]]], bool]:
        word = as_word(word, self.input_alphabet)
        if not word:
            raise ValidationError("runs are defined on non-empty words; use eval for the empty word")
        config = (self.initial, (0,))
        run = [config]
        bound = self.config_bound(len(word))
        while config[0] != self.final:
            if len(run) > bound:
                return run, False
            nxt = self.step(word, *config)
            if nxt is None:
                return run, False
            prev_stack, stack = config[1], nxt[1]
            # stack discipline: only the topmost pebble ever changes
            common = min(len(prev_stack), len(stack)) - 1
            assert prev_stack[:common] == stack[:common]
            config = nxt
            run.append(config)
        return run, True

    def eval(self, word: Sequence[str] | str) -> Word:
        word = as_word(word, self.input_alphabet)
        if not word:
            return self.empty_output
        run, accepted = self.run(word)
        if not accepted:
            raise RejectedInput(f"no accepting run on {''.join(word)!r}")
        out: list[str] = []
        outputs = self.outputs
        for q, _ in run:
            out.extend(outputs[q])
        return tuple(out)

    __call__ = eval

    def is_first_order(self) -> bool:
        return bool(self.first_order)


def pebble_step(t: PebbleTransducer, word, state, stack):
    return t.step(as_word(word, t.input_alphabet), state, tuple(stack))


def pebble_run(t: PebbleTransducer, word):
    return t.run(word)


def pebble_eval(t: PebbleTransducer, word) -> Word:
    return t.eval(word)


def pebble_run_word(t: PebbleTransducer, word) -> str:
    """Each configuration as the input annotated with ``[i]`` / ``[i:q]`` marks."""
    word = as_word(word, t.input_alphabet)
    run, accepted = t.run(word)
    if not accepted:
        raise RejectedInput(f"no accepting run on {''.join(word)!r}")
    blocks = []
    for q, stack in run:
        parts = []
        for pos, a in enumerate(word):
            for i, p in enumerate(stack, start=1):
                if p == pos:
                    parts.append(f"[{i}:{q}]" if i == len(stack) else f"[{i}]")
            parts.append(a)
        blocks.append("".join(parts))
    return "|".join(blocks)


def overlapping_rules(t: PebbleTransducer, max_len: int | None = None) -> list[tuple[int, int]]:
    """Pairs of rules (by index) of one state that can both match a configuration.

    Checked by enumerating stacks on short words; earlier rules win anyway,
    so overlaps are a warning, not an error.
    """
    max_len = max_len or t.k + 2
    index = {id(r): i for i, r in enumerate(t.rules)}
    found: set[tuple[int, int]] = set()
    for n in range(1, max_len + 1):
        for h in range(1, t.k + 1):
            for stack in itertools.product(range(n), repeat=h):
                for q, rs in t._by_state.items():
                    for a in t.input_alphabet:
                        hits = [r for r in rs if r.matches(a, stack, 0, n - 1)]
                        for r1, r2 in itertools.combinations(hits, 2):
                            found.add((index[id(r1)], index[id(r2)]))
    return sorted(found)


@dataclass(frozen=True)
class ComposedEvaluator:
    """``outer`` after ``inner``, evaluated one after the other."""

    outer: PebbleTransducer
    inner: PebbleTransducer

    def __post_init__(self):
        if self.inner.output_alphabet != self.outer.input_alphabet:
            raise ValidationError("inner output alphabet differs from outer input alphabet")

    @property
    def input_alphabet(self) -> Alphabet:
        return self.inner.input_alphabet

    @property
    def output_alphabet(self) -> Alphabet:
        return self.outer.output_alphabet

    def eval(self, word) -> Word:
        return self.outer.eval(self.inner.eval(word))

    __call__ = eval


def pebble_compose_runtime(outer: PebbleTransducer, inner: PebbleTransducer) -> ComposedEvaluator:
    return ComposedEvaluator(outer, inner)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def pebble_from_sequential(t: SequentialTransducer) -> PebbleTransducer:
    """One left-to-right sweep; transition outputs live in split states."""
    sigma = t.input_alphabet
    n = t.n_states
    states = [f"at{q}" for q in range(n)]
    states += [f"emit{q}.{i}" for q in range(n) for i in range(len(sigma))]
    states += [f"end{q}" for q in range(n)] + ["done"]
    rules = []
    outputs = {}
    for q in range(n):
        for i, a in enumerate(sigma):
            rules.append(rule(f"at{q}", f"emit{q}.{i}", STAY, a))
            r = int(t.dfa.delta[q, i])
            outputs[f"emit{q}.{i}"] = t.outputs[q][i]
            rules.append(rule(f"emit{q}.{i}", f"end{r}", STAY, guard=at_last()))
            rules.append(rule(f"emit{q}.{i}", f"at{r}", MOVE_RIGHT))
        rules.append(rule(f"end{q}", "done"))
        outputs[f"end{q}"] = t.end[q]
    return PebbleTransducer(
        sigma,
        t.output_alphabet,
        1,
        tuple(states),
        f"at{t.dfa.initial}",
        "done",
        tuple(rules),
        outputs,
        t.end[t.dfa.initial],
        first_order=t.is_counter_free(),
    )


def pebble_squaring(alphabet: Alphabet | Iterable[str]) -> PebbleTransducer:
    """Pebble 1 walks the input; for each of its positions pebble 2 copies
    the whole word, underlining the letter under pebble 1."""
    sigma = alphabet if isinstance(alphabet, Alphabet) else Alphabet.of(alphabet)
    states = ["push", "rewind", "copy", "ret", "next", "done"]
    rules = [
        rule("push", "rewind", PUSH),
        rule("rewind", "copy", STAY, guard=at_first(2)),
        rule("rewind", "rewind", MOVE_LEFT),
    ]
    outputs = {}
    for i, a in enumerate(sigma):
        plain, under = f"out{i}", f"under{i}"
        states += [plain, under]
        outputs[plain] = (a,)
        outputs[under] = (underline(a),)
        rules.append(rule("copy", under, STAY, a, same(1, 2)))
        rules.append(rule("copy", plain, STAY, a))
        for s in (plain, under):
            rules.append(rule(s, "ret", STAY, guard=at_last(2)))
            rules.append(rule(s, "copy", MOVE_RIGHT))
    rules += [
        rule("ret", "next", POP),
        rule("next", "done", STAY, guard=at_last(1)),
        rule("next", "push", MOVE_RIGHT),
    ]
    return PebbleTransducer(
        sigma, sigma.underlined(), 2, tuple(states), "push", "done", tuple(rules), outputs, (), first_order=True
    )


def pebble_iterated_reverse(spec: IterRev) -> PebbleTransducer:
    """A one-pebble two-way sweep: find each block's end, walk back emitting,
    walk forward again and emit the separator."""
    sigma, sep = spec.alphabet, spec.separator
    letters = [a for a in sigma if a != sep]
    states = ["find", "atsep", "rev.s", "rev.e", "fwd", "emitsep", "done"]
    outputs = {"emitsep": (sep,)}
    rules = [
        rule("find", "atsep", STAY, sep),
        rule("find", "rev.e", STAY, guard=at_last()),
        rule("find", "find", MOVE_RIGHT),
        rule("atsep", "emitsep", STAY, guard=at_first()),
        rule("atsep", "rev.s", MOVE_LEFT),
        rule("rev.s", "fwd", MOVE_RIGHT, sep),
        rule("rev.e", "done", STAY, sep),
        rule("fwd", "emitsep", STAY, sep),
        rule("fwd", "fwd", MOVE_RIGHT),
        rule("emitsep", "done", STAY, guard=at_last()),
        rule("emitsep", "find", MOVE_RIGHT),
    ]
    for i, a in enumerate(letters):
        for mode, after in (("s", "fwd"), ("e", "done")):
            o = f"o.{mode}{i}"
            states.append(o)
            outputs[o] = (a,)
            rules.append(rule(f"rev.{mode}", o, STAY, a))
            rules.append(rule(o, after, STAY, guard=at_first()))
            rules.append(rule(o, f"rev.{mode}", MOVE_LEFT))
    return PebbleTransducer(sigma, sigma, 1, tuple(states), "find", "done", tuple(rules), outputs, (), first_order=True)


def pebble_running_example(alphabet: Iterable[str] = ("a", "b"), sep: str = "|") -> PebbleTransducer:
    """Pebble 1 visits each position x; pebble 2 walks from x back to the
    first position emitting letters, then a separator is emitted."""
    sigma = Alphabet(tuple(alphabet))
    out = sigma.union([sep])
    states = ["push", "copy", "pop", "bar", "done"]
    outputs = {"bar": (sep,)}
    rules = [rule("push", "copy", PUSH)]
    for i, a in enumerate(sigma):
        o = f"out{i}"
        states.append(o)
        outputs[o] = (a,)
        rules.append(rule("copy", o, STAY, a))
        rules.append(rule(o, "pop", STAY, guard=at_first(2)))
        rules.append(rule(o, "copy", MOVE_LEFT))
    rules += [
        rule("pop", "bar", POP),
        rule("bar", "done", STAY, guard=at_last(1)),
        rule("bar", "push", MOVE_RIGHT),
    ]
    return PebbleTransducer(sigma, out, 2, tuple(states), "push", "done", tuple(rules), outputs, (), first_order=True)


# ---------------------------------------------------------------------------
# crossing types of one-pebble (two-way) automata
# ---------------------------------------------------------------------------

LEFT, RIGHT = "left", "right"
ACCEPT, REJECT = "accept", "reject"


@dataclass(frozen=True)
class CrossingType:
    """``behavior[(state, side)]`` is ACCEPT, REJECT or ``(state, side)`` of exit."""

    behavior: tuple  # sorted tuple of ((state, side), outcome)
    marks: frozenset

    def outcome(self, state: str, side: str):
        return dict(self.behavior)[state, side]

    def as_dict(self) -> dict:
        return dict(self.behavior)


def _require_two_way(t: PebbleTransducer) -> None:
    if t.k != 1:
        raise ValidationError("crossing types are defined for one-pebble automata")


def crossing_type(t: PebbleTransducer, partial: Sequence[str] | str, marks: Iterable[str] = ()) -> CrossingType:
    _require_two_way(t)
    word = as_word(partial, t.input_alphabet)
    if not word:
        raise ValidationError("crossing types need a non-empty partial input")
    marks = frozenset(marks)
    if not marks <= {FIRST, LAST}:
        raise ValidationError(f"unknown marks {set(marks) - {FIRST, LAST}}")
    m = len(word)
    # an unmarked end lies strictly outside the partial word
    first = 0 if FIRST in marks else -1
    last = m - 1 if LAST in marks else m
    behavior = []
    for q in t.states:
        for side in (LEFT, RIGHT):
            behavior.append(((q, side), _cross(t, word, q, 0 if side == LEFT else m - 1, first, last, marks)))
    return CrossingType(tuple(sorted(behavior, key=_key)), marks)


def _cross(t, word, state, pos, first, last, marks):
    m = len(word)
    seen = set()
    while True:
        if state == t.final:
            return ACCEPT
        if (state, pos) in seen:
            return REJECT
        seen.add((state, pos))
        letter = word[pos]
        stack = (pos,)
        for r in t._by_state[state]:
            if (r.letters is None or letter in r.letters) and r.guard.holds(stack, first, last):
                break
        else:
            return REJECT
        if r.action in (PUSH, POP):
            return REJECT
        pos += _OFFSET[r.action]
        state = r.target
        if pos < 0:
            return REJECT if FIRST in marks else (state, LEFT)
        if pos >= m:
            return REJECT if LAST in marks else (state, RIGHT)


def crossing_compose(a: CrossingType, b: CrossingType) -> CrossingType:
    """Crossing type of the concatenation, by bouncing between the parts."""
    if LAST in a.marks or FIRST in b.marks:
        raise ValidationError("cannot concatenate: left part ends the word or right part starts it")
    da, db = a.as_dict(), b.as_dict()
    states = sorted({q for q, _ in da})
    limit = 2 * len(states) * 2
    behavior = []
    for q, side in sorted(da):
        part, entry = (da, (q, LEFT)) if side == LEFT else (db, (q, RIGHT))
        result = REJECT
        for _ in range(limit + 1):
            out = part[entry]
            if out in (ACCEPT, REJECT):
                result = out
                break
            r, exit_side = out
            if part is da:
                if exit_side == LEFT:
                    result = (r, LEFT)
                    break
                part, entry = db, (r, LEFT)
            else:
                if exit_side == RIGHT:
                    result = (r, RIGHT)
                    break
                part, entry = da, (r, RIGHT)
        behavior.append(((q, side), result))
    return CrossingType(tuple(sorted(behavior, key=_key)), (a.marks & {FIRST}) | (b.marks & {LAST}))


def _key(item):
    (q, side), _ = item
    return (q, side)


@dataclass(frozen=True)
class CrossingSemigroup:
    monoid: FiniteMonoid
    hom: LetterHom
    elements: tuple  # index 0 is the adjoined identity (None)


def crossing_semigroup(t: PebbleTransducer, cap: int = 2000) -> tuple[FiniteMonoid, LetterHom]:
    return crossing_semigroup_full(t, cap)[:2]


def crossing_semigroup_full(t: PebbleTransducer, cap: int = 2000) -> tuple[FiniteMonoid, LetterHom, tuple]:
    """Closure of the single-letter (unmarked) crossing types, plus identity."""
    _require_two_way(t)
    gens = [_normal(crossing_type(t, (a,))) for a in t.input_alphabet]
    elements: list = [None]
    index: dict = {None: 0}
    for g in gens:
        if g not in index:
            index[g] = len(elements)
            elements.append(g)
    i = 1
    while i < len(elements):
        x = elements[i]
        for g in gens:
            y = _normal(crossing_compose(x, g))
            if y not in index:
                if len(elements) > cap:
                    raise CapExceeded(f"crossing semigroup exceeds {cap} elements")
                index[y] = len(elements)
                elements.append(y)
        i += 1
    size = len(elements)
    table = [[0] * size for _ in range(size)]
    for x in range(size):
        for y in range(size):
            if x == 0:
                table[x][y] = y
            elif y == 0:
                table[x][y] = x
            else:
                table[x][y] = index[_normal(crossing_compose(elements[x], elements[y]))]
    import numpy as np

    monoid = FiniteMonoid(np.array(table, dtype=np.int32), 0)
    image = tuple(index[g] for g in gens)
    hom = LetterHom(t.input_alphabet, monoid, image)
    return monoid, hom, tuple(elements)


def _normal(c: CrossingType) -> CrossingType:
    return CrossingType(tuple(sorted(c.behavior, key=_key)), c.marks)


# ---------------------------------------------------------------------------
# .peb text format
# ---------------------------------------------------------------------------

_HEADER = re.compile(r"^([a-z-]+)\s*:\s*(.*)$")
_OUT = re.compile(r'^out\s+(\S+)\s*->\s*(".*")$')
_RULE = re.compile(
    r"^(?P<src>\S+)\s*(?:\[(?P<letters>[^\]]*)\])?\s*(?:when\s+(?P<guard>.*?))?\s*->\s*"
    r"(?P<dst>\S+)\s+(?P<act>move\s+[-+]?[01]|push|pop)$"
)


def parse_peb(text: str) -> PebbleTransducer:
    header: dict[str, str] = {}
    outs: dict[str, str] = {}
    raw_rules = []
    for no, line in iter_lines(text):
        m = _HEADER.match(line)
        if m:
            header[m.group(1)] = m.group(2).strip()
            continue
        m = _OUT.match(line)
        if m:
            outs[m.group(1)] = unquote(m.group(2))
            continue
        m = _RULE.match(line)
        if m:
            raw_rules.append((no, m))
            continue
        raise ParseError(f"cannot parse {line!r}", no)
    for key in ("alphabet", "pebbles", "states", "initial", "final"):
        if key not in header:
            raise ParseError(f"missing '{key}:' header")
    try:
        sigma = Alphabet(tuple(header["alphabet"].split()))
        if "output-alphabet" in header:
            gamma = Alphabet(tuple(header["output-alphabet"].split()))
        else:
            letters: dict[str, None] = {}
            for w in [*outs.values(), unquote(header.get("empty-output", '""'))]:
                letters.update(dict.fromkeys(tokenize(w)))
            gamma = Alphabet(tuple(letters) or sigma.letters)
        rules = []
        for no, m in raw_rules:
            letters = m.group("letters")
            guard = parse_guard(m.group("guard")) if m.group("guard") else TRUE
            act = m.group("act")
            if act.startswith("move"):
                d = int(act.split()[1])
                act = {-1: MOVE_LEFT, 0: STAY, 1: MOVE_RIGHT}[d]
            rules.append(
                GuardedRule(
                    m.group("src"),
                    None if letters is None else frozenset(letters.split()),
                    guard,
                    m.group("dst"),
                    act,
                )
            )
        fo = header.get("first-order")
        return PebbleTransducer(
            sigma,
            gamma,
            int(header["pebbles"]),
            tuple(header["states"].split()),
            header["initial"],
            header["final"],
            tuple(rules),
            {q: tokenize(w, gamma) for q, w in outs.items()},
            tokenize(unquote(header.get("empty-output", '""')), gamma),
            first_order=None if fo is None else fo == "yes",
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_peb(t: PebbleTransducer) -> str:
    lines = [
        f"alphabet: {' '.join(t.input_alphabet)}",
        f"output-alphabet: {' '.join(t.output_alphabet)}",
        f"pebbles: {t.k}",
        f"states: {' '.join(t.states)}",
        f"initial: {t.initial}",
        f"final: {t.final}",
        f"empty-output: {quote_word(t.empty_output)}",
    ]
    if t.first_order is not None:
        lines.append(f"first-order: {'yes' if t.first_order else 'no'}")
    for q in t.states:
        if t.outputs[q]:
            lines.append(f"out {q} -> {quote_word(t.outputs[q])}")
    for r in t.rules:
        parts = [r.source]
        if r.letters is not None:
            parts.append("[" + " ".join(a for a in t.input_alphabet if a in r.letters) + "]")
        if not isinstance(r.guard, TrueGuard):
            parts.append(f"when {r.guard}")
        parts.append(f"-> {r.target} {r.action}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
