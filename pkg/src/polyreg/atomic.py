"""The atomic polyregular functions: sequential transducers, squaring and
iterated reverse.

All three are *stages*: they expose ``input_alphabet``, ``output_alphabet``,
``eval`` on symbol tuples and ``eval_codes`` on integer-coded numpy arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .core import (
    Alphabet,
    Dfa,
    Word,
    as_word,
    iter_lines,
    parse_dfa_lines,
    quote_word,
    tokenize,
    underline,
    unquote,
)
from .errors import ParseError, ValidationError


class Stage:
    """Common interface of atomic pipeline stages."""

    input_alphabet: Alphabet
    output_alphabet: Alphabet

    def eval_codes(self, codes: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def eval(self, word: Sequence[str] | str) -> Word:
        word = as_word(word, self.input_alphabet)
        codes = self.input_alphabet.encode(word)
        return self.output_alphabet.decode(self.eval_codes(codes))

    __call__ = eval

    def is_first_order(self) -> bool:
        return True


# ---------------------------------------------------------------------------
# Sequential transducers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SequentialTransducer(Stage):
    input_alphabet: Alphabet
    output_alphabet: Alphabet
    dfa: Dfa
    outputs: tuple  # outputs[q][a] -> Word
    end: tuple  # end[q] -> Word
    _tables: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.dfa.alphabet != self.input_alphabet:
            raise ValidationError("automaton alphabet differs from input alphabet")
        n, k = self.dfa.n_states, len(self.input_alphabet)
        outputs = tuple(tuple(tuple(w) for w in row) for row in self.outputs)
        end = tuple(tuple(w) for w in self.end)
        if len(outputs) != n or any(len(row) != k for row in outputs) or len(end) != n:
            raise ValidationError("transition outputs and end words must be total")
        for row in outputs:
            for w in row:
                self.output_alphabet.check(w)
        for w in end:
            self.output_alphabet.check(w)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "end", end)
        object.__setattr__(self, "_tables", self._compile())

    @classmethod
    def build(
        cls,
        input_alphabet: Alphabet | Sequence[str],
        output_alphabet: Alphabet | Sequence[str],
        states: Sequence[str],
        initial: str,
        transitions: Mapping[tuple[str, str], tuple[str, Sequence[str] | str]],
        end: Mapping[str, Sequence[str] | str] | None = None,
    ) -> "SequentialTransducer":
        """``transitions[q, a] = (target, output)``; missing end words are empty."""
        inp = input_alphabet if isinstance(input_alphabet, Alphabet) else Alphabet(tuple(input_alphabet))
        out = output_alphabet if isinstance(output_alphabet, Alphabet) else Alphabet(tuple(output_alphabet))
        end = end or {}
        dfa = Dfa.build(inp, states, initial, states, {k: v[0] for k, v in transitions.items()})
        sidx = {s: i for i, s in enumerate(states)}
        order = sorted(states, key=sidx.get)
        outputs = tuple(tuple(as_word(transitions[q, a][1], out) for a in inp) for q in order)
        ends = tuple(as_word(end.get(q, ()), out) for q in order)
        return cls(inp, out, dfa, outputs, ends)

    def _compile(self):
        out_idx = self.output_alphabet
        n, k = self.dfa.n_states, len(self.input_alphabet)
        flat: list[int] = []
        start = np.zeros((n, k), dtype=np.int64)
        length = np.zeros((n, k), dtype=np.int64)
        for q in range(n):
            for a in range(k):
                w = self.outputs[q][a]
                start[q, a] = len(flat)
                length[q, a] = len(w)
                flat.extend(out_idx.index(s) for s in w)
        end_flat: list[int] = []
        end_start = np.zeros(n, dtype=np.int64)
        end_len = np.zeros(n, dtype=np.int64)
        for q in range(n):
            end_start[q] = len(end_flat)
            end_len[q] = len(self.end[q])
            end_flat.extend(out_idx.index(s) for s in self.end[q])
        dtype = out_idx.dtype
        return (
            np.ascontiguousarray(self.dfa.delta),
            np.array(flat, dtype=dtype),
            start,
            length,
            np.array(end_flat, dtype=dtype),
            end_start,
            end_len,
        )

    @property
    def n_states(self) -> int:
        return self.dfa.n_states

    def eval_codes(self, codes: np.ndarray) -> np.ndarray:
        if self._copies_codes:
            return codes.astype(self.output_alphabet.dtype, copy=False)
        return _kernels.seq_eval(self._tables, self.dfa.initial, codes, self.output_alphabet.dtype)

    @property
    def _copies_codes(self) -> bool:
        """One state, every letter rewritten to the symbol with the same code."""
        cached = self.__dict__.get("_copy_flag")
        if cached is None:
            cached = (
                self.dfa.n_states == 1
                and not self.end[0]
                and all(
                    len(w) == 1 and self.output_alphabet.index(w[0]) == i
                    for i, w in enumerate(self.outputs[0])
                )
            )
            object.__setattr__(self, "_copy_flag", cached)
        return cached

    def run_from(self, q: int, word: Sequence[str]) -> tuple[Word, int]:
        """Transition outputs on ``word`` from state ``q`` (no end word) and the reached state."""
        out: list[str] = []
        for a in word:
            i = self.input_alphabet.index(a)
            out.extend(self.outputs[q][i])
            q = int(self.dfa.delta[q, i])
        return tuple(out), q

    def eval_reference(self, word: Sequence[str]) -> Word:
        """Straightforward per-symbol evaluation, used as a test oracle."""
        out, q = self.run_from(self.dfa.initial, word)
        return out + self.end[q]

    def is_counter_free(self) -> bool:
        from .core import transition_monoid

        return transition_monoid(self.dfa)[0].is_aperiodic()

    def is_first_order(self) -> bool:
        return self.is_counter_free()


def seq_eval(t: SequentialTransducer, w: Sequence[str] | str) -> Word:
    return t.eval(w)


def seq_is_counter_free(t: SequentialTransducer) -> bool:
    return t.is_counter_free()


def identity_transducer(alphabet: Alphabet) -> SequentialTransducer:
    return letter_map(alphabet, alphabet, {a: (a,) for a in alphabet})


def letter_map(
    input_alphabet: Alphabet,
    output_alphabet: Alphabet,
    mapping: Mapping[str, Sequence[str] | str],
    end: Sequence[str] = (),
) -> SequentialTransducer:
    """One-state transducer replacing each letter by a word."""
    trans = {("s", a): ("s", as_word(mapping[a], output_alphabet)) for a in input_alphabet}
    return SequentialTransducer.build(input_alphabet, output_alphabet, ["s"], "s", trans, {"s": as_word(end, output_alphabet)})


def seq_from_step(
    input_alphabet: Alphabet,
    output_alphabet: Alphabet,
    initial,
    step,
    end=None,
) -> SequentialTransducer:
    """Build a transducer from ``step(state, letter) -> (state, word)``.

    States are arbitrary hashable values; only those reachable from
    ``initial`` are materialised.  ``end(state)`` gives end-of-input words.
    """
    index = {initial: 0}
    states = [initial]
    rows = []
    i = 0
    while i < len(states):
        q = states[i]
        row = []
        for a in input_alphabet:
            r, w = step(q, a)
            if r not in index:
                index[r] = len(states)
                states.append(r)
            row.append((index[r], as_word(w, output_alphabet)))
        rows.append(row)
        i += 1
    delta = np.array([[r for r, _ in row] for row in rows], dtype=np.int32).reshape(len(states), len(input_alphabet))
    names = tuple(f"s{i}" for i in range(len(states)))
    dfa = Dfa(input_alphabet, delta, 0, frozenset(range(len(states))), names)
    outputs = tuple(tuple(w for _, w in row) for row in rows)
    ends = tuple(as_word(end(q), output_alphabet) if end else () for q in states)
    return SequentialTransducer(input_alphabet, output_alphabet, dfa, outputs, ends)


def append_letter(alphabet: Alphabet, symbol: str) -> SequentialTransducer:
    """Identity followed by one extra symbol at the end."""
    out = alphabet.union([symbol])
    return letter_map(alphabet, out, {a: (a,) for a in alphabet}, end=(symbol,))


# ---------------------------------------------------------------------------
# Squaring and iterated reverse
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Squaring(Stage):
    """For each position x, a copy of the input with x underlined."""

    alphabet: Alphabet

    def __post_init__(self):
        # output = plain letters then underlined copies, so code(_a) = code(a) + |alphabet|
        object.__setattr__(self, "_out", self.alphabet.underlined())

    @property
    def input_alphabet(self) -> Alphabet:
        return self.alphabet

    @property
    def output_alphabet(self) -> Alphabet:
        return self._out

    def eval_codes(self, codes: np.ndarray) -> np.ndarray:
        return _kernels.squaring(codes, len(self.alphabet), self._out.dtype)

    def eval_reference(self, word: Sequence[str]) -> Word:
        word = tuple(word)
        out: list[str] = []
        for x in range(len(word)):
            out.extend(underline(a) if i == x else a for i, a in enumerate(word))
        return tuple(out)


@dataclass(frozen=True, eq=False)
class IterRev(Stage):
    """Reverse every maximal separator-free block, keeping separators in place."""

    alphabet: Alphabet
    separator: str

    def __post_init__(self):
        if self.separator not in self.alphabet:
            raise ValidationError(f"separator {self.separator!r} not in alphabet")

    @property
    def input_alphabet(self) -> Alphabet:
        return self.alphabet

    @property
    def output_alphabet(self) -> Alphabet:
        return self.alphabet

    def eval_codes(self, codes: np.ndarray) -> np.ndarray:
        return _kernels.iterated_reverse(codes, self.alphabet.index(self.separator))

    def eval_reference(self, word: Sequence[str]) -> Word:
        out: list[str] = []
        block: list[str] = []
        for a in word:
            if a == self.separator:
                out.extend(reversed(block))
                out.append(a)
                block = []
            else:
                block.append(a)
        out.extend(reversed(block))
        return tuple(out)


SquaringSpec = Squaring
IterRevSpec = IterRev


def squaring_eval(s: Squaring, w: Sequence[str] | str) -> Word:
    return s.eval(w)


def iterated_reverse_eval(s: IterRev, w: Sequence[str] | str) -> Word:
    return s.eval(w)


def squaring_of(word: Sequence[str] | str) -> Word:
    """Squaring over the alphabet of the word itself (convenience)."""
    w = tokenize(word) if isinstance(word, str) else tuple(word)
    if not w:
        return ()
    return Squaring(Alphabet(tuple(dict.fromkeys(w)))).eval(w)


# ---------------------------------------------------------------------------
# .seq text format
# ---------------------------------------------------------------------------

_OUT = re.compile(r'^out\s+(\S+)\s+(\S+)\s*->\s*(".*")$')
_END = re.compile(r'^end\s+(\S+)\s*->\s*(".*")$')
_OUTPUT_ALPHA = re.compile(r"^output-alphabet\s*:\s*(.*)$")


def parse_seq(text: str) -> SequentialTransducer:
    outs: dict[tuple[str, str], str] = {}
    ends: dict[str, str] = {}
    output_letters: list[str] | None = None

    def extra(no: int, line: str) -> bool:
        nonlocal output_letters
        m = _OUT.match(line)
        if m:
            outs[m.group(1), m.group(2)] = unquote(m.group(3))
            return True
        m = _END.match(line)
        if m:
            ends[m.group(1)] = unquote(m.group(2))
            return True
        m = _OUTPUT_ALPHA.match(line)
        if m:
            output_letters = m.group(1).split()
            return True
        return False

    lines = list(iter_lines(text))
    # the automaton part treats every state as accepting
    dfa = parse_dfa_lines(lines, extra)
    dfa = Dfa(dfa.alphabet, dfa.delta, dfa.initial, frozenset(range(dfa.n_states)), dfa.names)
    words = [*outs.values(), *ends.values()]
    if output_letters is None:
        letters: dict[str, None] = {}
        for w in words:
            letters.update(dict.fromkeys(tokenize(w)))
        output_letters = list(letters) or list(dfa.alphabet)
    try:
        out_alpha = Alphabet(tuple(output_letters))
        sidx = {s: i for i, s in enumerate(dfa.names)}
        for (q, a) in outs:
            if q not in sidx or a not in dfa.alphabet:
                raise ParseError(f"output line for unknown transition ({q}, {a})")
        for q in ends:
            if q not in sidx:
                raise ParseError(f"end line for unknown state {q}")
        outputs = tuple(
            tuple(tokenize(outs.get((q, a), ""), out_alpha) for a in dfa.alphabet) for q in dfa.names
        )
        end = tuple(tokenize(ends.get(q, ""), out_alpha) for q in dfa.names)
        return SequentialTransducer(dfa.alphabet, out_alpha, dfa, outputs, end)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def format_seq(t: SequentialTransducer) -> str:
    d = t.dfa
    lines = [
        f"alphabet: {' '.join(t.input_alphabet)}",
        f"output-alphabet: {' '.join(t.output_alphabet)}",
        f"states: {' '.join(d.names)}",
        f"initial: {d.names[d.initial]}",
    ]
    for q in range(d.n_states):
        for i, a in enumerate(t.input_alphabet):
            lines.append(f"{d.names[q]} {a} -> {d.names[d.delta[q, i]]}")
    for q in range(d.n_states):
        for i, a in enumerate(t.input_alphabet):
            if t.outputs[q][i]:
                lines.append(f"out {d.names[q]} {a} -> {quote_word(t.outputs[q][i])}")
    for q in range(d.n_states):
        if t.end[q]:
            lines.append(f"end {d.names[q]} -> {quote_word(t.end[q])}")
    return "\n".join(lines) + "\n"
