"""Compilation of for-programs: prenex normal form, translation to pebble
transducers, and composition.

A prenex program is a fixed nest of full-range loops (one per *slot*) whose
innermost body, the kernel, is a list of loop-free guarded statements.  Any
for-program can be brought into this shape:

1. every variable gets a unique name;
2. loops with variable bounds become full-range loops whose body is guarded
   by the bounds (two loops, one per direction, when both bounds are
   variables);
3. ``if`` statements containing loops push their condition into both
   branches (booleans in the condition are snapshotted first);
4. loop-free statements move into the first or last iteration of an
   adjacent loop;
5. each block splits into phases: maximal loop-free runs and single loops;
6. for each nesting depth ``d`` there are ``ceil(log2 phases)`` *pattern*
   slots, whose value (first or last) selects the phase, followed by a
   slot per loop direction used at that depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .core import Alphabet, Word
from .errors import AlphabetMismatch, ValidationError
from .forlang import (
    FIRST,
    LAST,
    BoolDecl,
    BoolRef,
    BoolSet,
    CAnd,
    CConst,
    Cmp,
    CNot,
    COr,
    Cond,
    For,
    ForProgram,
    If,
    Label,
    Output,
    compile_program,
    conj,
    cond_bools,
    disj,
    forp_eval,
    forp_eval_reference,
    forp_is_first_order,
    has_loop,
    map_cond,
    neg,
    walk,
    _input_word,
)
from .pebble import (
    MOVE_LEFT,
    MOVE_RIGHT,
    POP,
    PUSH,
    STAY,
    TRUE,
    And,
    Le,
    Not,
    PebbleTransducer,
    at_first,
    at_last,
    rule,
)

PLUS, MINUS = "+", "-"


def _bounds(direction: str) -> tuple[str, str]:
    return (FIRST, LAST) if direction == PLUS else (LAST, FIRST)


def _flip(direction: str) -> str:
    return MINUS if direction == PLUS else PLUS


@dataclass(frozen=True, eq=False)
class PrenexProgram:
    loops: tuple  # (slot name, direction)
    decls: tuple  # decls[0] top level, decls[i] inside slot loop i
    kernel: tuple
    empty_output: Word
    input_alphabet: Alphabet | None
    output_alphabet: Alphabet | None
    _program: list = field(default_factory=list, repr=False)

    @property
    def k(self) -> int:
        return len(self.loops)

    def to_program(self) -> ForProgram:
        if self._program:
            return self._program[0]
        guard = "nonempty"
        kernel = list(self.kernel)
        if self.empty_output:
            kernel.insert(0, BoolSet(guard, True))
        body: list = kernel
        for i in range(self.k, 0, -1):
            name, d = self.loops[i - 1]
            body = [For(name, *_bounds(d), tuple([BoolDecl(b) for b in self.decls[i]] + body))]
        top = [BoolDecl(b) for b in self.decls[0]]
        if self.empty_output:
            top.append(BoolDecl(guard))
            body = body + [If(CNot(BoolRef(guard)), (Output(self.empty_output),))]
        p = ForProgram(tuple(top + body), self.input_alphabet, self.output_alphabet)
        self._program.append(p)
        return p

    def eval(self, word) -> Word:
        p = self.to_program()
        return compile_program(p)(_input_word(p, word))

    __call__ = eval

    def is_first_order(self) -> bool:
        return forp_is_first_order(self)


# ---------------------------------------------------------------------------
# step 1: unique names
# ---------------------------------------------------------------------------


class _Fresh:
    def __init__(self):
        self.n = 0

    def __call__(self, base: str) -> str:
        self.n += 1
        return f"{base.split('_')[0]}_{self.n}"


def _rename_cond(c: Cond, pmap: dict, bmap: dict) -> Cond:
    def atom(a):
        if isinstance(a, Cmp):
            return Cmp(a.op, pmap.get(a.a, a.a), pmap.get(a.b, a.b))
        if isinstance(a, Label):
            return Label(a.letter, pmap.get(a.var, a.var))
        if isinstance(a, BoolRef):
            return BoolRef(bmap.get(a.name, a.name))
        return a

    return map_cond(c, atom)


def _alpha(stmts, pmap: dict, bmap: dict, fresh: _Fresh) -> tuple:
    bmap = dict(bmap)
    out = []
    for s in stmts:
        if isinstance(s, For):
            new = fresh(s.var)
            out.append(
                For(new, pmap.get(s.lo, s.lo), pmap.get(s.hi, s.hi), _alpha(s.body, {**pmap, s.var: new}, bmap, fresh))
            )
        elif isinstance(s, If):
            out.append(If(_rename_cond(s.cond, pmap, bmap), _alpha(s.then, pmap, bmap, fresh), _alpha(s.els, pmap, bmap, fresh)))
        elif isinstance(s, BoolDecl):
            bmap[s.name] = fresh(s.name)
            out.append(BoolDecl(bmap[s.name]))
        elif isinstance(s, BoolSet):
            out.append(BoolSet(bmap.get(s.name, s.name), s.value))
        else:
            out.append(s)
    return tuple(out)


# ---------------------------------------------------------------------------
# step 2: full-range loops
# ---------------------------------------------------------------------------


def _le(a: str, b: str) -> Cond:
    if a == FIRST or b == LAST:
        return CConst(True)
    return Cmp("<=", a, b)


def _full_range(stmts, fresh: _Fresh) -> tuple:
    out = []
    for s in stmts:
        if isinstance(s, For):
            v, lo, hi = s.var, s.lo, s.hi
            body = _full_range(s.body, fresh)
            if (lo, hi) in ((FIRST, LAST), (LAST, FIRST)):
                out.append(For(v, lo, hi, body))
            elif lo == FIRST or hi == LAST:
                g = conj(_le(lo, v), _le(v, hi))
                out.append(For(v, FIRST, LAST, _guarded(g, body)))
            elif lo == LAST or hi == FIRST:
                g = conj(_le(hi, v), _le(v, lo))
                out.append(For(v, LAST, FIRST, _guarded(g, body)))
            else:
                up = conj(Cmp("<=", lo, hi), Cmp("<=", lo, v), Cmp("<=", v, hi))
                down = conj(Cmp("<", hi, lo), Cmp("<=", hi, v), Cmp("<=", v, lo))
                out.append(For(v, FIRST, LAST, _guarded(up, body)))
                v2 = fresh(v)
                copy = _alpha(body, {v: v2}, {}, fresh)
                out.append(For(v2, LAST, FIRST, _guarded(_rename_cond(down, {v: v2}, {}), copy)))
        elif isinstance(s, If):
            out.append(If(s.cond, _full_range(s.then, fresh), _full_range(s.els, fresh)))
        else:
            out.append(s)
    return tuple(out)


def _guarded(g: Cond, body: tuple) -> tuple:
    if isinstance(g, CConst) and g.value:
        return body
    return (If(g, body),)


# ---------------------------------------------------------------------------
# step 3: no loops under conditionals
# ---------------------------------------------------------------------------


def _hoist(stmts) -> tuple[list, tuple]:
    """Split off every declaration nested in loop-free conditionals."""
    decls, rest = [], []
    for s in stmts:
        if isinstance(s, BoolDecl):
            decls.append(s)
        elif isinstance(s, If):
            d1, t = _hoist(s.then)
            d2, e = _hoist(s.els)
            decls += d1 + d2
            rest.append(If(s.cond, t, e))
        else:
            rest.append(s)
    return decls, tuple(rest)


def _normalize(stmts, fresh: _Fresh) -> tuple:
    out: list = []
    for s in stmts:
        if isinstance(s, For):
            out.append(For(s.var, s.lo, s.hi, _normalize(s.body, fresh)))
        elif isinstance(s, If) and (has_loop(s.then) or has_loop(s.els)):
            if cond_bools(s.cond):
                t, f = fresh("then"), fresh("else")
                out += [BoolDecl(t), BoolDecl(f), If(s.cond, (BoolSet(t, True),), (BoolSet(f, True),))]
                g1, g2 = BoolRef(t), BoolRef(f)
            else:
                g1, g2 = s.cond, neg(s.cond)
            out += _push(g1, _normalize(s.then, fresh))
            out += _push(g2, _normalize(s.els, fresh))
        elif isinstance(s, If):
            decls, rest = _hoist([s])
            out += decls + list(rest)
        else:
            out.append(s)
    return tuple(out)


def _push(g: Cond, stmts) -> list:
    if isinstance(g, CConst) and not g.value:
        return [s for s in stmts if isinstance(s, BoolDecl)]
    out: list = []
    run: list = []

    def flush():
        if run:
            out.extend(_guarded(g, tuple(run)))
            run.clear()

    for s in stmts:
        if isinstance(s, BoolDecl):
            out.append(s)
        elif isinstance(s, For):
            flush()
            out.append(For(s.var, s.lo, s.hi, tuple(_push(g, s.body))))
        else:
            run.append(s)
    flush()
    return out


# ---------------------------------------------------------------------------
# step 4: fold loop-free runs into neighbouring loops
# ---------------------------------------------------------------------------


def _absorb(block) -> tuple:
    """Move loop-free statements into the first iteration of the next loop,
    or the last iteration of the previous one.

    After steps 2 and 3 every loop is full-range, and the kernel only runs
    on non-empty words, so each loop has a first and a last iteration.
    Fewer phases mean fewer pattern slots, hence shallower loop nests.
    """
    decls, items, pending = [], [], []
    for s in block:
        if isinstance(s, BoolDecl):
            decls.append(s)
        elif isinstance(s, For):
            body = s.body
            if pending:
                body = (If(Cmp("=", s.var, s.lo), tuple(pending)),) + body
                pending = []
            items.append(For(s.var, s.lo, s.hi, _absorb(body)))
        else:
            pending.append(s)
    if pending and items:
        last = items[-1]
        tail = (If(Cmp("=", last.var, last.hi), tuple(pending)),)
        items[-1] = For(last.var, last.lo, last.hi, _absorb(last.body + tail))
    elif pending:
        items = pending
    return tuple(decls + items)


# ---------------------------------------------------------------------------
# step 5: phases and slots
# ---------------------------------------------------------------------------


def _phases(block) -> tuple[list[str], list]:
    decls, phases = [], []
    for s in block:
        if isinstance(s, BoolDecl):
            decls.append(s.name)
        elif isinstance(s, For):
            phases.append(s)
        else:
            if not phases or isinstance(phases[-1], For):
                phases.append([])
            phases[-1].append(s)
    return decls, phases


def _survey(block, depth: int, width: dict, dirs: dict) -> None:
    _, phases = _phases(block)
    width[depth] = max(width.get(depth, 1), len(phases))
    dirs.setdefault(depth, set())
    for ph in phases:
        if isinstance(ph, For):
            dirs[depth].add(PLUS if ph.lo == FIRST else MINUS)
            _survey(ph.body, depth + 1, width, dirs)


def forp_prenex(p: ForProgram | PrenexProgram) -> PrenexProgram:
    if isinstance(p, PrenexProgram):
        return p
    fresh = _Fresh()
    body = _absorb(_normalize(_full_range(_alpha(p.body, {}, {}, fresh), fresh), fresh))

    width: dict[int, int] = {}
    dirs: dict[int, set] = {}
    _survey(body, 0, width, dirs)
    slots: list[tuple[str, str]] = []
    pattern: dict[int, list[int]] = {}
    loop_slot: dict[tuple[int, str], int] = {}
    depth_start: dict[int, int] = {}
    for d in range(max(width) + 1):
        depth_start[d] = len(slots)
        bits = math.ceil(math.log2(width[d])) if width[d] > 1 else 0
        pattern[d] = []
        for _ in range(bits):
            pattern[d].append(len(slots))
            slots.append((f"s{len(slots)}", PLUS))
        for direction in (PLUS, MINUS):
            if direction in dirs.get(d, ()):
                loop_slot[(d, direction)] = len(slots)
                slots.append((f"s{len(slots)}", direction))
    decls: list[list[str]] = [[] for _ in range(len(slots) + 1)]
    kernel: list = []

    def emit(block, depth: int, guard: list, decl_level: int, vmap: dict) -> None:
        names, phases = _phases(block)
        decls[decl_level].extend(names)
        bits = pattern[depth]
        for j, ph in enumerate(phases):
            g = list(guard)
            for b, slot in enumerate(bits):
                bit = (j >> (len(bits) - 1 - b)) & 1
                g.append(Cmp("=", slots[slot][0], LAST if bit else FIRST))
            if isinstance(ph, For):
                direction = PLUS if ph.lo == FIRST else MINUS
                slot = loop_slot[(depth, direction)]
                other = loop_slot.get((depth, _flip(direction)))
                if other is not None:
                    g.append(Cmp("=", slots[other][0], FIRST))
                emit(ph.body, depth + 1, g, slot + 1, {**vmap, ph.var: slots[slot][0]})
            else:
                start = depth_start[depth] + len(bits)
                for i in range(start, len(slots)):
                    g.append(Cmp("=", slots[i][0], FIRST))
                run = _alpha(tuple(ph), vmap, {}, _Fresh())
                kernel.extend(_guarded(conj(*g), run))

    emit(body, 0, [], 0, {})
    if not slots:
        slots.append(("s0", PLUS))
        decls.append([])
        kernel = [If(Cmp("=", "s0", FIRST), tuple(kernel))] if kernel else []
    empty = forp_eval_reference(p, ())
    return PrenexProgram(
        tuple(slots),
        tuple(tuple(d) for d in decls),
        tuple(kernel),
        tuple(empty),
        p.input_alphabet,
        p.output_alphabet,
    )


# ---------------------------------------------------------------------------
# prenex program to pebble transducer
# ---------------------------------------------------------------------------

_DONE = -1


def _kernel_code(kernel) -> tuple[list, int]:
    code: list = []

    def emit(stmts, cont: int) -> int:
        pc = cont
        for s in reversed(stmts):
            if isinstance(s, Output):
                if s.word:
                    code.append(("out", s.word, pc))
                    pc = len(code) - 1
            elif isinstance(s, BoolSet):
                code.append(("set", s.name, s.value, pc))
                pc = len(code) - 1
            elif isinstance(s, If):
                t = emit(s.then, pc)
                e = emit(s.els, pc)
                code.append(("br", s.cond, t, e))
                pc = len(code) - 1
            else:  # pragma: no cover - prenex kernels hold nothing else
                raise ValidationError(f"unexpected kernel statement {s!r}")
        return pc

    start = emit(list(kernel), _DONE)
    return code, start


def _residual(c: Cond, slot_index: dict, labels: tuple, true_bools: frozenset):
    """Fold labels and booleans; what remains is a pebble guard (or a bool)."""
    if isinstance(c, CConst):
        return c.value
    if isinstance(c, Label):
        return labels[slot_index[c.var] - 1] == c.letter
    if isinstance(c, BoolRef):
        return c.name in true_bools
    if isinstance(c, Cmp):
        a = slot_index.get(c.a, c.a)
        b = slot_index.get(c.b, c.b)
        if a == b:
            return c.op != "<"
        if c.op == "<=":
            return Le(a, b)
        if c.op == "<":
            return Not(Le(b, a))
        return And((Le(a, b), Le(b, a)))
    if isinstance(c, CNot):
        r = _residual(c.a, slot_index, labels, true_bools)
        return (not r) if isinstance(r, bool) else Not(r)
    parts = [_residual(x, slot_index, labels, true_bools) for x in (c.a, c.b)]
    if isinstance(c, CAnd):
        if any(x is False for x in parts):
            return False
        rest = [x for x in parts if x is not True]
        return True if not rest else rest[0] if len(rest) == 1 else And(tuple(rest))
    if any(x is True for x in parts):
        return True
    rest = [x for x in parts if x is not False]
    from .pebble import Or

    return False if not rest else rest[0] if len(rest) == 1 else Or(tuple(rest))


def forp_to_pebble(p: ForProgram | PrenexProgram) -> PebbleTransducer:
    """Pebble ``i`` walks slot ``i``; the finite state remembers the labels
    under the placed pebbles and the boolean valuation."""
    P = forp_prenex(p)
    if P.input_alphabet is None or P.output_alphabet is None:
        raise ValidationError("compiling to a pebble transducer needs explicit alphabets")
    K = P.k
    dirs = [d for _, d in P.loops]
    slot_index = {name: i + 1 for i, (name, _) in enumerate(P.loops)}
    code, start = _kernel_code(P.kernel)
    sigma = P.input_alphabet

    names: dict = {}
    queue: list = []
    rules: list = []
    outputs: dict = {}

    def name(key) -> str:
        if key not in names:
            names[key] = "done" if key == ("done",) else f"s{len(names)}"
            queue.append(key)
        return names[key]

    def kernel_state(pc: int, labels, bools):
        while True:
            if pc == _DONE:
                return ("next", K, labels, bools)
            ins = code[pc]
            if ins[0] == "set":
                bools = bools | {ins[1]} if ins[2] else bools - {ins[1]}
                pc = ins[3]
            elif ins[0] == "br":
                r = _residual(ins[1], slot_index, labels, bools)
                if isinstance(r, bool):
                    pc = ins[2] if r else ins[3]
                else:
                    return ("br", pc, labels, bools)
            else:
                return ("out", pc, labels, bools)

    name(("done",))
    initial_key = ("arrive", 1, (), frozenset()) if dirs[0] == PLUS else ("seek", 1, (), frozenset())
    initial = name(initial_key)
    while queue:
        key = queue.pop(0)
        src = names[key]
        kind = key[0]
        if kind == "done":
            continue
        _, i_or_pc, labels, bools = key
        if kind == "seek":
            i = i_or_pc
            edge = at_first(i) if dirs[i - 1] == PLUS else at_last(i)
            rules.append(rule(src, name(("arrive", i, labels, bools)), STAY, guard=edge))
            rules.append(rule(src, src, MOVE_LEFT if dirs[i - 1] == PLUS else MOVE_RIGHT))
        elif kind == "arrive":
            i = i_or_pc
            reset = frozenset(P.decls[i])
            for a in sigma:
                lab = labels + (a,)
                b = bools - reset
                if i < K:
                    rules.append(rule(src, name(("seek", i + 1, lab, b)), PUSH, letters=a))
                else:
                    rules.append(rule(src, name(kernel_state(start, lab, b)), STAY, letters=a))
        elif kind == "next":
            i = i_or_pc
            end = at_last(i) if dirs[i - 1] == PLUS else at_first(i)
            if i == 1:
                rules.append(rule(src, name(("done",)), STAY, guard=end))
            else:
                rules.append(rule(src, name(("next", i - 1, labels[:-1], bools)), POP, guard=end))
            move = MOVE_RIGHT if dirs[i - 1] == PLUS else MOVE_LEFT
            rules.append(rule(src, name(("arrive", i, labels[:-1], bools)), move))
        elif kind == "out":
            ins = code[i_or_pc]
            outputs[src] = ins[1]
            rules.append(rule(src, name(kernel_state(ins[2], labels, bools)), STAY))
        elif kind == "br":
            ins = code[i_or_pc]
            g = _residual(ins[1], slot_index, labels, bools)
            rules.append(rule(src, name(kernel_state(ins[2], labels, bools)), STAY, guard=g))
            rules.append(rule(src, name(kernel_state(ins[3], labels, bools)), STAY))
    states = tuple(names[k] for k in names)
    return PebbleTransducer(
        sigma,
        P.output_alphabet,
        K,
        states,
        initial,
        "done",
        tuple(rules),
        outputs,
        P.empty_output,
        first_order=forp_is_first_order(P),
    )


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------


def _rename_stmts(stmts, pmap: dict, bmap: dict, on_output: Callable | None = None) -> tuple:
    out = []
    for s in stmts:
        if isinstance(s, Output) and on_output is not None:
            for letter in s.word:
                out.extend(on_output(letter))
        elif isinstance(s, If):
            out.append(
                If(_rename_cond(s.cond, pmap, bmap), _rename_stmts(s.then, pmap, bmap, on_output), _rename_stmts(s.els, pmap, bmap, on_output))
            )
        elif isinstance(s, BoolDecl):
            out.append(BoolDecl(bmap.get(s.name, s.name)))
        elif isinstance(s, BoolSet):
            out.append(BoolSet(bmap.get(s.name, s.name), s.value))
        elif isinstance(s, For):
            out.append(For(pmap.get(s.var, s.var), s.lo, s.hi, _rename_stmts(s.body, pmap, bmap, on_output)))
        else:
            out.append(s)
    return tuple(out)


def _occurrences(kernel) -> list[str]:
    letters: list[str] = []
    for s in walk(kernel):
        if isinstance(s, Output):
            letters.extend(s.word)
    return letters


def forp_compose(f, g) -> ForProgram:
    """A for-program computing ``g(f(w))``.

    A position of ``f(w)`` is a pair (tuple of f's slot values, index of the
    output statement occurrence in f's kernel).  Each loop of ``g`` becomes
    a nest over such tuples followed by a static unrolling over occurrences;
    a re-run of ``f`` decides which occurrences fire at the tuple and
    whether output happened before or after it.
    """
    F, G = forp_prenex(f), forp_prenex(g)
    if F.output_alphabet is None:
        raise ValidationError("the inner program needs an output alphabet")
    if G.input_alphabet is not None:
        missing = [a for a in F.output_alphabet if a not in G.input_alphabet]
        if missing:
            raise AlphabetMismatch(f"letters {missing} produced by the first program are not read by the second", 1)
    K, M = F.k, G.k
    occ = _occurrences(F.kernel)
    J = len(occ)
    fdirs = [d for _, d in F.loops]
    f_bools = [b for level in F.decls for b in level]
    g_level = {name: i + 1 for i, (name, _) in enumerate(G.loops)}

    def tau(i: int) -> list[str]:
        return [f"t{i}_{name}" for name, _ in F.loops]

    def sigma(i: int) -> list[str]:
        return [f"f{i}_{name}" for name, _ in F.loops]

    def lt_dir(a: str, b: str, d: str) -> Cond:
        return Cmp("<", a, b) if d == PLUS else Cmp("<", b, a)

    def eq_all(xs, ys) -> Cond:
        return conj(*(Cmp("=", x, y) for x, y in zip(xs, ys)))

    def prec(xs, ys) -> Cond:
        return disj(*(conj(eq_all(xs[:k], ys[:k]), lt_dir(xs[k], ys[k], fdirs[k])) for k in range(K)))

    def simulation(i: int, on_occurrence: Callable[[int, str], list]) -> list:
        pmap = dict(zip([n for n, _ in F.loops], sigma(i)))
        bmap = {b: f"f{i}_{b}" for b in f_bools}
        counter = iter(range(J))
        body = list(_rename_stmts(F.kernel, pmap, bmap, lambda letter: on_occurrence(next(counter), letter)))
        for lvl in range(K, 0, -1):
            name, d = F.loops[lvl - 1]
            inner = [BoolDecl(bmap[b]) for b in F.decls[lvl]] + body
            body = [For(pmap[name], *_bounds(d), tuple(inner))]
        return [BoolDecl(bmap[b]) for b in F.decls[0]] + body

    gb = {b: f"g_{b}" for level in G.decls for b in level}

    def is_first(a: int, j: int) -> Cond:
        return conj(neg(BoolRef(f"bef{a}")), *(neg(BoolRef(f"ex{a}_{jj}")) for jj in range(j)))

    def is_last(a: int, j: int) -> Cond:
        return conj(neg(BoolRef(f"aft{a}")), *(neg(BoolRef(f"ex{a}_{jj}")) for jj in range(j + 1, J)))

    def translate(c: Cond, js: dict) -> Cond:
        def atom(x):
            if isinstance(x, Label):
                return CConst(occ[js[g_level[x.var]]] == x.letter)
            if isinstance(x, BoolRef):
                return BoolRef(gb.get(x.name, x.name))
            if isinstance(x, Cmp):
                return compare(x.op, x.a, x.b, js)
            return x

        return map_cond(c, atom)

    def compare(op: str, u: str, v: str, js: dict) -> Cond:
        if u in g_level and v in g_level:
            a, b = g_level[u], g_level[v]
            if a == b:
                return CConst(op != "<")
            ta, tb = tau(a), tau(b)
            ja, jb = js[a], js[b]
            eq = eq_all(ta, tb) if ja == jb else CConst(False)
            lt = disj(prec(ta, tb), eq_all(ta, tb)) if ja < jb else prec(ta, tb)
            return {"<": lt, "<=": disj(lt, eq), "=": eq}[op]
        if u in g_level:
            a = g_level[u]
            j = js[a]
            if v == FIRST:
                return CConst(False) if op == "<" else is_first(a, j)
            return CConst(True) if op == "<=" else neg(is_last(a, j)) if op == "<" else is_last(a, j)
        a = g_level[v]
        j = js[a]
        if u == FIRST:
            return CConst(True) if op == "<=" else neg(is_first(a, j)) if op == "<" else is_first(a, j)
        return CConst(False) if op == "<" else is_last(a, j)

    def translate_stmts(stmts, js: dict) -> tuple:
        out = []
        for s in stmts:
            if isinstance(s, If):
                out.append(If(translate(s.cond, js), translate_stmts(s.then, js), translate_stmts(s.els, js)))
            elif isinstance(s, BoolSet):
                out.append(BoolSet(gb[s.name], s.value))
            elif isinstance(s, BoolDecl):
                out.append(BoolDecl(gb[s.name]))
            else:
                out.append(s)
        return tuple(out)

    def level(i: int, js: dict) -> list:
        gdir = G.loops[i - 1][1]
        ts = tau(i)

        def mark(j: int, letter: str) -> list:
            ss = sigma(i)
            return [
                If(
                    eq_all(ss, ts),
                    (BoolSet(f"ex{i}_{j}", True),),
                    (If(prec(ss, ts), (BoolSet(f"bef{i}", True),), (BoolSet(f"aft{i}", True),)),),
                )
            ]

        inner: list = [BoolDecl(f"ex{i}_{j}") for j in range(J)] + [BoolDecl(f"bef{i}"), BoolDecl(f"aft{i}")]
        inner += simulation(i, mark)
        order = range(J) if gdir == PLUS else range(J - 1, -1, -1)
        for j in order:
            sub = {**js, i: j}
            body = [BoolDecl(gb[b]) for b in G.decls[i]]
            body += level(i + 1, sub) if i < M else list(translate_stmts(G.kernel, sub))
            inner.append(If(BoolRef(f"ex{i}_{j}"), tuple(body)))
        stmts = inner
        for k in range(K - 1, -1, -1):
            d = fdirs[k] if gdir == PLUS else _flip(fdirs[k])
            stmts = [For(ts[k], *_bounds(d), tuple(stmts))]
        return stmts

    body: list = [BoolDecl("wne"), BoolDecl("fne")] + [BoolDecl(gb[b]) for b in G.decls[0]]
    body.append(For("w0", FIRST, LAST, (BoolSet("wne", True),)))
    body += simulation(0, lambda j, letter: [BoolSet("fne", True)])
    body += level(1, {})
    on_empty = G.eval(F.empty_output)
    if on_empty:
        body.append(If(CNot(BoolRef("wne")), (Output(on_empty),)))
    if G.empty_output:
        body.append(If(CAnd(BoolRef("wne"), CNot(BoolRef("fne"))), (Output(G.empty_output),)))
    return ForProgram(tuple(body), F.input_alphabet, G.output_alphabet)
