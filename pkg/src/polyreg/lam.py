"""Polynomial list functions: a simply typed lambda calculus over finite
sets, lists, products and sums, with a fixed set of atomic list programs.

Terms are immutable trees.  ``reduce_step`` rewrites all maximal redexes in
parallel (maximal degree, none of the same degree below), ``normalize``
iterates it, and ``term_eval`` gives the denotational semantics used as the
oracle.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import FiniteMonoid, Word, cyclic_group, is_underlined, strip_underline, underline
from .errors import CapExceeded, NotNormalForm, ParseError, PolyregError, TypeCheckError

# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fin:
    elems: tuple

    def __str__(self):
        return "{" + ",".join(self.elems) + "}"


@dataclass(frozen=True)
class List:
    t: object

    def __str__(self):
        return f"{_paren_type(self.t)}*"


@dataclass(frozen=True)
class Prod:
    a: object
    b: object

    def __str__(self):
        return f"({self.a} x {self.b})"


@dataclass(frozen=True)
class Sum:
    a: object
    b: object

    def __str__(self):
        return f"({self.a} + {self.b})"


@dataclass(frozen=True)
class Arrow:
    a: object
    b: object

    def __str__(self):
        return f"({self.a} -> {self.b})"


def _paren_type(t) -> str:
    return str(t)


BOT = Fin(("bot",))
TRUE_T = Fin(("true",))
FALSE_T = Fin(("false",))
BOOL = Sum(TRUE_T, FALSE_T)


@functools.lru_cache(maxsize=None)
def type_depth(t) -> int:
    """Depth of the type's syntax tree; finite sets are leaves of depth 1."""
    if isinstance(t, Fin):
        return 1
    if isinstance(t, List):
        return 1 + type_depth(t.t)
    return 1 + max(type_depth(t.a), type_depth(t.b))


degree = type_depth


def is_arrow_free(t) -> bool:
    if isinstance(t, Fin):
        return True
    if isinstance(t, Arrow):
        return False
    if isinstance(t, List):
        return is_arrow_free(t.t)
    return is_arrow_free(t.a) and is_arrow_free(t.b)


def arrows(*ts):
    """``arrows(a, b, c)`` is ``a -> (b -> c)``."""
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Arrow(t, out)
    return out


# ---------------------------------------------------------------------------
# terms
# ---------------------------------------------------------------------------


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str
    type: object


@dataclass(frozen=True, slots=True)
class App(Term):
    f: Term
    a: Term


@dataclass(frozen=True, slots=True)
class Lam(Term):
    var: str
    vtype: object
    body: Term
    rtype: object = None  # type of the body, filled in by the builders

    def __eq__(self, other):
        return (
            isinstance(other, Lam)
            and self.var == other.var
            and self.vtype == other.vtype
            and self.body == other.body
        )

    def __hash__(self):
        return hash((self.var, self.vtype, self.body))


@dataclass(frozen=True, slots=True)
class Const(Term):
    elem: str
    type: Fin


@dataclass(frozen=True, slots=True)
class Pair(Term):
    a: Term
    b: Term


@dataclass(frozen=True, slots=True)
class Inj(Term):
    side: int
    term: Term
    type: Sum


@dataclass(frozen=True, slots=True)
class ListLit(Term):
    items: tuple
    elem_type: object


ATOM_KINDS = ("is", "proj", "case", "map", "head", "tail", "flat", "split", "group")
ARITY = {"is": 1, "proj": 1, "case": 3, "map": 2, "head": 1, "tail": 1, "flat": 1, "split": 1, "group": 1}


@dataclass(frozen=True, slots=True)
class Atom(Term):
    """An atomic program with its type instantiation.

    ``args`` by kind: is (tau, a), proj (i, t0, t1), case (t0, t1, s),
    map (t, s), head/tail/flat/split (t,), group (monoid,).
    """

    kind: str
    args: tuple

    def __eq__(self, other):
        if not isinstance(other, Atom) or self.kind != other.kind:
            return False
        if self.kind == "group":
            a, b = self.args[0], other.args[0]
            return a.names == b.names and np.array_equal(a.table, b.table)
        return self.args == other.args

    def __hash__(self):
        if self.kind == "group":
            return hash(("group", self.args[0].names))
        return hash((self.kind, self.args))


def group_type(g: FiniteMonoid) -> Fin:
    return Fin(tuple(g.names))


def atom_type(a: Atom):
    k, x = a.kind, a.args
    if k == "is":
        return Arrow(x[0], BOOL)
    if k == "proj":
        return Arrow(Prod(x[1], x[2]), x[1 + x[0]])
    if k == "case":
        t0, t1, s = x
        return arrows(Arrow(t0, s), Arrow(t1, s), Sum(t0, t1), s)
    if k == "map":
        t, s = x
        return arrows(Arrow(t, s), List(t), List(s))
    if k == "head":
        return Arrow(List(x[0]), Sum(BOT, x[0]))
    if k == "tail":
        return Arrow(List(x[0]), Sum(BOT, List(x[0])))
    if k == "flat":
        return Arrow(List(List(x[0])), List(x[0]))
    if k == "split":
        t = List(x[0])
        return Arrow(t, List(Prod(t, t)))
    if k == "group":
        g = group_type(x[0])
        return Arrow(List(g), g)
    raise TypeCheckError(f"unknown atomic program {k!r}", ())


def make_atom(kind: str, *args) -> Atom:
    a = Atom(kind, tuple(args))
    if kind == "is" and (not isinstance(args[0], Fin) or args[1] not in args[0].elems):
        raise TypeCheckError(f"is_{args[1]} needs a finite set containing it", ())
    if kind == "proj" and args[0] not in (0, 1):
        raise TypeCheckError("projection index must be 0 or 1", ())
    if kind == "group" and not args[0].is_group():
        raise TypeCheckError("group product needs a group", ())
    atom_type(a)
    return a


# ---------------------------------------------------------------------------
# typechecking
# ---------------------------------------------------------------------------


def _tc(m: Term, env: dict, path: tuple):
    if isinstance(m, Var):
        bound = env.get(m.name)
        if bound is not None and bound != m.type:
            raise TypeCheckError(f"variable {m.name} used at {m.type} but bound at {bound}", path)
        return m.type
    if isinstance(m, App):
        tf = _tc(m.f, env, path + (0,))
        ta = _tc(m.a, env, path + (1,))
        if not isinstance(tf, Arrow):
            raise TypeCheckError(f"applying a non-function of type {tf}", path)
        if tf.a != ta:
            raise TypeCheckError(f"argument has type {ta}, expected {tf.a}", path)
        return tf.b
    if isinstance(m, Lam):
        tb = _tc(m.body, {**env, m.var: m.vtype}, path + (0,))
        if m.rtype is not None and m.rtype != tb:
            raise TypeCheckError(f"annotated body type {m.rtype} differs from {tb}", path)
        return Arrow(m.vtype, tb)
    if isinstance(m, Const):
        if not isinstance(m.type, Fin) or m.elem not in m.type.elems:
            raise TypeCheckError(f"{m.elem} is not an element of {m.type}", path)
        return m.type
    if isinstance(m, Pair):
        return Prod(_tc(m.a, env, path + (0,)), _tc(m.b, env, path + (1,)))
    if isinstance(m, Inj):
        if not isinstance(m.type, Sum) or m.side not in (0, 1):
            raise TypeCheckError("coprojection needs a sum type and side 0 or 1", path)
        t = _tc(m.term, env, path + (0,))
        want = m.type.a if m.side == 0 else m.type.b
        if t != want:
            raise TypeCheckError(f"coprojection {m.side} of {t} into {m.type}", path)
        return m.type
    if isinstance(m, ListLit):
        for i, x in enumerate(m.items):
            t = _tc(x, env, path + (i,))
            if t != m.elem_type:
                raise TypeCheckError(f"list item has type {t}, expected {m.elem_type}", path + (i,))
        return List(m.elem_type)
    if isinstance(m, Atom):
        try:
            return atom_type(m)
        except TypeCheckError as e:
            raise TypeCheckError(e.message, path) from None
    raise TypeCheckError(f"not a term: {m!r}", path)


def term_typecheck(m: Term, env: dict | None = None):
    return _tc(m, dict(env or {}), ())


typeof = term_typecheck


def free_vars(m: Term) -> set[str]:
    if isinstance(m, Var):
        return {m.name}
    if isinstance(m, App):
        return free_vars(m.f) | free_vars(m.a)
    if isinstance(m, Lam):
        return free_vars(m.body) - {m.var}
    if isinstance(m, Pair):
        return free_vars(m.a) | free_vars(m.b)
    if isinstance(m, Inj):
        return free_vars(m.term)
    if isinstance(m, ListLit):
        return set().union(*(free_vars(x) for x in m.items)) if m.items else set()
    return set()


def term_depth(m: Term) -> int:
    stack = [(m, 1)]
    best = 0
    while stack:
        t, d = stack.pop()
        best = max(best, d)
        stack.extend((c, d + 1) for c in children(t))
    return best


def term_size(m: Term) -> int:
    n, stack = 0, [m]
    while stack:
        t = stack.pop()
        n += 1
        stack.extend(children(t))
    return n


_CHILDREN = {
    App: lambda m: (m.f, m.a),
    Lam: lambda m: (m.body,),
    Pair: lambda m: (m.a, m.b),
    Inj: lambda m: (m.term,),
    ListLit: lambda m: m.items,
}
_LEAF = lambda m: ()  # noqa: E731


def children(m: Term) -> tuple:
    return _CHILDREN.get(type(m), _LEAF)(m)


def term_is_first_order(m: Term) -> bool:
    stack = [m]
    while stack:
        t = stack.pop()
        if isinstance(t, Atom) and t.kind == "group":
            return False
        stack.extend(children(t))
    return True


# ---------------------------------------------------------------------------
# denotational semantics
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class VPair:
    a: object
    b: object


@dataclass(frozen=True, slots=True)
class VInj:
    side: int
    v: object


V_TRUE = VInj(0, "true")
V_FALSE = VInj(1, "false")


def _split_value(xs: tuple) -> tuple:
    n = len(xs)
    return tuple(VPair(xs[: n - i], xs[n - i :]) for i in range(n + 1))


def _atom_value(a: Atom):
    k, x = a.kind, a.args
    if k == "is":
        target = x[1]
        return lambda v: V_TRUE if v == target else V_FALSE
    if k == "proj":
        return (lambda p: p.a) if x[0] == 0 else (lambda p: p.b)
    if k == "case":
        return lambda f0: lambda f1: lambda s: (f0 if s.side == 0 else f1)(s.v)
    if k == "map":
        return lambda f: lambda xs: tuple(f(v) for v in xs)
    if k == "head":
        return lambda xs: VInj(1, xs[0]) if xs else VInj(0, "bot")
    if k == "tail":
        return lambda xs: VInj(1, xs[1:]) if xs else VInj(0, "bot")
    if k == "flat":
        return lambda xss: tuple(v for xs in xss for v in xs)
    if k == "split":
        return _split_value
    if k == "group":
        g = x[0]
        index = {name: i for i, name in enumerate(g.names)}

        def product(xs):
            acc = g.identity
            for v in xs:
                acc = g.mul(acc, index[v])
            return g.names[acc]

        return product
    raise PolyregError(k)


def term_eval(m: Term, env: dict | None = None):
    env = env or {}
    if isinstance(m, Var):
        return env[m.name]
    if isinstance(m, App):
        return term_eval(m.f, env)(term_eval(m.a, env))
    if isinstance(m, Lam):
        return lambda v, m=m, env=env: term_eval(m.body, {**env, m.var: v})
    if isinstance(m, Const):
        return m.elem
    if isinstance(m, Pair):
        return VPair(term_eval(m.a, env), term_eval(m.b, env))
    if isinstance(m, Inj):
        return VInj(m.side, term_eval(m.term, env))
    if isinstance(m, ListLit):
        return tuple(term_eval(x, env) for x in m.items)
    if isinstance(m, Atom):
        return _atom_value(m)
    raise PolyregError(f"not a term: {m!r}")


def value_to_term(v, t) -> Term:
    """The normal-form term denoting an arrow-free value."""
    if isinstance(t, Fin):
        return Const(v, t)
    if isinstance(t, Prod):
        return Pair(value_to_term(v.a, t.a), value_to_term(v.b, t.b))
    if isinstance(t, Sum):
        return Inj(v.side, value_to_term(v.v, t.a if v.side == 0 else t.b), t)
    if isinstance(t, List):
        return ListLit(tuple(value_to_term(x, t.t) for x in v), t.t)
    raise PolyregError(f"no literal for values of type {t}")


def term_to_value(m: Term):
    """Inverse of value_to_term on normal forms of arrow-free type."""
    if isinstance(m, Const):
        return m.elem
    if isinstance(m, Pair):
        return VPair(term_to_value(m.a), term_to_value(m.b))
    if isinstance(m, Inj):
        return VInj(m.side, term_to_value(m.term))
    if isinstance(m, ListLit):
        return tuple(term_to_value(x) for x in m.items)
    raise NotNormalForm(f"not a value: {format_term(m)[:80]}")


def format_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, VPair):
        return f"({format_value(v.a)},{format_value(v.b)})"
    if isinstance(v, VInj):
        return f"{'L' if v.side == 0 else 'R'} {format_value(v.v)}"
    if isinstance(v, tuple):
        return "[" + ",".join(format_value(x) for x in v) + "]"
    return "<function>"


# ---------------------------------------------------------------------------
# redexes and reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Redex:
    path: tuple
    rule: str
    degree: int


def _spine(m: Term):
    args = []
    while isinstance(m, App):
        args.append(m.a)
        m = m.f
    args.reverse()
    return m, args


def _lam_type(m: Lam):
    rt = m.rtype
    if rt is None:
        rt = _tc(m.body, {m.var: m.vtype}, ())
    return Arrow(m.vtype, rt)


def _redex_at(m: Term) -> tuple[str, int] | None:
    """(rule, degree) when ``m`` itself is a redex."""
    if not isinstance(m, App):
        return None
    head, args = _spine(m)
    if isinstance(head, Lam):
        return ("lambda", type_depth(_lam_type(head))) if len(args) == 1 else None
    if not isinstance(head, Atom) or len(args) != ARITY[head.kind]:
        return None
    k, last = head.kind, args[-1]
    ok = False
    if k == "is":
        ok = isinstance(last, Const)
    elif k == "proj":
        ok = isinstance(last, Pair)
    elif k == "case":
        ok = isinstance(last, Inj)
    elif k in ("map", "head", "tail", "split"):
        ok = isinstance(last, ListLit)
    elif k == "flat":
        ok = isinstance(last, ListLit) and all(isinstance(x, ListLit) for x in last.items)
    elif k == "group":
        ok = isinstance(last, ListLit) and all(isinstance(x, Const) for x in last.items)
    if not ok:
        return None
    d = _ATOM_DEGREE.get(id(head))
    if d is None or d[0] is not head:
        d = (head, type_depth(atom_type(head)))
        _ATOM_DEGREE[id(head)] = d
    return k, d[1]


_ATOM_DEGREE: dict[int, tuple] = {}


def find_redexes(m: Term) -> list[Redex]:
    out: list[Redex] = []
    stack = [(m, ())]
    while stack:
        t, path = stack.pop()
        r = _redex_at(t)
        if r is not None:
            out.append(Redex(path, r[0], r[1]))
        for i, c in enumerate(children(t)):
            stack.append((c, path + (i,)))
    out.sort(key=lambda r: r.path)
    return out


def is_normal(m: Term) -> bool:
    stack = [m]
    while stack:
        t = stack.pop()
        if _redex_at(t) is not None:
            return False
        stack.extend(children(t))
    return True


def path_measure(m: Term, d: int) -> int:
    """Most redexes of degree ``d`` on any root-to-leaf path."""

    def go(t):
        r = _redex_at(t)
        here = 1 if r is not None and r[1] == d else 0
        kids = children(t)
        return here + (max(go(c) for c in kids) if kids else 0)

    return go(m)


def max_degree(m: Term) -> int:
    rs = find_redexes(m)
    return max((r.degree for r in rs), default=0)


_fresh_counter = itertools.count(1)


def fresh_name(base: str = "v") -> str:
    base = re.sub(r"#\d+$", "", base)
    return f"{base}#{next(_fresh_counter)}"


def substitute(m: Term, x: str, n: Term, fv_n: set[str] | None = None) -> Term:
    """Capture-avoiding ``m[x := n]``."""
    if fv_n is None:
        fv_n = free_vars(n)

    def go(t: Term) -> Term:
        if isinstance(t, Var):
            return n if t.name == x else t
        if isinstance(t, App):
            return App(go(t.f), go(t.a))
        if isinstance(t, Lam):
            if t.var == x:
                return t
            if t.var in fv_n:
                y = fresh_name(t.var)
                body = substitute(t.body, t.var, Var(y, t.vtype), {y})
                return Lam(y, t.vtype, go(body), t.rtype)
            return Lam(t.var, t.vtype, go(t.body), t.rtype)
        if isinstance(t, Pair):
            return Pair(go(t.a), go(t.b))
        if isinstance(t, Inj):
            return Inj(t.side, go(t.term), t.type)
        if isinstance(t, ListLit):
            return ListLit(tuple(go(i) for i in t.items), t.elem_type)
        return t

    return go(m)


def contract(m: Term, rule: str | None = None) -> Term:
    """Apply the reduction rule at the root of ``m``."""
    head, args = _spine(m)
    if isinstance(head, Lam):
        return substitute(head.body, head.var, args[0])
    k, x = head.kind, head.args
    last = args[-1]
    if k == "is":
        return Inj(0, Const("true", TRUE_T), BOOL) if last.elem == x[1] else Inj(1, Const("false", FALSE_T), BOOL)
    if k == "proj":
        return last.a if x[0] == 0 else last.b
    if k == "case":
        return App(args[last.side], last.term)
    if k == "map":
        return ListLit(tuple(App(args[0], item) for item in last.items), x[1])
    if k == "head":
        t = Sum(BOT, x[0])
        return Inj(1, last.items[0], t) if last.items else Inj(0, Const("bot", BOT), t)
    if k == "tail":
        t = Sum(BOT, List(x[0]))
        return Inj(1, ListLit(last.items[1:], x[0]), t) if last.items else Inj(0, Const("bot", BOT), t)
    if k == "flat":
        return ListLit(tuple(i for sub in last.items for i in sub.items), x[0])
    if k == "split":
        items, n, t = last.items, len(last.items), x[0]
        return ListLit(
            tuple(Pair(ListLit(items[: n - i], t), ListLit(items[n - i :], t)) for i in range(n + 1)),
            Prod(List(t), List(t)),
        )
    if k == "group":
        g = x[0]
        index = {name: i for i, name in enumerate(g.names)}
        acc = g.identity
        for c in last.items:
            acc = g.mul(acc, index[c.elem])
        return Const(g.names[acc], group_type(g))
    raise PolyregError(k)


def _rebuild(t: Term, sub: Callable[[Term], Term]) -> Term:
    if isinstance(t, App):
        return App(sub(t.f), sub(t.a))
    if isinstance(t, Lam):
        return Lam(t.var, t.vtype, sub(t.body), t.rtype)
    if isinstance(t, Pair):
        return Pair(sub(t.a), sub(t.b))
    if isinstance(t, Inj):
        return Inj(t.side, sub(t.term), t.type)
    if isinstance(t, ListLit):
        return ListLit(tuple(sub(i) for i in t.items), t.elem_type)
    return t


def _annotate(m: Term, cache: dict) -> None:
    """Fill ``cache[id(t)] = (t, redex, top)`` for every node not yet seen,
    where ``top`` is the highest redex degree in the subtree."""
    stack = [(m, False)]
    while stack:
        t, ready = stack.pop()
        if id(t) in cache:
            continue
        kids = children(t)
        if not ready:
            stack.append((t, True))
            stack.extend((c, False) for c in kids if id(c) not in cache)
            continue
        r = _redex_at(t)
        best = r[1] if r else 0
        for c in kids:
            top = cache[id(c)][2]
            if top > best:
                best = top
        cache[id(t)] = (t, r, best)


def reduce_step(m: Term, cache: dict | None = None) -> Term:
    """Reduce all maximal redexes in parallel; identity on normal forms.

    ``cache`` may be shared across calls on successive terms so unchanged
    subterms are not revisited.
    """
    if cache is None:
        cache = {}
    _annotate(m, cache)
    d = cache[id(m)][2]
    if d == 0:
        return m

    def go(t: Term) -> Term:
        _, r, top = cache[id(t)]
        if top < d:
            return t
        if r is not None and r[1] == d and all(cache[id(c)][2] < d for c in children(t)):
            return contract(t, r[0])
        return _rebuild(t, go)

    return go(m)


def normalize(m: Term, cap: int = 10_000, trace: list | None = None) -> Term:
    cache: dict = {}
    for _ in range(cap):
        nxt = reduce_step(m, cache)
        if nxt is m:
            return m
        if trace is not None:
            trace.append(nxt)
        m = nxt
        if len(cache) > 2_000_000:
            cache.clear()
    if is_normal(m):
        return m
    raise CapExceeded(f"no normal form within {cap} reduction steps")


def extract_string(m: Term) -> Word:
    if not isinstance(m, ListLit):
        if not is_normal(m):
            raise NotNormalForm("term is not in normal form")
        raise TypeCheckError("expected a list literal", ())
    if not isinstance(m.elem_type, Fin):
        raise TypeCheckError(f"expected a list of finite-set elements, got {m.elem_type}*", ())
    out = []
    for i, x in enumerate(m.items):
        if not isinstance(x, Const):
            raise NotNormalForm(f"item {i} is not a constant")
        out.append(x.elem)
    return tuple(out)


def word_literal(word: Sequence[str], t: Fin) -> ListLit:
    for a in word:
        if a not in t.elems:
            raise TypeCheckError(f"letter {a!r} not in {t}", ())
    return ListLit(tuple(Const(a, t) for a in word), t)


def listfun_eval_string(m: Term, word: Sequence[str] | str, cap: int = 10_000) -> Word:
    t = term_typecheck(m)
    if not (isinstance(t, Arrow) and isinstance(t.a, List) and isinstance(t.a.t, Fin) and isinstance(t.b, List) and isinstance(t.b.t, Fin)):
        raise TypeCheckError(f"expected a string-to-string term, got {t}", ())
    if isinstance(word, str):
        from .core import tokenize

        word = tokenize(word)
    return extract_string(normalize(App(m, word_literal(word, t.a.t)), cap))


def listfun_eval_denot(m: Term, word: Sequence[str] | str) -> Word:
    """The same function through the denotational semantics."""
    if isinstance(word, str):
        from .core import tokenize

        word = tokenize(word)
    return tuple(term_eval(m)(tuple(word)))


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def _name(base: str) -> str:
    return f"{base}{next(_fresh_counter)}"


def lam(t, body: Callable[[Var], Term], base: str = "x") -> Lam:
    v = Var(_name(base), t)
    b = body(v)
    return Lam(v.name, t, b, term_typecheck(b))


def ap(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def const(a: str, t: Fin) -> Const:
    return Const(a, t)


def inl(m: Term, other) -> Inj:
    return Inj(0, m, Sum(typeof(m), other))


def inr(m: Term, other) -> Inj:
    return Inj(1, m, Sum(other, typeof(m)))


def lit(items: Iterable[Term], t) -> ListLit:
    return ListLit(tuple(items), t)


def _elem(t):
    if not isinstance(t, List):
        raise TypeCheckError(f"expected a list type, got {t}", ())
    return t.t


def fst(p: Term) -> Term:
    t = typeof(p)
    return ap(Atom("proj", (0, t.a, t.b)), p)


def snd(p: Term) -> Term:
    t = typeof(p)
    return ap(Atom("proj", (1, t.a, t.b)), p)


def map_(f: Term, xs: Term) -> Term:
    t = typeof(f)
    return ap(Atom("map", (t.a, t.b)), f, xs)


def head(xs: Term) -> Term:
    return ap(Atom("head", (_elem(typeof(xs)),)), xs)


def tail(xs: Term) -> Term:
    return ap(Atom("tail", (_elem(typeof(xs)),)), xs)


def flat(xss: Term) -> Term:
    return ap(Atom("flat", (_elem(_elem(typeof(xss))),)), xss)


def split(xs: Term) -> Term:
    return ap(Atom("split", (_elem(typeof(xs)),)), xs)


def is_(a: str, x: Term) -> Term:
    t = typeof(x)
    return ap(make_atom("is", t, a), x)


def case(f0: Term, f1: Term, s: Term) -> Term:
    st = typeof(s)
    return ap(Atom("case", (st.a, st.b, typeof(f0).b)), f0, f1, s)


def group(g: FiniteMonoid, xs: Term) -> Term:
    return ap(make_atom("group", g), xs)


def ite(c: Term, t: Term, e: Term) -> Term:
    return case(lam(TRUE_T, lambda _: t, "u"), lam(FALSE_T, lambda _: e, "u"), c)


TRUE = Inj(0, Const("true", TRUE_T), BOOL)
FALSE = Inj(1, Const("false", FALSE_T), BOOL)


def not_(c: Term) -> Term:
    return ite(c, FALSE, TRUE)


def and_(a: Term, b: Term) -> Term:
    return ite(a, b, FALSE)


def or_(a: Term, b: Term) -> Term:
    return ite(a, TRUE, b)


def concat(*xss: Term) -> Term:
    t = typeof(xss[0])
    return flat(lit(xss, t))


def singleton(x: Term) -> Term:
    return lit([x], typeof(x))


def empty_list(t) -> ListLit:
    return ListLit((), t)


def err_bind(m: Term, k: Callable[[Var], Term]) -> Term:
    """Error-monad bind: ``m : bot + a``, ``k : a -> bot + b``."""
    a = typeof(m).b
    body = lam(a, k, "y")
    out = typeof(body).b
    return case(lam(BOT, lambda e: Inj(0, e, out), "e"), body, m)


def ok(m: Term) -> Term:
    return Inj(1, m, Sum(BOT, typeof(m)))


def fail(t) -> Term:
    return Inj(0, Const("bot", BOT), Sum(BOT, t))


def errmap_(f: Term, xs: Term) -> Term:
    """Apply ``f : a -> bot + b`` to every element, keeping the successes."""
    b = typeof(f).b.b
    return flat(
        map_(
            lam(
                _elem(typeof(xs)),
                lambda e: case(lam(BOT, lambda _: empty_list(b), "e"), lam(b, singleton, "v"), ap(f, e)),
                "z",
            ),
            xs,
        )
    )


def reverse_(xs: Term) -> Term:
    t = _elem(typeof(xs))
    return errmap_(lam(Prod(List(t), List(t)), lambda p: head(snd(p)), "p"), split(xs))


def revsplit_(xs: Term) -> Term:
    t = _elem(typeof(xs))
    return map_(lam(Prod(List(t), List(t)), lambda p: Pair(reverse_(snd(p)), reverse_(fst(p))), "p"), split(reverse_(xs)))


def triples_(xs: Term) -> Term:
    t = _elem(typeof(xs))
    return errmap_(
        lam(
            Prod(List(t), List(t)),
            lambda p: err_bind(head(snd(p)), lambda h: err_bind(tail(snd(p)), lambda tl: ok(Pair(fst(p), Pair(h, tl))))),
            "p",
        ),
        revsplit_(xs),
    )


def square_(xs: Term) -> Term:
    t = _elem(typeof(xs))
    s = Sum(t, t)
    tr = Prod(List(t), Prod(t, List(t)))

    def reformat(x):
        return concat(
            map_(lam(t, lambda a: Inj(0, a, s), "a"), fst(x)),
            singleton(Inj(1, fst(snd(x)), s)),
            map_(lam(t, lambda a: Inj(0, a, s), "a"), snd(snd(x))),
        )

    return flat(map_(lam(tr, reformat, "q"), triples_(xs)))


def empty_(xs: Term) -> Term:
    t = _elem(typeof(xs))
    return case(lam(BOT, lambda _: TRUE, "e"), lam(t, lambda _: FALSE, "v"), head(xs))


def errcatch_(m: Term, default: Term) -> Term:
    t = typeof(m).b
    return case(lam(BOT, lambda _: default, "e"), lam(t, lambda v: v, "v"), m)


def filter_(f: Term, xs: Term) -> Term:
    t = _elem(typeof(xs))
    return flat(map_(lam(t, lambda x: ite(ap(f, x), singleton(x), empty_list(t)), "f"), xs))


def exists_(f: Term, xs: Term) -> Term:
    return not_(empty_(filter_(f, xs)))


def forall_(f: Term, xs: Term) -> Term:
    t = _elem(typeof(xs))
    return empty_(filter_(lam(t, lambda x: not_(ap(f, x)), "n"), xs))


def fprefix_(f: Term, xs: Term) -> Term:
    t = _elem(typeof(xs))
    prefixes = map_(lam(Prod(List(t), List(t)), fst, "p"), split(xs))
    onlyfs = filter_(lam(List(t), lambda l: forall_(f, l), "l"), prefixes)
    return errcatch_(head(map_(lam(List(t), lambda l: filter_(f, l), "l"), onlyfs)), empty_list(t))


def isleft_(s: Term) -> Term:
    st = typeof(s)
    return case(lam(st.a, lambda _: TRUE, "l"), lam(st.b, lambda _: FALSE, "r"), s)


def block_(xs: Term) -> Term:
    st = _elem(typeof(xs))
    t0, t1 = st.a, st.b
    out = Sum(List(t0), List(t1))
    isleft = lam(st, isleft_, "s")
    notleft = lam(st, lambda s: not_(isleft_(s)), "s")

    def sametype(b):
        left = Inj(0, flat(map_(lam(st, lambda s: case(lam(t0, singleton, "a"), lam(t1, lambda _: empty_list(t0), "b"), s), "s"), fprefix_(isleft, b))), out)
        right = Inj(1, flat(map_(lam(st, lambda s: case(lam(t0, lambda _: empty_list(t1), "a"), lam(t1, singleton, "b"), s), "s"), fprefix_(notleft, b))), out)
        return err_bind(head(b), lambda x: ok(case(lam(t0, lambda _: left, "a"), lam(t1, lambda _: right, "b"), x)))

    def starts_block(p):
        a, b = fst(p), snd(p)
        differ = err_bind(
            head(reverse_(a)),
            lambda la: err_bind(head(b), lambda fb: ok(not_(or_(and_(isleft_(fb), isleft_(la)), and_(not_(isleft_(fb)), not_(isleft_(la))))))),
        )
        return or_(empty_(a), errcatch_(differ, FALSE))

    pt = Prod(List(st), List(st))
    # keep only the splits at block starts, then read each block off the suffix
    starts = filter_(lam(pt, starts_block, "p"), split(xs))
    return reverse_(errmap_(lam(pt, lambda p: sametype(snd(p)), "p"), starts))


def fin_map(src: Fin, dst: Fin, mapping: dict) -> Lam:
    """Element conversion between finite sets by a chain of ``is`` tests."""

    def body(x):
        out = Const(mapping[src.elems[-1]], dst)
        for a in reversed(src.elems[:-1]):
            out = ite(is_(a, x), Const(mapping[a], dst), out)
        return out

    return lam(src, body, "c")


def underline_render(t: Fin) -> Lam:
    """``t + t -> t ∪ _t``: right injections are the underlined letters."""
    dst = Fin(tuple(t.elems) + tuple(underline(a) for a in t.elems))
    plain = fin_map(t, dst, {a: a for a in t.elems})
    marked = fin_map(t, dst, {a: underline(a) for a in t.elems})
    return lam(Sum(t, t), lambda s: case(plain, marked, s), "s")


# ---------------------------------------------------------------------------
# library
# ---------------------------------------------------------------------------


def _fin(t) -> Fin:
    if isinstance(t, Fin):
        return t
    if isinstance(t, str):
        return Fin(tuple(t))
    return Fin(tuple(t))


def _list_fun(t, body: Callable[[Var], Term]) -> Lam:
    return lam(List(t), body, "l")


def _running(sigma=("a", "b"), sep="|") -> Lam:
    src = Fin(tuple(sigma))
    dst = Fin(tuple(sigma) + (sep,))
    conv = fin_map(src, dst, {a: a for a in sigma})
    tr = Prod(List(src), Prod(src, List(src)))

    def piece(q):
        # prefix up to and including the element, reversed, then the separator
        return concat(
            singleton(ap(conv, fst(snd(q)))),
            map_(conv, reverse_(fst(q))),
            singleton(Const(sep, dst)),
        )

    return _list_fun(src, lambda l: flat(map_(lam(tr, piece, "q"), triples_(l))))


def _square_word(t) -> Lam:
    t = _fin(t)
    return _list_fun(t, lambda l: map_(underline_render(t), square_(l)))


def _itrev(sigma, sep) -> Lam:
    """Iterated reverse through block: letters go left, separators right."""
    src = Fin(tuple(sigma) + (sep,))
    letters = Fin(tuple(sigma))
    seps = Fin((sep,))
    st = Sum(letters, seps)
    tag = lam(src, lambda x: ite(is_(sep, x), Inj(1, Const(sep, seps), st), Inj(0, ap(fin_map(src, letters, {a: (a if a != sep else sigma[0]) for a in src.elems}), x), st)), "c")
    to_src = fin_map(letters, src, {a: a for a in sigma})
    sep_src = fin_map(seps, src, {sep: sep})
    out = Sum(List(letters), List(seps))

    def body(l):
        blocks = block_(map_(tag, l))
        return flat(
            map_(
                lam(out, lambda b: case(lam(List(letters), lambda ys: map_(to_src, reverse_(ys)), "ys"), lam(List(seps), lambda zs: map_(sep_src, zs), "zs"), b), "b"),
                blocks,
            )
        )

    return _list_fun(src, body)


def _parity(sigma=("a", "b")) -> Lam:
    """Output ``#`` iff the input has odd length; uses the group product of Z2."""
    src = Fin(tuple(sigma))
    g = cyclic_group(2)
    gt = group_type(g)
    dst = Fin(("#",))
    return _list_fun(
        src,
        lambda l: ite(
            is_("1", group(g, map_(lam(src, lambda _: Const("1", gt), "c"), l))),
            singleton(Const("#", dst)),
            empty_list(dst),
        ),
    )


def _errmap(t, s) -> Lam:
    return lam(Arrow(t, Sum(BOT, s)), lambda f: _list_fun(t, lambda l: errmap_(f, l)), "f")


def _pred_list(t, fn) -> Lam:
    return lam(Arrow(t, BOOL), lambda f: _list_fun(t, lambda l: fn(f, l)), "f")


STDLIB: dict[str, Callable[..., Term]] = {
    "identity": lambda t: _list_fun(t, lambda l: l),
    "duplicate": lambda t: _list_fun(t, lambda l: concat(l, l)),
    "reverse": lambda t: _list_fun(t, reverse_),
    "revsplit": lambda t: _list_fun(t, revsplit_),
    "triples": lambda t: _list_fun(t, triples_),
    "square": lambda t: _list_fun(t, square_),
    "square_word": _square_word,
    "block": lambda t, s: _list_fun(Sum(t, s), block_),
    "errmap": _errmap,
    "empty": lambda t: _list_fun(t, empty_),
    "errcatch": lambda t: lam(Sum(BOT, t), lambda m: lam(t, lambda d: errcatch_(m, d), "d"), "m"),
    "exists": lambda t: _pred_list(t, exists_),
    "forall": lambda t: _pred_list(t, forall_),
    "filter": lambda t: lam(Arrow(t, BOOL), lambda f: _list_fun(t, lambda l: filter_(f, l)), "f"),
    "fprefix": lambda t: lam(Arrow(t, BOOL), lambda f: _list_fun(t, lambda l: fprefix_(f, l)), "f"),
    "isleft": lambda t, s: lam(Sum(t, s), isleft_, "s"),
    "err": lambda t, s: lam(
        Arrow(t, s), lambda f: lam(Sum(BOT, t), lambda m: err_bind(m, lambda y: ok(ap(f, y))), "m"), "f"
    ),
    "headtwo": lambda t: _list_fun(
        t, lambda x: err_bind(head(x), lambda a: err_bind(err_bind(tail(x), head), lambda b: ok(Pair(a, b))))
    ),
    "running": _running,
    "itrev": _itrev,
    "parity": _parity,
}


def stdlib_term(name: str, *types) -> Term:
    if name not in STDLIB:
        raise PolyregError(f"unknown library term {name!r}; known: {', '.join(sorted(STDLIB))}")
    try:
        return STDLIB[name](*types)
    except TypeError as e:
        raise PolyregError(f"bad type arguments for {name!r}: {e}") from None


# ---------------------------------------------------------------------------
# reference implementations (plain Python) for the library
# ---------------------------------------------------------------------------


def ref_split(xs):
    return _split_value(tuple(xs))


def ref_revsplit(xs):
    xs = tuple(xs)
    return tuple(VPair(xs[:i], xs[i:]) for i in range(len(xs) + 1))


def ref_triples(xs):
    xs = tuple(xs)
    return tuple(VPair(xs[:i], VPair(xs[i], xs[i + 1 :])) for i in range(len(xs)))


def ref_square(xs):
    xs = tuple(xs)
    return tuple(VInj(1 if i == x else 0, v) for x in range(len(xs)) for i, v in enumerate(xs))


def ref_block(xs):
    out: list = []
    for v in xs:
        if out and out[-1][0] == v.side:
            out[-1][1].append(v.v)
        else:
            out.append((v.side, [v.v]))
    return tuple(VInj(side, tuple(items)) for side, items in out)


def ref_running(word, sep="|"):
    out = []
    for i in range(len(word)):
        out.extend(reversed(word[: i + 1]))
        out.append(sep)
    return tuple(out)


# ---------------------------------------------------------------------------
# s-expression format
# ---------------------------------------------------------------------------

_SEXP_TOKEN = re.compile(r'\s*(?:(;[^\n]*)|(\()|(\))|("(?:[^"\\]|\\.)*")|([^\s()";]+))')


def _sexp_parse(text: str):
    pos, line_starts = 0, [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            line_starts.append(i + 1)

    def where(p):
        import bisect

        ln = bisect.bisect_right(line_starts, p)
        return ln, p - line_starts[ln - 1] + 1

    stack: list[list] = [[]]
    while True:
        m = _SEXP_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError("unexpected character", *where(pos))
            break
        pos = m.end()
        if m.group(1):
            continue
        if m.group(2):
            stack.append([])
        elif m.group(3):
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", *where(m.start(3)))
            done = stack.pop()
            stack[-1].append(done)
        elif m.group(4):
            stack[-1].append(("str", re.sub(r"\\(.)", r"\1", m.group(4)[1:-1])))
        else:
            stack[-1].append(m.group(5))
    if len(stack) != 1:
        raise ParseError("missing ')'", *where(len(text)))
    return stack[0]


def _sym(x) -> str:
    if isinstance(x, tuple):
        return x[1]
    if isinstance(x, str):
        return x
    raise ParseError(f"expected a symbol, found {x!r}", 0, 0)


def parse_type(x):
    if isinstance(x, (str, tuple)):
        s = _sym(x)
        if s == "bool":
            return BOOL
        if s == "bot":
            return BOT
        raise ParseError(f"unknown type {s!r}", 0, 0)
    if not x:
        raise ParseError("empty type", 0, 0)
    head, *rest = x
    if head == "fin":
        return Fin(tuple(_sym(r) for r in rest))
    if head == "list" and len(rest) == 1:
        return List(parse_type(rest[0]))
    if head in ("prod", "sum", "arrow") and len(rest) >= 2:
        ts = [parse_type(r) for r in rest]
        ctor = {"prod": Prod, "sum": Sum, "arrow": Arrow}[head]
        out = ts[-1]
        for t in reversed(ts[:-1]):
            out = ctor(t, out)
        return out
    raise ParseError(f"malformed type {x!r}", 0, 0)


def _parse_group(x) -> FiniteMonoid:
    if isinstance(x, list) and x and x[0] == "cyclic":
        return cyclic_group(int(_sym(x[1])))
    if isinstance(x, list) and x and x[0] == "table":
        rows = x[1:]
        names = [_sym(r[0]) for r in rows]
        index = {n: i for i, n in enumerate(names)}
        table = [[index[_sym(c)] for c in r[1:]] for r in rows]
        return FiniteMonoid(np.array(table), 0, tuple(names))
    raise ParseError(f"malformed group {x!r}", 0, 0)


def _parse_term(x, env: dict) -> Term:
    if isinstance(x, (str, tuple)):
        s = _sym(x)
        if s not in env:
            raise ParseError(f"unbound variable {s!r}", 0, 0)
        return Var(s, env[s])
    if not x:
        raise ParseError("empty term", 0, 0)
    head, *rest = x
    if head == "lam":
        (v, t), body = rest[0], rest[1]
        vt = parse_type(t)
        b = _parse_term(body, {**env, _sym(v): vt})
        return Lam(_sym(v), vt, b, None)
    if head == "app":
        out = _parse_term(rest[0], env)
        for r in rest[1:]:
            out = App(out, _parse_term(r, env))
        return out
    if head == "var":
        return Var(_sym(rest[0]), parse_type(rest[1]))
    if head == "const":
        return Const(_sym(rest[0]), parse_type(rest[1]))
    if head == "pair":
        return Pair(_parse_term(rest[0], env), _parse_term(rest[1], env))
    if head in ("inl", "inr"):
        return Inj(0 if head == "inl" else 1, _parse_term(rest[0], env), parse_type(rest[1]))
    if head == "lit":
        return ListLit(tuple(_parse_term(r, env) for r in rest[1:]), parse_type(rest[0]))
    if head == "atom":
        kind = _sym(rest[0])
        args = rest[1:]
        if kind == "is":
            return make_atom("is", parse_type(args[0]), _sym(args[1]))
        if kind == "proj":
            return make_atom("proj", int(_sym(args[0])), parse_type(args[1]), parse_type(args[2]))
        if kind == "group":
            return make_atom("group", _parse_group(args[0]))
        if kind in ARITY:
            return make_atom(kind, *(parse_type(a) for a in args))
        raise ParseError(f"unknown atomic program {kind!r}", 0, 0)
    if head == "lib":
        name = _sym(rest[0])
        return stdlib_term(name, *(_lib_arg(a) for a in rest[1:]))
    raise ParseError(f"unknown term form {head!r}", 0, 0)


def _lib_arg(x):
    if isinstance(x, tuple):
        return x[1]
    if isinstance(x, str):
        return x
    return parse_type(x)


def _fill_rtypes(m: Term) -> Term:
    """Annotate every abstraction with its body type."""

    def go(t, env):
        if isinstance(t, Lam):
            body = go(t.body, {**env, t.var: t.vtype})
            return Lam(t.var, t.vtype, body, _tc(body, {**env, t.var: t.vtype}, ()))
        if isinstance(t, (App, Pair, Inj, ListLit)):
            return _rebuild(t, lambda c: go(c, env))
        return t

    return go(m, {})


def parse_term(text: str) -> Term:
    forms = _sexp_parse(text)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one term, found {len(forms)}", 1, 1)
    m = _parse_term(forms[0], {})
    term_typecheck(m)
    return _fill_rtypes(m)


def format_type(t) -> str:
    if t == BOOL:
        return "bool"
    if t == BOT:
        return "bot"
    if isinstance(t, Fin):
        return "(fin " + " ".join(_atom_text(e) for e in t.elems) + ")"
    if isinstance(t, List):
        return f"(list {format_type(t.t)})"
    name = {Prod: "prod", Sum: "sum", Arrow: "arrow"}[type(t)]
    return f"({name} {format_type(t.a)} {format_type(t.b)})"


def _atom_text(s: str) -> str:
    if re.fullmatch(r'[^\s()";]+', s):
        return s
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_term(m: Term) -> str:
    if isinstance(m, Var):
        return _atom_text(m.name)
    if isinstance(m, App):
        head, args = _spine(m)
        return "(app " + " ".join(format_term(x) for x in [head, *args]) + ")"
    if isinstance(m, Lam):
        return f"(lam ({_atom_text(m.var)} {format_type(m.vtype)}) {format_term(m.body)})"
    if isinstance(m, Const):
        return f"(const {_atom_text(m.elem)} {format_type(m.type)})"
    if isinstance(m, Pair):
        return f"(pair {format_term(m.a)} {format_term(m.b)})"
    if isinstance(m, Inj):
        return f"({'inl' if m.side == 0 else 'inr'} {format_term(m.term)} {format_type(m.type)})"
    if isinstance(m, ListLit):
        return "(lit " + " ".join([format_type(m.elem_type)] + [format_term(x) for x in m.items]) + ")"
    if isinstance(m, Atom):
        k, x = m.kind, m.args
        if k == "is":
            return f"(atom is {format_type(x[0])} {_atom_text(x[1])})"
        if k == "proj":
            return f"(atom proj {x[0]} {format_type(x[1])} {format_type(x[2])})"
        if k == "group":
            g = x[0]
            rows = " ".join(
                "(" + " ".join(_atom_text(g.names[i]) for i in [r, *g.table[r]]) + ")" for r in _identity_first(g)
            )
            return f"(atom group (table {rows}))"
        return f"(atom {k} " + " ".join(format_type(a) for a in x) + ")"
    raise PolyregError(f"not a term: {m!r}")


def _identity_first(g: FiniteMonoid) -> list[int]:
    if g.identity != 0:
        raise PolyregError("group tables are written with the identity first")
    return list(range(g.size))


# ---------------------------------------------------------------------------
# random well-typed closed terms
# ---------------------------------------------------------------------------

_AB = Fin(("a", "b"))
_BASE_TYPES = (_AB, BOOL, List(_AB), Prod(_AB, _AB), Sum(BOT, _AB), List(List(_AB)), List(BOOL))


class _Gen:
    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.z2 = cyclic_group(2)

    def pick(self, xs):
        return xs[int(self.rng.integers(len(xs)))]

    def chance(self, p: float) -> bool:
        return bool(self.rng.random() < p)

    def term(self, t, d: int, env: dict) -> Term:
        """A term of type ``t`` with depth at most ``d``."""
        options = []
        vars_ = [Var(n, vt) for n, vt in env.items() if vt == t]
        if vars_:
            options.append(lambda: self.pick(vars_))
        if d <= 1:
            if isinstance(t, Fin):
                return Const(self.pick(t.elems), t)
            if isinstance(t, List):
                return ListLit((), t.t)
            if isinstance(t, Atom):  # pragma: no cover
                return t
            if vars_:
                return self.pick(vars_)
            return self.intro(t, max(d, 2), env)
        options.append(lambda: self.intro(t, d, env))
        if d >= 3:
            options.append(lambda: self.beta(t, d, env))
            options.append(lambda: self.elim(t, d, env))
            options.append(lambda: self.elim(t, d, env))
        return self.pick(options)()

    def intro(self, t, d: int, env: dict) -> Term:
        if isinstance(t, Fin):
            return Const(self.pick(t.elems), t)
        if isinstance(t, Prod):
            return Pair(self.term(t.a, d - 1, env), self.term(t.b, d - 1, env))
        if isinstance(t, Sum):
            side = int(self.rng.integers(2))
            return Inj(side, self.term(t.a if side == 0 else t.b, d - 1, env), t)
        if isinstance(t, List):
            k = int(self.rng.integers(0, 4))
            return ListLit(tuple(self.term(t.t, d - 1, env) for _ in range(k)), t.t)
        if isinstance(t, Arrow):
            name = _name("r")
            body = self.term(t.b, d - 1, {**env, name: t.a})
            return Lam(name, t.a, body, t.b)
        raise PolyregError(str(t))

    def beta(self, t, d: int, env: dict) -> Term:
        s = self.pick(_BASE_TYPES)
        name = _name("r")
        body = self.term(t, d - 2, {**env, name: s})
        return App(Lam(name, s, body, t), self.term(s, d - 1, env))

    def elim(self, t, d: int, env: dict) -> Term:
        choices = ["proj", "case"]
        if isinstance(t, List):
            choices += ["map", "flat", "tail_case"]
            if isinstance(t.t, Prod) and isinstance(t.t.a, List) and t.t.a == t.t.b:
                choices.append("split")
        if t == BOOL:
            choices.append("is")
        if isinstance(t, Sum) and t.a == BOT:
            choices.append("head" if not isinstance(t.b, List) else "tail")
        if isinstance(t, Fin) and t.elems == tuple(self.z2.names):
            choices.append("group")
        kind = self.pick(choices)
        sub = d - 2  # argument position sits under one application node
        if kind == "proj":
            other = self.pick(_BASE_TYPES)
            i = int(self.rng.integers(2))
            pt = Prod(t, other) if i == 0 else Prod(other, t)
            return App(Atom("proj", (i, pt.a, pt.b)), self.term(pt, d - 1, env))
        if kind == "case":
            t0, t1 = self.pick(_BASE_TYPES), self.pick(_BASE_TYPES)
            f0 = self.term(Arrow(t0, t), d - 3, env)
            f1 = self.term(Arrow(t1, t), d - 2, env)
            return ap(Atom("case", (t0, t1, t)), f0, f1, self.term(Sum(t0, t1), d - 1, env))
        if kind == "map":
            s = self.pick(_BASE_TYPES)
            return ap(Atom("map", (s, t.t)), self.term(Arrow(s, t.t), d - 2, env), self.term(List(s), d - 1, env))
        if kind == "flat":
            return App(Atom("flat", (t.t,)), self.term(List(t), d - 1, env))
        if kind == "tail_case":
            # case (\_ -> []) (\x -> x) (tail l)
            name = _name("r")
            f0 = Lam(_name("r"), BOT, ListLit((), t.t), t)
            f1 = Lam(name, t, Var(name, t), t)
            return ap(Atom("case", (BOT, t, t)), f0, f1, App(Atom("tail", (t.t,)), self.term(t, max(1, d - 2), env)))
        if kind == "split":
            inner = t.t.a
            return App(Atom("split", (inner.t,)), self.term(inner, d - 1, env))
        if kind == "is":
            return App(make_atom("is", _AB, self.pick(_AB.elems)), self.term(_AB, d - 1, env))
        if kind == "head":
            return App(Atom("head", (t.b,)), self.term(List(t.b), d - 1, env))
        if kind == "tail":
            return App(Atom("tail", (t.b.t,)), self.term(t.b, d - 1, env))
        if kind == "group":
            return App(make_atom("group", self.z2), self.term(List(t), d - 1, env))
        raise PolyregError(kind)  # pragma: no cover


def random_term(rng: np.random.Generator, max_depth: int = 6, types: Sequence | None = None) -> Term:
    """A random closed well-typed term of arrow-free type and depth <= max_depth."""
    gen = _Gen(rng)
    pool = tuple(types) if types else _BASE_TYPES
    while True:
        t = gen.pick(pool)
        m = gen.term(t, max_depth, {})
        if term_depth(m) <= max_depth:
            return _fill_rtypes(m)
