"""Factorization forests and interval-product queries.

Heights follow the usual convention: a leaf has height 1, and an inner node
is one higher than its tallest child.  Binary nodes have two children;
unranked nodes have at least three children of equal value (an idempotent
value in ``idempotent`` mode).

``forest_build`` computes a forest of minimum height.  For every height
``k`` it keeps the boolean matrix of intervals admitting a forest of height
at most ``k``; the next level is one boolean matrix product for binary
nodes plus a transitive closure per admissible child value for unranked
nodes.  The witness is then read back top-down.  Positions are 1-based.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import LetterHom, Word, as_word
from .errors import CapExceeded, ValidationError

LEAF, BINARY, UNRANKED = "leaf", "binary", "unranked"


@dataclass(frozen=True)
class Node:
    kind: str
    lo: int
    hi: int
    value: int
    children: tuple = ()

    @property
    def height(self) -> int:
        return 1 + max((c.height for c in self.children), default=0)


def leaf(pos: int, value: int) -> Node:
    return Node(LEAF, pos, pos, value)


@dataclass(frozen=True)
class Forest:
    word: Word
    hom: LetterHom
    root: Node
    mode: str = "idempotent"

    @property
    def height(self) -> int:
        return forest_height(self)

    @property
    def n(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class Violation:
    path: tuple
    message: str


@dataclass(frozen=True)
class ForestReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class TouchCounter:
    touched: int = 0
    history: list = field(default_factory=list)


def interval_values(h: LetterHom, word: Sequence[str]) -> np.ndarray:
    """``val[i, j]`` = image of ``word[i..j]`` (0-based, inclusive); -1 below the diagonal."""
    n = len(word)
    table = h.monoid.table
    imgs = h.values(word) if n else np.zeros(0, dtype=np.int32)
    val = -np.ones((n, n), dtype=np.int64)
    for j in range(n):
        val[j, j] = imgs[j]
        if j:
            val[:j, j] = table[val[:j, j - 1], imgs[j]]
    return val


def _compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``[i, j]`` true when ``a[i, m]`` and ``b[m + 1, j]`` for some ``m``."""
    shifted = np.zeros_like(b)
    shifted[:-1] = b[1:]
    return (a.astype(np.float32) @ shifted.astype(np.float32)) > 0


def _chains(e: np.ndarray) -> np.ndarray:
    """Intervals that split into one or more consecutive ``e`` blocks."""
    total = e.copy()
    while True:
        nxt = total | _compose(total, total)
        if np.array_equal(nxt, total):
            return total
        total = nxt


def _levels(h: LetterHom, word: Word, mode: str, max_height: int):
    n = len(word)
    val = interval_values(h, word)
    mon = h.monoid
    if mode == "idempotent":
        candidates = [int(e) for e in np.flatnonzero(mon.idempotents())]
    else:
        candidates = list(range(mon.size))
    upper = np.triu(np.ones((n, n), dtype=bool))
    cur = np.eye(n, dtype=bool)
    levels = [cur]
    while not cur[0, n - 1]:
        if len(levels) >= max_height:
            raise CapExceeded(f"no forest of height <= {max_height}")
        nxt = cur | _compose(cur, cur)
        for v in candidates:
            e = cur & (val == v)
            if not e.any():
                continue
            nxt |= _compose(e, _compose(e, _chains(e)))
        nxt &= upper
        levels.append(nxt)
        cur = nxt
    return levels, val, candidates


def _chain_split(e: np.ndarray, i: int, j: int) -> list[tuple[int, int]] | None:
    """Split ``[i, j]`` into at least three consecutive ``e`` blocks."""
    start = (i, 0)
    prev = {start: None}
    queue = deque([start])
    while queue:
        pos, c = queue.popleft()
        for m in np.flatnonzero(e[pos, pos : j + 1]) + pos:
            m = int(m)
            state = (m + 1, min(c + 1, 3))
            if m == j:
                if c + 1 >= 3:
                    blocks = [(pos, m)]
                    s = (pos, c)
                    while prev[s] is not None:
                        s, blk = prev[s]
                        blocks.append(blk)
                    return blocks[::-1]
                continue
            if state not in prev:
                prev[state] = ((pos, c), (pos, m))
                queue.append(state)
    return None


def forest_build(h: LetterHom, w: Sequence[str] | str, mode: str = "idempotent", max_height: int = 64) -> Forest:
    if mode not in ("plain", "idempotent"):
        raise ValidationError(f"unknown forest mode {mode!r}")
    word = as_word(w, h.alphabet)
    if not word:
        raise ValidationError("factorization forests need a non-empty word")
    levels, val, candidates = _levels(h, word, mode, max_height)

    def level_of(i, j):
        for k, lv in enumerate(levels):
            if lv[i, j]:
                return k
        raise AssertionError("interval not covered")  # pragma: no cover

    def build(i, j, k):
        # k: index of a level containing [i, j]
        while k > 0 and levels[k - 1][i, j]:
            k -= 1
        if k == 0:
            return leaf(i + 1, int(val[i, i]))
        below = levels[k - 1]
        ms = np.flatnonzero(below[i, i:j] & below[i + 1 : j + 1, j]) + i
        if len(ms):
            m = int(ms[0])
            return Node(BINARY, i + 1, j + 1, int(val[i, j]), (build(i, m, k - 1), build(m + 1, j, k - 1)))
        for v in candidates:
            blocks = _chain_split(below & (val == v), i, j)
            if blocks:
                kids = tuple(build(a, b, k - 1) for a, b in blocks)
                return Node(UNRANKED, i + 1, j + 1, int(val[i, j]), kids)
        raise AssertionError("level matrix without witness")  # pragma: no cover

    n = len(word)
    root = build(0, n - 1, level_of(0, n - 1))
    return Forest(word, h, root, mode)


def forest_height(f: Forest | Node) -> int:
    node = f.root if isinstance(f, Forest) else f
    best = 0
    stack = [(node, 1)]
    while stack:
        t, d = stack.pop()
        best = max(best, d)
        stack.extend((c, d + 1) for c in t.children)
    return best


def forest_validate(f: Forest, height_bound: int | None = None) -> ForestReport:
    """Check partition, annotations and node shapes; report every violation."""
    h, word = f.hom, f.word
    mon = h.monoid
    out: list[Violation] = []

    def check(node: Node, path: tuple):
        if not 1 <= node.lo <= node.hi <= len(word):
            out.append(Violation(path, f"interval [{node.lo}, {node.hi}] out of range"))
            return
        expect = h(word[node.lo - 1 : node.hi])
        if node.value != expect:
            out.append(Violation(path, f"value {node.value} but the interval maps to {expect}"))
        if node.kind == LEAF:
            if node.lo != node.hi or node.children:
                out.append(Violation(path, "leaf must cover exactly one position"))
            return
        kids = node.children
        if node.kind == BINARY and len(kids) != 2:
            out.append(Violation(path, f"binary node with {len(kids)} children"))
        if node.kind == UNRANKED:
            if len(kids) < 3:
                out.append(Violation(path, f"unranked node with {len(kids)} children"))
            values = {c.value for c in kids}
            if len(values) > 1:
                out.append(Violation(path, f"unranked children have different values {sorted(values)}"))
            elif f.mode == "idempotent" and values:
                v = next(iter(values))
                if mon.mul(v, v) != v:
                    out.append(Violation(path, f"unranked child value {v} is not idempotent"))
        if node.kind not in (BINARY, UNRANKED):
            out.append(Violation(path, f"unknown node kind {node.kind!r}"))
        if not kids:
            return
        if kids[0].lo != node.lo or kids[-1].hi != node.hi:
            out.append(Violation(path, "children do not span the parent interval"))
        for a, b in zip(kids, kids[1:]):
            if a.hi + 1 != b.lo:
                out.append(Violation(path, f"children [{a.lo}, {a.hi}] and [{b.lo}, {b.hi}] are not adjacent"))
        for i, c in enumerate(kids):
            check(c, path + (i,))

    if f.root.lo != 1 or f.root.hi != len(word):
        out.append(Violation((), "root does not cover the whole word"))
    check(f.root, ())
    if height_bound is None and f.mode == "idempotent":
        height_bound = 3 * mon.size
    if height_bound is not None and forest_height(f) > height_bound:
        out.append(Violation((), f"height {forest_height(f)} exceeds {height_bound}"))
    return ForestReport(tuple(out))


def interval_product(f: Forest, i: int, j: int, counter: TouchCounter | None = None) -> int:
    """Image of ``word[i..j]`` (1-based, inclusive) by a walk down two spines."""
    n = len(f.word)
    if not 1 <= i <= j <= n:
        raise ValidationError(f"interval [{i}, {j}] outside 1..{n}")
    mon = f.hom.monoid

    def touch(node):
        if counter is not None:
            counter.touched += 1
            counter.history.append((node.lo, node.hi))

    def go(node: Node, lo: int, hi: int) -> int:
        touch(node)
        if lo <= node.lo and node.hi <= hi:
            return node.value
        kids = node.children
        inside = [c for c in kids if c.hi >= lo and c.lo <= hi]
        first, last = inside[0], inside[-1]
        if first is last:
            return go(first, lo, hi)
        acc = go(first, lo, hi)
        middle = len(inside) - 2
        if middle:
            # equal-valued siblings: one lookup for the whole run
            touch(inside[1])
            if node.kind == UNRANKED:
                mid = mon.power(inside[1].value, middle)
            else:  # pragma: no cover - binary nodes have no middle run
                mid = inside[1].value
            acc = mon.mul(acc, mid)
        return mon.mul(acc, go(last, lo, hi))

    return go(f.root, i, j)


def h_height_bruteforce(h: LetterHom, w: Sequence[str] | str, mode: str = "plain", limit: int = 12) -> int:
    """Exact minimum height by dynamic programming over all factorizations."""
    word = as_word(w, h.alphabet)
    n = len(word)
    if n == 0:
        raise ValidationError("h-height is defined for non-empty words")
    if n > limit:
        raise CapExceeded(f"brute-force h-height is limited to words of length {limit}")
    mon = h.monoid
    val = interval_values(h, word)
    H = {}
    for length in range(1, n + 1):
        for i in range(n - length + 1):
            j = i + length - 1
            if length == 1:
                H[i, j] = 1
                continue
            best = min(max(H[i, m], H[m + 1, j]) + 1 for m in range(i, j))
            for cuts in itertools.chain.from_iterable(
                itertools.combinations(range(i + 1, j + 1), r) for r in range(2, length)
            ):
                bounds = list(zip((i,) + cuts, [c - 1 for c in cuts] + [j]))
                vs = {int(val[a, b]) for a, b in bounds}
                if len(vs) != 1:
                    continue
                v = vs.pop()
                if mode == "idempotent" and mon.mul(v, v) != v:
                    continue
                best = min(best, 1 + max(H[a, b] for a, b in bounds))
            H[i, j] = best
    return H[0, n - 1]


def format_forest(node: Forest | Node, indent: str = "") -> str:
    if isinstance(node, Forest):
        node = node.root
    label = f"{indent}{node.kind} [{node.lo},{node.hi}] value={node.value}"
    lines = [label]
    for c in node.children:
        lines.append(format_forest(c, indent + "  "))
    return "\n".join(lines)
