"""Regular preimages ``f^{-1}(L)`` through the atomic functions and pipelines.

Every construction returns a complete Dfa over the stage's input alphabet.
Intermediate automata in a pipeline fold are minimized so the squaring
construction, which is cubic in the size of the transition monoid, stays small.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .atomic import IterRev, SequentialTransducer, Squaring, Stage
from .core import Alphabet, Dfa, dfa_is_aperiodic, monoid_from_dfa_action, transition_monoid, underline
from .errors import AlphabetMismatch, ValidationError
from .pipeline import Pipeline, as_pipeline


@dataclass(frozen=True)
class PreimageReport:
    result: Dfa
    first_order_preserved: bool
    applicable: bool  # stages first-order and L aperiodic

    @property
    def firstOrderPreserved(self) -> bool:  # noqa: N802 - mirrors the report field name
        return self.first_order_preserved


def conform_dfa(L: Dfa, alphabet: Alphabet) -> Dfa:
    """Restrict/reorder ``L``'s columns to ``alphabet`` (which must be covered)."""
    missing = [a for a in alphabet if a not in L.alphabet]
    if missing:
        raise AlphabetMismatch(f"language alphabet lacks {missing}")
    if tuple(L.alphabet) == tuple(alphabet):
        return L
    cols = [L.alphabet.index(a) for a in alphabet]
    return Dfa(alphabet, L.delta[:, cols], L.initial, L.accepting, L.names)


def dfa_minimize(d: Dfa) -> Dfa:
    """Reachable part, then Moore partition refinement."""
    reach = np.flatnonzero(d.reachable())
    old_to_new = -np.ones(d.n_states, dtype=np.int64)
    old_to_new[reach] = np.arange(len(reach))
    delta = old_to_new[d.delta[reach]]
    acc = np.array([q in d.accepting for q in reach], dtype=np.int64)
    cls = acc.copy()
    n_cls = len(np.unique(cls))
    while True:
        sig = np.concatenate([cls[:, None], cls[delta]], axis=1)
        _, new = np.unique(sig, axis=0, return_inverse=True)
        new = new.reshape(-1)
        k = int(new.max()) + 1 if len(new) else 0
        cls = new
        if k == n_cls:
            break
        n_cls = k
    rep = np.zeros(n_cls, dtype=np.int64)
    rep[cls[::-1]] = np.arange(len(cls))[::-1]
    mdelta = cls[delta[rep]]
    start = int(cls[old_to_new[d.initial]])
    accepting = frozenset(int(c) for c in np.unique(cls[acc.astype(bool)]))
    return Dfa(d.alphabet, mdelta, start, accepting)


def _explore(alphabet: Alphabet, start, step, accept) -> Dfa:
    """Breadth-first construction of a Dfa over hashable states."""
    index = {start: 0}
    states = [start]
    rows: list[list[int]] = []
    queue = deque([start])
    while queue:
        s = queue.popleft()
        row = []
        for a in range(len(alphabet)):
            t = step(s, a)
            j = index.get(t)
            if j is None:
                j = index[t] = len(states)
                states.append(t)
                queue.append(t)
            row.append(j)
        rows.append(row)
    acc = frozenset(i for i, s in enumerate(states) if accept(s))
    delta = np.array(rows, dtype=np.int32).reshape(len(states), len(alphabet))
    return Dfa(alphabet, delta, 0, acc)


def _run(L: Dfa, q: int, word_codes: Sequence[int]) -> int:
    for c in word_codes:
        q = int(L.delta[q, c])
    return q


def preimage_sequential(t: SequentialTransducer, L: Dfa) -> Dfa:
    L = conform_dfa(L, t.output_alphabet)
    codes = [[[t.output_alphabet.index(x) for x in w] for w in row] for row in t.outputs]
    end = [[t.output_alphabet.index(x) for x in w] for w in t.end]
    tdelta = t.dfa.delta

    def step(s, a):
        q, l = s
        return int(tdelta[q, a]), _run(L, l, codes[q][a])

    return _explore(
        t.input_alphabet,
        (t.dfa.initial, L.initial),
        step,
        lambda s: _run(L, s[1], end[s[0]]) in L.accepting,
    )


def preimage_squaring(s: Squaring, L: Dfa) -> Dfa:
    """Guess-and-verify over (prefix value, claimed suffix value, accumulator).

    For input ``w`` the output is the product over positions ``x`` of
    ``h(w[:x]) h(_w[x]) h(w[x+1:])``.  The automaton keeps the plain prefix
    value, a guess for the value of the unread suffix, and the product of
    the per-position values seen so far.
    """
    L = dfa_minimize(conform_dfa(L, s.output_alphabet))
    M, h = transition_monoid(L)
    T = monoid_from_dfa_action(M)
    table = M.table
    m = M.size
    accepting_elems = {e for e in range(m) if int(T[e][L.initial]) in L.accepting}
    plain = [h.letter(a) for a in s.alphabet]
    marked = [h.letter(underline(a)) for a in s.alphabet]
    ident = M.identity
    good = np.zeros(m, dtype=bool)
    good[list(accepting_elems)] = True
    # for each letter, CSR lists of s' with h(a) * s' = v
    csr = []
    for ha in plain:
        order = np.argsort(table[ha], kind="stable")
        counts = np.bincount(table[ha], minlength=m)
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        csr.append((order.astype(np.int64), counts, starts))

    # a subset state is (p, sorted codes v * m + acc); p is the same for all members
    def step(state, a):
        p, key = state
        arr = np.frombuffer(key, dtype=np.int64)
        v, acc = arr // m, arr % m
        base = table[table[acc, p], marked[a]]
        order, counts, starts = csr[a]
        cnt = counts[v]
        total = int(cnt.sum())
        if total == 0:
            return int(table[p, plain[a]]), b""
        first = np.repeat(starts[v] - (np.cumsum(cnt) - cnt), cnt)
        sp = order[first + np.arange(total)]
        codes = np.unique(sp * m + table[np.repeat(base, cnt), sp])
        return int(table[p, plain[a]]), codes.tobytes()

    def accept(state):
        arr = np.frombuffer(state[1], dtype=np.int64)
        return bool(np.any((arr // m == ident) & good[arr % m]))

    start = (ident, (np.arange(m, dtype=np.int64) * m + ident).tobytes())
    return _explore(s.input_alphabet, start, step, accept)


def preimage_iterated_reverse(s: IterRev, L: Dfa) -> Dfa:
    """States ``(q, R)``: ``q`` is L's state entering the current block and
    ``R`` maps a state to its successor on the reversed block read so far."""
    L = conform_dfa(L, s.alphabet)
    n = L.n_states
    sep = s.alphabet.index(s.separator)
    ident = tuple(range(n))
    cols = [tuple(int(x) for x in L.delta[:, a]) for a in range(len(s.alphabet))]

    def step(state, a):
        q, R = state
        if a == sep:
            return int(L.delta[R[q], sep]), ident
        col = cols[a]
        return q, tuple(R[col[i]] for i in range(n))

    return _explore(s.alphabet, (L.initial, ident), step, lambda st: st[1][st[0]] in L.accepting)


def preimage_stage(stage: Stage, L: Dfa) -> Dfa:
    if isinstance(stage, SequentialTransducer):
        return preimage_sequential(stage, L)
    if isinstance(stage, Squaring):
        return preimage_squaring(stage, L)
    if isinstance(stage, IterRev):
        return preimage_iterated_reverse(stage, L)
    raise ValidationError(f"no preimage construction for {type(stage).__name__}")


def preimage_pipeline(p: Pipeline | Stage, L: Dfa) -> PreimageReport:
    p = as_pipeline(p)
    L = conform_dfa(L, p.output_alphabet)
    applicable = p.is_first_order() and dfa_is_aperiodic(L)
    cur = L
    for stage in reversed(p.stages):
        cur = dfa_minimize(preimage_stage(stage, cur))
    preserved = applicable and dfa_is_aperiodic(cur)
    return PreimageReport(cur, preserved, applicable)


def pipeline_can_output(p: Pipeline | Stage, L: Dfa) -> bool:
    return not preimage_pipeline(p, L).result.is_empty()


def brute_force_agreement(f, pre: Dfa, L: Dfa, words) -> tuple[int, list]:
    """Count agreements of ``pre`` with ``w -> f(w) in L``; return mismatches."""
    bad = []
    n = 0
    for w in words:
        n += 1
        if pre.accepts(w) != L.accepts(f(w)):
            bad.append(w)
    return n, bad
