"""Alphabets, words, finite automata and finite monoids.

Symbols are short strings. Text formats use one character per symbol, except
for underlined symbols, written ``_a``.  Internally constructed alphabets may
use longer tokens (tagged copies ``~a``, annotated symbols ``a@1``).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import AlphabetMismatch, ParseError, ValidationError

UNDERLINE = "_"
TAG = "~"

Word = tuple  # tuple[str, ...]


# ---------------------------------------------------------------------------
# Alphabets and words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise ValidationError("alphabet must be non-empty")
        if len(set(letters)) != len(letters):
            raise ValidationError(f"duplicate symbols in alphabet {letters}")
        for a in letters:
            if not isinstance(a, str) or not a:
                raise ValidationError(f"invalid symbol {a!r}")
            if a == UNDERLINE:
                raise ValidationError("'_' is reserved for underlining")
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(letters)})

    @classmethod
    def of(cls, letters: Iterable[str] | str) -> "Alphabet":
        if isinstance(letters, str):
            letters = tokenize(letters)
        return cls(tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._index

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise AlphabetMismatch(f"symbol {symbol!r} not in alphabet {self.letters}") from None

    @property
    def dtype(self):
        return np.uint8 if len(self.letters) <= 255 else np.uint16 if len(self.letters) <= 65535 else np.int64

    def encode(self, word: Sequence[str]) -> np.ndarray:
        idx = self._index
        try:
            return np.fromiter((idx[a] for a in word), dtype=self.dtype, count=len(word))
        except KeyError as exc:
            raise AlphabetMismatch(f"symbol {exc.args[0]!r} not in alphabet {self.letters}") from None

    def decode(self, codes: np.ndarray) -> Word:
        letters = self.letters
        return tuple(letters[int(c)] for c in codes)

    def check(self, word: Sequence[str]) -> Word:
        for a in word:
            if a not in self._index:
                raise AlphabetMismatch(f"symbol {a!r} not in alphabet {self.letters}")
        return tuple(word)

    def union(self, *others: Iterable[str]) -> "Alphabet":
        seen = dict.fromkeys(self.letters)
        for other in others:
            seen.update(dict.fromkeys(other))
        return Alphabet(tuple(seen))

    def underlined(self) -> "Alphabet":
        """Plain letters followed by their underlined copies."""
        return Alphabet(self.letters + tuple(underline(a) for a in self.letters))


def underline(symbol: str) -> str:
    return UNDERLINE + symbol


def is_underlined(symbol: str) -> bool:
    return len(symbol) > 1 and symbol[0] == UNDERLINE


def strip_underline(symbol: str) -> str:
    return symbol[1:] if is_underlined(symbol) else symbol


def tag_prefix(*alphabets: Iterable[str]) -> str:
    """A run of tag characters long enough that tagged symbols are fresh."""
    depth = 0
    for alphabet in alphabets:
        for a in alphabet:
            k = len(a) - len(a.lstrip(TAG))
            depth = max(depth, k)
    return TAG * (depth + 1)


_ESCAPE = re.compile(r"\\x([0-9a-fA-F]{2})")


def tokenize(text: str, alphabet: Alphabet | Iterable[str] | None = None) -> Word:
    """Split text into symbols.

    Without an alphabet each character is a symbol, ``_c`` is an underlined
    symbol and ``\\xNN`` is an escaped character.  With an alphabet the
    longest matching symbol wins, so multi-character tokens round-trip.
    """
    text = _ESCAPE.sub(lambda m: chr(int(m.group(1), 16)), text)
    if alphabet is not None:
        letters = sorted(set(alphabet), key=len, reverse=True)
        out = []
        i = 0
        while i < len(text):
            for a in letters:
                if text.startswith(a, i):
                    out.append(a)
                    i += len(a)
                    break
            else:
                raise AlphabetMismatch(f"cannot tokenize {text[i:]!r} over {tuple(alphabet)}")
        return tuple(out)
    out = []
    i = 0
    while i < len(text):
        if text[i] == UNDERLINE and i + 1 < len(text):
            out.append(text[i : i + 2])
            i += 2
        else:
            out.append(text[i])
            i += 1
    return tuple(out)


def format_word(word: Iterable[str]) -> str:
    return "".join(word)


def format_cli_word(word: Iterable[str]) -> str:
    """Render a word for the terminal, escaping non-printable characters."""
    out = []
    for ch in "".join(word):
        out.append(ch if ch.isprintable() else f"\\x{ord(ch):02x}")
    return "".join(out)


def as_word(w: Sequence[str] | str, alphabet: Alphabet | None = None) -> Word:
    if isinstance(w, str):
        return tokenize(w, alphabet)
    word = tuple(w)
    if alphabet is not None:
        alphabet.check(word)
    return word


def words_up_to(alphabet: Iterable[str], max_len: int) -> Iterator[Word]:
    """All words of length 0..max_len in length-lexicographic order."""
    letters = tuple(alphabet)
    layer: list[Word] = [()]
    for n in range(max_len + 1):
        yield from layer
        if n < max_len:
            layer = [w + (a,) for w in layer for a in letters]


def random_word(rng: np.random.Generator, alphabet: Sequence[str], max_len: int, min_len: int = 0) -> Word:
    n = int(rng.integers(min_len, max_len + 1))
    letters = tuple(alphabet)
    return tuple(letters[i] for i in rng.integers(0, len(letters), size=n))


# ---------------------------------------------------------------------------
# Automata
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Dfa:
    """Complete deterministic automaton. States are ``0..n-1``."""

    alphabet: Alphabet
    delta: np.ndarray
    initial: int
    accepting: frozenset[int]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        delta = np.asarray(self.delta, dtype=np.int32)
        if delta.ndim != 2 or delta.shape[1] != len(self.alphabet):
            raise ValidationError(f"transition table shape {delta.shape} does not match alphabet")
        n = delta.shape[0]
        if n == 0:
            raise ValidationError("automaton needs at least one state")
        if delta.size and (delta.min() < 0 or delta.max() >= n):
            raise ValidationError("transition target out of range")
        if not 0 <= self.initial < n:
            raise ValidationError("initial state out of range")
        acc = frozenset(int(q) for q in self.accepting)
        if any(not 0 <= q < n for q in acc):
            raise ValidationError("accepting state out of range")
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "accepting", acc)
        names = tuple(self.names) if self.names else tuple(f"q{i}" for i in range(n))
        if len(names) != n:
            raise ValidationError("state name count mismatch")
        object.__setattr__(self, "names", names)

    @property
    def n_states(self) -> int:
        return self.delta.shape[0]

    @classmethod
    def build(
        cls,
        alphabet: Alphabet | Iterable[str],
        states: Sequence[str],
        initial: str,
        accepting: Iterable[str],
        transitions: Mapping[tuple[str, str], str],
    ) -> "Dfa":
        alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(tuple(alphabet))
        sidx = {s: i for i, s in enumerate(states)}
        delta = np.zeros((len(states), len(alphabet)), dtype=np.int32)
        for s in states:
            for a in alphabet:
                if (s, a) not in transitions:
                    raise ValidationError(f"missing transition ({s}, {a})")
                delta[sidx[s], alphabet.index(a)] = sidx[transitions[s, a]]
        return cls(alphabet, delta, sidx[initial], frozenset(sidx[s] for s in accepting), tuple(states))

    def step(self, q: int, symbol: str) -> int:
        return int(self.delta[q, self.alphabet.index(symbol)])

    def run(self, word: Sequence[str] | str, start: int | None = None) -> int:
        from . import _kernels

        word = as_word(word, self.alphabet) if isinstance(word, str) else word
        codes = self.alphabet.encode(word)
        q = self.initial if start is None else start
        return int(_kernels.dfa_run(self.delta, q, codes))

    def accepts(self, word: Sequence[str] | str) -> bool:
        return self.run(word) in self.accepting

    def reachable(self) -> np.ndarray:
        seen = np.zeros(self.n_states, dtype=bool)
        seen[self.initial] = True
        todo = [self.initial]
        while todo:
            q = todo.pop()
            for r in self.delta[q]:
                if not seen[r]:
                    seen[r] = True
                    todo.append(int(r))
        return seen

    def is_empty(self) -> bool:
        seen = self.reachable()
        return not any(seen[q] for q in self.accepting)

    def complement(self) -> "Dfa":
        acc = frozenset(range(self.n_states)) - self.accepting
        return Dfa(self.alphabet, self.delta, self.initial, acc, self.names)

    def trim(self) -> "Dfa":
        """Restrict to states reachable from the initial state."""
        seen = np.flatnonzero(self.reachable())
        remap = -np.ones(self.n_states, dtype=np.int32)
        remap[seen] = np.arange(len(seen), dtype=np.int32)
        delta = remap[self.delta[seen]]
        acc = frozenset(int(remap[q]) for q in self.accepting if remap[q] >= 0)
        return Dfa(self.alphabet, delta, int(remap[self.initial]), acc, tuple(self.names[q] for q in seen))

    def product(self, other: "Dfa", mode: str = "and") -> "Dfa":
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch("product of automata over different alphabets")
        n, m = self.n_states, other.n_states
        delta = (self.delta[:, None, :] * m + other.delta[None, :, :]).reshape(n * m, -1)
        a = np.zeros(n, dtype=bool)
        a[list(self.accepting)] = True
        b = np.zeros(m, dtype=bool)
        b[list(other.accepting)] = True
        acc = (a[:, None] & b[None, :]) if mode == "and" else (a[:, None] | b[None, :])
        return Dfa(self.alphabet, delta, self.initial * m + other.initial, frozenset(np.flatnonzero(acc.ravel()).tolist())).trim()


@dataclass(frozen=True, eq=False)
class Nfa:
    """Nondeterministic automaton without epsilon moves."""

    alphabet: Alphabet
    n_states: int
    initial: frozenset[int]
    accepting: frozenset[int]
    transitions: tuple[dict, ...]  # per state: symbol index -> frozenset of targets

    def __post_init__(self):
        if len(self.transitions) != self.n_states:
            raise ValidationError("transition list length differs from state count")
        for tr in self.transitions:
            for targets in tr.values():
                if any(not 0 <= t < self.n_states for t in targets):
                    raise ValidationError("transition target out of range")

    @classmethod
    def build(cls, alphabet, n_states, initial, accepting, edges: Iterable[tuple[int, str, int]]) -> "Nfa":
        alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(tuple(alphabet))
        trans: list[dict] = [dict() for _ in range(n_states)]
        for p, a, q in edges:
            trans[p].setdefault(alphabet.index(a), set()).add(q)
        frozen = tuple({k: frozenset(v) for k, v in tr.items()} for tr in trans)
        return cls(alphabet, n_states, frozenset(initial), frozenset(accepting), frozen)

    def accepts(self, word: Sequence[str]) -> bool:
        current = set(self.initial)
        for a in word:
            i = self.alphabet.index(a)
            nxt: set[int] = set()
            for q in current:
                nxt |= self.transitions[q].get(i, frozenset())
            current = nxt
        return bool(current & self.accepting)

    def determinize(self) -> Dfa:
        start = frozenset(self.initial)
        index = {start: 0}
        subsets = [start]
        rows: list[list[int]] = []
        k = len(self.alphabet)
        i = 0
        while i < len(subsets):
            subset = subsets[i]
            row = []
            for a in range(k):
                nxt: set[int] = set()
                for q in subset:
                    nxt |= self.transitions[q].get(a, frozenset())
                key = frozenset(nxt)
                if key not in index:
                    index[key] = len(subsets)
                    subsets.append(key)
                row.append(index[key])
            rows.append(row)
            i += 1
        acc = frozenset(j for j, s in enumerate(subsets) if s & self.accepting)
        delta = np.array(rows, dtype=np.int32).reshape(len(subsets), k)
        return Dfa(self.alphabet, delta, 0, acc)


def dfa_run(dfa: Dfa, w: Sequence[str] | str) -> int:
    return dfa.run(w)


def dfa_accepts(dfa: Dfa, w: Sequence[str] | str) -> bool:
    return dfa.accepts(w)


def dfa_is_empty(dfa: Dfa) -> bool:
    return dfa.is_empty()


def nfa_determinize(nfa: Nfa) -> Dfa:
    return nfa.determinize()


def dfa_all(alphabet: Alphabet) -> Dfa:
    return Dfa(alphabet, np.zeros((1, len(alphabet)), dtype=np.int32), 0, frozenset({0}))


def dfa_none(alphabet: Alphabet) -> Dfa:
    return Dfa(alphabet, np.zeros((1, len(alphabet)), dtype=np.int32), 0, frozenset())


def dfa_contains(alphabet: Alphabet, symbol: str) -> Dfa:
    """Words containing ``symbol`` at least once."""
    delta = np.zeros((2, len(alphabet)), dtype=np.int32)
    delta[0, alphabet.index(symbol)] = 1
    delta[1, :] = 1
    return Dfa(alphabet, delta, 0, frozenset({1}), ("no", "yes"))


def dfa_length_mod(alphabet: Alphabet, modulus: int, residues: Iterable[int]) -> Dfa:
    delta = np.repeat(((np.arange(modulus) + 1) % modulus)[:, None], len(alphabet), axis=1)
    return Dfa(alphabet, delta, 0, frozenset(residues))


def dfa_ends_with(alphabet: Alphabet, symbol: str) -> Dfa:
    delta = np.zeros((2, len(alphabet)), dtype=np.int32)
    delta[:, alphabet.index(symbol)] = 1
    return Dfa(alphabet, delta, 0, frozenset({1}))


def dfa_only_empty(alphabet: Alphabet) -> Dfa:
    delta = np.ones((2, len(alphabet)), dtype=np.int32)
    return Dfa(alphabet, delta, 0, frozenset({0}))


def random_dfa(rng: np.random.Generator, alphabet: Alphabet, n_states: int, p_accept: float = 0.5) -> Dfa:
    delta = rng.integers(0, n_states, size=(n_states, len(alphabet)))
    acc = frozenset(int(q) for q in np.flatnonzero(rng.random(n_states) < p_accept))
    return Dfa(alphabet, delta, 0, acc)


# ---------------------------------------------------------------------------
# Finite monoids
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteMonoid:
    """Monoid on elements ``0..m-1`` given by its multiplication table."""

    table: np.ndarray
    identity: int
    names: tuple[str, ...] = ()
    check: bool = True

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int32)
        m = table.shape[0]
        if table.shape != (m, m) or m == 0:
            raise ValidationError("monoid table must be a non-empty square")
        if table.min() < 0 or table.max() >= m:
            raise ValidationError("monoid table entry out of range")
        e = self.identity
        if not 0 <= e < m:
            raise ValidationError("identity out of range")
        if not (np.array_equal(table[e], np.arange(m)) and np.array_equal(table[:, e], np.arange(m))):
            raise ValidationError("identity laws fail")
        if self.check:
            left = table[table, :]  # (a*b)*c  indexed [a, b, c]
            right = table[:, table]  # a*(b*c)
            if not np.array_equal(left, right):
                bad = np.argwhere(left != right)[0]
                raise ValidationError(f"table is not associative at {tuple(int(x) for x in bad)}")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        names = tuple(self.names) if self.names else tuple(str(i) for i in range(m))
        object.__setattr__(self, "names", names)

    @property
    def size(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.size

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def power(self, s: int, k: int) -> int:
        r = self.identity
        for _ in range(k):
            r = int(self.table[r, s])
        return r

    def is_aperiodic(self) -> bool:
        """True iff s^m = s^(m+1) for every element s, where m is the size."""
        m = self.size
        elems = np.arange(m)
        p = np.full(m, self.identity)
        for _ in range(m):
            p = self.table[p, elems]
        return bool(np.array_equal(p, self.table[p, elems]))

    def idempotents(self) -> np.ndarray:
        elems = np.arange(self.size)
        return self.table[elems, elems] == elems

    def is_group(self) -> bool:
        return all((self.table[a] == self.identity).any() for a in range(self.size))

    def inverse(self, a: int) -> int:
        hits = np.flatnonzero(self.table[a] == self.identity)
        if len(hits) == 0:
            raise ValidationError(f"element {a} has no inverse")
        return int(hits[0])


@dataclass(frozen=True, eq=False)
class LetterHom:
    """Homomorphism from words over ``alphabet`` into ``monoid``."""

    alphabet: Alphabet
    monoid: FiniteMonoid
    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(x) for x in self.image)
        if len(image) != len(self.alphabet):
            raise ValidationError("letter image must cover the alphabet")
        if any(not 0 <= x < self.monoid.size for x in image):
            raise ValidationError("letter image out of range")
        object.__setattr__(self, "image", image)

    def __call__(self, word: Sequence[str] | str) -> int:
        return hom_image(self, word)

    def letter(self, symbol: str) -> int:
        return self.image[self.alphabet.index(symbol)]

    def values(self, word: Sequence[str]) -> np.ndarray:
        img = np.asarray(self.image, dtype=np.int32)
        return img[self.alphabet.encode(word)]


def hom_image(h: LetterHom, word: Sequence[str] | str) -> int:
    word = as_word(word, h.alphabet)
    r = h.monoid.identity
    table = h.monoid.table
    for a in word:
        r = int(table[r, h.letter(a)])
    return r


def transition_monoid(dfa: Dfa, cap: int = 200_000) -> tuple[FiniteMonoid, LetterHom]:
    """Monoid of state transformations induced by words, read left to right.

    Element 0 is the identity transformation.  The product ``s*t`` means
    "first s, then t".
    """
    n = dfa.n_states
    ident = np.arange(n, dtype=np.int32)
    gens = [np.ascontiguousarray(dfa.delta[:, a]) for a in range(len(dfa.alphabet))]
    elems: list[np.ndarray] = [ident]
    index = {ident.tobytes(): 0}
    parent = [-1]  # elems[i] = elems[parent[i]] followed by generator via[i]
    via = [-1]
    right: list[list[int]] = []  # right[i][g]: elems[i] followed by generator g
    images = []
    for g_i, g in enumerate(gens):
        key = g.tobytes()
        if key not in index:
            index[key] = len(elems)
            elems.append(g)
            parent.append(0)
            via.append(g_i)
        images.append(index[key])
    i = 0
    while i < len(elems):
        s = elems[i]
        row = []
        for g_i, g in enumerate(gens):
            t = g[s]
            key = t.tobytes()
            j = index.get(key)
            if j is None:
                j = index[key] = len(elems)
                elems.append(t)
                parent.append(i)
                via.append(g_i)
                if len(elems) > cap:
                    from .errors import CapExceeded

                    raise CapExceeded(f"transition monoid exceeds {cap} elements")
            row.append(j)
        right.append(row)
        i += 1
    T = np.stack(elems)  # (m, n)
    m = len(elems)
    R = np.array(right, dtype=np.int32).reshape(m, len(gens))
    table = np.empty((m, m), dtype=np.int32)
    table[:, 0] = np.arange(m)
    # elements appear after their parents, so columns fill in order
    for b in range(1, m):
        table[:, b] = R[table[:, parent[b]], via[b]]
    monoid = FiniteMonoid(table, 0, check=False)
    object.__setattr__(monoid, "transformations", T)
    return monoid, LetterHom(dfa.alphabet, monoid, tuple(images))


def monoid_from_dfa_action(monoid: FiniteMonoid) -> np.ndarray:
    return getattr(monoid, "transformations")


def cyclic_group(n: int) -> FiniteMonoid:
    i = np.arange(n)
    return FiniteMonoid((i[:, None] + i[None, :]) % n, 0, tuple(str(k) for k in range(n)))


def flip_flop() -> FiniteMonoid:
    """Identity plus two right-zero elements: x*y = y for x, y in {a, b}."""
    table = np.array([[0, 1, 2], [1, 1, 2], [2, 1, 2]])
    return FiniteMonoid(table, 0, ("1", "a", "b"))


def monoid_is_aperiodic(m: FiniteMonoid) -> bool:
    return m.is_aperiodic()


def dfa_is_aperiodic(dfa: Dfa) -> bool:
    return transition_monoid(dfa)[0].is_aperiodic()


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------


def _strip_comment(line: str) -> str:
    # only whole-line comments, so "#" stays usable as a letter
    line = line.strip()
    return "" if line.startswith("#") else line


def iter_lines(text: str) -> Iterator[tuple[int, str]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if line:
            yield no, line


_HEADER = re.compile(r"^([A-Za-z-]+)\s*:\s*(.*)$")
_TRANS = re.compile(r"^(\S+)\s+(\S+)\s*->\s*(\S+)$")


def parse_dfa_lines(lines: Iterable[tuple[int, str]], extra=None) -> Dfa:
    header: dict[str, str] = {}
    trans: dict[tuple[str, str], str] = {}
    for no, line in lines:
        m = _HEADER.match(line)
        if m and m.group(1) in ("alphabet", "states", "initial", "accepting"):
            header[m.group(1)] = m.group(2)
            continue
        if extra is not None and extra(no, line):
            continue
        m = _TRANS.match(line)
        if not m:
            raise ParseError(f"unrecognised line {line!r}", no)
        trans[m.group(1), m.group(2)] = m.group(3)
    for key in ("alphabet", "states", "initial"):
        if key not in header:
            raise ParseError(f"missing '{key}:' header")
    try:
        alphabet = Alphabet(tuple(header["alphabet"].split()))
        states = header["states"].split()
        accepting = header.get("accepting", "").split()
        for s in [header["initial"], *accepting, *trans.values(), *(k[0] for k in trans)]:
            if s not in states:
                raise ParseError(f"unknown state {s!r}")
        for (_, a) in trans:
            if a not in alphabet:
                raise ParseError(f"unknown symbol {a!r}")
        return Dfa.build(alphabet, states, header["initial"], accepting, trans)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def parse_dfa(text: str) -> Dfa:
    return parse_dfa_lines(iter_lines(text))


def format_dfa(dfa: Dfa) -> str:
    lines = [
        f"alphabet: {' '.join(dfa.alphabet)}",
        f"states: {' '.join(dfa.names)}",
        f"initial: {dfa.names[dfa.initial]}",
        f"accepting: {' '.join(dfa.names[q] for q in sorted(dfa.accepting))}",
    ]
    for q in range(dfa.n_states):
        for i, a in enumerate(dfa.alphabet):
            lines.append(f"{dfa.names[q]} {a} -> {dfa.names[dfa.delta[q, i]]}")
    return "\n".join(lines) + "\n"


def parse_monoid(text: str) -> LetterHom:
    """``elements:``, ``identity:``, ``table:`` rows and ``letters: a->e``."""
    elements: list[str] | None = None
    identity = None
    rows: list[list[str]] = []
    letters: list[tuple[str, str]] = []
    in_table = False
    for no, line in iter_lines(text):
        m = _HEADER.match(line)
        if m and m.group(1) in ("elements", "identity", "table", "letters"):
            key, rest = m.group(1), m.group(2).strip()
            in_table = key == "table"
            if key == "elements":
                elements = rest.split()
            elif key == "identity":
                identity = rest
            elif key == "letters":
                for item in rest.split():
                    if "->" not in item:
                        raise ParseError(f"bad letter mapping {item!r}", no)
                    a, e = item.split("->", 1)
                    letters.append((a, e))
            elif rest:
                rows.append(rest.split())
            continue
        if in_table:
            rows.append(line.split())
            continue
        raise ParseError(f"unrecognised line {line!r}", no)
    if elements is None or identity is None or not letters:
        raise ParseError("monoid needs elements:, identity:, table: and letters:")
    idx = {e: i for i, e in enumerate(elements)}
    if len(rows) != len(elements) or any(len(r) != len(elements) for r in rows):
        raise ParseError("table must be |elements| x |elements|")
    try:
        table = np.array([[idx[x] for x in r] for r in rows])
        monoid = FiniteMonoid(table, idx[identity], tuple(elements))
        alphabet = Alphabet(tuple(a for a, _ in letters))
        return LetterHom(alphabet, monoid, tuple(idx[e] for _, e in letters))
    except KeyError as exc:
        raise ParseError(f"unknown element {exc.args[0]!r}") from None
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def format_monoid(h: LetterHom) -> str:
    m = h.monoid
    lines = [f"elements: {' '.join(m.names)}", f"identity: {m.names[m.identity]}", "table:"]
    for row in m.table:
        lines.append("  " + " ".join(m.names[x] for x in row))
    lines.append("letters: " + " ".join(f"{a}->{m.names[e]}" for a, e in zip(h.alphabet, h.image)))
    return "\n".join(lines) + "\n"


def quote_word(word: Iterable[str]) -> str:
    s = "".join(word)
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


_QUOTED = re.compile(r'"((?:[^"\\]|\\.)*)"')


def unquote(text: str) -> str:
    m = _QUOTED.fullmatch(text.strip())
    if not m:
        raise ParseError(f"expected a quoted word, got {text!r}")
    return re.sub(r"\\(.)", r"\1", m.group(1))


def breadth_first(start, successors) -> list:
    """Generic BFS returning nodes in discovery order."""
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in successors(node):
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    return order
