"""Polyregular functions as pipelines of atomic stages, and the closure
combinators realised as pipeline-to-pipeline constructions.

Disjoint copies of alphabets are made by prefixing symbols with a run of
tag characters (see :func:`polyreg.core.tag_prefix`).  For a prefix ``T``
the symbols ``T``, ``T+T``, ``T+T+T`` ... are fresh markers that never
collide with a tagged copy ``T+a``.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .atomic import (
    IterRev,
    SequentialTransducer,
    Squaring,
    Stage,
    append_letter,
    format_seq,
    identity_transducer,
    letter_map,
    parse_seq,
    seq_from_step,
)
from .core import (
    Alphabet,
    Dfa,
    Word,
    as_word,
    is_underlined,
    iter_lines,
    strip_underline,
    tag_prefix,
    underline,
)
from .errors import AlphabetMismatch, ParseError, ValidationError


@dataclass(frozen=True)
class PipelineReport:
    ok: bool
    first_order: bool
    stages: int
    alphabets: tuple[Alphabet, ...]
    error: str | None = None
    error_index: int | None = None


class Pipeline:
    """A non-empty chain of stages; stage ``i`` feeds stage ``i + 1``."""

    def __init__(self, stages: Iterable[Stage | "Pipeline"]):
        flat: list[Stage] = []
        for s in stages:
            if isinstance(s, Pipeline):
                flat.extend(s.stages)
            else:
                flat.append(s)
        if not flat:
            raise ValidationError("a pipeline needs at least one stage")
        for i in range(1, len(flat)):
            if flat[i - 1].output_alphabet != flat[i].input_alphabet:
                raise AlphabetMismatch(
                    f"output alphabet {flat[i - 1].output_alphabet.letters} does not match "
                    f"input alphabet {flat[i].input_alphabet.letters}",
                    i,
                )
        self.stages: tuple[Stage, ...] = tuple(flat)

    @classmethod
    def of(cls, *stages: Stage | "Pipeline") -> "Pipeline":
        return cls(stages)

    def __len__(self) -> int:
        return len(self.stages)

    def __repr__(self) -> str:
        kinds = ", ".join(type(s).__name__ for s in self.stages)
        return f"Pipeline([{kinds}])"

    @property
    def input_alphabet(self) -> Alphabet:
        return self.stages[0].input_alphabet

    @property
    def output_alphabet(self) -> Alphabet:
        return self.stages[-1].output_alphabet

    def alphabets(self) -> tuple[Alphabet, ...]:
        return (self.input_alphabet,) + tuple(s.output_alphabet for s in self.stages)

    def then(self, other: "Pipeline | Stage") -> "Pipeline":
        return Pipeline([self, other])

    def eval_codes(self, codes: np.ndarray) -> np.ndarray:
        for s in self.stages:
            codes = s.eval_codes(codes)
        return codes

    def eval(self, word: Sequence[str] | str) -> Word:
        word = as_word(word, self.input_alphabet)
        codes = self.eval_codes(self.input_alphabet.encode(word))
        return self.output_alphabet.decode(codes)

    __call__ = eval

    def eval_reference(self, word: Sequence[str] | str) -> Word:
        """Stage-by-stage evaluation through the per-stage reference code."""
        word = as_word(word, self.input_alphabet)
        for s in self.stages:
            word = s.eval_reference(word)
        return word

    def is_first_order(self) -> bool:
        return all(s.is_first_order() for s in self.stages)


def pipeline_eval(p: Pipeline, w: Sequence[str] | str) -> Word:
    return p.eval(w)


def pipeline_validate(p: Pipeline | Sequence[Stage]) -> PipelineReport:
    stages = p.stages if isinstance(p, Pipeline) else tuple(p)
    try:
        pipe = p if isinstance(p, Pipeline) else Pipeline(stages)
    except ValidationError as exc:
        return PipelineReport(False, False, len(stages), (), exc.message, exc.index)
    return PipelineReport(True, pipe.is_first_order(), len(pipe), pipe.alphabets())


def as_pipeline(f: Pipeline | Stage) -> Pipeline:
    return f if isinstance(f, Pipeline) else Pipeline([f])


# ---------------------------------------------------------------------------
# small building blocks
# ---------------------------------------------------------------------------


def _fresh(*alphabets: Iterable[str]) -> str:
    return tag_prefix(*alphabets)


def _copy(tag: str, alphabet: Iterable[str]) -> Alphabet:
    return Alphabet(tuple(tag + a for a in alphabet))


def _all_alphabets(*pipes: Pipeline) -> list[Alphabet]:
    out: list[Alphabet] = []
    for p in pipes:
        out.extend(p.alphabets())
    return out


def embed(alphabet: Alphabet, target: Alphabet) -> SequentialTransducer:
    """Letter-for-letter inclusion of ``alphabet`` into ``target``."""
    return letter_map(alphabet, target, {a: (a,) for a in alphabet})


def project(alphabet: Alphabet, target: Alphabet, mapping: dict[str, Sequence[str]] | None = None) -> SequentialTransducer:
    """Keep letters of ``target``, apply ``mapping`` to the rest, erase others."""
    mapping = mapping or {}
    return letter_map(
        alphabet, target, {a: mapping.get(a, (a,) if a in target else ()) for a in alphabet}
    )


def pipeline_reverse(alphabet: Alphabet) -> Pipeline:
    """Full-word reverse: iterated reverse over a separator that never occurs."""
    alphabet = Alphabet.of(alphabet) if not isinstance(alphabet, Alphabet) else alphabet
    sep = _fresh(alphabet)
    wide = alphabet.union([sep])
    return Pipeline([embed(alphabet, wide), IterRev(wide, sep), project(wide, alphabet)])


def rational_from_bidirectional(left: SequentialTransducer, right: SequentialTransducer) -> Pipeline:
    """``left`` after reverse, ``right``, reverse: a right-to-left pass then a left-to-right pass."""
    if left.input_alphabet != right.output_alphabet:
        raise AlphabetMismatch("left pass must read the right pass's output alphabet", 3)
    return Pipeline(
        [
            pipeline_reverse(right.input_alphabet),
            right,
            pipeline_reverse(right.output_alphabet),
            left,
        ]
    )


# ---------------------------------------------------------------------------
# domain extension
# ---------------------------------------------------------------------------


def _extend_sequential(t: SequentialTransducer, delta: Alphabet) -> SequentialTransducer:
    inp = t.input_alphabet.union(delta)
    out = t.output_alphabet.union(delta)
    passthrough = "D"

    def step(q, a):
        if q == passthrough:
            return q, (a,) if a in delta else ()
        if a in delta:
            return passthrough, (a,)
        i = t.input_alphabet.index(a)
        return int(t.dfa.delta[q, i]), t.outputs[q][i]

    def end(q):
        return () if q == passthrough else t.end[q]

    return seq_from_step(inp, out, t.dfa.initial, step, end)


def _extend_squaring(s: Squaring, delta: Alphabet) -> Pipeline:
    wide = s.alphabet.union(delta)
    sq = Squaring(wide)
    target = s.output_alphabet.union(delta)
    mapping = {}
    for a in sq.output_alphabet:
        base = strip_underline(a)
        if base in delta:
            # on a pure delta word each copy keeps only its underlined letter
            mapping[a] = (base,) if is_underlined(a) else ()
        else:
            mapping[a] = (a,)
    return Pipeline([sq, letter_map(sq.output_alphabet, target, mapping)])


def _extend_itrev(s: IterRev, delta: Alphabet) -> Pipeline:
    wide = s.alphabet.union(delta)
    sep = s.separator
    insert = letter_map(wide, wide, {a: (a, sep) if a in delta else (a,) for a in wide})

    def step(q, a):
        if q == "after" and a == sep:
            return "plain", ()
        return ("after" if a in delta else "plain"), (a,)

    strip = seq_from_step(wide, wide, "plain", step)
    return Pipeline([insert, IterRev(wide, sep), strip])


def extend_stage(s: Stage, delta: Alphabet) -> Pipeline:
    if isinstance(s, SequentialTransducer):
        return Pipeline([_extend_sequential(s, delta)])
    if isinstance(s, Squaring):
        return _extend_squaring(s, delta)
    if isinstance(s, IterRev):
        return _extend_itrev(s, delta)
    raise TypeError(f"unknown stage {s!r}")


def comb_domain_extend(h: Pipeline | Stage, delta: Alphabet | Iterable[str]) -> Pipeline:
    """Agrees with ``h`` on its own inputs and is the identity on ``delta*``."""
    h = as_pipeline(h)
    delta = delta if isinstance(delta, Alphabet) else Alphabet(tuple(delta))
    for i, a in enumerate(h.alphabets()):
        clash = set(a) & set(delta)
        if clash:
            raise ValidationError(f"extension letters {sorted(clash)} occur in an alphabet of the pipeline", i)
    return Pipeline([extend_stage(s, delta) for s in h.stages])


# ---------------------------------------------------------------------------
# if-then-else
# ---------------------------------------------------------------------------


def _recolor(L: Dfa, tag: str, marker: str) -> Pipeline:
    """w if w in L; otherwise the tagged copy of w, or ``marker`` when w is empty.

    Needs lookahead, so it is a right-to-left pass computing, per position,
    the set of states from which the rest of the word is accepted, followed
    by a left-to-right pass that knows the state reached so far.
    """
    sigma = L.alphabet
    n = L.n_states
    accept_mask = sum(1 << q for q in L.accepting)
    masks: dict[int, None] = {}

    def pre(mask, a):
        i = sigma.index(a)
        return sum(1 << q for q in range(n) if mask >> int(L.delta[q, i]) & 1)

    # enumerate reachable masks to fix the annotated alphabet
    todo = [accept_mask]
    masks[accept_mask] = None
    while todo:
        m = todo.pop()
        for a in sigma:
            r = pre(m, a)
            if r not in masks:
                masks[r] = None
                todo.append(r)
    annotated = Alphabet(tuple(f"{tag}{a}@{m}" for a in sigma for m in masks))

    def right_step(mask, a):
        return pre(mask, a), (f"{tag}{a}@{mask}",)

    right = seq_from_step(sigma, annotated, accept_mask, right_step)
    tagged = _copy(tag, sigma)
    out = sigma.union(tagged, [marker])
    decode = {f"{tag}{a}@{m}": (a, m) for a in sigma for m in masks}

    def left_step(q, sym):
        a, mask = decode[sym]
        if q == "empty":
            q = L.initial
        r = int(L.delta[q, sigma.index(a)])
        keep = mask >> r & 1
        return r, (a,) if keep else (tag + a,)

    def left_end(q):
        if q == "empty" and L.initial not in L.accepting:
            return (marker,)
        return ()

    left = seq_from_step(annotated, out, "empty", left_step, left_end)
    return rational_from_bidirectional(left, right)


def _swap(source: Alphabet, gamma: Alphabet, tag: str, old_marker: str, new_marker: str, target_plain: Alphabet) -> SequentialTransducer:
    """Untag tagged letters, tag plain ``gamma`` letters, drop the old marker.

    On the empty word it emits ``new_marker`` so that emptiness survives the
    round trip through the other branch.
    """
    out = target_plain.union(_copy(tag, gamma), [new_marker])

    def step(q, a):
        if a == old_marker:
            return "seen", ()
        if a in gamma:
            return "seen", (tag + a,)
        return "seen", (a[len(tag):],)

    return seq_from_step(source, out, "empty", step, lambda q: (new_marker,) if q == "empty" else ())


def comb_if_then_else(L: Dfa, f: Pipeline | Stage, g: Pipeline | Stage) -> Pipeline:
    """``f(w)`` when ``w`` is in ``L``, else ``g(w)``."""
    f, g = as_pipeline(f), as_pipeline(g)
    sigma, gamma = L.alphabet, f.output_alphabet
    if f.input_alphabet != sigma or g.input_alphabet != sigma:
        raise AlphabetMismatch("both branches must read the language's alphabet", 0)
    if g.output_alphabet != gamma:
        raise AlphabetMismatch("both branches must write the same alphabet", len(f))
    tag = _fresh(*_all_alphabets(f, g))
    m, m2 = tag, tag + tag
    delta1 = _copy(tag, sigma).union([m])
    delta2 = _copy(tag, gamma).union([m2])
    recolor = _recolor(L, tag, m)
    f_ext = comb_domain_extend(f, delta1)
    swap = _swap(f_ext.output_alphabet, gamma, tag, m, m2, sigma)
    g_ext = comb_domain_extend(g, delta2)
    final = project(
        g_ext.output_alphabet, gamma, {tag + c: (c,) for c in gamma} | {m2: ()}
    )
    return Pipeline([recolor, f_ext, swap, g_ext, final])


# ---------------------------------------------------------------------------
# blockwise map
# ---------------------------------------------------------------------------


def _blockwise_sequential(t: SequentialTransducer, sep: str) -> SequentialTransducer:
    inp = t.input_alphabet.union([sep])
    out = t.output_alphabet.union([sep])

    def step(q, a):
        if a == sep:
            return t.dfa.initial, t.end[q] + (sep,)
        i = t.input_alphabet.index(a)
        return int(t.dfa.delta[q, i]), t.outputs[q][i]

    return seq_from_step(inp, out, t.dfa.initial, step, lambda q: t.end[q])


def _blockwise_itrev(s: IterRev, sep: str, tag: str) -> Pipeline:
    inner = s.separator
    mid = tag + tag + tag
    inp = s.alphabet.union([sep])
    wide = inp.union([mid])
    # an outer separator becomes "inner mid inner", two empty inner blocks around mid
    encode = letter_map(inp, wide, {a: (inner, mid, inner) if a == sep else (a,) for a in inp})

    # every mid resets to "two"; this keeps the automaton counter-free
    def step(q, a):
        if a == mid:
            return "two", ()
        if q == "plain":
            return ("one", ()) if a == inner else ("plain", (a,))
        if q == "one":
            return ("one", (inner,)) if a == inner else ("plain", (inner, a))
        return ("plain", (sep,)) if a == inner else ("plain", ())

    decode = seq_from_step(wide, inp, "plain", step, lambda q: (inner,) if q == "one" else ())
    return Pipeline([encode, IterRev(wide, inner), decode])


def _blockwise_squaring(s: Squaring, sep: str, tag: str) -> Pipeline:
    dollar = tag + tag + tag + tag
    inp = s.alphabet.union([sep])
    wide = inp.union([dollar])
    sq = Squaring(wide)
    delims = {sep, dollar, underline(sep), underline(dollar)}
    letters = [a for a in sq.output_alphabet if a not in delims]
    annotated = Alphabet(tuple(sorted(delims)) + tuple(f"{tag}{a}@{u}" for a in letters for u in (0, 1)))
    decode = {f"{tag}{a}@{u}": (a, u) for a in letters for u in (0, 1)}

    # right-to-left: does an underline occur later in the same block?
    def right_step(u, a):
        if a in delims:
            return 0, (a,)
        return (1 if is_underlined(a) else u), (f"{tag}{a}@{u}",)

    right = seq_from_step(sq.output_alphabet, annotated, 0, right_step)
    target = s.output_alphabet.union([sep])

    # left-to-right: keep a block iff it contains the underlined position
    def left_step(p, a):
        if a in delims:
            return 0, (sep,) if a == underline(sep) else ()
        x, later = decode[a]
        under = is_underlined(x)
        return (1 if under or p else 0), (x,) if (p or later or under) else ()

    left = seq_from_step(annotated, target, 0, left_step)
    return Pipeline([append_letter(inp, dollar), sq, rational_from_bidirectional(left, right)])


def comb_blockwise_map(f: Pipeline | Stage, sep: str) -> Pipeline:
    """``w1|...|wn`` to ``f(w1)|...|f(wn)`` for the separator ``sep``."""
    f = as_pipeline(f)
    for i, a in enumerate(f.alphabets()):
        if sep in a:
            raise ValidationError(f"separator {sep!r} occurs in an alphabet of the pipeline", i)
    tag = _fresh(*f.alphabets(), [sep])
    parts: list[Pipeline | Stage] = []
    for s in f.stages:
        if isinstance(s, SequentialTransducer):
            parts.append(_blockwise_sequential(s, sep))
        elif isinstance(s, Squaring):
            parts.append(_blockwise_squaring(s, sep, tag))
        elif isinstance(s, IterRev):
            parts.append(_blockwise_itrev(s, sep, tag))
        else:
            raise TypeError(f"unknown stage {s!r}")
    return Pipeline(parts)


# ---------------------------------------------------------------------------
# pair concatenation
# ---------------------------------------------------------------------------


def _duplicate(sigma: Alphabet, tag: str, marker: str, sep: str) -> Pipeline:
    """w to ``marker w̄ sep w`` where w̄ is the tagged copy of w."""
    wide = sigma.union([sep])
    sq = Squaring(wide)
    out = sigma.union(_copy(tag, sigma), [marker, sep])
    # copy 1 underlines the first letter (or the separator when w is empty);
    # it yields "marker w̄ sep", and copy 2 yields w.

    def step(q, a):
        plain = strip_underline(a)
        if q == "start":
            if a == underline(sep):
                return "skip", (marker, sep)
            if not is_underlined(a):
                return "skip", ()
            return "first", (marker, tag + plain)
        if q == "first":
            return ("second", (sep,)) if plain == sep else ("first", (tag + plain,))
        if q == "second":
            return ("skip", ()) if plain == sep else ("second", (plain,))
        return "skip", ()

    cleanup = seq_from_step(sq.output_alphabet, out, "start", step)
    return Pipeline([append_letter(sigma, sep), sq, cleanup])


def comb_pair_concat(f: Pipeline | Stage, g: Pipeline | Stage) -> Pipeline:
    """``w`` to ``f(w) g(w)``."""
    f, g = as_pipeline(f), as_pipeline(g)
    sigma, gamma = f.input_alphabet, f.output_alphabet
    if g.input_alphabet != sigma or g.output_alphabet != gamma:
        raise AlphabetMismatch("both functions must share input and output alphabets", 0)
    tag = _fresh(*_all_alphabets(f, g))
    m, m2, sep = tag, tag + tag, tag + tag + tag
    delta1 = _copy(tag, sigma).union([m])
    delta2 = _copy(tag, gamma).union([m2])
    dup = _duplicate(sigma, tag, m, sep)
    g_ext = comb_domain_extend(g, delta1)
    swap = _swap(g_ext.output_alphabet, gamma, tag, m, m2, sigma)
    f_ext = comb_domain_extend(f, delta2)
    final = project(f_ext.output_alphabet, gamma, {tag + c: (c,) for c in gamma} | {m2: ()})
    # on "m w̄": g' is the identity, swap recovers w, f' computes f(w)
    # on "w": g' computes g(w), swap tags it, f' is the identity, final untags
    per_block = Pipeline([g_ext, swap, f_ext, final])
    mapped = comb_blockwise_map(per_block, sep)
    strip = project(mapped.output_alphabet, gamma)
    return Pipeline([dup, mapped, strip])


# ---------------------------------------------------------------------------
# iterated append
# ---------------------------------------------------------------------------


def comb_iterated_append(alphabet: Alphabet | Iterable[str], sep: str) -> Pipeline:
    """``v1|...|vn|v`` to ``v1 v|...|vn v``."""
    sigma = alphabet if isinstance(alphabet, Alphabet) else Alphabet.of(alphabet)
    if sep not in sigma:
        raise ValidationError(f"separator {sep!r} not in alphabet")
    tag = _fresh(sigma)
    dollar = tag
    wide = sigma.union([dollar])
    sq = Squaring(wide)
    delims = {dollar: 0, underline(dollar): 0, underline(sep): 1, sep: 2}
    letters = [a for a in sq.output_alphabet if a not in delims]
    annotated = Alphabet(tuple(delims) + tuple(f"{tag}{a}@{t}" for a in letters for t in (0, 1, 2)))
    decode = {f"{tag}{a}@{t}": (strip_underline(a), t) for a in letters for t in (0, 1, 2)}

    # right-to-left: which delimiter terminates the block of each letter
    def right_step(t, a):
        if a in delims:
            return delims[a], (a,)
        return t, (f"{tag}{a}@{t}",)

    right = seq_from_step(sq.output_alphabet, annotated, 0, right_step)

    # left-to-right over one copy: u = underlined separator seen, m = plain separator after it
    def left_step(state, a):
        u, m = state
        if a == underline(sep):
            return (1, m), ()
        if a == sep:
            return (u, 1 if u else m), ()
        if a == dollar:
            return (0, 0), (sep,) if (u and m) else ()
        if a == underline(dollar):
            return (0, 0), ()
        x, t = decode[a]
        keep = t == 1 or (t == 0 and u)
        return state, (x,) if keep else ()

    left = seq_from_step(annotated, sigma, (0, 0), left_step)
    return Pipeline([append_letter(sigma, dollar), sq, rational_from_bidirectional(left, right)])


# ---------------------------------------------------------------------------
# the running example: reverses of all prefixes, each followed by "|"
# ---------------------------------------------------------------------------


def prefix_cleanup(alphabet: Alphabet, sep: str) -> SequentialTransducer:
    """Runs on the reversed squared word; keeps, per copy, the letters up to
    and including the underlined one, drops the (originally last) copy of the
    trailing separator block, and erases underlines."""
    sq_out = alphabet.underlined()

    def step(q, a):
        plain = strip_underline(a)
        if q == "last":
            return ("skip", (sep,)) if a == sep else ("last", ())
        if q == "skip":
            return ("keep", (plain,)) if is_underlined(a) else ("skip", ())
        # keep
        if a == sep:
            return "skip", (sep,)
        return "keep", (plain,)

    return seq_from_step(sq_out, alphabet, "last", step)


def running_example_pipeline(alphabet: Iterable[str] = ("a", "b"), sep: str = "|") -> Pipeline:
    """append sep; square; cleanup (reverse, sequential, reverse); iterated reverse."""
    sigma = Alphabet(tuple(alphabet))
    if sep in sigma:
        raise ValidationError(f"separator {sep!r} must not be an input letter")
    gamma = sigma.union([sep])
    sq = Squaring(gamma)
    return Pipeline(
        [
            append_letter(sigma, sep),
            sq,
            pipeline_reverse(sq.output_alphabet),
            prefix_cleanup(gamma, sep),
            pipeline_reverse(gamma),
            IterRev(gamma, sep),
        ]
    )


def running_example_reference(word: Sequence[str] | str, sep: str = "|") -> Word:
    w = tuple(word) if not isinstance(word, str) else tuple(word)
    out: list[str] = []
    for i in range(1, len(w) + 1):
        out.extend(reversed(w[:i]))
        out.append(sep)
    return tuple(out)


# ---------------------------------------------------------------------------
# .pipe text format
# ---------------------------------------------------------------------------

_ALPHA = re.compile(r"^alphabet\s*:\s*(.*)$")


def parse_pipe(text: str, base_dir: str | os.PathLike | None = None) -> Pipeline:
    """Parse a ``.pipe`` file.

    Stage lines are ``seq <path>``, ``seq {`` ... ``}`` (inline transducer),
    ``square``, ``itrev <sep>`` and ``reverse``.
    """
    lines = list(iter_lines(text))
    current: Alphabet | None = None
    stages: list[Stage | Pipeline] = []
    i = 0
    while i < len(lines):
        no, line = lines[i]
        i += 1
        m = _ALPHA.match(line)
        if m:
            if current is not None:
                raise ParseError("alphabet header given twice", no)
            current = Alphabet(tuple(m.group(1).split()))
            continue
        if current is None:
            raise ParseError("missing 'alphabet:' header", no)
        head, _, arg = line.partition(" ")
        arg = arg.strip()
        try:
            if head == "square" and not arg:
                stage = Squaring(current)
            elif head == "itrev" and arg:
                stage = IterRev(current, arg)
            elif head == "reverse" and not arg:
                stage = pipeline_reverse(current)
            elif head == "seq" and arg == "{":
                body = []
                while i < len(lines) and lines[i][1] != "}":
                    body.append(lines[i][1])
                    i += 1
                if i == len(lines):
                    raise ParseError("unterminated inline seq block", no)
                i += 1
                stage = _conform(parse_seq("\n".join(body)), current, len(stages))
            elif head == "seq" and arg:
                path = os.path.join(base_dir or ".", arg)
                with open(path, encoding="utf-8") as fh:
                    stage = _conform(parse_seq(fh.read()), current, len(stages))
            else:
                raise ParseError(f"unknown stage line {line!r}", no)
        except ValidationError as exc:
            raise ValidationError(exc.message, len(stages)) from None
        stages.append(stage)
        current = stage.output_alphabet
    if current is None:
        raise ParseError("missing 'alphabet:' header")
    if not stages:
        raise ValidationError("a pipeline needs at least one stage", 0)
    return Pipeline(stages)


def _conform(t: SequentialTransducer, alphabet: Alphabet, index: int) -> SequentialTransducer:
    """Reorder a loaded transducer's input alphabet to match the chain."""
    if t.input_alphabet == alphabet:
        return t
    if set(t.input_alphabet) != set(alphabet):
        raise AlphabetMismatch(
            f"transducer reads {t.input_alphabet.letters}, pipeline provides {alphabet.letters}", index
        )
    cols = [t.input_alphabet.index(a) for a in alphabet]
    dfa = Dfa(alphabet, t.dfa.delta[:, cols], t.dfa.initial, t.dfa.accepting, t.dfa.names)
    outputs = tuple(tuple(row[c] for c in cols) for row in t.outputs)
    return SequentialTransducer(alphabet, t.output_alphabet, dfa, outputs, t.end)


def format_pipe(p: Pipeline) -> str:
    """Self-contained text: sequential stages are written inline."""
    lines = [f"alphabet: {' '.join(p.input_alphabet)}"]
    for s in p.stages:
        if isinstance(s, Squaring):
            lines.append("square")
        elif isinstance(s, IterRev):
            lines.append(f"itrev {s.separator}")
        else:
            lines.append("seq {")
            lines.extend("  " + ln for ln in format_seq(s).splitlines())
            lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "Pipeline",
    "PipelineReport",
    "as_pipeline",
    "comb_blockwise_map",
    "comb_domain_extend",
    "comb_if_then_else",
    "comb_iterated_append",
    "comb_pair_concat",
    "embed",
    "extend_stage",
    "format_pipe",
    "identity_transducer",
    "parse_pipe",
    "pipeline_eval",
    "pipeline_reverse",
    "pipeline_validate",
    "prefix_cleanup",
    "project",
    "rational_from_bidirectional",
    "running_example_pipeline",
    "running_example_reference",
]
