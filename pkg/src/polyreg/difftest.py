"""Differential testing across the four models, plus scaling benchmarks.

A bundle names several renditions of one string function.  ``difftest_run``
feeds them every word up to an exhaustive bound, then random words, and
reports the least input on which they disagree.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import tomli

from .atomic import parse_seq
from .core import Alphabet, Word, parse_dfa, parse_monoid, random_word, underline, words_up_to
from .errors import ParseError, PolyregError, ValidationError
from .forlang import forp_eval, forp_parse
from .lam import (
    App,
    Arrow,
    Fin,
    List,
    Sum,
    Term,
    listfun_eval_denot,
    normalize,
    parse_term,
    term_to_value,
    term_typecheck,
    word_literal,
)
from .pebble import parse_peb, pebble_eval
from .pipeline import parse_pipe

KINDS = {
    ".seq": "seq",
    ".pipe": "pipeline",
    ".peb": "pebble",
    ".forp": "forp",
    ".term": "term",
    ".dfa": "dfa",
    ".mon": "monoid",
}

Evaluator = Callable[[Word], Word]


def kind_of(path: str | os.PathLike, kind: str | None = None) -> str:
    if kind:
        return kind
    ext = Path(path).suffix
    if ext not in KINDS:
        raise ValidationError(f"cannot infer the model kind of {path}; pass --kind")
    return KINDS[ext]


def load_model(path: str | os.PathLike, kind: str | None = None):
    kind = kind_of(path, kind)
    text = Path(path).read_text(encoding="utf-8")
    if kind == "seq":
        return parse_seq(text)
    if kind == "pipeline":
        return parse_pipe(text, base_dir=Path(path).parent)
    if kind == "pebble":
        return parse_peb(text)
    if kind == "forp":
        return forp_parse(text)
    if kind == "term":
        return parse_term(text)
    if kind == "dfa":
        return parse_dfa(text)
    if kind == "monoid":
        return parse_monoid(text)
    raise ValidationError(f"unknown model kind {kind!r}")


def _render_item(v, t, encoding: str) -> str:
    if isinstance(t, Fin):
        return v
    if isinstance(t, Sum) and isinstance(t.a, Fin) and isinstance(t.b, Fin) and encoding == "underline":
        return v.v if v.side == 0 else underline(v.v)
    raise ValidationError(f"no string rendering for list items of type {t} (encoding {encoding!r})")


def term_evaluator(m: Term, strategy: str = "normalize", encoding: str = "underline", cap: int = 100_000) -> Evaluator:
    """Run a term of type ``{..}* -> T*`` on words.

    ``T`` is a finite set, or with the ``underline`` encoding a sum of
    finite sets whose right injections render as underlined letters.
    """
    t = term_typecheck(m)
    if not (isinstance(t, Arrow) and isinstance(t.a, List) and isinstance(t.a.t, Fin) and isinstance(t.b, List)):
        raise ValidationError(f"expected a list-to-list term, got {t}")
    src, item = t.a.t, t.b.t

    def run(word: Word) -> Word:
        word = tuple(word)
        if strategy == "normalize":
            value = term_to_value(normalize(App(m, word_literal(word, src)), cap))
        elif strategy == "denotational":
            value = listfun_eval_denot(m, word)
        else:
            raise ValidationError(f"unknown term strategy {strategy!r}")
        return tuple(_render_item(v, item, encoding) for v in value)

    return run


def evaluator_for(model, **opts) -> Evaluator:
    """A uniform ``word -> word`` callable for any evaluable model."""
    from .atomic import Stage
    from .forcompile import PrenexProgram
    from .forlang import ForProgram
    from .pebble import PebbleTransducer
    from .pipeline import Pipeline

    if isinstance(model, (Pipeline, Stage)):
        return lambda w: model.eval(w)
    if isinstance(model, PebbleTransducer):
        return lambda w: pebble_eval(model, w)
    if isinstance(model, (ForProgram, PrenexProgram)):
        return lambda w: forp_eval(model, w)
    if isinstance(model, Term):
        return term_evaluator(model, **opts)
    if callable(model):
        return model
    raise ValidationError(f"{type(model).__name__} is not an evaluable model")


@dataclass
class Variant:
    name: str
    kind: str
    evaluate: Evaluator
    max_len: int | None = None  # longer inputs skip this variant


@dataclass
class ModelBundle:
    name: str
    variants: list[Variant]
    alphabet: Alphabet
    max_len: int = 12
    exhaustive: int = 5

    def __post_init__(self):
        if not self.variants:
            raise ValidationError("a bundle needs at least one variant")
        if not isinstance(self.alphabet, Alphabet):
            self.alphabet = Alphabet(tuple(self.alphabet))


@dataclass(frozen=True)
class Mismatch:
    input: Word
    outputs: dict


@dataclass
class DiffReport:
    bundle: str
    seed: int
    cases_run: int
    first_mismatch: Mismatch | None
    timing: dict = field(default_factory=dict)
    coverage: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.first_mismatch is None

    def summary(self) -> str:
        lines = [f"bundle {self.bundle}: {self.cases_run} cases, seed {self.seed}"]
        for name, secs in self.timing.items():
            lines.append(f"  {name}: {self.coverage.get(name, 0)} runs, {secs:.3f}s")
        if self.first_mismatch is None:
            lines.append("  all variants agree")
        else:
            mm = self.first_mismatch
            lines.append(f"  MISMATCH on {''.join(mm.input)!r}")
            for name, out in mm.outputs.items():
                shown = out if isinstance(out, str) else "".join(out)
                lines.append(f"    {name}: {shown!r}")
        return "\n".join(lines)


def _inputs(b: ModelBundle, seed: int, budget: int):
    yield from words_up_to(b.alphabet, b.exhaustive)
    rng = np.random.default_rng(seed)
    letters = tuple(b.alphabet)
    for _ in range(budget):
        n = int(rng.integers(0, b.max_len + 1))
        yield tuple(letters[i] for i in rng.integers(0, len(letters), n))


def _safe(fn: Evaluator, w: Word):
    try:
        return tuple(fn(w))
    except PolyregError as e:
        return f"error: {e}"


def difftest_run(b: ModelBundle, seed: int = 0, budget: int = 200) -> DiffReport:
    timing = {v.name: 0.0 for v in b.variants}
    coverage = {v.name: 0 for v in b.variants}
    worst: Mismatch | None = None
    cases = 0
    for w in _inputs(b, seed, budget):
        cases += 1
        outs = {}
        for v in b.variants:
            if v.max_len is not None and len(w) > v.max_len:
                continue
            t0 = time.perf_counter()
            outs[v.name] = _safe(v.evaluate, w)
            timing[v.name] += time.perf_counter() - t0
            coverage[v.name] += 1
        if len(set(outs.values())) > 1:
            if worst is None or (len(w), w) < (len(worst.input), worst.input):
                worst = Mismatch(w, outs)
    missing = [name for name, n in coverage.items() if n == 0]
    if missing:
        raise ValidationError(f"variants never exercised: {missing}")
    return DiffReport(b.name, seed, cases, worst, timing, coverage)


def load_bundle(path: str | os.PathLike) -> ModelBundle:
    """Read a ``bundle.toml`` manifest; model paths are relative to it."""
    path = Path(path)
    try:
        data = tomli.loads(path.read_text(encoding="utf-8"))
    except tomli.TOMLDecodeError as e:
        raise ParseError(f"{path}: {e}") from None
    base = path.parent
    variants = []
    for i, entry in enumerate(data.get("variant", [])):
        if "path" not in entry:
            raise ValidationError(f"variant {i} has no path", i)
        model_path = base / entry["path"]
        kind = kind_of(model_path, entry.get("kind"))
        model = load_model(model_path, kind)
        opts = {}
        if kind == "term":
            opts = {"strategy": entry.get("strategy", "normalize"), "encoding": entry.get("encoding", "underline")}
        name = entry.get("name", f"{kind}:{entry['path']}")
        variants.append(Variant(name, kind, evaluator_for(model, **opts), entry.get("max_len")))
    if "alphabet" not in data:
        raise ValidationError("bundle manifest needs an alphabet")
    return ModelBundle(
        data.get("name", path.stem),
        variants,
        Alphabet(tuple(data["alphabet"])),
        int(data.get("max_len", 12)),
        int(data.get("exhaustive", 5)),
    )


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchRow:
    n: int
    input_len: int
    output_len: int
    seconds: float

    @property
    def per_symbol(self) -> float:
        return self.seconds / max(1, self.input_len + self.output_len)


def bench_scaling(
    evaluator: Callable[[Sequence[str]], Sequence],
    sizes: Sequence[int],
    reps: int = 3,
    alphabet: Sequence[str] = ("a", "b"),
    seed: int = 0,
    make_input: Callable[[int, np.random.Generator], object] | None = None,
) -> list[BenchRow]:
    """Best-of-``reps`` wall time per input size."""
    if list(sizes) != sorted(sizes):
        raise ValidationError("sizes must be ascending")
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        w = make_input(n, rng) if make_input else random_word(rng, tuple(alphabet), n, n)
        evaluator(w)  # warm-up, e.g. JIT compilation
        best, out_len = float("inf"), 0
        for _ in range(reps):
            t0 = time.perf_counter()
            out = evaluator(w)
            best = min(best, time.perf_counter() - t0)
            out_len = len(out)
        rows.append(BenchRow(n, len(w), out_len, best))
    return rows


def format_bench(rows: Sequence[BenchRow]) -> str:
    lines = [f"{'n':>8} {'input':>8} {'output':>12} {'seconds':>10} {'ns/symbol':>10}"]
    for r in rows:
        lines.append(f"{r.n:>8} {r.input_len:>8} {r.output_len:>12} {r.seconds:>10.4f} {r.per_symbol * 1e9:>10.2f}")
    return "\n".join(lines)


def normalized_spread(rows: Sequence[BenchRow]) -> float:
    """Max/min ratio of time per (input + output) symbol."""
    per = [r.per_symbol for r in rows]
    return max(per) / min(per)
