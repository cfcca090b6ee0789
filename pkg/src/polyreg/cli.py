"""Command-line front end: ``polyreg <verb> ...``.

Exit status is 0 on success, 1 when evaluation or a check fails at run
time, and 2 for unreadable, unparsable or invalid input.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import _kernels
from .core import Alphabet, format_cli_word, format_dfa, tokenize
from .difftest import (
    bench_scaling,
    difftest_run,
    evaluator_for,
    format_bench,
    kind_of,
    load_bundle,
    load_model,
    normalized_spread,
)
from .errors import AlphabetMismatch, ParseError, PolyregError, TypeCheckError, ValidationError

STATIC_ERRORS = (ParseError, ValidationError, TypeCheckError, AlphabetMismatch, OSError)


def _input_alphabet(model):
    from .lam import Term, term_typecheck

    if isinstance(model, Term):
        t = term_typecheck(model)
        return Alphabet(tuple(t.a.t.elems))
    alphabet = getattr(model, "input_alphabet", None)
    if alphabet is None:
        return None
    return alphabet if isinstance(alphabet, Alphabet) else Alphabet(tuple(alphabet))


def _word(text: str, model=None):
    alphabet = _input_alphabet(model) if model is not None else None
    return tokenize(text, alphabet)


def _emit(word) -> None:
    sys.stdout.write(format_cli_word(word) + "\n")


def cmd_eval(args) -> int:
    model = load_model(args.model, args.kind)
    opts = {"strategy": args.strategy} if kind_of(args.model, args.kind) == "term" else {}
    run = evaluator_for(model, **opts)
    _emit(run(_word(args.input, model)))
    return 0


def cmd_compile(args) -> int:
    from .forcompile import forp_prenex, forp_to_pebble
    from .forlang import ForProgram, format_program
    from .pebble import format_peb

    model = load_model(args.source, args.kind)
    if not isinstance(model, ForProgram):
        raise ValidationError("compile expects a for-program (.forp)")
    target = args.target or {".peb": "pebble", ".forp": "prenex"}.get(Path(args.to).suffix)
    if target == "pebble":
        text = format_peb(forp_to_pebble(model))
    elif target == "prenex":
        text = format_program(forp_prenex(model).to_program())
    else:
        raise ValidationError("choose --target pebble or prenex (or use a .peb/.forp output path)")
    Path(args.to).write_text(text, encoding="utf-8")
    return 0


def cmd_compose(args) -> int:
    from .forcompile import forp_compose
    from .forlang import format_program

    f = load_model(args.first, "forp")
    g = load_model(args.second, "forp")
    text = format_program(forp_compose(f, g))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_preimage(args) -> int:
    from .preimage import preimage_pipeline

    p = load_model(args.pipeline, args.kind or None)
    L = load_model(args.lang, "dfa")
    report = preimage_pipeline(p, L)
    text = format_dfa(report.result)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.report:
        print(f"states: {report.result.n_states}", file=sys.stderr)
        print(f"empty: {'yes' if report.result.is_empty() else 'no'}", file=sys.stderr)
        if report.applicable:
            print(f"first-order preserved: {'yes' if report.first_order_preserved else 'no'}", file=sys.stderr)
        else:
            print("first-order preserved: not applicable", file=sys.stderr)
    return 0


def cmd_normalize(args) -> int:
    from .lam import format_term, format_value, normalize, term_to_value, term_typecheck

    m = load_model(args.term, "term")
    if args.apply is not None:
        run = evaluator_for(m, strategy="normalize", cap=args.cap)
        _emit(run(_word(args.apply, m)))
        return 0
    nf = normalize(m, args.cap)
    try:
        print(format_value(term_to_value(nf)))
    except PolyregError:
        print(format_term(nf))
    if args.type:
        print(f"type: {term_typecheck(nf)}", file=sys.stderr)
    return 0


def cmd_forest(args) -> int:
    from .forest import forest_build, forest_height, forest_validate, format_forest, interval_product

    h = load_model(args.monoid, "monoid")
    word = tokenize(args.word, h.alphabet)
    f = forest_build(h, word, args.mode)
    names = h.monoid.names
    if args.query:
        i, j = args.query
        print(names[interval_product(f, i, j)])
        return 0
    print(_named(format_forest(f), names))
    print(f"height: {forest_height(f)}")
    report = forest_validate(f)
    for v in report.violations:
        print(f"violation at {list(v.path)}: {v.message}", file=sys.stderr)
    return 0 if report.ok else 1


def _named(text: str, names) -> str:
    return re.sub(r"value=(\d+)", lambda m: f"value={names[int(m.group(1))]}", text)


def cmd_difftest(args) -> int:
    report = difftest_run(load_bundle(args.bundle), args.seed, args.budget)
    print(report.summary())
    return 0 if report.ok else 1


def cmd_bench(args) -> int:
    from .atomic import Stage
    from .pipeline import Pipeline

    model = load_model(args.model, args.kind)
    sizes = [int(s) for s in args.sizes.split(",")]
    alphabet = _input_alphabet(model)
    if isinstance(model, (Pipeline, Stage)):
        # integer-coded path: no per-symbol Python objects
        def make(n, rng):
            return rng.integers(0, len(alphabet), n).astype(alphabet.dtype)

        rows = bench_scaling(model.eval_codes, sizes, args.reps, seed=args.seed, make_input=make)
    else:
        rows = bench_scaling(evaluator_for(model), sizes, args.reps, alphabet=tuple(alphabet), seed=args.seed)
    print(format_bench(rows))
    print(f"spread: {normalized_spread(rows):.2f}x  backend: {_kernels.backend()}")
    return 0


def cmd_validate(args) -> int:
    from .forlang import ForProgram, forp_is_first_order
    from .lam import Term, term_typecheck
    from .pebble import PebbleTransducer
    from .pipeline import Pipeline, pipeline_validate

    model = load_model(args.model, args.kind)
    if isinstance(model, Pipeline):
        r = pipeline_validate(model)
        print(f"pipeline: {r.stages} stages, first-order: {'yes' if r.first_order else 'no'}")
    elif isinstance(model, ForProgram):
        print(f"for-program: first-order: {'yes' if forp_is_first_order(model) else 'no'}")
    elif isinstance(model, PebbleTransducer):
        print(f"pebble transducer: {len(model.states)} states, {model.k} pebbles")
    elif isinstance(model, Term):
        print(f"term: {term_typecheck(model)}")
    else:
        print(f"{type(model).__name__}: ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyreg", description="Polyregular string functions in four models.")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("eval", help="run a model on one input word")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="input word; _c is underlined c, \\xNN escapes")
    p.add_argument("--kind")
    p.add_argument("--strategy", choices=("normalize", "denotational"), default="normalize")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("compile", help="for-program to pebble transducer or prenex form")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--target", choices=("pebble", "prenex"))
    p.add_argument("--kind")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("compose", help="compose two for-programs (first, then second)")
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_compose)

    p = sub.add_parser("preimage", help="preimage of a regular language under a pipeline")
    p.add_argument("--pipeline", required=True)
    p.add_argument("--lang", required=True)
    p.add_argument("--out")
    p.add_argument("--report", action="store_true")
    p.add_argument("--kind")
    p.set_defaults(fn=cmd_preimage)

    p = sub.add_parser("normalize", help="normalize a list-calculus term")
    p.add_argument("--term", required=True)
    p.add_argument("--apply", help="apply the term to this word first")
    p.add_argument("--cap", type=int, default=100_000)
    p.add_argument("--type", action="store_true", help="also print the type")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("forest", help="factorization forest of a word")
    p.add_argument("--monoid", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--mode", choices=("plain", "idempotent"), default="idempotent")
    p.add_argument("--query", type=int, nargs=2, metavar=("I", "J"))
    p.set_defaults(fn=cmd_forest)

    p = sub.add_parser("difftest", help="cross-check the models of a bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=200)
    p.set_defaults(fn=cmd_difftest)

    p = sub.add_parser("bench", help="time a model at growing input sizes")
    p.add_argument("--model", required=True)
    p.add_argument("--sizes", default="1000,2000,4000,8000")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("validate", help="parse and check a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--kind")
    p.set_defaults(fn=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except STATIC_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except PolyregError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
