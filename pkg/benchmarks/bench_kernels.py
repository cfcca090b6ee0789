"""Compare the numba and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--sizes 10000,100000,1000000] [--reps 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from polyreg import _kernels
from polyreg.atomic import IterRev, Squaring
from polyreg.core import Alphabet
from polyreg.pipeline import running_example_pipeline


def best_of(fn, reps: int) -> float:
    fn()  # warm-up, including JIT compilation
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(sizes, rng):
    ab = Alphabet(("a", "b"))
    sep = Alphabet(("a", "b", "|"))
    running = running_example_pipeline()
    itrev = IterRev(sep, "|")
    square = Squaring(ab)
    for n in sizes:
        w2 = rng.integers(0, 2, n).astype(np.uint8)
        w3 = rng.integers(0, 3, n).astype(np.uint8)
        delta = rng.integers(0, 8, (8, 2)).astype(np.int32)
        yield "dfa_run", n, lambda: _kernels.dfa_run(delta, 0, w2)
        yield "iterated_reverse", n, lambda: itrev.eval_codes(w3)
        m = int(np.sqrt(n))
        yield "squaring", m, lambda: square.eval_codes(w2[:m])
        k = n // 250  # quadratic output: 40, 400, 4000 at the default sizes
        yield "running pipeline", k, lambda: running.eval_codes(w2[:k])


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="10000,100000,1000000")
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]
    backends = ["numba", "numpy"] if _kernels.HAVE_NUMBA else ["numpy"]

    print(f"{'kernel':<18} {'n':>9} " + " ".join(f"{b + ' (ms)':>12}" for b in backends) + f" {'speedup':>8}")
    for name, n, fn in cases(sizes, np.random.default_rng(0)):
        times = []
        for b in backends:
            with _kernels.use_backend(b):
                times.append(best_of(fn, args.reps))
        speed = f"{times[1] / times[0]:>7.1f}x" if len(times) == 2 else ""
        print(f"{name:<18} {n:>9} " + " ".join(f"{t * 1e3:>12.3f}" for t in times) + f" {speed:>8}")


if __name__ == "__main__":
    main()
