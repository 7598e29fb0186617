"""Time the compiled term kernel against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--points N] [--repeat R]

Uses the momentum residual pieces of the first family, bound at a = abar = k = 1,
which is what ``sample_residual`` and ``grid_convergence`` spend their time on.
"""

import argparse
import timeit

import numpy as np

from mhdblowup import kernels
from mhdblowup.catalog import family_one
from mhdblowup.fields import compile_terms
from mhdblowup.residuals import momentum_pieces

PARAMS = {"a": 1.0, "abar": 1.0, "k": 1.0, "nu": 0.3, "Tstar": 1.0}


def tables():
    out = []
    for pieces in momentum_pieces(family_one()):
        for f in pieces:
            if len(f):
                out.append(compile_terms(f, PARAMS))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    x1, x2, x3 = (rng.uniform(0.2, 1.5, args.points) for _ in range(3))
    s = rng.uniform(0.01, 1.0, args.points)
    tabs = tables()
    n_terms = sum(len(c) for c, _ in tabs)

    backends = {"numpy": kernels.eval_terms_numpy}
    if kernels.eval_terms_cython is not None:
        backends["cython"] = kernels.eval_terms_cython
    results = {}
    for name, fn in backends.items():
        run = lambda: [fn(c, e, x1, x2, x3, s, 1.0) for c, e in tabs]  # noqa: E731
        run()
        results[name] = min(timeit.repeat(run, number=1, repeat=args.repeat))

    print(f"{len(tabs)} term tables, {n_terms} terms, {args.points} points, best of {args.repeat}")
    for name, secs in results.items():
        print(f"  {name:7s} {secs * 1e3:9.1f} ms   {n_terms * args.points / secs / 1e6:8.1f} Mterm/s")
    if "cython" in results:
        print(f"  speedup {results['numpy'] / results['cython']:.2f}x")
        ref = [kernels.eval_terms_numpy(c, e, x1, x2, x3, s, 1.0) for c, e in tabs]
        got = [kernels.eval_terms_cython(c, e, x1, x2, x3, s, 1.0) for c, e in tabs]
        err = max(float(np.max(np.abs(r - g) / (1 + np.abs(r)))) for r, g in zip(ref, got))
        print(f"  max relative difference {err:.1e}")
    else:
        print("  compiled kernel not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
