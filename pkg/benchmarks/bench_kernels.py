#!/usr/bin/env python3
"""Benchmark the compiled selection kernels against the NumPy fallback.

Times one full greedy step at several graph sizes: the per-candidate
marginal-gain sweep over every node plus the rank-one downdate that
commits a selection.  Also reports the direct-inversion cost per
candidate for scale, since that is the path the fast kernels replace.

Usage: python3 benchmarks/bench_kernels.py [--sizes 200,400,800] [--repeats 15]
"""

import argparse
import math
import time

import numpy as np

from grfactive import Criterion, WeightedGraph, build_laplacian, evaluate_risk
from grfactive import _fast_py
from grfactive.linalg import spd_inverse

try:
    from grfactive import _fast

    BACKENDS = {"compiled": _fast, "python": _fast_py}
except ImportError:
    BACKENDS = {"python": _fast_py}


def ring_with_chords(rng, n, chords):
    edges = {(i, (i + 1) % n): 1.0 for i in range(n)}
    edges = {(min(i, j), max(i, j)): w for (i, j), w in edges.items()}
    added = 0
    while added < chords:
        i, j = int(rng.integers(n)), int(rng.integers(n))
        key = (min(i, j), max(i, j))
        if i != j and key not in edges:
            edges[key] = 1.0
            added += 1
    return WeightedGraph(n, tuple((i, j, w) for (i, j), w in sorted(edges.items())))


def best_of(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,400,800")
    parser.add_argument("--repeats", type=int, default=15)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)

    header = f"{'N':>6} {'backend':>9} {'sweep':>12} {'downdate':>12} {'direct/cand':>12}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        g = ring_with_chords(rng, n, 3 * n)
        lap = build_laplacian(g, "regularized", sigma=10.0)
        sigma = np.ascontiguousarray(spd_inverse(lap.matrix))
        cand = np.arange(n, dtype=np.intp)
        crit = Criterion(kind="classification")
        direct = best_of(lambda: evaluate_risk(lap, [0], crit), repeats=3)
        for name, mod in BACKENDS.items():
            t_sweep = best_of(
                lambda: mod.candidate_reductions(sigma, 1e-12, cand, cand, False),
                args.repeats,
            )

            def step():
                work = sigma.copy()
                mod.downdate(work, 0)

            t_copy = best_of(lambda: sigma.copy(), args.repeats)
            t_down = max(best_of(step, args.repeats) - t_copy, 0.0)
            print(
                f"{n:>6} {name:>9} {1e6 * t_sweep:>10.1f}us "
                f"{1e6 * t_down:>10.1f}us {1e6 * direct:>10.1f}us"
            )


if __name__ == "__main__":
    main()
