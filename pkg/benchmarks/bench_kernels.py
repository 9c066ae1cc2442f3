"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3]

Each case runs once untimed (numba compilation, caches), then ``repeat``
times; the best wall time is reported per backend.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

import poismix
from poismix import discretize, samplers
from poismix.levy import LevySpec
from poismix.rng import RandomSource


def cases():
    cts = LevySpec.cts(0.5, 1.0, 0.5)
    pt = LevySpec.pt(0.5, 1.0, 1.0)
    dm = discretize.build(cts, 1e-3)
    return {
        "compound CTS a=1e-2 n=2e4": lambda: samplers.compound_counts(cts, 1e-2, 20000, RandomSource(1)),
        "compound PT a=1e-2 n=2e4": lambda: samplers.compound_counts(pt, 1e-2, 20000, RandomSource(1)),
        "split CTS a=1e-6 n=2e3": lambda: samplers.split_counts(cts, 1e-6, 2000, RandomSource(1)),
        "acceptance alg4 1e5": lambda: samplers.acceptance_rate_mc(cts, 1e-2, 4, 100000, RandomSource(1)),
        "pmf recursion K=2e4": lambda: samplers.pmf_recursive(dm, 20000),
    }


def run(repeat: int) -> dict:
    out = {}
    for backend in ("numba", "numpy"):
        poismix.set_backend(backend)
        for name, fn in cases().items():
            fn()
            best = np.inf
            for _ in range(repeat):
                t = time.perf_counter()
                fn()
                best = min(best, time.perf_counter() - t)
            out[(name, backend)] = best
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    res = run(args.repeat)
    names = list(dict.fromkeys(k[0] for k in res))
    print(f"{'case':32s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for n in names:
        a, b = res[(n, "numba")], res[(n, "numpy")]
        print(f"{n:32s} {a:10.4f} {b:10.4f} {b / a:8.1f}")


if __name__ == "__main__":
    main()
