#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure-numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [--limit 2000000] [--repeat 3]

Each kernel is timed on both backends with identical inputs; outputs are
cross-checked so the table doubles as a parity smoke test.
"""

import argparse
import time

import numpy as np

from symsq import _core_py
from symsq import arith
from symsq.sigma_dde import StepBeta

try:
    from symsq import _core
except ImportError:
    _core = None


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=2 * 10**6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if _core is None:
        print("compiled core not available; build the extension first")
        return 1

    limit = args.limit
    tab = arith.build_factor_sieve(limit)
    off = tab.pp_offsets
    rng = np.random.default_rng(0)
    pp = rng.uniform(-2.0, 2.0, size=int(off[-1]))

    sb = StepBeta(25)
    nodes = np.linspace(sb.x1, 3.0, 29601)
    jumps = np.ascontiguousarray(sb.chi[:-1] - sb.chi[1:])
    xk = np.ascontiguousarray(sb.x)

    cases = [
        (
            f"spf_sieve({limit:.0e})",
            lambda impl: impl.spf_sieve(limit),
            lambda a, b: np.array_equal(a, b),
        ),
        (
            f"multiplicative_table({limit:.0e})",
            lambda impl: impl.multiplicative_table(tab.spf, tab.primes, tab.prime_index, pp, off),
            lambda a, b: np.array_equal(a, b),
        ),
        (
            "box_count(2,1,3,-23, n<=2000)",
            lambda impl: [impl.box_count(2, 1, 3, -23, n) for n in range(1, 2001)],
            lambda a, b: a == b,
        ),
        (
            "dde_rk4(29601 nodes, 25 delays)",
            lambda impl: impl.dde_rk4(nodes, xk, jumps, sb.chi0),
            lambda a, b: np.allclose(a, b, rtol=1e-12, atol=1e-14),
        ),
    ]

    print(f"{'kernel':38s} {'cython':>10s} {'python':>10s} {'speedup':>8s}  match")
    for name, run, same in cases:
        t_cy, out_cy = best_of(lambda: run(_core), args.repeat)
        t_py, out_py = best_of(lambda: run(_core_py), args.repeat)
        ok = same(out_cy, out_py)
        print(f"{name:38s} {t_cy:9.3f}s {t_py:9.3f}s {t_py / t_cy:7.1f}x  {ok}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
