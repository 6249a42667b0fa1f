#!/usr/bin/env python3
"""Benchmark: compiled kernels against the pure-Python fallback.

Runs the same grid workloads through both backends, checks they agree
bit for bit, and prints the timing table.  Usage:

    python benchmarks/bench_kernels.py [--res 256] [--repeat 3]
"""

import argparse
import math
import time

import numpy as np

from gaugemeasure import mittag
from gaugemeasure._kernels import _pure

try:
    from gaugemeasure._kernels import _core
except ImportError:
    _core = None


def timed(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_exp_escape(res, repeat):
    args = (0.1, 0.11183255915896298, 1e10, 200,
            -2.0, 10.0 / res, -8.0, 16.0 / res, res, 0, res)
    out_p = np.zeros((res, res), np.uint8)
    rows = [("exp escape", "python",
             timed(lambda: _pure.exp_escape_rows(*args, out_p), repeat))]
    if _core is not None:
        out_c = np.zeros((res, res), np.uint8)
        rows.append(("exp escape", "c",
                     timed(lambda: _core.exp_escape_rows(*args, out_c), repeat)))
        assert np.array_equal(out_p, out_c), "backend mismatch"
    return rows


def bench_ml_ref(res, repeat):
    p = mittag.calibrated_params(2.0)
    ratios = mittag.term_ratio_table(p.rho)
    args = (p.rho, p.log_a, ratios, math.log(p.r_switch), p.delta,
            mittag.SERIES_TOL, mittag.MAX_TERMS,
            0.0, 6.0 / res, -math.pi, 2.0 * math.pi / res, res, 0, res)
    ref_p = np.empty((res, res))
    fails_p = np.zeros(res, np.int32)
    rows = [("ml tract scan", "python",
             timed(lambda: _pure.ml_ref_rows(*args, ref_p, fails_p), repeat))]
    if _core is not None:
        ref_c = np.empty((res, res))
        fails_c = np.zeros(res, np.int32)
        rows.append(("ml tract scan", "c",
                     timed(lambda: _core.ml_ref_rows(*args, ref_c, fails_c), repeat)))
        assert np.array_equal(ref_p, ref_c), "backend mismatch"
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--res", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _core is None:
        print("compiled kernels not available; timing the fallback only")
    rows = bench_exp_escape(args.res, args.repeat) + bench_ml_ref(args.res, args.repeat)
    print(f"\ngrid {args.res}x{args.res}, best of {args.repeat}")
    print(f"{'workload':<16} {'backend':<8} {'seconds':>10} {'speedup':>9}")
    base = {}
    for name, backend, secs in rows:
        if backend == "python":
            base[name] = secs
        speed = f"{base[name] / secs:8.1f}x" if backend == "c" else "       -"
        print(f"{name:<16} {backend:<8} {secs:>10.4f} {speed:>9}")


if __name__ == "__main__":
    main()
