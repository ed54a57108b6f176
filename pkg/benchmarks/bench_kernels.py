"""Time the numba history-sum kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 512,1024,2048] [--columns 64] [--repeat 3]

Both implementations are imported directly, so one run covers both paths
regardless of FRACTRACE_DISABLE_NUMBA.  The first numba call (compilation or
cache load) is excluded from the timings.
"""

import argparse
import time

import numpy as np

from fractrace import TimeGrid
from fractrace.kernels import _numba_impl, _numpy_impl

NAMES = ("rl_apply", "adjoint_apply", "l1_apply", "marchaud_apply")


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="512,1024,2048")
    ap.add_argument("--columns", type=int, default=64)
    ap.add_argument("--alpha", type=float, default=0.6)
    ap.add_argument("--grading", type=float, default=3.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'M':>6}{'numpy [s]':>12}{'numba [s]':>12}{'speed-up':>10}{'max diff':>11}")
    for M in (int(s) for s in args.sizes.split(",")):
        t = TimeGrid(1.0, M, args.grading).t
        v = np.ascontiguousarray(rng.standard_normal((M + 1, args.columns)))
        for name in NAMES:
            fnp, fnb = getattr(_numpy_impl, name), getattr(_numba_impl, name)
            ref, got = fnp(t, v, args.alpha), fnb(t, v, args.alpha)
            tn = best_of(lambda: fnp(t, v, args.alpha), args.repeat)
            tb = best_of(lambda: fnb(t, v, args.alpha), args.repeat)
            diff = float(np.max(np.abs(ref - got)))
            print(f"{name:<16}{M:>6}{tn:>12.4f}{tb:>12.4f}{tn / tb:>10.1f}{diff:>11.1e}")


if __name__ == "__main__":
    main()
