"""Time the compiled and pure-numpy modular row reductions on random dense matrices.

Usage: python bench/bench_rref.py [--sizes 200 500 1000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from artifact import _kernels

P = 67108859


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 500, 1000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    if _kernels.USE_NUMBA:
        _kernels.rref_mod(np.eye(4), P, "numba")  # compile outside the timing
    print(f"{'n':>6} {'numpy_s':>10} {'numba_s':>10} {'speedup':>8} agree")
    for n in args.sizes:
        A = rng.integers(0, P, size=(n, n)).astype(np.float64)
        A[:, n // 2] = A[:, 0]  # force a rank drop
        tn, (Rn, pn) = _time(lambda: _kernels.rref_mod(A, P, "numpy"), args.repeat)
        if _kernels.USE_NUMBA:
            tc, (Rc, pc) = _time(lambda: _kernels.rref_mod(A, P, "numba"), args.repeat)
            agree = np.array_equal(Rn, Rc) and np.array_equal(pn, pc)
            print(f"{n:>6} {tn:>10.3f} {tc:>10.3f} {tn / tc:>8.1f} {agree}")
        else:
            print(f"{n:>6} {tn:>10.3f} {'-':>10} {'-':>8} -")


if __name__ == "__main__":
    main()
