"""Compare the compiled and numpy kernels on the same inputs.

    python benchmarks/bench_kernels.py [--x 1e7] [--segment 1048576] [--repeat 3]
"""

import argparse
import math
import time

import numpy as np

from additive_lab import builtin
from additive_lab.kernels import get_backend
from additive_lab.scan import _prepare


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=float, default=1e7, help="sieve limit for the SPF table")
    ap.add_argument("--segment", type=int, default=2**20, help="window length for the segment kernels")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    X = int(args.x)
    lo = X - args.segment
    prep = _prepare(builtin("big_omega"), X)
    data = np.random.default_rng(0).normal(size=args.segment)

    cases = {
        "spf_table": lambda k: k.spf_table(X),
        "factor_segment": lambda k: k.factor_segment(lo, X, prep.base),
        "additive_segment": lambda k: k.additive_segment(lo, X, prep.base, prep.table, prep.primes, prep.prime_vals),
        "compensated_sum": lambda k: k.compensated_sum(data),
    }
    try:
        core = get_backend("cython")
    except ImportError:
        core = None
        print("compiled extension not built; timing the numpy kernels only")
    py = get_backend("python")

    print(f"{'kernel':<18} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, fn in cases.items():
        tp, _ = best_of(lambda: fn(py), args.repeat)
        if core is None:
            print(f"{name:<18} {tp:10.4f} {'-':>10} {'-':>8}")
            continue
        tc, _ = best_of(lambda: fn(core), args.repeat)
        speed = tp / tc if tc > 0 else math.inf
        print(f"{name:<18} {tp:10.4f} {tc:10.4f} {speed:8.1f}x")


if __name__ == "__main__":
    main()
