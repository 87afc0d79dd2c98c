"""Compiled vs pure-Python modular kernels.

Run with ``python benchmarks/bench_kernels.py``.  Times the GF(p) nullspace
on the linear system of an order-6, degree-21 operator fit and a length-2000
modular series product.
"""
import random
import sys
import time

from ising_exact import _kernels_py
from ising_exact.odehunt import DEFAULT_PRIME

try:
    from ising_exact import _kernels
except ImportError:
    _kernels = None


def _best(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    p = DEFAULT_PRIME
    rng = random.Random(1234)
    ncols = 7 * 22
    rows = [[rng.randrange(p) for _ in range(ncols)] for _ in range(ncols + 10)]
    a = [rng.randrange(p) for _ in range(2000)]
    b = [rng.randrange(p) for _ in range(2000)]
    cases = [
        ("nullspace %dx%d" % (len(rows), ncols), lambda k: k.nullspace_mod(rows, ncols, p)),
        ("series product n=2000", lambda k: k.series_mul_mod(a, b, 2000, p)),
    ]
    if _kernels is None:
        print("compiled kernels not built; only the Python timings are shown")
    for name, fn in cases:
        tp = _best(lambda: fn(_kernels_py), repeat=1)
        line = f"{name:28s} python {tp:9.4f} s"
        if _kernels is not None:
            if fn(_kernels) != fn(_kernels_py):
                print(f"{name}: backends disagree", file=sys.stderr)
                return 1
            tc = _best(lambda: fn(_kernels))
            line += f"   cython {tc:9.4f} s   speedup {tp / tc:7.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
