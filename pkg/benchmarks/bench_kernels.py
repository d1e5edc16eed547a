"""Compare the numba and numpy Hermite-Gauss table kernels.

    python benchmarks/bench_kernels.py [--nmax 40] [--points 100000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from hgsqueeze import _kernels


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nmax", type=int, default=40)
    ap.add_argument("--points", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    xi = np.linspace(-8.0, 8.0, args.points)
    kernels = {"numpy": _kernels._hg_table_numpy}
    if _kernels.HAS_NUMBA:
        _kernels._hg_table_numba(args.nmax, xi)  # compile outside the timing
        kernels["numba"] = _kernels._hg_table_numba

    best = {}
    for name, fn in kernels.items():
        t = min(timeit.repeat(lambda: fn(args.nmax, xi), number=1, repeat=args.repeat))
        best[name] = t
        print(f"{name:6s} nmax={args.nmax} points={args.points}: {t * 1e3:8.2f} ms")
    if len(best) == 2:
        ref = _kernels._hg_table_numpy(args.nmax, xi)
        diff = np.max(np.abs(_kernels._hg_table_numba(args.nmax, xi) - ref))
        print(f"speedup numba/numpy: {best['numpy'] / best['numba']:.2f}x  (max abs diff {diff:.1e})")
    else:
        print("numba not available; numpy timing only")


if __name__ == "__main__":
    main()
