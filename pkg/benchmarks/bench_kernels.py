"""Compare the compiled kernels with the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from conefix import _pykernels

try:
    from conefix import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    A3, B3 = rng.normal(size=(300, 3)), rng.normal(size=(300, 3))
    As, Bs = rng.normal(size=(6, 2)), rng.normal(size=(6, 2))
    w = np.ones(3)
    y = rng.normal(size=3)
    D = np.abs(rng.normal(size=(300, 300, 3)))
    return {
        "hausdorff 300x300 componentwise": lambda k: k.directed_distance(A3, B3, True, 0, w),
        "hausdorff 300x300 scalar": lambda k: k.directed_distance(A3, B3, False, 0, w),
        "hausdorff 6x6 scalar (x1000)": lambda k: [k.directed_distance(As, Bs, False, 0, w[:2])
                                                   for _ in range(1000)],
        "nearest_index 300 points (x1000)": lambda k: [k.nearest_index(y, B3, False, 0, w, 0, w[:1])
                                                       for _ in range(1000)],
        "triangle check 300 points": lambda k: k.triangle_violations(D, 1e-12, 10),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    rng = np.random.default_rng(0)
    print(f"{'kernel':36s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases(rng).items():
        py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        cy = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        print(f"{name:36s} {py * 1e3:11.2f} {cy * 1e3:12.2f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
