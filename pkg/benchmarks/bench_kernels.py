"""Time the compiled kernels against the numpy fallback.

Run: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from beltrami_lab import _kernels_py as py

try:
    from beltrami_lab import _kernels as cy
except ImportError:
    cy = None


def cases(rng):
    n = 512
    Sa = np.pad(rng.uniform(0.5, 2, (n, n)), ((1, 0), (1, 0))).cumsum(0).cumsum(1)
    Sb = np.pad(rng.uniform(0.5, 2, (n, n)), ((1, 0), (1, 0))).cumsum(0).cumsum(1)
    s = rng.integers(1, 64, 200_000)
    r, c = rng.integers(0, n - s), rng.integers(0, n - s)
    m = 2048
    t = 2 * np.pi * np.arange(m) / m
    z = np.exp(1j * t) * (1 + 0.1 * np.cos(3 * t))
    f = z / np.abs(z)
    ds = np.full(m, 2 * np.pi / m)
    g = np.sqrt(np.linspace(0, 1, 4097))
    widths = np.unique(np.geomspace(1, 4096, 64).astype(int))
    return {
        "box_product": lambda k: k.box_product(Sa, Sb, r, c, s, 1.0, 1.0),
        "besov_sum": lambda k: k.besov_sum(z, f, ds, 3.0, np.zeros(m)),
        "oscillation": lambda k: k.oscillation(g, widths),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<14}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, run in cases(np.random.default_rng(0)).items():
        tp = min(timeit.repeat(lambda: run(py), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:<14}{tp:>14.2f}{'n/a':>14}{'':>10}")
            continue
        tc = min(timeit.repeat(lambda: run(cy), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<14}{tp:>14.2f}{tc:>14.2f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
