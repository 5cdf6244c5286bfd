"""Compare the numba and numpy backends of the oracle kernels.

    python benchmarks/bench_kernels.py [--repeats 5] [--samples 1000000]

Prints best-of-N wall times per kernel and checks that both backends agree
(quadrature nodes to 1e-13, normal variates bit for bit).
"""
import argparse
import time

import numpy as np

from steinext import _kernels


def best_time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--samples", type=int, default=1_000_000)
    args = parser.parse_args()

    if not _kernels.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")

    # compile outside the timed region
    _kernels.gauss_hermite(8, backend="numba")
    _kernels.standard_normals(0, 16, backend="numba")

    cases = [(f"gauss_hermite N={n}", lambda b, n=n: _kernels.gauss_hermite(n, backend=b)) for n in (64, 256)]
    cases.append(
        (f"normals {args.samples:.0e}", lambda b: _kernels.standard_normals(7, args.samples, backend=b))
    )

    print(f"{'kernel':<22} {'numba [ms]':>11} {'numpy [ms]':>11} {'ratio':>7}")
    for name, run in cases:
        t_numba = best_time(lambda: run("numba"), args.repeats)
        t_numpy = best_time(lambda: run("numpy"), args.repeats)
        print(f"{name:<22} {1e3 * t_numba:>11.3f} {1e3 * t_numpy:>11.3f} {t_numpy / t_numba:>7.1f}")

    for n in (64, 256):
        a, _ = _kernels.gauss_hermite(n, backend="numba")
        b, _ = _kernels.gauss_hermite(n, backend="numpy")
        assert np.max(np.abs(a - b)) <= 1e-13
    z1 = _kernels.standard_normals(7, args.samples, backend="numba")
    z2 = _kernels.standard_normals(7, args.samples, backend="numpy")
    assert np.array_equal(z1, z2)
    print("backends agree")


if __name__ == "__main__":
    main()
