#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run from the repository root:

    python benchmarks/bench_accel.py [--grid 512] [--image 256] [--repeat 7]

The numba path must be enabled (do not set CONVDIFF_NO_NUMBA); the first
call of each kernel is excluded from timing so compilation does not skew
the numbers.
"""

import argparse
import time

import numpy as np

from convdiff import _accel
from convdiff._accel import (_numpy_fractional_power_bins, _numpy_ssim_map,
                             _numpy_wiener_bins)


def _time(fn, *args, repeat):
    fn(*args)  # warmup / jit compile
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", type=int, default=512,
                        help="spectral grid side for the per-bin kernels")
    parser.add_argument("--image", type=int, default=256,
                        help="image side for the SSIM window kernel")
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args()

    if _accel.BACKEND != "numba":
        parser.exit(1, "numba backend is not active; unset CONVDIFF_NO_NUMBA\n")

    rng = np.random.default_rng(0)
    n = args.grid
    spectrum = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    other = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = args.image
    img_a = rng.random((m, m))
    img_b = rng.random((m, m))
    c = 5
    yy, xx = np.mgrid[-c:c + 1, -c:c + 1]
    window = np.exp(-(xx**2 + yy**2) / (2 * 1.5**2))
    window /= window.sum()

    cases = [
        (f"fractional_power_bins {n}x{n}",
         _accel.fractional_power_bins, _numpy_fractional_power_bins,
         (spectrum, 0.37, 1e-12)),
        (f"wiener_bins          {n}x{n}",
         _accel.wiener_bins, _numpy_wiener_bins,
         (spectrum, other, 1e-8)),
        (f"ssim_map             {m}x{m}",
         _accel.ssim_map, _numpy_ssim_map,
         (img_a, img_b, window, 1e-4, 9e-4)),
    ]

    print(f"{'kernel':<32} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name, jitted, fallback, call_args in cases:
        t_jit = _time(jitted, *call_args, repeat=args.repeat)
        t_np = _time(fallback, *call_args, repeat=args.repeat)
        print(f"{name:<32} {t_jit * 1e3:>8.2f}ms {t_np * 1e3:>8.2f}ms "
              f"{t_np / t_jit:>7.2f}x")


if __name__ == "__main__":
    main()
