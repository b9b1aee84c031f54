"""Dual-path compute kernels: numba-jitted inner loops with numpy fallbacks.

The hot per-bin and per-window loops live here in two implementations each.
At import time one of them is bound to the public name:

* numba path (default) -- ``@njit``-compiled loops, cached on disk;
* numpy path -- vectorised equivalents, selected by setting the
  ``CONVDIFF_NO_NUMBA`` environment variable to ``1``/``true``/``yes``,
  or automatically when numba is not importable.

Both paths are always importable under their private names so they can be
benchmarked and cross-checked against each other (see ``benchmarks/``).
The 2-D FFTs themselves are *not* routed through numba; ``numpy.fft`` is
already compiled code and numba offers nothing there.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "BACKEND",
    "fractional_power_bins",
    "wiener_bins",
    "ssim_map",
]


def _numpy_fractional_power_bins(values: np.ndarray, beta: float, floor: float) -> np.ndarray:
    mag = np.abs(values)
    small = mag < floor
    with np.errstate(divide="ignore", invalid="ignore"):
        out = mag**beta * np.exp(1j * beta * np.angle(values))
    out[small] = 1.0 if beta == 0.0 else 0.0
    return out


def _numpy_wiener_bins(x: np.ndarray, y: np.ndarray, s: float) -> np.ndarray:
    return (y * np.conj(x)) / (x.real * x.real + x.imag * x.imag + s)


def _numpy_ssim_map(a: np.ndarray, b: np.ndarray, window: np.ndarray,
                    c1: float, c2: float) -> np.ndarray:
    # Weighted local stats over every valid window position, via stacked
    # sliding views. Memory is (H-k+1)*(W-k+1)*k*k doubles; fine at the
    # image sizes this library targets.
    from numpy.lib.stride_tricks import sliding_window_view

    k = window.shape[0]
    wa = sliding_window_view(a, (k, k))
    wb = sliding_window_view(b, (k, k))
    mu_a = np.einsum("ijpq,pq->ij", wa, window)
    mu_b = np.einsum("ijpq,pq->ij", wb, window)
    e_aa = np.einsum("ijpq,pq->ij", wa * wa, window)
    e_bb = np.einsum("ijpq,pq->ij", wb * wb, window)
    e_ab = np.einsum("ijpq,pq->ij", wa * wb, window)
    var_a = e_aa - mu_a * mu_a
    var_b = e_bb - mu_b * mu_b
    cov = e_ab - mu_a * mu_b
    return ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / (
        (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    )


_WANT_NUMPY = os.environ.get("CONVDIFF_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _WANT_NUMPY:
        raise ImportError("numba disabled via CONVDIFF_NO_NUMBA")
    from numba import njit
except ImportError:
    BACKEND = "numpy"
    fractional_power_bins = _numpy_fractional_power_bins
    wiener_bins = _numpy_wiener_bins
    ssim_map = _numpy_ssim_map
else:
    BACKEND = "numba"

    @njit(cache=True)
    def _numba_fractional_power_bins(values, beta, floor):  # pragma: no cover - jitted
        h, w = values.shape
        out = np.empty((h, w), np.complex128)
        for i in range(h):
            for j in range(w):
                re = values[i, j].real
                im = values[i, j].imag
                mag = math.hypot(re, im)
                if mag < floor:
                    out[i, j] = 1.0 + 0.0j if beta == 0.0 else 0.0 + 0.0j
                else:
                    m = mag**beta
                    ph = math.atan2(im, re) * beta
                    out[i, j] = complex(m * math.cos(ph), m * math.sin(ph))
        return out

    @njit(cache=True)
    def _numba_wiener_bins(x, y, s):  # pragma: no cover - jitted
        h, w = x.shape
        out = np.empty((h, w), np.complex128)
        for i in range(h):
            for j in range(w):
                xr = x[i, j].real
                xi = x[i, j].imag
                out[i, j] = y[i, j] * complex(xr, -xi) / (xr * xr + xi * xi + s)
        return out

    @njit(cache=True)
    def _numba_ssim_map(a, b, window, c1, c2):  # pragma: no cover - jitted
        h, w = a.shape
        k = window.shape[0]
        oh = h - k + 1
        ow = w - k + 1
        out = np.empty((oh, ow))
        for i in range(oh):
            for j in range(ow):
                mu_a = 0.0
                mu_b = 0.0
                e_aa = 0.0
                e_bb = 0.0
                e_ab = 0.0
                for p in range(k):
                    for q in range(k):
                        wpq = window[p, q]
                        av = a[i + p, j + q]
                        bv = b[i + p, j + q]
                        mu_a += wpq * av
                        mu_b += wpq * bv
                        e_aa += wpq * av * av
                        e_bb += wpq * bv * bv
                        e_ab += wpq * av * bv
                var_a = e_aa - mu_a * mu_a
                var_b = e_bb - mu_b * mu_b
                cov = e_ab - mu_a * mu_b
                out[i, j] = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / (
                    (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
                )
        return out

    fractional_power_bins = _numba_fractional_power_bins
    wiener_bins = _numba_wiener_bins
    ssim_map = _numba_ssim_map
