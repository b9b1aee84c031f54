"""Full-reference image quality metrics: PSNR and SSIM."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .pipeline import mse
from .spectral import ensure_image

__all__ = ["MetricReport", "PSNR_CAP", "psnr", "ssim", "evaluate_pair"]

PSNR_CAP = 100.0

_SSIM_WINDOW_SIZE = 11
_SSIM_WINDOW_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


@dataclass(frozen=True)
class MetricReport:
    psnr_db: float
    ssim: float
    mse: float


def psnr(a: np.ndarray, b: np.ndarray, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; 100 dB cap for identical images."""
    err = mse(a, b)
    if err == 0.0:
        return PSNR_CAP
    return 10.0 * math.log10(peak * peak / err)


def _ssim_window() -> np.ndarray:
    c = _SSIM_WINDOW_SIZE // 2
    yy, xx = np.mgrid[-c:c + 1, -c:c + 1]
    w = np.exp(-(xx**2 + yy**2) / (2.0 * _SSIM_WINDOW_SIGMA**2))
    return w / w.sum()


_WINDOW = _ssim_window()


def ssim(a: np.ndarray, b: np.ndarray, peak: float = 1.0) -> float:
    """Mean structural similarity with the standard 11x11 / sigma 1.5 window.

    Local statistics are Gaussian-weighted over every fully contained
    window position; stabilizers are C1=(0.01 peak)^2, C2=(0.03 peak)^2.
    Multi-channel inputs average the per-channel scores.
    """
    xa = ensure_image(a)
    xb = ensure_image(b)
    if xa.shape != xb.shape:
        raise ValueError(f"shapes differ: {xa.shape} vs {xb.shape}")
    if min(xa.shape[-2:]) < _SSIM_WINDOW_SIZE:
        raise ValueError(
            f"image sides must be >= {_SSIM_WINDOW_SIZE} for SSIM, got {xa.shape[-2:]}")
    c1 = (_SSIM_K1 * peak) ** 2
    c2 = (_SSIM_K2 * peak) ** 2
    planes_a = xa[np.newaxis] if xa.ndim == 2 else xa
    planes_b = xb[np.newaxis] if xb.ndim == 2 else xb
    scores = [
        float(_accel.ssim_map(np.ascontiguousarray(pa), np.ascontiguousarray(pb),
                              _WINDOW, c1, c2).mean())
        for pa, pb in zip(planes_a, planes_b)
    ]
    return float(np.mean(scores))


def evaluate_pair(a: np.ndarray, b: np.ndarray, peak: float = 1.0) -> MetricReport:
    """PSNR, SSIM and MSE of an image pair in one report."""
    return MetricReport(psnr_db=psnr(a, b, peak), ssim=ssim(a, b, peak), mse=mse(a, b))
