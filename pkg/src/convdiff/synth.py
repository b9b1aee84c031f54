"""Synthesis of degradation kernels and deterministic test imagery."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import fft2, ifft2, kernel_to_transfer

__all__ = [
    "GaussianSpec",
    "make_gaussian_kernel",
    "untruncated_size",
    "make_test_image",
    "spectral_annulus_mask",
    "TEST_IMAGE_KINDS",
]


@dataclass(frozen=True)
class GaussianSpec:
    """Isotropic Gaussian blur kernel: odd tap count and standard deviation."""

    size: int = 15
    sigma: float = 2.0

    def __post_init__(self):
        if self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"kernel size must be odd and positive, got {self.size}")
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def make_gaussian_kernel(spec: GaussianSpec) -> np.ndarray:
    """Sampled Gaussian taps exp(-(i^2+j^2)/(2 sigma^2)), normalized to sum 1.

    Normalization happens after truncation to the requested support, so a
    small support for a wide sigma silently redistributes the clipped
    tail mass; check the second moment or tail diagnostics when that
    matters.
    """
    c = spec.size // 2
    yy, xx = np.mgrid[-c:c + 1, -c:c + 1]
    taps = np.exp(-(xx**2 + yy**2) / (2.0 * spec.sigma**2))
    return taps / taps.sum()


def untruncated_size(sigma: float, *, half_widths: float = 7.5) -> int:
    """Odd support size at which Gaussian truncation artifacts vanish.

    At 7.5 sigma per side the clipped tail (~1e-12 of the mass) falls
    below the fractional-power magnitude floor, so transfers built at
    this size behave like genuine Gaussians under any exponent in (0, 1].
    """
    return 2 * math.ceil(half_widths * sigma) + 1


def spectral_annulus_mask(height: int, width: int,
                          inner: float, outer: float) -> np.ndarray:
    """Boolean mask (in unshifted DFT layout) of a DC-centered annulus.

    ``inner`` and ``outer`` are radii as fractions of the Nyquist
    frequency; a bin belongs to the annulus when inner <= r < outer.
    """
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.fftfreq(width)[None, :]
    r = np.sqrt(fy**2 + fx**2) / 0.5
    return (r >= inner) & (r < outer)


TEST_IMAGE_KINDS = ("broadband", "checkerboard", "impulse", "constant", "band_limited")


def make_test_image(kind: str, height: int, width: int, seed: int = 0, *,
                    smooth_sigma: float = 1.5,
                    value: float = 0.5,
                    band_inner: float = 0.3,
                    band_outer: float = 0.6) -> np.ndarray:
    """Deterministic test image of the requested kind, values in [0, 1].

    * ``broadband`` -- uniform noise circularly smoothed by a Gaussian of
      ``smooth_sigma``; full spectral support with decaying tails.
      Smaller ``smooth_sigma`` excites the high frequencies harder.
    * ``band_limited`` -- broadband with the [band_inner, band_outer)
      annulus of its spectrum zeroed, then rescaled back into [0, 1]
      (the rescale is affine, so the annulus stays dead).
    * ``checkerboard`` -- binary 1-pixel checkerboard.
    * ``impulse`` -- single 1 at (0, 0).
    * ``constant`` -- all samples equal to ``value``.
    """
    if height < 16 or width < 16:
        raise ValueError(f"test images must be at least 16x16, got {height}x{width}")
    if kind == "constant":
        return np.full((height, width), float(value))
    if kind == "impulse":
        img = np.zeros((height, width))
        img[0, 0] = 1.0
        return img
    if kind == "checkerboard":
        yy, xx = np.mgrid[0:height, 0:width]
        return ((yy + xx) % 2).astype(np.float64)
    if kind in ("broadband", "band_limited"):
        rng = np.random.default_rng(seed)
        noise = rng.random((height, width))
        ksize = min(2 * math.ceil(4 * smooth_sigma) + 1, min(height, width))
        if ksize % 2 == 0:
            ksize -= 1
        smoother = kernel_to_transfer(
            make_gaussian_kernel(GaussianSpec(ksize, smooth_sigma)), height, width)
        img = ifft2(fft2(noise) * smoother)
        if kind == "band_limited":
            spec = fft2(img)
            spec[spectral_annulus_mask(height, width, band_inner, band_outer)] = 0.0
            img = ifft2(spec)
            lo, hi = img.min(), img.max()
            if hi > lo:
                img = (img - lo) / (hi - lo)
        return np.clip(img, 0.0, 1.0)
    raise ValueError(f"unknown test image kind {kind!r}; expected one of {TEST_IMAGE_KINDS}")
