"""Frequency-grid representation and 2-D transforms.

Conventions used throughout the library:

* forward DFT is unnormalized (DC bin = sum of samples), inverse carries
  the 1/(N*M) factor, so the transfer of a unit-sum kernel has DC gain
  exactly 1;
* blur kernels are embedded with their center tap at index (0, 0) and the
  remaining taps wrapped periodically, which makes symmetric kernels
  zero-phase;
* the spatial counterpart of bin-wise spectral multiplication is circular
  convolution.

All functions are pure; arrays are never modified in place.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "fft2",
    "ifft2",
    "kernel_to_transfer",
    "transfer_to_kernel",
    "ExtractedKernel",
    "spectrum_image",
    "ensure_image",
]


def ensure_image(img: np.ndarray, *, min_side: int = 8) -> np.ndarray:
    """Validate an image array and return it as float64.

    Accepts a 2-D grayscale grid (H, W) or a 3-D channel-planar stack
    (C, H, W) with 1 or 3 channels. Raises ValueError on non-finite
    samples or sides smaller than ``min_side``.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        h, w = arr.shape
    elif arr.ndim == 3:
        c, h, w = arr.shape
        if c not in (1, 3):
            raise ValueError(f"expected 1 or 3 channel planes, got {c}")
    else:
        raise ValueError(f"expected a 2-D or 3-D image array, got ndim={arr.ndim}")
    if h < min_side or w < min_side:
        raise ValueError(f"image sides must be >= {min_side}, got {h}x{w}")
    if not np.isfinite(arr).all():
        raise ValueError("image contains non-finite samples")
    return arr


def fft2(img: np.ndarray) -> np.ndarray:
    """Unnormalized forward 2-D DFT, applied per channel plane.

    The DC bin equals the sum of the samples. Input may be (H, W) or
    channel-planar (C, H, W); the output has the same shape, complex128.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim not in (2, 3):
        raise ValueError(f"expected a 2-D or 3-D array, got ndim={arr.ndim}")
    if min(arr.shape[-2:]) == 0:
        raise ValueError("image dimensions must be positive")
    if not np.isfinite(arr).all():
        raise ValueError("image contains non-finite samples")
    return np.fft.fft2(arr, axes=(-2, -1))


def ifft2(tf: np.ndarray, return_residue: bool = False):
    """Inverse 2-D DFT scaled by 1/(N*M); returns the real part.

    With ``return_residue=True`` also returns the maximum absolute
    imaginary component that was discarded, as a diagnostic for inputs
    that should have been conjugate-symmetric.
    """
    arr = np.asarray(tf, dtype=np.complex128)
    if arr.ndim not in (2, 3):
        raise ValueError(f"expected a 2-D or 3-D array, got ndim={arr.ndim}")
    if min(arr.shape[-2:]) == 0:
        raise ValueError("transfer dimensions must be positive")
    full = np.fft.ifft2(arr, axes=(-2, -1))
    if return_residue:
        return full.real, float(np.abs(full.imag).max())
    return full.real


def _embed_kernel(taps: np.ndarray, height: int, width: int) -> np.ndarray:
    size = taps.shape[0]
    center = size // 2
    grid = np.zeros((height, width))
    grid[:size, :size] = taps
    # roll the center tap onto index (0, 0); remaining taps wrap periodically
    return np.roll(grid, (-center, -center), axis=(0, 1))


def kernel_to_transfer(taps: np.ndarray, height: int, width: int) -> np.ndarray:
    """Transfer function of a spatial kernel at the given grid resolution.

    The kernel must be square with odd side length no larger than the
    grid. A symmetric kernel yields a real (zero-phase) transfer, and a
    unit-sum kernel yields DC gain 1.
    """
    taps = np.asarray(taps, dtype=np.float64)
    if taps.ndim != 2 or taps.shape[0] != taps.shape[1]:
        raise ValueError(f"kernel must be square, got shape {taps.shape}")
    if taps.shape[0] % 2 == 0:
        raise ValueError(f"kernel side must be odd, got {taps.shape[0]}")
    if taps.shape[0] > min(height, width):
        raise ValueError(
            f"kernel side {taps.shape[0]} exceeds grid {height}x{width}"
        )
    if not np.isfinite(taps).all():
        raise ValueError("kernel contains non-finite taps")
    return np.fft.fft2(_embed_kernel(taps, height, width))


class ExtractedKernel(NamedTuple):
    taps: np.ndarray
    discarded_energy: float


def transfer_to_kernel(tf: np.ndarray, size: int) -> ExtractedKernel:
    """Extract the size x size spatial kernel implied by a transfer function.

    Inverse of :func:`kernel_to_transfer`: the window is gathered
    wrap-aware around index (0, 0) and re-centered. ``discarded_energy``
    is the sum of squared magnitudes of the spatial field outside the
    window, a localization diagnostic.
    """
    arr = np.asarray(tf, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D transfer, got ndim={arr.ndim}")
    if size % 2 == 0 or size < 1:
        raise ValueError(f"window size must be odd and positive, got {size}")
    if size > min(arr.shape):
        raise ValueError(f"window size {size} exceeds grid {arr.shape}")
    spatial = np.fft.ifft2(arr)
    center = size // 2
    idx = np.arange(-center, center + 1)
    rows = idx % arr.shape[0]
    cols = idx % arr.shape[1]
    window = spatial[np.ix_(rows, cols)]
    total = float((np.abs(spatial) ** 2).sum())
    inside = float((np.abs(window) ** 2).sum())
    return ExtractedKernel(window.real.copy(), max(total - inside, 0.0))


def spectrum_image(plane: np.ndarray) -> np.ndarray:
    """Log-magnitude spectrum of an image plane, DC-centered, scaled to [0, 1].

    Presentation helper for trajectory dumps.
    """
    mag = np.abs(np.fft.fftshift(np.fft.fft2(np.asarray(plane, dtype=np.float64))))
    out = np.log1p(mag)
    peak = out.max()
    if peak > 0:
        out /= peak
    return out
