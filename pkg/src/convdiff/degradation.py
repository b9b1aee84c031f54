"""The forward degradation process.

A blur transfer function H raised to a fractional power beta in [0, 1]
interpolates between the identity system (beta = 0) and the full blur
(beta = 1): per bin, magnitudes are exponentially scaled and phases
linearly scaled,

    H^beta = |H|^beta * exp(j * phase(H) * beta).

Applying H^beta to an image spectrum yields the partially degraded image,
and equal-exponent steps compose a trajectory from sharp to blurred. The
fractional powers form a semigroup (exponents add), which is what makes
the multi-step restoration loop in :mod:`convdiff.pipeline` consistent.

Closure under fractional powers is only guaranteed for Gaussian-family
kernels. For other inputs -- including Gaussians truncated to a small
support, whose transfers dip slightly negative near Nyquist -- the
fractional phase produces complex or delocalized spatial mass; that is
surfaced, not hidden, by :func:`validate_kernel`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from .spectral import ensure_image, fft2, ifft2

__all__ = [
    "DegradationStrength",
    "KernelValidityReport",
    "MAGNITUDE_FLOOR",
    "fractional_power",
    "degrade",
    "trajectory",
    "validate_kernel",
    "high_frequency_energy",
]

#: Bins with |H| below this are treated as exact zeros when raising to a
#: power: magnitudes near machine epsilon carry pure rounding noise in
#: their phase, and |H|^beta would amplify it.
MAGNITUDE_FLOOR = 1e-12

_DC_TOLERANCE = 1e-6


@dataclass(frozen=True)
class DegradationStrength:
    """Position along the blur trajectory: beta in [0, 1], optionally t/n.

    When constructed from a step index, ``beta`` is exactly the float
    quotient t/n.
    """

    beta: float
    t: int | None = None
    n: int | None = None

    def __post_init__(self):
        if not np.isfinite(self.beta) or not (0.0 <= self.beta <= 1.0):
            raise ValueError(f"degradation strength must be in [0, 1], got {self.beta}")
        if (self.t is None) != (self.n is None):
            raise ValueError("t and n must be given together")
        if self.t is not None:
            if self.n < 1 or not (0 <= self.t <= self.n):
                raise ValueError(f"need n >= 1 and 0 <= t <= n, got t={self.t}, n={self.n}")
            if self.beta != self.t / self.n:
                raise ValueError(f"beta={self.beta} is not t/n={self.t / self.n}")

    @classmethod
    def from_step(cls, t: int, n: int) -> "DegradationStrength":
        return cls(t / n, t=t, n=n)

    def __float__(self) -> float:
        return self.beta


def _as_beta(value) -> float:
    beta = float(value)
    if not np.isfinite(beta) or not (0.0 <= beta <= 1.0):
        raise ValueError(f"degradation strength must be in [0, 1], got {beta}")
    return beta


def fractional_power(tf: np.ndarray, beta, floor: float = MAGNITUDE_FLOOR) -> np.ndarray:
    """Raise a transfer function to the power beta in [0, 1], bin-wise.

    Bins with magnitude below ``floor`` map to 0 for beta > 0 and to 1
    for beta = 0. When the input DC gain is 1 within 1e-6 the output DC
    bin is forced to exactly 1, so unit-gain systems stay unit-gain under
    any exponent.
    """
    beta = _as_beta(beta)
    arr = np.asarray(tf, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D transfer, got ndim={arr.ndim}")
    out = _accel.fractional_power_bins(arr, beta, floor)
    if abs(arr[0, 0] - 1.0) <= _DC_TOLERANCE:
        out[0, 0] = 1.0
    return out


def degrade(img: np.ndarray, tf: np.ndarray, beta, *,
            clamp: bool = True, floor: float = MAGNITUDE_FLOOR) -> np.ndarray:
    """Partially blur an image: inverse-transform of spectrum * H^beta.

    The transfer is shared across channel planes. DC gain 1 means the
    mean pixel value is preserved (to rounding) before any clamping.
    Clamping to [0, 1] happens only here, at the documented boundary;
    pass ``clamp=False`` when chaining steps so the semigroup algebra is
    preserved exactly.
    """
    arr = ensure_image(img)
    h = np.asarray(tf, dtype=np.complex128)
    if h.ndim != 2:
        raise ValueError(f"expected a 2-D transfer, got ndim={h.ndim}")
    if h.shape != arr.shape[-2:]:
        raise ValueError(f"transfer shape {h.shape} does not match image {arr.shape[-2:]}")
    hb = fractional_power(h, beta, floor)
    out = ifft2(fft2(arr) * hb)
    if clamp:
        out = np.clip(out, 0.0, 1.0)
    return out


def trajectory(img: np.ndarray, tf: np.ndarray, n: int, *, clamp: bool = True) -> list[np.ndarray]:
    """The n-step degradation trajectory [x_0, x_{1/n}, ..., x_1].

    Element t is ``degrade(img, tf, t/n)``; element 0 is the sharp image
    and element n the fully blurred one.
    """
    if n < 1:
        raise ValueError(f"trajectory needs n >= 1 steps, got {n}")
    return [degrade(img, tf, t / n, clamp=clamp) for t in range(n + 1)]


@dataclass(frozen=True)
class KernelValidityReport:
    """Diagnostics for whether a transfer corresponds to a valid blur kernel.

    A valid kernel is real, non-negative, normalized (DC gain 1) and
    spatially localized within the declared support window. ``tail_mass``
    is the energy (sum of squared magnitudes) of the spatial field
    outside that window.
    """

    max_negative_tap: float
    imag_residue: float
    dc_gain_error: float
    tail_mass: float
    is_valid: bool


def validate_kernel(tf: np.ndarray, support: int, *,
                    negative_tol: float = 1e-4,
                    imag_tol: float = 1e-6,
                    dc_tol: float = 1e-4,
                    tail_tol: float = 1e-3) -> KernelValidityReport:
    """Check the four kernel-validity diagnostics of a transfer function.

    ``is_valid`` is true iff every diagnostic is within its tolerance.
    """
    arr = np.asarray(tf, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D transfer, got ndim={arr.ndim}")
    if support % 2 == 0 or support > min(arr.shape):
        raise ValueError(f"support must be odd and fit the grid, got {support}")
    spatial = np.fft.ifft2(arr)
    imag_residue = float(np.abs(spatial.imag).max())
    max_negative = float(max(0.0, -spatial.real.min()))
    dc_error = float(abs(arr[0, 0] - 1.0))
    center = support // 2
    idx = np.arange(-center, center + 1)
    mask = np.zeros(arr.shape, dtype=bool)
    mask[np.ix_(idx % arr.shape[0], idx % arr.shape[1])] = True
    tail = float((np.abs(spatial[~mask]) ** 2).sum())
    return KernelValidityReport(
        max_negative_tap=max_negative,
        imag_residue=imag_residue,
        dc_gain_error=dc_error,
        tail_mass=tail,
        is_valid=(max_negative <= negative_tol and imag_residue <= imag_tol
                  and dc_error <= dc_tol and tail <= tail_tol),
    )


def high_frequency_energy(img: np.ndarray) -> float:
    """Spectral energy outside the centered low-frequency half-band.

    The low band is the DC-centered rectangle spanning half the
    bandwidth per axis; everything outside it counts. This is the
    quantity that decays monotonically along a blur trajectory.
    """
    arr = ensure_image(img)
    planes = arr[np.newaxis] if arr.ndim == 2 else arr
    h, w = planes.shape[-2:]
    spec = np.fft.fftshift(np.fft.fft2(planes, axes=(-2, -1)), axes=(-2, -1))
    rows = np.abs(np.arange(h) - h // 2) < h // 4
    cols = np.abs(np.arange(w) - w // 2) < w // 4
    low = rows[:, None] & cols[None, :]
    return float((np.abs(spec[..., ~low]) ** 2).sum())
