"""Wiener inverse-filter estimation of a blur transfer function.

Given the spectra of a sharp estimate X and a blurred observation Y, the
regularized estimate per bin is

    H_est = Y * conj(X) / (|X|^2 + S),

with a small constant S keeping the division finite everywhere. This is
used both to recover dataset kernels from (sharp, blurred) pairs and
inside every step of the inference loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .spectral import ensure_image, fft2

__all__ = [
    "WienerConfig",
    "WienerDiagnostics",
    "EXCITATION_FACTOR",
    "LUMA_WEIGHTS",
    "wiener_estimate",
    "estimate_from_images",
    "renormalize_dc",
    "luminance",
]

#: Bins with |X|^2 >= EXCITATION_FACTOR * S carry reliable information;
#: below that the regularizer dominates and the estimate is kept as the
#: literal formula value but flagged in the diagnostics.
EXCITATION_FACTOR = 1e4

#: ITU-R BT.601 luminance weights, used to collapse color inputs to a
#: single plane for estimation (the physical blur is channel-shared).
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_DC_WINDOW = 0.1


@dataclass(frozen=True)
class WienerConfig:
    """Regularization constant S > 0 and the DC renormalization switch."""

    regularization: float = 1e-8
    dc_renormalize: bool = True

    def __post_init__(self):
        if not np.isfinite(self.regularization) or self.regularization <= 0:
            raise ValueError(
                f"regularization must be a positive finite value, got {self.regularization}"
            )


@dataclass(frozen=True)
class WienerDiagnostics:
    """Side information about one estimate.

    ``excitation_mask`` marks bins where the sharp spectrum was strong
    enough for the estimate to be trustworthy. ``dc_raw`` is the DC bin
    before any renormalization; ``dc_flagged`` is set when the raw value
    was too far from 1 to be reset.
    """

    excitation_mask: np.ndarray = field(repr=False)
    dc_raw: complex = 0j
    dc_renormalized: bool = False
    dc_flagged: bool = False


def renormalize_dc(tf: np.ndarray) -> tuple[np.ndarray, bool, bool]:
    """Reset the DC bin to exactly 1 when it is within 10% of 1.

    Returns (transfer, renormalized, flagged). Idempotent: a second
    application changes nothing.
    """
    out = np.array(tf, dtype=np.complex128, copy=True)
    if abs(out[0, 0] - 1.0) <= _DC_WINDOW:
        out[0, 0] = 1.0
        return out, True, False
    return out, False, True


def wiener_estimate(x: np.ndarray, y: np.ndarray,
                    cfg: WienerConfig | None = None,
                    return_diagnostics: bool = False):
    """Estimate the transfer mapping spectrum X to spectrum Y.

    Finite at every bin for any finite inputs. With
    ``return_diagnostics=True`` returns ``(estimate, WienerDiagnostics)``.
    """
    cfg = cfg or WienerConfig()
    xa = np.asarray(x, dtype=np.complex128)
    ya = np.asarray(y, dtype=np.complex128)
    if xa.ndim != 2 or ya.ndim != 2:
        raise ValueError("expected 2-D spectra")
    if xa.shape != ya.shape:
        raise ValueError(f"spectra shapes differ: {xa.shape} vs {ya.shape}")
    s = cfg.regularization
    out = _accel.wiener_bins(xa, ya, s)
    dc_raw = complex(out[0, 0])
    renormalized = flagged = False
    if cfg.dc_renormalize:
        out, renormalized, flagged = renormalize_dc(out)
    if not return_diagnostics:
        return out
    power = xa.real * xa.real + xa.imag * xa.imag
    diag = WienerDiagnostics(
        excitation_mask=power >= EXCITATION_FACTOR * s,
        dc_raw=dc_raw,
        dc_renormalized=renormalized,
        dc_flagged=flagged,
    )
    return out, diag


def luminance(img: np.ndarray) -> np.ndarray:
    """Single luminance plane of a grayscale or channel-planar color image."""
    arr = ensure_image(img)
    if arr.ndim == 2:
        return arr
    if arr.shape[0] == 1:
        return arr[0]
    r, g, b = LUMA_WEIGHTS
    return r * arr[0] + g * arr[1] + b * arr[2]


def estimate_from_images(x_sharp: np.ndarray, y_blurred: np.ndarray,
                         cfg: WienerConfig | None = None,
                         return_diagnostics: bool = False):
    """Estimate the blur transfer from a (sharp, blurred) image pair.

    Color inputs are collapsed to the luminance plane first; the
    resulting single kernel applies to all channels.
    """
    xs = ensure_image(x_sharp)
    yb = ensure_image(y_blurred)
    if xs.shape != yb.shape:
        raise ValueError(f"image shapes differ: {xs.shape} vs {yb.shape}")
    return wiener_estimate(fft2(luminance(xs)), fft2(luminance(yb)),
                           cfg, return_diagnostics)
