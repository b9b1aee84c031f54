"""Inverse-degradation interface and concrete restorers.

A restorer maps a partially degraded image and its degradation strength
beta to an estimate of the sharp image. The inference loop is agnostic
to what sits behind the interface: the built-ins here make the loop
runnable and testable without any trained model, and
:func:`external_restorer` bridges to one served behind a subprocess
contract.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .degradation import _as_beta, fractional_power
from .fileio import read_tensor, write_tensor
from .spectral import ensure_image, fft2, ifft2

__all__ = [
    "RestorerHandle",
    "RestorerError",
    "oracle_restorer",
    "identity_restorer",
    "wiener_deconv_restorer",
    "external_restorer",
    "identity_at_zero_error",
]


class RestorerError(RuntimeError):
    """A restorer failed; carries whatever diagnostics were available."""

    def __init__(self, message: str, *, returncode: int | None = None,
                 stderr: str = "", step: int | None = None):
        super().__init__(message)
        self.returncode = returncode
        self.stderr = stderr
        self.step = step


@dataclass(frozen=True)
class RestorerHandle:
    """Named restore operation (image, beta) -> sharp estimate.

    Implementations must preserve image dimensions and channel count and
    return their input at beta = 0.
    """

    name: str
    restore: Callable[[np.ndarray, float], np.ndarray]
    metadata: str = ""


def oracle_restorer(reference: np.ndarray) -> RestorerHandle:
    """Ground-truth restorer: ignores its input and returns the reference.

    The fixed point of the inference loop; used to test the loop itself
    in isolation.
    """
    ref = ensure_image(reference).copy()

    def restore(img, beta):
        return ref.copy()

    return RestorerHandle("oracle", restore, "returns a fixed reference image")


def identity_restorer() -> RestorerHandle:
    """Null baseline: returns its input unchanged."""

    def restore(img, beta):
        return np.array(img, dtype=np.float64, copy=True)

    return RestorerHandle("identity", restore, "returns the input unchanged")


def wiener_deconv_restorer(tf: np.ndarray, snr_reg: float = 1e-2) -> RestorerHandle:
    """Classical deconvolution against a known blur transfer.

    At strength beta the input is divided by the beta-fractional power of
    ``tf`` through the regularized filter

        G = conj(H^beta) * (1 + snr_reg) / (|H^beta|^2 + snr_reg),

    whose gain is normalized to 1 where the transfer is 1, so the image
    mean is preserved and the filter degenerates to the identity as
    beta -> 0. At beta = 0 exactly, the input is returned as-is. Output
    is clamped to [0, 1].
    """
    if not np.isfinite(snr_reg) or snr_reg <= 0:
        raise ValueError(f"snr_reg must be positive, got {snr_reg}")
    h = np.asarray(tf, dtype=np.complex128)
    if h.ndim != 2:
        raise ValueError(f"expected a 2-D transfer, got ndim={h.ndim}")

    def restore(img, beta):
        beta = _as_beta(beta)
        arr = ensure_image(img)
        if arr.shape[-2:] != h.shape:
            raise ValueError(f"image {arr.shape[-2:]} does not match transfer {h.shape}")
        if beta == 0.0:
            return arr.copy()
        hb = fractional_power(h, beta)
        gain = np.conj(hb) * (1.0 + snr_reg) / (hb.real**2 + hb.imag**2 + snr_reg)
        return np.clip(ifft2(fft2(arr) * gain), 0.0, 1.0)

    return RestorerHandle("wiener-deconv", restore,
                          f"regularized spectral division, snr_reg={snr_reg:g}")


def external_restorer(command, timeout: float = 120.0) -> RestorerHandle:
    """Bridge to an external model behind the subprocess contract.

    The process is invoked as ``<command> --input <path> --beta <float>
    --output <path>`` with tensor files at both ends and must exit 0.
    Nonzero exit, timeout, or a malformed/mismatched output tensor raise
    :class:`RestorerError` carrying the process diagnostics. Access to
    the subprocess is serialized; concurrent pipelines need distinct
    handles.
    """
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    if not argv:
        raise ValueError("empty restorer command")
    lock = threading.Lock()

    def restore(img, beta):
        arr = ensure_image(img)
        beta = _as_beta(beta)
        with lock, tempfile.TemporaryDirectory(prefix="convdiff-ext-") as tmp:
            in_path = Path(tmp) / "input.cdt"
            out_path = Path(tmp) / "output.cdt"
            write_tensor(in_path, arr)
            cmd = argv + ["--input", str(in_path), "--beta", repr(beta),
                          "--output", str(out_path)]
            try:
                proc = subprocess.run(cmd, capture_output=True, text=True,
                                      timeout=timeout)
            except subprocess.TimeoutExpired as exc:
                raise RestorerError(
                    f"external restorer timed out after {timeout:g}s: {argv[0]}",
                    stderr=(exc.stderr or b"").decode() if isinstance(exc.stderr, bytes)
                    else (exc.stderr or "")) from exc
            except OSError as exc:
                raise RestorerError(f"cannot launch external restorer: {exc}") from exc
            if proc.returncode != 0:
                raise RestorerError(
                    f"external restorer exited with code {proc.returncode}",
                    returncode=proc.returncode, stderr=proc.stderr)
            try:
                out = read_tensor(out_path)
            except (OSError, ValueError) as exc:
                raise RestorerError(f"malformed output tensor: {exc}",
                                    stderr=proc.stderr) from exc
            if out.shape != arr.shape:
                raise RestorerError(
                    f"external restorer returned shape {out.shape}, expected {arr.shape}",
                    stderr=proc.stderr)
            return out

    return RestorerHandle("external", restore, f"subprocess: {' '.join(argv)}")


def identity_at_zero_error(handle: RestorerHandle, img: np.ndarray) -> float:
    """Mean absolute deviation of restore(img, 0) from img.

    Built-in restorers score exactly 0; external ones are accepted up to
    1e-3 by convention.
    """
    out = handle.restore(ensure_image(img), 0.0)
    return float(np.abs(out - img).mean())
