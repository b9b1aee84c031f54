"""File formats: binary PGM/PPM images, float tensor files, kernel text files.

PGM (P5) maps to a grayscale plane, PPM (P6) to a 3-plane stack; maxval
255 or 65535, with 16-bit samples big-endian per the netpbm convention.
Sample values map linearly onto [0, 1].

Tensor files are the exchange format for external restorers and training
triples. Byte layout, all little-endian:

    magic   8 bytes  b"CONVDIF1"
    ndim    uint32
    dims    ndim * uint32
    payload prod(dims) * float32, row-major

Kernel files are plain text: first line "size sigma_hint" (sigma_hint is
"nan" when the kernel was estimated rather than synthesized), then size
rows of size whitespace-separated decimal taps.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

__all__ = [
    "TENSOR_MAGIC",
    "read_image",
    "write_image",
    "read_tensor",
    "write_tensor",
    "read_kernel",
    "write_kernel",
]

TENSOR_MAGIC = b"CONVDIF1"

_PNM_MAXVALS = (255, 65535)


# --------------------------------------------------------------------------
# netpbm images


def _next_token(data: bytes, pos: int, path) -> tuple[bytes, int]:
    # whitespace-separated header token; '#' starts a comment to end of line
    n = len(data)
    while pos < n:
        ch = data[pos:pos + 1]
        if ch == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif ch.isspace():
            pos += 1
        else:
            break
    if pos >= n:
        raise ValueError(f"{path}: truncated header at byte {pos}")
    start = pos
    while pos < n and not data[pos:pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def read_image(path) -> np.ndarray:
    """Read a binary PGM/PPM file into float64 samples in [0, 1].

    Returns (H, W) for P5, channel-planar (3, H, W) for P6.
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 2:
        raise ValueError(f"{path}: truncated header at byte {len(data)}")
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise ValueError(f"{path}: unsupported magic {magic!r}; expected P5 or P6")
    channels = 1 if magic == b"P5" else 3
    pos = 2
    fields = []
    for _ in range(3):
        token, pos = _next_token(data, pos, path)
        try:
            fields.append(int(token))
        except ValueError:
            raise ValueError(f"{path}: non-numeric header field {token!r}") from None
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise ValueError(f"{path}: non-positive dimensions {width}x{height}")
    if maxval not in _PNM_MAXVALS:
        raise ValueError(f"{path}: unsupported maxval {maxval}; expected 255 or 65535")
    pos += 1  # single whitespace byte separates header from payload
    bytes_per = 1 if maxval == 255 else 2
    expected = width * height * channels * bytes_per
    payload = data[pos:pos + expected]
    if len(payload) < expected:
        raise ValueError(
            f"{path}: truncated payload at byte {pos + len(payload)}"
            f" (expected {pos + expected} bytes total)")
    dtype = np.uint8 if maxval == 255 else np.dtype(">u2")
    raw = np.frombuffer(payload, dtype=dtype).astype(np.float64) / maxval
    if channels == 1:
        return raw.reshape(height, width)
    return raw.reshape(height, width, 3).transpose(2, 0, 1).copy()


def write_image(path, img: np.ndarray, maxval: int = 255) -> None:
    """Write an image as binary PGM (1 plane) or PPM (3 planes).

    Values are clamped to [0, 1] and quantized; round-trip error is at
    most 1/(2*maxval). Use maxval 65535 for intermediate dumps where
    8-bit quantization would be destructive.
    """
    if maxval not in _PNM_MAXVALS:
        raise ValueError(f"unsupported maxval {maxval}; expected 255 or 65535")
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        planes = arr[np.newaxis]
    elif arr.ndim == 3 and arr.shape[0] in (1, 3):
        planes = arr
    else:
        raise ValueError(f"cannot write image of shape {arr.shape}")
    if not np.isfinite(planes).all():
        raise ValueError("image contains non-finite samples")
    quant = np.rint(np.clip(planes, 0.0, 1.0) * maxval)
    dtype = np.uint8 if maxval == 255 else np.dtype(">u2")
    height, width = planes.shape[1:]
    if planes.shape[0] == 1:
        magic, payload = b"P5", quant[0].astype(dtype).tobytes()
    else:
        magic = b"P6"
        payload = quant.transpose(1, 2, 0).astype(dtype).tobytes()
    header = b"%s\n%d %d\n%d\n" % (magic, width, height, maxval)
    Path(path).write_bytes(header + payload)


# --------------------------------------------------------------------------
# tensor files


def write_tensor(path, array: np.ndarray) -> None:
    """Write an array as a float32 tensor file (layout in module docstring)."""
    arr = np.asarray(array, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise ValueError("tensor contains non-finite values")
    with open(path, "wb") as fh:
        fh.write(TENSOR_MAGIC)
        fh.write(struct.pack("<I", arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_tensor(path) -> np.ndarray:
    """Read a tensor file back as float64."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 12:
        raise ValueError(f"{path}: truncated tensor file ({len(data)} bytes)")
    if data[:8] != TENSOR_MAGIC:
        raise ValueError(f"{path}: bad magic {data[:8]!r}")
    (ndim,) = struct.unpack_from("<I", data, 8)
    header_end = 12 + 4 * ndim
    if ndim == 0 or len(data) < header_end:
        raise ValueError(f"{path}: invalid ndim {ndim}")
    dims = struct.unpack_from(f"<{ndim}I", data, 12)
    count = int(np.prod(dims, dtype=np.int64))
    expected = header_end + 4 * count
    if len(data) < expected:
        raise ValueError(
            f"{path}: truncated payload at byte {len(data)} (expected {expected})")
    values = np.frombuffer(data, dtype="<f4", count=count, offset=header_end)
    if not np.isfinite(values).all():
        raise ValueError(f"{path}: tensor contains non-finite values")
    return values.astype(np.float64).reshape(dims)


# --------------------------------------------------------------------------
# kernel files


def write_kernel(path, taps: np.ndarray, sigma_hint: float | None = None) -> None:
    """Write kernel taps as text; sigma_hint defaults to nan (estimated)."""
    arr = np.asarray(taps, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2 == 0:
        raise ValueError(f"kernel must be square with odd side, got {arr.shape}")
    sigma = float("nan") if sigma_hint is None else float(sigma_hint)
    lines = [f"{arr.shape[0]} {sigma!r}"]
    # repr of builtin float round-trips exactly (shortest representation)
    lines += [" ".join(repr(float(v)) for v in row) for row in arr]
    Path(path).write_text("\n".join(lines) + "\n")


def read_kernel(path, strict: bool = True) -> tuple[np.ndarray, float]:
    """Read a kernel file; returns (taps, sigma_hint).

    With ``strict`` (the default) the taps must satisfy the kernel
    invariants: no tap below -1e-6 and sum within 1e-6 of 1. Pass
    ``strict=False`` to inspect estimated kernels that carry numerical
    residue.
    """
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty kernel file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"{path}: first line must be 'size sigma_hint'")
    size = int(head[0])
    sigma = float(head[1])
    if size < 1 or size % 2 == 0:
        raise ValueError(f"{path}: kernel size must be odd and positive, got {size}")
    if len(lines) - 1 < size:
        raise ValueError(f"{path}: expected {size} tap rows, found {len(lines) - 1}")
    try:
        taps = np.array([[float(v) for v in lines[1 + r].split()] for r in range(size)],
                        dtype=np.float64)
    except ValueError:
        raise ValueError(f"{path}: malformed tap rows (need {size} numeric"
                         " values per row)") from None
    if taps.shape != (size, size):
        raise ValueError(f"{path}: expected {size}x{size} taps, got {taps.shape}")
    if not np.isfinite(taps).all():
        raise ValueError(f"{path}: kernel contains non-finite taps")
    if strict:
        if taps.min() < -1e-6:
            raise ValueError(f"{path}: negative tap {taps.min():g} below tolerance")
        if not math.isclose(taps.sum(), 1.0, abs_tol=1e-6):
            raise ValueError(f"{path}: taps sum to {taps.sum()!r}, expected 1 +- 1e-6")
    return taps, sigma
