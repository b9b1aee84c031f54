"""Reader/writer for the tensor exchange format.

Independent implementation of the byte layout shared with the restoration
package (its external interface), all little-endian:

    magic   8 bytes  b"CONVDIF1"
    ndim    uint32
    dims    ndim * uint32
    payload prod(dims) * float32, row-major
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"CONVDIF1"


def write_tensor(path, array: np.ndarray) -> None:
    arr = np.asarray(array, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise ValueError("tensor contains non-finite values")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_tensor(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 12:
        raise ValueError(f"{path}: truncated tensor file ({len(data)} bytes)")
    if data[:8] != MAGIC:
        raise ValueError(f"{path}: bad magic {data[:8]!r}")
    (ndim,) = struct.unpack_from("<I", data, 8)
    header_end = 12 + 4 * ndim
    if ndim == 0 or len(data) < header_end:
        raise ValueError(f"{path}: invalid ndim {ndim}")
    dims = struct.unpack_from(f"<{ndim}I", data, 12)
    count = int(np.prod(dims, dtype=np.int64))
    expected = header_end + 4 * count
    if len(data) < expected:
        raise ValueError(f"{path}: truncated payload ({len(data)} of {expected} bytes)")
    values = np.frombuffer(data, dtype="<f4", count=count, offset=header_end)
    if not np.isfinite(values).all():
        raise ValueError(f"{path}: tensor contains non-finite values")
    return values.astype(np.float64).reshape(dims)
