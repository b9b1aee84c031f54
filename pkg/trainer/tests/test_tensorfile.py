import struct

import numpy as np
import pytest

from convdiff_trainer import MAGIC, read_tensor, write_tensor


def test_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    for shape in [(16, 16), (3, 8, 12), (4,)]:
        arr = rng.random(shape)
        path = tmp_path / "t.cdt"
        write_tensor(path, arr)
        back = read_tensor(path)
        assert back.shape == arr.shape
        assert np.abs(back - arr).max() <= 1e-7


def test_exact_byte_layout(tmp_path):
    # the layout is the contract with the restoration package; pin it
    arr = np.array([[0.5, 1.5], [2.5, 3.5], [4.5, 5.5]])
    path = tmp_path / "t.cdt"
    write_tensor(path, arr)
    expected = (MAGIC + struct.pack("<I", 2) + struct.pack("<II", 3, 2)
                + np.asarray(arr, dtype="<f4").tobytes())
    assert path.read_bytes() == expected


def test_errors(tmp_path):
    bad = tmp_path / "bad.cdt"
    bad.write_bytes(b"WRONGMAG" + b"\x00" * 20)
    with pytest.raises(ValueError, match="magic"):
        read_tensor(bad)
    write_tensor(tmp_path / "ok.cdt", np.zeros((4, 4)))
    short = (tmp_path / "ok.cdt").read_bytes()[:-10]
    (tmp_path / "short.cdt").write_bytes(short)
    with pytest.raises(ValueError, match="truncated"):
        read_tensor(tmp_path / "short.cdt")
    with pytest.raises(ValueError, match="non-finite"):
        write_tensor(tmp_path / "nan.cdt", np.full((2, 2), np.nan))
