"""Session fixtures: dataset from the restoration CLI, one trained model.

The trainer consumes the restoration package only through its external
interfaces, so the dataset is produced by invoking ``convdiff gen-data``
as a subprocess and everything else moves through tensor files.
"""

from __future__ import annotations

import shutil
import subprocess
import sys

import numpy as np
import pytest

from convdiff_trainer import TrainerConfig, train
from convdiff_trainer.tensorfile import write_tensor

CONVDIFF = shutil.which("convdiff")

pytestmark = pytest.mark.skipif(CONVDIFF is None,
                                reason="convdiff CLI not on PATH")


def make_sharp_pgm(path):
    """A deterministic 64x64 broadband image written without the primary
    package: smoothed seeded noise, quantized to 16-bit PGM."""
    rng = np.random.default_rng(11)
    img = rng.random((64, 64))
    # light separable box smoothing keeps full spectral support
    for axis in (0, 1):
        img = (img + np.roll(img, 1, axis) + np.roll(img, -1, axis)) / 3.0
    quant = np.rint(img * 65535).astype(">u2")
    header = b"P5\n64 64\n65535\n"
    path.write_bytes(header + quant.tobytes())
    return img


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    if CONVDIFF is None:
        pytest.skip("convdiff CLI not on PATH")
    root = tmp_path_factory.mktemp("dataset")
    sharp = root / "sharp.pgm"
    make_sharp_pgm(sharp)
    data = root / "data"
    subprocess.run([CONVDIFF, "gen-data", str(sharp), str(data),
                    "--sigma", "2", "--count", "8", "--seed", "5"],
                   check=True, capture_output=True)
    return data


@pytest.fixture(scope="session")
def trained(tmp_path_factory, dataset_dir):
    """Overfit the default toy config on the 8-triple dataset once."""
    out = tmp_path_factory.mktemp("model") / "model.pt"
    cfg = TrainerConfig(steps=2000, seed=0)
    losses = train(dataset_dir, cfg, out)
    return {"model": out, "losses": losses, "cfg": cfg, "data": dataset_dir}
