import sys
import textwrap

import numpy as np
import pytest

from convdiff import (GaussianSpec, RestorerError, degrade,
                      external_restorer, identity_at_zero_error,
                      identity_restorer, kernel_to_transfer,
                      make_gaussian_kernel, oracle_restorer, psnr, read_tensor,
                      wiener_deconv_restorer, write_tensor)

# frozen from the first oracle run on the reference image; regression-guarded
DECONV_GAIN_DB = 7.2017403984356925


@pytest.fixture(scope="session")
def copy_script(tmp_path_factory):
    path = tmp_path_factory.mktemp("ext") / "copy_restorer.py"
    path.write_text(textwrap.dedent("""\
        import argparse, shutil
        p = argparse.ArgumentParser()
        p.add_argument("--input", required=True)
        p.add_argument("--beta", type=float, required=True)
        p.add_argument("--output", required=True)
        a = p.parse_args()
        shutil.copyfile(a.input, a.output)
    """))
    return [sys.executable, str(path)]


@pytest.fixture(scope="session")
def failing_script(tmp_path_factory):
    path = tmp_path_factory.mktemp("ext") / "failing_restorer.py"
    path.write_text("import sys; sys.stderr.write('boom\\n'); sys.exit(3)\n")
    return [sys.executable, str(path)]


def test_oracle_ignores_input(broadband64):
    handle = oracle_restorer(broadband64)
    junk = np.zeros_like(broadband64)
    for beta in (0.0, 0.4, 1.0):
        assert np.array_equal(handle.restore(junk, beta), broadband64)


def test_identity_returns_input(broadband64):
    handle = identity_restorer()
    out = handle.restore(broadband64, 0.7)
    assert np.array_equal(out, broadband64)
    assert out is not broadband64  # defensive copy, no aliasing


def test_builtin_restorers_preserve_dimensions(broadband64):
    tf = kernel_to_transfer(make_gaussian_kernel(GaussianSpec(15, 2.0)), 64, 64)
    color = np.stack([broadband64] * 3)
    for handle in (identity_restorer(), wiener_deconv_restorer(tf),
                   oracle_restorer(color)):
        assert handle.restore(color, 0.5).shape == color.shape


def test_builtin_identity_at_zero_is_exact(broadband64):
    tf = kernel_to_transfer(make_gaussian_kernel(GaussianSpec(15, 2.0)), 64, 64)
    for handle in (identity_restorer(), wiener_deconv_restorer(tf)):
        assert identity_at_zero_error(handle, broadband64) == 0.0


def test_deconv_restores_sharpness(broadband128, gauss15_sigma2):
    tf = kernel_to_transfer(gauss15_sigma2, 128, 128)
    blurred = degrade(broadband128, tf, 1.0)
    restored = wiener_deconv_restorer(tf).restore(blurred, 1.0)
    gain = psnr(restored, broadband128) - psnr(blurred, broadband128)
    assert gain >= 3.0
    assert gain == pytest.approx(DECONV_GAIN_DB, abs=0.2)


def test_heavy_regularization_suppresses_deconvolution(broadband64):
    # as snr_reg grows the filter tends to conj(H^beta): re-blurring, no boost
    tf = kernel_to_transfer(make_gaussian_kernel(GaussianSpec(15, 2.0)), 64, 64)
    x_beta = degrade(broadband64, tf, 0.5)
    out = wiener_deconv_restorer(tf, snr_reg=1e6).restore(x_beta, 0.5)
    reblurred = degrade(x_beta, tf, 0.5)
    assert np.abs(out - reblurred).max() < 1e-4


def test_deconv_validation():
    tf = np.ones((16, 16), dtype=complex)
    with pytest.raises(ValueError):
        wiener_deconv_restorer(tf, snr_reg=0.0)
    handle = wiener_deconv_restorer(tf)
    with pytest.raises(ValueError):
        handle.restore(np.zeros((32, 32)), 0.5)


def test_external_copy_behaves_as_identity(broadband64, copy_script):
    handle = external_restorer(copy_script)
    out = handle.restore(broadband64, 0.5)
    # two float32 quantizations on the way through
    assert np.abs(out - broadband64).max() <= 2e-7
    assert identity_at_zero_error(handle, broadband64) <= 1e-3


def test_external_nonzero_exit(broadband64, failing_script):
    handle = external_restorer(failing_script)
    with pytest.raises(RestorerError) as info:
        handle.restore(broadband64, 0.5)
    assert info.value.returncode == 3
    assert "boom" in info.value.stderr


def test_external_malformed_output(tmp_path, broadband64):
    script = tmp_path / "garbage.py"
    script.write_text(textwrap.dedent("""\
        import argparse
        p = argparse.ArgumentParser()
        p.add_argument("--input"); p.add_argument("--beta"); p.add_argument("--output")
        a = p.parse_args()
        open(a.output, "wb").write(b"not a tensor")
    """))
    handle = external_restorer([sys.executable, str(script)])
    with pytest.raises(RestorerError, match="malformed"):
        handle.restore(broadband64, 0.5)


def test_external_timeout(tmp_path, broadband64):
    script = tmp_path / "sleeper.py"
    script.write_text("import time; time.sleep(30)\n")
    handle = external_restorer([sys.executable, str(script)], timeout=0.5)
    with pytest.raises(RestorerError, match="timed out"):
        handle.restore(broadband64, 0.5)


def test_tensor_protocol_fidelity(tmp_path):
    rng = np.random.default_rng(2)
    for shape in [(16, 16), (3, 16, 24)]:
        arr = rng.random(shape)
        path = tmp_path / "t.cdt"
        write_tensor(path, arr)
        assert np.abs(read_tensor(path) - arr).max() <= 1e-7
