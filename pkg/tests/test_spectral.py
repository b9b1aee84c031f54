import numpy as np
import pytest

from convdiff import (GaussianSpec, fft2, ifft2, kernel_to_transfer,
                      make_gaussian_kernel, spectrum_image, transfer_to_kernel)
from convdiff.spectral import ensure_image


def test_fft2_of_zeros_is_zero():
    tf = fft2(np.zeros((8, 8)))
    assert tf.shape == (8, 8)
    assert np.abs(tf).max() == 0.0


def test_fft2_of_constant_concentrates_at_dc():
    c = 0.37
    tf = fft2(np.full((16, 24), c))
    assert tf[0, 0] == pytest.approx(c * 16 * 24, abs=1e-9)
    rest = tf.copy()
    rest[0, 0] = 0.0
    assert np.abs(rest).max() < 1e-9


def test_fft2_of_impulse_is_flat():
    img = np.zeros((16, 16))
    img[0, 0] = 1.0
    assert np.abs(fft2(img) - 1.0).max() < 1e-12


@pytest.mark.parametrize("shape", [(8, 8), (37, 53), (256, 256)])
def test_roundtrip_identity(shape):
    rng = np.random.default_rng(42)
    img = rng.random(shape)
    assert np.abs(ifft2(fft2(img)) - img).max() < 1e-9


def test_parseval():
    rng = np.random.default_rng(5)
    img = rng.random((48, 80))
    spatial = float((img**2).sum())
    spectral = float((np.abs(fft2(img)) ** 2).sum()) / img.size
    assert abs(spatial - spectral) / spatial < 1e-9


def test_ifft2_of_flat_spectrum_is_impulse():
    grid = ifft2(np.ones((16, 16), dtype=complex))
    assert grid[0, 0] == pytest.approx(1.0, abs=1e-12)
    grid[0, 0] = 0.0
    assert np.abs(grid).max() < 1e-12


def test_ifft2_imag_residue_of_symmetric_kernel():
    tf = kernel_to_transfer(make_gaussian_kernel(GaussianSpec(15, 2.0)), 128, 128)
    _, residue = ifft2(tf, return_residue=True)
    assert residue < 1e-9


def test_fft2_input_validation():
    with pytest.raises(ValueError):
        fft2(np.zeros((0, 8)))
    with pytest.raises(ValueError):
        fft2(np.array([[1.0, np.nan], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        fft2(np.zeros(16))


def test_fft2_processes_channels_independently():
    rng = np.random.default_rng(1)
    img = rng.random((3, 16, 16))
    tf = fft2(img)
    assert tf.shape == (3, 16, 16)
    for c in range(3):
        assert np.array_equal(tf[c], fft2(img[c]))


def test_delta_kernel_gives_flat_transfer():
    delta = np.zeros((15, 15))
    delta[7, 7] = 1.0
    tf = kernel_to_transfer(delta, 64, 64)
    assert np.abs(tf - 1.0).max() < 1e-12


def test_symmetric_kernel_gives_real_transfer():
    tf = kernel_to_transfer(make_gaussian_kernel(GaussianSpec(15, 2.0)), 128, 128)
    assert np.abs(tf.imag).max() < 1e-9
    assert tf[0, 0].real == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("taps", [
    make_gaussian_kernel(GaussianSpec(15, 2.0)),
    np.full((9, 9), 1.0 / 81),
    None,  # random non-negative kernel, filled in below
])
def test_transfer_magnitude_bounded_by_one(taps):
    if taps is None:
        rng = np.random.default_rng(9)
        taps = rng.random((15, 15))
        taps /= taps.sum()
    tf = kernel_to_transfer(taps, 64, 64)
    assert np.abs(tf).max() <= 1.0 + 1e-9


def test_kernel_to_transfer_validation():
    k = make_gaussian_kernel(GaussianSpec(15, 2.0))
    with pytest.raises(ValueError):
        kernel_to_transfer(k, 8, 8)  # kernel larger than grid
    with pytest.raises(ValueError):
        kernel_to_transfer(np.ones((4, 4)) / 16, 64, 64)  # even side
    with pytest.raises(ValueError):
        kernel_to_transfer(np.ones((3, 5)), 64, 64)  # not square


def test_transfer_to_kernel_roundtrip():
    k = make_gaussian_kernel(GaussianSpec(15, 2.0))
    extracted = transfer_to_kernel(kernel_to_transfer(k, 128, 128), 15)
    assert np.abs(extracted.taps - k).max() < 1e-9
    assert extracted.discarded_energy < 1e-9


def test_transfer_to_kernel_of_flat_spectrum_is_delta():
    extracted = transfer_to_kernel(np.ones((64, 64), dtype=complex), 15)
    expected = np.zeros((15, 15))
    expected[7, 7] = 1.0
    assert np.abs(extracted.taps - expected).max() < 1e-12


def test_extraction_reports_discarded_tail():
    # sigma=4 does not fit in a 15x15 window; the clipped tail must show up
    wide = make_gaussian_kernel(GaussianSpec(31, 4.0))
    tf = kernel_to_transfer(wide, 128, 128)
    extracted = transfer_to_kernel(tf, 15)
    assert extracted.discarded_energy > 1e-5


def test_transfer_to_kernel_validation():
    tf = np.ones((16, 16), dtype=complex)
    with pytest.raises(ValueError):
        transfer_to_kernel(tf, 4)
    with pytest.raises(ValueError):
        transfer_to_kernel(tf, 17)


def test_spectrum_image_is_normalized_and_centered():
    img = ifft2(kernel_to_transfer(make_gaussian_kernel(GaussianSpec(15, 2.0)), 64, 64))
    spec = spectrum_image(np.abs(img))
    assert spec.shape == (64, 64)
    assert spec.min() >= 0.0 and spec.max() == pytest.approx(1.0)
    assert spec[32, 32] == spec.max()  # DC sits at the center


def test_ensure_image_validation():
    with pytest.raises(ValueError):
        ensure_image(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        ensure_image(np.zeros((2, 16, 16)))
    with pytest.raises(ValueError):
        ensure_image(np.full((16, 16), np.inf))
    out = ensure_image(np.zeros((3, 16, 16)))
    assert out.shape == (3, 16, 16)
