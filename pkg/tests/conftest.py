"""Shared image and kernel fixtures."""

from __future__ import annotations

import numpy as np
import pytest

from convdiff import GaussianSpec, make_gaussian_kernel, make_test_image


@pytest.fixture(scope="session")
def broadband128() -> np.ndarray:
    """The seeded reference test image used by the regression baselines."""
    return make_test_image("broadband", 128, 128, seed=7)


@pytest.fixture(scope="session")
def broadband64() -> np.ndarray:
    return make_test_image("broadband", 64, 64, seed=3)


@pytest.fixture(scope="session")
def rich_broadband128() -> np.ndarray:
    """Broadband image with hard high-frequency excitation, for tests that
    need every spectral bin of the sharp image to carry signal."""
    return make_test_image("broadband", 128, 128, seed=11, smooth_sigma=0.7)


@pytest.fixture(scope="session")
def gauss15_sigma3() -> np.ndarray:
    return make_gaussian_kernel(GaussianSpec(15, 3.0))


@pytest.fixture(scope="session")
def gauss15_sigma2() -> np.ndarray:
    return make_gaussian_kernel(GaussianSpec(15, 2.0))
