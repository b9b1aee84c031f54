import numpy as np
import pytest

from convdiff import (GaussianSpec, InferenceConfig, PipelineDivergenceError,
                      RestorerError, RestorerHandle, degrade,
                      gen_training_samples, high_frequency_energy, identity_restorer,
                      infer, kernel_to_transfer, make_gaussian_kernel, mse,
                      oracle_restorer, psnr, wiener_deconv_restorer)


def _blurred(img, sigma=3.0, grid=None):
    grid = grid or img.shape[-1]
    tf = kernel_to_transfer(make_gaussian_kernel(GaussianSpec(15, sigma)), grid, grid)
    return tf, degrade(img, tf, 1.0)


@pytest.mark.parametrize("n", [1, 5, 10])
def test_oracle_restorer_is_a_fixed_point(broadband64, n):
    _, y = _blurred(broadband64)
    result = infer(y, oracle_restorer(broadband64), InferenceConfig(n=n))
    assert np.array_equal(result.restored, broadband64)


def test_single_step_is_plain_restoration(broadband64):
    tf, y = _blurred(broadband64)
    restorer = wiener_deconv_restorer(tf)
    result = infer(y, restorer, InferenceConfig(n=1))
    assert np.array_equal(result.restored, restorer.restore(y, 1.0))


def test_restorer_sees_the_exact_strength_schedule(broadband64):
    _, y = _blurred(broadband64)
    seen = []

    def spy(img, beta):
        seen.append(beta)
        return np.array(img)

    infer(y, RestorerHandle("spy", spy), InferenceConfig(n=5))
    assert seen == [t / 5 for t in range(5, 0, -1)]


def test_wiener_restorer_improves_psnr(broadband64):
    tf, y = _blurred(broadband64)
    result = infer(y, wiener_deconv_restorer(tf), InferenceConfig(n=5))
    assert psnr(result.restored, broadband64) > psnr(y, broadband64)


def test_identity_restorer_leaves_psnr_unchanged(broadband128):
    tf, y = _blurred(broadband128)
    result = infer(y, identity_restorer(), InferenceConfig(n=5))
    assert abs(psnr(result.restored, broadband128) - psnr(y, broadband128)) <= 0.1


def test_recorded_intermediates_follow_the_recursion(broadband64):
    _, y = _blurred(broadband64)
    cfg = InferenceConfig(n=4, record_intermediates=True, validate_each_step=True)
    result = infer(y, oracle_restorer(broadband64), cfg)
    assert len(result.steps) == 4
    for rec in result.steps:
        expected = degrade(broadband64, rec.transfer_estimate,
                           (rec.t - 1) / 4, clamp=False)
        assert np.array_equal(rec.x_next, expected)
        assert rec.validity is not None
    # records run t = n..1; x_t sharpens as t descends, so the trajectory
    # property (high-frequency energy non-increasing in t) reads ascending here
    energies = [high_frequency_energy(rec.x_t) for rec in result.steps]
    assert all(a <= b for a, b in zip(energies, energies[1:]))


def test_run_is_reproducible(broadband64):
    tf, y = _blurred(broadband64)
    a = infer(y, wiener_deconv_restorer(tf), InferenceConfig(n=3))
    b = infer(y, wiener_deconv_restorer(tf), InferenceConfig(n=3))
    assert np.array_equal(a.restored, b.restored)


def test_restorer_failure_carries_step_index(broadband64):
    _, y = _blurred(broadband64)

    def boom(img, beta):
        raise RestorerError("synthetic failure", returncode=9)

    with pytest.raises(RestorerError, match="step t=5") as info:
        infer(y, RestorerHandle("boom", boom), InferenceConfig(n=5))
    assert info.value.step == 5
    assert info.value.returncode == 9


def test_nonfinite_estimate_aborts(broadband64):
    _, y = _blurred(broadband64)

    def nans(img, beta):
        out = np.array(img)
        out[0, 0] = np.nan
        return out

    with pytest.raises(PipelineDivergenceError, match="non-finite"):
        infer(y, RestorerHandle("nans", nans), InferenceConfig(n=3))


def test_mean_drift_aborts(broadband64):
    _, y = _blurred(broadband64)

    def shifted(img, beta):
        return np.array(img) + 0.2

    with pytest.raises(PipelineDivergenceError, match="mean drift"):
        infer(y, RestorerHandle("shift", shifted), InferenceConfig(n=3))


def test_shape_change_rejected(broadband64):
    _, y = _blurred(broadband64)

    def cropper(img, beta):
        return np.array(img)[:32, :32]

    with pytest.raises(ValueError, match="shape"):
        infer(y, RestorerHandle("crop", cropper), InferenceConfig(n=2))


def test_config_validation():
    with pytest.raises(ValueError):
        InferenceConfig(n=0)


# ---------------------------------------------------------------------------
# training samples


def test_triples_satisfy_their_defining_relation(broadband64):
    tf, _ = _blurred(broadband64, sigma=2.0)
    triples = gen_training_samples(broadband64, tf, 8, seed=21)
    assert len(triples) == 8
    for triple in triples:
        assert 0.0 < triple.beta <= 1.0
        assert np.array_equal(triple.x_beta, degrade(broadband64, tf, triple.beta))
        assert np.array_equal(triple.x0, broadband64)


def test_same_seed_same_triples(broadband64):
    tf, _ = _blurred(broadband64, sigma=2.0)
    a = gen_training_samples(broadband64, tf, 5, seed=3)
    b = gen_training_samples(broadband64, tf, 5, seed=3)
    assert [t.beta for t in a] == [t.beta for t in b]
    assert all(np.array_equal(x.x_beta, y.x_beta) for x, y in zip(a, b))


def test_beta_laws():
    rng_betas = lambda law: [t.beta for t in gen_training_samples(
        np.full((16, 16), 0.5), np.ones((16, 16), complex), 500,
        beta_law=law, seed=1)]
    half_open = rng_betas("half_open")
    assert all(0.0 < b <= 1.0 for b in half_open)
    assert max(half_open) > 0.99
    opened = rng_betas("open")
    assert all(0.0 < b < 1.0 for b in opened)
    with pytest.raises(ValueError):
        gen_training_samples(np.full((16, 16), 0.5),
                             np.ones((16, 16), complex), 1, beta_law="closed")


def test_tiny_beta_barely_degrades(broadband64):
    tf, _ = _blurred(broadband64, sigma=2.0)
    out = degrade(broadband64, tf, 1e-3)
    assert np.abs(out - broadband64).mean() < 1e-2


# ---------------------------------------------------------------------------
# mse


def test_mse_basics():
    x = np.random.default_rng(0).random((16, 16))
    assert mse(x, x) == 0.0
    assert mse(np.zeros((8, 8)), np.ones((8, 8))) == 1.0
    assert mse(x, x + 0.1) == pytest.approx(0.01, rel=1e-9)
    with pytest.raises(ValueError):
        mse(np.zeros((8, 8)), np.zeros((8, 9)))
