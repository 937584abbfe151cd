"""Tests for the MMSE/LMMSE estimators and the posterior mixture."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import numpy.testing as npt
import pytest

from gmbayes import (
    BayesianLinearModel,
    GaussianMixture,
    LmmseEstimator,
    PrecomputedEstimator,
    ValidationError,
    lmmse_estimate,
    mmse_estimate,
    observation_mixture,
    posterior,
    posterior_covariance,
    precompute,
    responsibilities,
    scale_noise,
)

from conftest import random_model


def scalar_wiener_model() -> BayesianLinearModel:
    std = GaussianMixture.single(np.zeros(1), np.eye(1))
    return BayesianLinearModel(np.array([[1.0]]), std, std)


def two_component_1d_model() -> BayesianLinearModel:
    x = GaussianMixture.from_parameters(
        [0.4, 0.6], [np.array([-2.0]), np.array([1.5])], [[[0.5]], [[1.2]]]
    )
    n = GaussianMixture.from_parameters(
        [0.7, 0.3], [np.array([0.0]), np.array([0.4])], [[[0.3]], [[0.8]]]
    )
    return BayesianLinearModel(np.array([[1.0]]), x, n)


def information_form_means(model: BayesianLinearModel, y: np.ndarray) -> np.ndarray:
    """Per-(k,l) posterior component means via the information-form identity.

    u + (C_x^{-1} + H^T C_n^{-1} H)^{-1} H^T C_n^{-1} (y - H u_x - u_n),
    an independent evaluation path used only as a test oracle.
    """
    H = model.H
    out = []
    for cx in model.x_prior.components:
        for cn in model.noise.components:
            cx_inv = np.linalg.inv(cx.covariance)
            cn_inv = np.linalg.inv(cn.covariance)
            info = np.linalg.inv(cx_inv + H.T @ cn_inv @ H)
            residual = y - H @ cx.mean - cn.mean
            out.append(cx.mean + info @ H.T @ cn_inv @ residual)
    return np.stack(out)


class TestPrecompute:
    def test_scalar_wiener_gain(self):
        pre = precompute(scalar_wiener_model())
        npt.assert_allclose(pre.gains, [[[0.5]]], rtol=1e-15)
        npt.assert_allclose(pre.comp_post_covs, [[[0.5]]], rtol=1e-15)

    def test_identity_model_component_posteriors(self):
        # H = I_5, C^(k) = I, noise beta I -> C_x|y = beta/(1+beta) I for every k
        rng = np.random.default_rng(0)
        means = [rng.normal(scale=30.0, size=5) for _ in range(4)]
        x = GaussianMixture.from_parameters([0.25] * 4, means, [np.eye(5)] * 4)
        for beta in (0.1, 1.0, 10.0):
            noise = GaussianMixture.single(np.zeros(5), beta * np.eye(5))
            pre = precompute(BayesianLinearModel(np.eye(5), x, noise))
            expected = beta / (1.0 + beta) * np.eye(5)
            for pair in range(4):
                npt.assert_allclose(pre.comp_post_covs[pair], expected, rtol=1e-12)

    def test_gain_count(self):
        rng = np.random.default_rng(1)
        model = random_model(rng, 3, 2, 4, 1)
        pre = precompute(model)
        assert pre.gains.shape == (4, 3, 2)

    def test_component_covariances_psd(self):
        rng = np.random.default_rng(2)
        model = random_model(rng, 3, 3, 3, 2)
        pre = precompute(model)
        for cov in pre.comp_post_covs:
            npt.assert_allclose(cov, cov.T, atol=1e-12)
            assert np.linalg.eigvalsh(cov).min() >= -1e-10 * np.trace(cov)


class TestResponsibilities:
    def test_single_component(self):
        pre = precompute(scalar_wiener_model())
        npt.assert_array_equal(responsibilities(pre, np.array([3.7])), [[1.0]])

    def test_symmetric_prior_at_origin(self):
        x = GaussianMixture.from_parameters(
            [0.5, 0.5], [np.array([-3.0]), np.array([3.0])], [np.eye(1)] * 2
        )
        n = GaussianMixture.single(np.zeros(1), np.eye(1))
        pre = precompute(BayesianLinearModel(np.array([[1.0]]), x, n))
        alpha = responsibilities(pre, np.array([0.0]))
        npt.assert_allclose(alpha, [[0.5], [0.5]], atol=1e-15)

    def test_far_separated_components_concentrate(self):
        x = GaussianMixture.from_parameters(
            [0.5, 0.5], [np.array([0.0]), np.array([100.0])], [np.eye(1)] * 2
        )
        n = GaussianMixture.single(np.zeros(1), np.eye(1))
        pre = precompute(BayesianLinearModel(np.array([[1.0]]), x, n))
        alpha = responsibilities(pre, np.array([0.0]))
        assert alpha[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_normalization_at_extreme_observations(self):
        pre = precompute(two_component_1d_model())
        for magnitude in (1.0, 1e3, 1e6):
            alpha = responsibilities(pre, np.array([magnitude]))
            assert abs(alpha.sum() - 1.0) <= 1e-12
            assert np.all(alpha >= 0)

    def test_batch_matches_single(self):
        # batched triangular solves may round differently from one-row
        # solves, so agreement is to a few ulp, not bit for bit
        rng = np.random.default_rng(3)
        model = random_model(rng, 2, 2, 3, 2)
        pre = precompute(model)
        ys = rng.normal(size=(7, 2))
        batch = pre.responsibilities(ys)
        for i, y in enumerate(ys):
            npt.assert_allclose(
                batch[:, :, i], pre.responsibilities(y), rtol=1e-13, atol=1e-300
            )


class TestMmseEstimate:
    def test_scalar_wiener(self):
        pre = precompute(scalar_wiener_model())
        npt.assert_allclose(mmse_estimate(pre, np.array([2.0])), [1.0], rtol=1e-15)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(4)
        model = random_model(rng, 3, 2, 2, 2)
        pre = precompute(model)
        ys = rng.normal(size=(9, 2))
        batch = pre.estimate(ys)
        for i, y in enumerate(ys):
            npt.assert_allclose(batch[i], pre.estimate(y), rtol=1e-13, atol=1e-300)

    def test_nonlinearity(self):
        # genuine 2-component prior: xhat(y1+y2) != xhat(y1)+xhat(y2)-xhat(0)
        pre = precompute(two_component_1d_model())
        y1, y2 = np.array([0.8]), np.array([-1.3])
        lhs = pre.estimate(y1 + y2)
        rhs = pre.estimate(y1) + pre.estimate(y2) - pre.estimate(np.zeros(1))
        assert abs(float(lhs[0] - rhs[0])) > 1e-3

    def test_dimension_mismatch(self):
        pre = precompute(scalar_wiener_model())
        with pytest.raises(ValidationError, match="dimension"):
            pre.estimate(np.zeros(2))

    def test_concurrent_reads_consistent(self):
        rng = np.random.default_rng(5)
        model = random_model(rng, 3, 3, 3, 2)
        pre = precompute(model)
        ys = rng.normal(size=(32, 3))
        expected = [pre.estimate(y) for y in ys]
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(pre.estimate, ys))
        for got, want in zip(results, expected):
            npt.assert_array_equal(got, want)


class TestPosterior:
    def test_mean_equals_estimate_exactly(self):
        rng = np.random.default_rng(6)
        model = random_model(rng, 2, 3, 3, 2)
        pre = precompute(model)
        for _ in range(10):
            y = rng.normal(size=3)
            post = posterior(pre, y)
            npt.assert_array_equal(post.mean(), pre.estimate(y))

    def test_component_covariances_independent_of_y(self):
        # views of the one precomputed array, not recomputed per call
        pre = precompute(two_component_1d_model())
        post_a = posterior(pre, np.array([0.3]))
        post_b = posterior(pre, np.array([-5.0]))
        assert np.shares_memory(post_a.component_covariances, pre.comp_post_covs)
        npt.assert_array_equal(post_a.component_covariances, post_b.component_covariances)

    def test_single_component_special_case(self):
        pre = precompute(scalar_wiener_model())
        post = posterior(pre, np.array([2.0]))
        npt.assert_allclose(post.mean(), [1.0], rtol=1e-15)
        npt.assert_allclose(post.covariance(), [[0.5]], rtol=1e-15)

    def test_density_matches_bayes_rule_pointwise(self):
        model = two_component_1d_model()
        pre = precompute(model)
        y = np.array([0.6])
        post = posterior(pre, y)
        post_mix = GaussianMixture.from_parameters(
            post.responsibilities.reshape(-1),
            list(post.component_means.reshape(-1, 1)),
            list(post.component_covariances.reshape(-1, 1, 1)),
        )
        # reference: f(x|y) = f_x(x) f_n(y - x) / integral, evaluated on a grid
        grid = np.linspace(-8.0, 8.0, 20001)
        log_joint = model.x_prior.log_density(grid) + model.noise.log_density(
            float(y[0]) - grid
        )
        weights = np.exp(log_joint - log_joint.max())
        reference = weights / np.trapezoid(weights, grid)
        ours = np.exp(post_mix.log_density(grid))
        npt.assert_allclose(ours, reference, atol=1e-8)

    def test_responsibility_table_shape_and_sum(self):
        rng = np.random.default_rng(7)
        model = random_model(rng, 2, 2, 4, 3)
        pre = precompute(model)
        post = posterior(pre, rng.normal(size=2))
        assert post.responsibilities.shape == (4, 3)
        assert post.responsibilities.sum() == pytest.approx(1.0, abs=1e-12)


class TestPosteriorCovariance:
    def test_single_component(self):
        pre = precompute(scalar_wiener_model())
        post = posterior(pre, np.array([1.3]))
        npt.assert_allclose(posterior_covariance(post), [[0.5]], rtol=1e-15)

    def test_trace_dominates_average_component_trace(self):
        rng = np.random.default_rng(8)
        model = random_model(rng, 3, 3, 3, 2)
        pre = precompute(model)
        for _ in range(5):
            post = posterior(pre, rng.normal(size=3))
            avg = float(
                post.responsibilities.reshape(-1)
                @ np.trace(post.component_covariances.reshape(-1, 3, 3), axis1=1, axis2=2)
            )
            assert np.trace(posterior_covariance(post)) >= avg - 1e-12

    def test_matches_quadrature_conditional_variance(self):
        model = two_component_1d_model()
        pre = precompute(model)
        y = 0.0
        post = posterior(pre, np.array([y]))
        grid = np.linspace(-9.0, 9.0, 40001)
        log_w = model.x_prior.log_density(grid) + model.noise.log_density(y - grid)
        w = np.exp(log_w - log_w.max())
        mass = np.trapezoid(w, grid)
        mean = np.trapezoid(w * grid, grid) / mass
        var = np.trapezoid(w * (grid - mean) ** 2, grid) / mass
        assert float(posterior_covariance(post)[0, 0]) == pytest.approx(var, abs=1e-8)


class TestInformationFormIdentity:
    def test_component_means_agree(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            model = random_model(rng, 3, 3, 2, 2)
            pre = precompute(model)
            y = rng.normal(size=3)
            reference = information_form_means(model, y)
            ours = pre._component_means(y[None, :])[:, 0, :]
            scale = 1.0 + np.linalg.norm(reference, axis=1, keepdims=True)
            assert np.max(np.abs(ours - reference) / scale) < 1e-8


class TestLmmse:
    def test_gaussian_case_matches_mmse(self):
        rng = np.random.default_rng(10)
        model = random_model(rng, 3, 2, 1, 1)
        pre = precompute(model)
        lmmse = LmmseEstimator(model)
        for _ in range(20):
            y = rng.normal(size=2)
            a = pre.estimate(y)
            b = lmmse.estimate(y)
            assert np.linalg.norm(a - b) <= 1e-10 * (1 + np.linalg.norm(b))

    def test_zero_innovation_returns_prior_mean(self):
        rng = np.random.default_rng(11)
        model = random_model(rng, 3, 3, 3, 2)
        y = model.H @ model.x_prior.mean() + model.noise.mean()
        npt.assert_allclose(
            lmmse_estimate(model, y), model.x_prior.mean(), atol=1e-10
        )

    def test_large_noise_returns_prior_mean(self):
        rng = np.random.default_rng(12)
        model = scale_noise(random_model(rng, 2, 2, 3, 2), 1e6)
        y = rng.normal(size=2, scale=1e6)
        est = lmmse_estimate(model, y)
        # gain decays as a^-2 while ||y|| grows as a, so the residual is O(1/a)
        assert np.linalg.norm(est - model.x_prior.mean()) < 1e-4

    def test_mse_value_scalar(self):
        lmmse = LmmseEstimator(scalar_wiener_model())
        assert lmmse.mse == pytest.approx(0.5, rel=1e-14)

    def test_estimate_is_affine(self):
        rng = np.random.default_rng(13)
        model = random_model(rng, 2, 2, 3, 2)
        lmmse = LmmseEstimator(model)
        y1, y2 = rng.normal(size=2), rng.normal(size=2)
        lhs = lmmse.estimate(y1 + y2)
        rhs = lmmse.estimate(y1) + lmmse.estimate(y2) - lmmse.estimate(np.zeros(2))
        npt.assert_allclose(lhs, rhs, atol=1e-10)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(14)
        model = random_model(rng, 3, 2, 2, 2)
        lmmse = LmmseEstimator(model)
        ys = rng.normal(size=(6, 2))
        batch = lmmse.estimate(ys)
        for i, y in enumerate(ys):
            npt.assert_allclose(batch[i], lmmse.estimate(y), rtol=1e-13, atol=1e-13)


class TestObservationDensityConsistency:
    def test_precomputed_log_pdfs_match_observation_mixture(self):
        rng = np.random.default_rng(15)
        model = random_model(rng, 2, 2, 3, 2)
        pre = precompute(model)
        obs = observation_mixture(model)
        ys = rng.normal(size=(5, 2))
        from scipy.special import logsumexp

        per_pair = pre.log_observation_pdfs(ys) + pre.log_prior[:, None]
        npt.assert_allclose(
            logsumexp(per_pair, axis=0), obs.log_density(ys), rtol=1e-12
        )
