"""Shared generators for randomized models used across the test suite."""

from __future__ import annotations

import numpy as np

from gmbayes import BayesianLinearModel, GaussianMixture


def random_spd(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    """Random symmetric positive definite matrix with eigenvalues O(scale)."""
    a = rng.normal(size=(dim, dim))
    m = (a @ a.T) * (0.3 * scale / dim) + scale * np.eye(dim)
    return 0.5 * (m + m.T)


def random_mixture(
    rng: np.random.Generator,
    dim: int,
    components: int,
    mean_scale: float = 2.0,
    cov_scale: float = 1.0,
) -> GaussianMixture:
    weights = rng.dirichlet(np.ones(components))
    means = [rng.normal(scale=mean_scale, size=dim) for _ in range(components)]
    covs = [random_spd(rng, dim, cov_scale) for _ in range(components)]
    return GaussianMixture.from_parameters(weights, means, covs)


def random_model(
    rng: np.random.Generator,
    signal_dim: int,
    observation_dim: int,
    signal_components: int,
    noise_components: int,
    mean_scale: float = 2.0,
) -> BayesianLinearModel:
    h = rng.normal(size=(observation_dim, signal_dim))
    return BayesianLinearModel(
        h,
        random_mixture(rng, signal_dim, signal_components, mean_scale=mean_scale),
        random_mixture(rng, observation_dim, noise_components, mean_scale=0.5),
    )
