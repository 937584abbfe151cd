"""Brute-force quadrature oracle for scalar (1-D signal, 1-D observation) models.

Everything here evaluates Bayes' rule directly on a dense grid, with no use
of the closed-form mixture algebra, so it can serve as an independent check
of the analytic estimator: posterior density proportional to
``prior(x) * noise_density(y - H x)``, integrated with the trapezoid rule.

The grid spans every prior component mean by ``span_sigmas`` component
standard deviations, which puts the truncated tail mass below 1e-30 at the
default span of 12. Log densities are shifted by their per-query maximum
before exponentiation, so the moment ratios stay well conditioned even when
the absolute posterior scale underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mixture import GaussianMixture, ValidationError
from .model import BayesianLinearModel, observation_mixture

__all__ = ["QuadratureSpec", "quad_posterior_mean", "quad_mse"]

# Absolute posterior mass below this is treated as "no numerical support".
_SUPPORT_FLOOR = 1e-300
_LOG_SUPPORT_FLOOR = math.log(_SUPPORT_FLOOR)

_CHUNK_ROWS = 64


@dataclass(frozen=True)
class QuadratureSpec:
    """Grid resolution (odd point count) and half-width in component sigmas."""

    grid_points: int = 20001
    span_sigmas: float = 12.0

    def __post_init__(self):
        if self.grid_points < 1001 or self.grid_points % 2 == 0:
            raise ValidationError(
                f"grid_points {self.grid_points} must be odd and at least 1001"
            )
        if not self.span_sigmas >= 8.0:
            raise ValidationError(f"span_sigmas {self.span_sigmas} must be at least 8")


def _check_scalar_model(model: BayesianLinearModel):
    if model.signal_dim != 1 or model.observation_dim != 1:
        raise ValidationError(
            "quadrature oracle supports 1-D models only; got signal dim "
            f"{model.signal_dim}, observation dim {model.observation_dim}"
        )


def _support_grid(mixture: GaussianMixture, spec: QuadratureSpec) -> np.ndarray:
    """Grid covering every component mean by ``span_sigmas`` standard deviations."""
    centers = mixture.means[:, 0]
    sigmas = np.sqrt(mixture.covariances[:, 0, 0])
    low = float(np.min(centers - spec.span_sigmas * sigmas))
    high = float(np.max(centers + spec.span_sigmas * sigmas))
    return np.linspace(low, high, spec.grid_points)


def _posterior_moments(
    model: BayesianLinearModel,
    y: np.ndarray,
    grid: np.ndarray,
    log_prior: np.ndarray,
):
    """First/second posterior moments and absolute log-mass for each y.

    Returns ``(mean, second_moment, log_mass)``, each shaped like ``y``.
    ``log_mass`` is the log of the unnormalized posterior mass, the
    denominator of Bayes' rule before normalization by the y density.
    """
    h = model.H[0, 0]
    residual = y[:, None] - h * grid[None, :]
    log_w = log_prior[None, :] + model.noise.log_density(residual.reshape(-1)).reshape(
        residual.shape
    )
    shift = np.max(log_w, axis=1)
    weights = np.exp(log_w - shift[:, None])
    mass = np.trapezoid(weights, grid, axis=1)
    first = np.trapezoid(weights * grid[None, :], grid, axis=1) / mass
    second = np.trapezoid(weights * grid[None, :] ** 2, grid, axis=1) / mass
    return first, second, shift + np.log(mass)


def quad_posterior_mean(
    model: BayesianLinearModel,
    y,
    spec: QuadratureSpec = QuadratureSpec(),
):
    """Posterior mean E[x | y] by direct numerical integration.

    ``y`` may be a scalar or a 1-D array of observation values; the return
    matches (float or 1-D array). Raises :class:`ValidationError` when the
    posterior mass at some requested ``y`` underflows the support floor,
    i.e. the observation lies outside the grid's numerical support.
    """
    _check_scalar_model(model)
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    if y_arr.ndim != 1:
        raise ValidationError(f"y must be scalar or 1-D, got shape {np.shape(y)}")
    if not np.all(np.isfinite(y_arr)):
        raise ValidationError("y has non-finite entries")
    grid = _support_grid(model.x_prior, spec)
    log_prior = model.x_prior.log_density(grid)
    means = np.empty_like(y_arr)
    for start in range(0, y_arr.size, _CHUNK_ROWS):
        rows = slice(start, min(start + _CHUNK_ROWS, y_arr.size))
        first, _, log_mass = _posterior_moments(model, y_arr[rows], grid, log_prior)
        if np.any(log_mass < _LOG_SUPPORT_FLOOR):
            bad = y_arr[rows][log_mass < _LOG_SUPPORT_FLOOR][0]
            raise ValidationError(f"y = {bad:.6g} outside numerical support of the grid")
        means[rows] = first
    return means if np.ndim(y) else float(means[0])


def quad_mse(model: BayesianLinearModel, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Bayesian MSE of the exact posterior mean by double quadrature.

    Integrates the posterior variance against the observation density:
    ``mse = ∫ f_y(y) Var[x | y] dy``, with the inner posterior moments on an
    x grid and the outer integral on a y grid built from the observation
    mixture. The observation density itself is evaluated exactly.
    """
    _check_scalar_model(model)
    x_grid = _support_grid(model.x_prior, spec)
    log_prior = model.x_prior.log_density(x_grid)
    y_grid = _support_grid(observation_mixture(model), spec)
    density = np.exp(observation_mixture(model).log_density(y_grid))
    integrand = np.empty_like(y_grid)
    for start in range(0, y_grid.size, _CHUNK_ROWS):
        rows = slice(start, min(start + _CHUNK_ROWS, y_grid.size))
        first, second, _ = _posterior_moments(model, y_grid[rows], x_grid, log_prior)
        integrand[rows] = density[rows] * (second - first**2)
    return float(np.trapezoid(integrand, y_grid))
