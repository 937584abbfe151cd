"""The Bayesian linear model ``y = H x + n`` with Gaussian mixture priors.

Both the signal ``x`` and the noise ``n`` carry finite Gaussian mixture
distributions and are mutually independent. This module derives the
observation-space and joint mixtures, does SNR accounting via full second
moments, and calibrates a scalar noise scale for SNR sweeps.
"""

from __future__ import annotations

import math

import numpy as np

from .mixture import (
    GaussianComponent,
    GaussianMixture,
    ValidationError,
    affine_transform,
    independent_join,
)

__all__ = [
    "BayesianLinearModel",
    "observation_mixture",
    "joint_xy_mixture",
    "snr",
    "snr_db",
    "scale_noise",
    "calibrate_noise_scale",
]


class BayesianLinearModel:
    """Problem instance: observation matrix plus signal and noise mixtures.

    Parameters
    ----------
    observation_matrix : array_like, shape (m, d)
        The known matrix ``H`` mapping signal space to observation space.
    x_prior : GaussianMixture
        Prior mixture of the d-dimensional signal.
    noise : GaussianMixture
        Mixture of the m-dimensional additive noise, independent of the
        signal.
    """

    __slots__ = ("H", "x_prior", "noise")

    def __init__(self, observation_matrix, x_prior: GaussianMixture, noise: GaussianMixture):
        H = np.atleast_2d(np.asarray(observation_matrix, dtype=float))
        if not np.all(np.isfinite(H)):
            raise ValidationError("observation matrix has non-finite entries")
        if H.shape[1] != x_prior.dim:
            raise ValidationError(
                f"observation matrix has {H.shape[1]} columns, signal dimension is {x_prior.dim}"
            )
        if H.shape[0] != noise.dim:
            raise ValidationError(
                f"observation matrix has {H.shape[0]} rows, noise dimension is {noise.dim}"
            )
        H.setflags(write=False)
        self.H = H
        self.x_prior = x_prior
        self.noise = noise

    @property
    def signal_dim(self) -> int:
        return self.H.shape[1]

    @property
    def observation_dim(self) -> int:
        return self.H.shape[0]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"BayesianLinearModel(m={self.observation_dim}, d={self.signal_dim}, "
            f"K={len(self.x_prior)}, L={len(self.noise)})"
        )


def observation_mixture(model: BayesianLinearModel) -> GaussianMixture:
    """The mixture of the observation ``y``.

    One component per signal/noise component pair, in row-major order
    (signal index outer, noise index inner): weight ``p_k q_l``, mean
    ``H u_x^(k) + u_n^(l)``, covariance ``H C_x^(k) H^T + C_n^(l)``.
    """
    H = model.H
    comps = []
    for k, cx in enumerate(model.x_prior.components):
        hy = H @ cx.mean
        hch = H @ cx.covariance @ H.T
        hch = 0.5 * (hch + hch.T)
        for l, cn in enumerate(model.noise.components):
            comps.append(
                GaussianComponent(
                    cx.weight * cn.weight,
                    hy + cn.mean,
                    hch + cn.covariance,
                    _label=f"observation component ({k},{l})",
                )
            )
    return GaussianMixture(comps, renormalize=False)


def joint_xy_mixture(model: BayesianLinearModel) -> GaussianMixture:
    """The joint mixture of the stacked vector ``[y; x]``.

    Built by stacking the independent signal and noise mixtures and applying
    the linear map ``[y; x] = [[H, I], [I, 0]] [x; n]``; the y-block marginal
    therefore matches :func:`observation_mixture` component by component.
    The block map is square and invertible for any ``m x d`` matrix ``H``,
    so the joint covariances stay positive definite.
    """
    m, d = model.H.shape
    stacked = independent_join(model.x_prior, model.noise)
    top = np.hstack([model.H, np.eye(m)])
    bottom = np.hstack([np.eye(d), np.zeros((d, m))])
    return affine_transform(stacked, np.vstack([top, bottom]))


def snr(model: BayesianLinearModel) -> float:
    """Signal-to-noise ratio ``E||x||^2 / E||n||^2`` (linear scale).

    Second moments include the mixture means: ``trace(C) + ||u||^2``.
    """
    denom = model.noise.second_moment_trace()
    if denom <= 0.0:
        raise ValidationError("noise second moment is zero")
    return model.x_prior.second_moment_trace() / denom


def snr_db(model: BayesianLinearModel) -> float:
    return 10.0 * math.log10(snr(model))


def scale_noise(model: BayesianLinearModel, factor: float) -> BayesianLinearModel:
    """Replace the noise with ``factor * n``: means scale by ``factor``,
    covariances by ``factor**2``. ``factor`` must be positive and finite."""
    factor = float(factor)
    if not (math.isfinite(factor) and factor > 0.0):
        raise ValidationError(f"noise scale {factor} must be positive and finite")
    scaled = affine_transform(model.noise, factor * np.eye(model.noise.dim))
    return BayesianLinearModel(model.H, model.x_prior, scaled)


def calibrate_noise_scale(model: BayesianLinearModel, target_snr_db: float) -> tuple[BayesianLinearModel, float]:
    """Scale the noise so the model hits ``target_snr_db``.

    Returns ``(scaled_model, a)`` where the noise of the scaled model is
    ``a * n``. Since both the noise mean and covariance scale with ``a``,
    ``E||a n||^2 = a^2 E||n||^2`` and the calibration is exact:
    ``a = sqrt(E||x||^2 / (snr_linear * E||n||^2))``.
    """
    if not math.isfinite(target_snr_db):
        raise ValidationError(f"target SNR {target_snr_db} dB is not finite")
    # a = sqrt(E||x||^2 / E||n||^2) * 10^(-snr_db/20), computed in log10 to
    # survive extreme targets; the scale must still be a normal double.
    log10_factor = (
        0.5 * math.log10(model.x_prior.second_moment_trace() / model.noise.second_moment_trace())
        - target_snr_db / 20.0
    )
    try:
        factor = 10.0 ** log10_factor
    except OverflowError:
        factor = math.inf
    if not (math.isfinite(factor) and factor > 0.0):
        raise ValidationError(
            f"target SNR {target_snr_db} dB gives unusable noise scale 1e{log10_factor:.3g}"
        )
    return scale_noise(model, factor), factor
