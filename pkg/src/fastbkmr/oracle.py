"""Exact Gaussian-process computations used as the reference standard.

These condition on the kernel hyperparameters, so they cost one dense
``O(n^3)`` factorization and are meant for small ``n`` only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .errors import DimensionMismatchError
from .kernels import KernelKind, KernelParams, cross_kernel_matrix, jittered_cholesky, kernel_matrix

__all__ = ["GpFit", "gp_posterior", "gls_gamma", "oracle_h", "rmse", "MAX_ORACLE_N"]

MAX_ORACLE_N = 5000


@dataclass(frozen=True)
class GpFit:
    h_mean: np.ndarray
    h_cov_diag: np.ndarray
    alpha: np.ndarray
    jitter: float = 0.0


def _factor_marginal(X, params, sigma2, kind):
    n = np.atleast_2d(X).shape[0]
    if n > MAX_ORACLE_N:
        raise ValueError(f"exact oracle limited to n <= {MAX_ORACLE_N}, got {n}")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    tK = params.tau2 * kernel_matrix(X, params, kind)
    V = tK + sigma2 * np.eye(n)
    L, jitter = jittered_cholesky(V)
    return tK, L, jitter


def gp_posterior(X, resid, params: KernelParams, sigma2, kind=KernelKind.GAUSSIAN_SQUARED, X_new=None):
    """Conditional mean and variance of ``h`` given ``resid = h + noise``.

    With ``V = tau2 K + sigma2 I``: ``mean = tau2 K V^-1 resid`` and
    ``var = diag(tau2 K - tau2 K V^-1 tau2 K)``. When ``X_new`` is given the
    mean and variance are for the surface at those rows instead.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    resid = np.asarray(resid, dtype=float).reshape(-1)
    if resid.shape[0] != X.shape[0]:
        raise DimensionMismatchError("residual length vs rows of X", X.shape[0], resid.shape[0])
    tK, L, jitter = _factor_marginal(X, params, sigma2, kind)
    alpha = cho_solve((L, True), resid)
    if X_new is None:
        cross = tK
        prior_var = np.full(X.shape[0], params.tau2)
    else:
        cross = params.tau2 * cross_kernel_matrix(X, X_new, params, kind)
        prior_var = np.full(np.atleast_2d(X_new).shape[0], params.tau2)
    mean = cross.T @ alpha
    v = solve_triangular(L, cross, lower=True)
    var = prior_var - np.sum(v * v, axis=0)
    return GpFit(h_mean=mean, h_cov_diag=var, alpha=alpha, jitter=jitter)


def gls_gamma(X, Y, Z, params: KernelParams, sigma2, kind=KernelKind.GAUSSIAN_SQUARED):
    """Generalized least-squares confounder coefficients under ``V = tau2 K + sigma2 I``.

    This is the posterior mean of ``gamma`` under a flat prior with ``h``
    integrated out.
    """
    Z = np.asarray(Z, dtype=float)
    _, L, _ = _factor_marginal(X, params, sigma2, kind)
    Lz = solve_triangular(L, Z, lower=True)
    Ly = solve_triangular(L, np.asarray(Y, dtype=float), lower=True)
    gamma, *_ = np.linalg.lstsq(Lz, Ly, rcond=None)
    return gamma


def oracle_h(data, params: KernelParams, sigma2, kind=KernelKind.GAUSSIAN_SQUARED, gamma=None, X_new=None):
    """Exact-GP estimate of ``h`` for a dataset at fixed hyperparameters.

    ``gamma`` defaults to the GLS estimate, so the oracle faces the same
    confounder adjustment as a fitted model.
    """
    if gamma is None:
        gamma = gls_gamma(data.X, data.Y, data.Z, params, sigma2, kind) if data.P else np.zeros(0)
    resid = data.Y - data.Z @ gamma
    return gp_posterior(data.X, resid, params, sigma2, kind, X_new=X_new)


def rmse(estimate, truth):
    estimate = np.asarray(estimate, dtype=float).reshape(-1)
    truth = np.asarray(truth, dtype=float).reshape(-1)
    if estimate.shape != truth.shape:
        raise DimensionMismatchError("rmse inputs", truth.shape[0], estimate.shape[0])
    return float(np.sqrt(np.mean((estimate - truth) ** 2)))
