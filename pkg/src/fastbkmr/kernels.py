"""Separable stationary kernels and exact Gaussian-process draws.

All three kernels share the form ``exp(-sum_m theta_m * d_m)`` and differ only
in the coordinate distance ``d_m``:

* ``GAUSSIAN_SQUARED``  ``d_m = (x_m - x'_m)**2``
* ``SQRT_ABSOLUTE``     ``d_m = sqrt(|x_m - x'_m|)``
* ``ABSOLUTE``          ``d_m = |x_m - x'_m|``

Only the squared form has a Gaussian spectral density, so it is the only one
the random Fourier feature model can represent. The other two exist to
simulate misspecified surfaces.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, FactorizationError

__all__ = [
    "KernelKind",
    "KernelParams",
    "kernel_value",
    "kernel_matrix",
    "cross_kernel_matrix",
    "sample_gp",
    "jittered_cholesky",
]

JITTER_START = 1e-10
JITTER_MAX = 1e-4


class KernelKind(enum.Enum):
    GAUSSIAN_SQUARED = "gaussian"
    SQRT_ABSOLUTE = "sqrt_abs"
    ABSOLUTE = "abs"

    def distance(self, diff):
        """Element-wise coordinate distance for an array of differences."""
        if self is KernelKind.GAUSSIAN_SQUARED:
            return diff * diff
        if self is KernelKind.SQRT_ABSOLUTE:
            return np.sqrt(np.abs(diff))
        return np.abs(diff)


@dataclass(frozen=True)
class KernelParams:
    """Per-exposure inverse length-scales ``theta`` and marginal variance ``tau2``."""

    theta: np.ndarray
    tau2: float = 1.0

    def __post_init__(self):
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        if theta.ndim != 1:
            raise ValueError("theta must be a vector")
        if np.any(theta < 0) or not np.all(np.isfinite(theta)):
            raise ValueError("theta must be finite and nonnegative")
        if not self.tau2 > 0:
            raise ValueError("tau2 must be positive")
        object.__setattr__(self, "theta", theta)

    @property
    def n_exposures(self):
        return self.theta.shape[0]


def _check_width(X, params):
    if X.shape[-1] != params.n_exposures:
        raise DimensionMismatchError("exposure columns vs theta", params.n_exposures, X.shape[-1])


def kernel_value(xi, xj, params, kind=KernelKind.GAUSSIAN_SQUARED):
    """Kernel between two exposure profiles; always in (0, 1]."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    xj = np.atleast_1d(np.asarray(xj, dtype=float))
    if xi.shape != xj.shape:
        raise DimensionMismatchError("profile lengths", xi.shape[0], xj.shape[0])
    _check_width(xi, params)
    return float(np.exp(-np.dot(params.theta, kind.distance(xi - xj))))


def cross_kernel_matrix(X1, X2, params, kind=KernelKind.GAUSSIAN_SQUARED):
    """Kernel between every row of ``X1`` and every row of ``X2``."""
    X1 = np.atleast_2d(np.asarray(X1, dtype=float))
    X2 = np.atleast_2d(np.asarray(X2, dtype=float))
    _check_width(X1, params)
    _check_width(X2, params)
    # accumulate one exposure at a time to avoid an n1 x n2 x M temporary
    expo = np.zeros((X1.shape[0], X2.shape[0]))
    for m, th in enumerate(params.theta):
        if th == 0:
            continue
        expo += th * kind.distance(X1[:, m, None] - X2[None, :, m])
    return np.exp(-expo)


def kernel_matrix(X, params, kind=KernelKind.GAUSSIAN_SQUARED):
    """Symmetric n x n kernel matrix with unit diagonal."""
    K = cross_kernel_matrix(X, X, params, kind)
    # exact symmetry regardless of rounding in the distance sums
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 1.0)
    return K


def jittered_cholesky(A, start=JITTER_START, max_jitter=JITTER_MAX):
    """Lower Cholesky factor of ``A``, adding diagonal jitter if needed.

    Jitter starts at ``start * mean(diag(A))`` and grows tenfold up to
    ``max_jitter * mean(diag(A))``. Returns ``(L, jitter)`` where ``jitter`` is
    the absolute amount added (0.0 if none was needed).
    """
    A = np.asarray(A, dtype=float)
    try:
        return np.linalg.cholesky(A), 0.0
    except np.linalg.LinAlgError:
        pass
    scale = float(np.mean(np.diag(A)))
    rel = start
    eye = np.eye(A.shape[0])
    while rel <= max_jitter * (1 + 1e-9):
        jitter = rel * scale
        try:
            return np.linalg.cholesky(A + jitter * eye), jitter
        except np.linalg.LinAlgError:
            rel *= 10
    raise FactorizationError(
        f"Cholesky failed with final jitter {max_jitter * scale:.3g}", jitter=max_jitter * scale
    )


def sample_gp(K, tau2, rng, size=None):
    """Mean-zero multivariate normal draw with covariance ``tau2 * K``.

    Parameters
    ----------
    K : ndarray (n, n)
        Kernel (correlation) matrix with unit diagonal.
    tau2 : float
        Marginal variance. ``tau2 == 0`` returns zeros.
    rng : numpy.random.Generator
    size : int, optional
        Number of independent draws; the result then has shape ``(size, n)``.
    """
    K = np.asarray(K, dtype=float)
    n = K.shape[0]
    shape = (n,) if size is None else (size, n)
    if tau2 == 0:
        return np.zeros(shape)
    if tau2 < 0:
        raise ValueError("tau2 must be nonnegative")
    L, _ = jittered_cholesky(K)
    z = rng.standard_normal(shape)
    return np.sqrt(tau2) * (z @ L.T)
