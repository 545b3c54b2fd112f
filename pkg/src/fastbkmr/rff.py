"""Random Fourier features for the Gaussian (squared-distance) kernel.

For ``K(x, x') = exp(-sum_m theta_m (x_m - x'_m)**2)`` the spectral density is
``N(0, diag(2 * theta))``. A surface is represented as

    h(x) = sum_j a_j cos(omega_j . x) + b_j sin(omega_j . x)

with ``a_j, b_j ~ N(0, tau2 / J)``; averaged over frequency draws the induced
covariance of ``h`` is ``tau2 * K``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

__all__ = [
    "FrequencySet",
    "Amplitudes",
    "sample_frequencies",
    "projections",
    "basis_matrix",
    "evaluate_h",
]


@dataclass(frozen=True)
class FrequencySet:
    """J x M matrix of frequencies, one row per basis pair."""

    omega: np.ndarray

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        if omega.ndim != 2 or omega.shape[0] < 1:
            raise ValueError("omega must be a J x M matrix with J >= 1")
        object.__setattr__(self, "omega", omega)

    @property
    def J(self):
        return self.omega.shape[0]

    @property
    def M(self):
        return self.omega.shape[1]


@dataclass(frozen=True)
class Amplitudes:
    """Cosine (``a``) and sine (``b``) coefficients."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.shape != b.shape or a.ndim != 1:
            raise DimensionMismatchError("amplitude vectors", a.shape[0], b.shape[0])
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def J(self):
        return self.a.shape[0]

    def stacked(self):
        return np.concatenate([self.a, self.b])


def sample_frequencies(theta, J, rng):
    """Draw J frequencies from ``N(0, diag(2 * theta))``.

    ``theta_m == 0`` gives an exactly-zero column, so exposure ``m`` drops out
    of the surface.
    """
    J = int(J)
    if J < 1:
        raise ValueError(f"number of basis functions must be >= 1, got {J}")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(theta < 0):
        raise ValueError("theta must be nonnegative")
    z = rng.standard_normal((J, theta.shape[0]))
    return FrequencySet(z * np.sqrt(2.0 * theta))


def _as_omega(freqs):
    return freqs.omega if isinstance(freqs, FrequencySet) else np.asarray(freqs, dtype=float)


def projections(X, freqs):
    """The n x J matrix of inner products ``omega_j . x_i``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    omega = _as_omega(freqs)
    if X.shape[1] != omega.shape[1]:
        raise DimensionMismatchError("exposure columns vs frequency width", omega.shape[1], X.shape[1])
    return X @ omega.T


def basis_matrix(X, freqs):
    """Dense n x 2J design ``[cos(X omega^T) | sin(X omega^T)]``."""
    proj = projections(X, freqs)
    return np.hstack([np.cos(proj), np.sin(proj)])


def evaluate_h(X, freqs, amps):
    """Surface values at the rows of ``X``."""
    proj = projections(X, freqs)
    if amps.J != proj.shape[1]:
        raise DimensionMismatchError("amplitudes vs frequencies", proj.shape[1], amps.J)
    return np.cos(proj) @ amps.a + np.sin(proj) @ amps.b
