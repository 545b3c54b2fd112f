"""Posterior summaries of the exposure-response surface.

Every summary is a deterministic function of a :class:`PosteriorSamples`
object. Because the level of ``h`` trades off against the confounder
coefficients, curves and surfaces are reported as contrasts against a
reference exposure profile, evaluated draw by draw.

Percentiles of exposures use the median-unbiased empirical quantile
(Hyndman-Fan type 8). Posterior intervals are equal-tailed 95% intervals
of the per-draw contrasts under the same convention.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import DimensionMismatchError, EmptyWindowError, NumericalError
from .rff import Amplitudes, FrequencySet, evaluate_h

__all__ = [
    "EffectEstimate",
    "ResponseCurve",
    "BivariateSurface",
    "QUANTILE_METHOD",
    "exposure_percentiles",
    "summarize_draws",
    "predict_h",
    "overall_effect",
    "overall_effect_curve",
    "univariate_response",
    "bivariate_surface",
    "pointwise_log_likelihood",
    "waic",
    "waic_components",
]

QUANTILE_METHOD = "median_unbiased"
INTERVAL_TAIL = 2.5


@dataclass(frozen=True)
class EffectEstimate:
    point: float
    lower: float
    upper: float


@dataclass(frozen=True)
class ResponseCurve:
    """Contrasts along a grid for one exposure, co-exposures held fixed."""

    exposure: int
    grid: np.ndarray
    estimates: tuple
    fixed_profile: dict = field(default_factory=dict)

    @property
    def point(self):
        return np.array([e.point for e in self.estimates])

    @property
    def lower(self):
        return np.array([e.lower for e in self.estimates])

    @property
    def upper(self):
        return np.array([e.upper for e in self.estimates])


@dataclass(frozen=True)
class BivariateSurface:
    """Contrasts on a rectangular grid; ``point[i, j]`` is at ``(grid1[i], grid2[j])``.

    The reference profile is the ``(0, 0)`` corner of the grid.
    """

    exposures: tuple
    grid1: np.ndarray
    grid2: np.ndarray
    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    fixed_profile: dict = field(default_factory=dict)

    def estimate(self, i, j):
        return EffectEstimate(float(self.point[i, j]), float(self.lower[i, j]), float(self.upper[i, j]))


def exposure_percentiles(X, q):
    """Column-wise percentiles ``q`` (scalar or array) of the exposure matrix."""
    return np.percentile(np.asarray(X, dtype=float), q, axis=0, method=QUANTILE_METHOD)


def _lower_tail(d, axis):
    return np.percentile(d, INTERVAL_TAIL, axis=axis, method=QUANTILE_METHOD)


def summarize_draws(d, axis=-1):
    """Mean and equal-tailed 95% interval over ``axis``.

    The upper limit is computed as the negated lower limit of ``-d`` so that
    negating the draws swaps and negates the limits exactly.
    """
    d = np.asarray(d, dtype=float)
    return d.mean(axis=axis), _lower_tail(d, axis), -_lower_tail(-d, axis)


def _as_estimate(d):
    point, lower, upper = summarize_draws(d)
    return EffectEstimate(float(point), float(lower), float(upper))


def predict_h(samples, X_new):
    """Surface at the rows of ``X_new`` for every retained draw, shape (q, draws).

    Uses only the stored frequencies and amplitudes; no linear solve.
    """
    X_new = np.atleast_2d(np.asarray(X_new, dtype=float))
    M = samples.omega.shape[2]
    if X_new.shape[1] != M:
        raise DimensionMismatchError("exposure columns", M, X_new.shape[1])
    out = np.empty((X_new.shape[0], samples.n_draws))
    for s in range(samples.n_draws):
        out[:, s] = evaluate_h(X_new, FrequencySet(samples.omega[s]), Amplitudes(samples.a[s], samples.b[s]))
    return out


def _check_percentile(p):
    if not 0 < p < 100:
        raise ValueError(f"percentile must lie strictly between 0 and 100, got {p}")


def overall_effect(samples, X, p, p_ref=25.0):
    """Contrast with every exposure at its p-th versus p_ref-th percentile."""
    _check_percentile(p)
    _check_percentile(p_ref)
    profiles = np.vstack([exposure_percentiles(X, p), exposure_percentiles(X, p_ref)])
    hp = predict_h(samples, profiles)
    return _as_estimate(hp[0] - hp[1])


def overall_effect_curve(samples, X, percentiles, p_ref=25.0):
    """:func:`overall_effect` over a sequence of percentiles."""
    return [overall_effect(samples, X, p, p_ref) for p in percentiles]


def univariate_response(samples, X, m, co_percentile=50.0, grid_size=50, window=5.0):
    """Response curve for exposure ``m`` with the others at their ``co_percentile``.

    The grid covers the observed range of ``x_m`` among rows whose other
    exposures all lie between their ``co_percentile - window`` and
    ``co_percentile + window`` percentiles. Contrasts are against the first
    grid point.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    M = X.shape[1]
    if not 0 <= m < M:
        raise IndexError(f"exposure index {m} out of range for {M} exposures")
    _check_percentile(co_percentile)
    lo_p = max(co_percentile - window, 0.0)
    hi_p = min(co_percentile + window, 100.0)
    others = [k for k in range(M) if k != m]
    fixed = exposure_percentiles(X, co_percentile)
    keep = np.ones(X.shape[0], dtype=bool)
    if others:
        lo = exposure_percentiles(X[:, others], lo_p)
        hi = exposure_percentiles(X[:, others], hi_p)
        keep = np.all((X[:, others] >= lo) & (X[:, others] <= hi), axis=1)
    if not keep.any():
        raise EmptyWindowError(
            f"no rows with exposures {others} inside percentile window [{lo_p}, {hi_p}]"
        )
    xm = X[keep, m]
    lo_x, hi_x = xm.min(), xm.max()
    grid = np.linspace(lo_x, hi_x, grid_size) if hi_x > lo_x else np.array([lo_x])
    profiles = np.tile(fixed, (grid.shape[0], 1))
    profiles[:, m] = grid
    hp = predict_h(samples, profiles)
    contrasts = hp - hp[0]
    estimates = tuple(_as_estimate(c) for c in contrasts)
    fixed_profile = {
        "co_percentile": co_percentile,
        "window": (lo_p, hi_p),
        "n_rows_in_window": int(keep.sum()),
        "fixed_values": {k: float(fixed[k]) for k in others},
    }
    return ResponseCurve(exposure=m, grid=grid, estimates=estimates, fixed_profile=fixed_profile)


def bivariate_surface(samples, X, m1, m2, fixed_percentile=50.0, grid_size=50, percentile_range=(25.0, 95.0)):
    """Joint response surface for exposures ``m1`` and ``m2``.

    Remaining exposures sit at ``fixed_percentile``. Each axis runs between
    the ``percentile_range`` percentiles of its exposure; contrasts are
    against the corner where both exposures are at the lower percentile.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    M = X.shape[1]
    if m1 == m2:
        raise ValueError("bivariate surface needs two distinct exposures")
    for m in (m1, m2):
        if not 0 <= m < M:
            raise IndexError(f"exposure index {m} out of range for {M} exposures")
    _check_percentile(fixed_percentile)
    p_lo, p_hi = percentile_range
    _check_percentile(p_lo)
    _check_percentile(p_hi)
    if not p_lo < p_hi:
        raise ValueError("percentile_range must be increasing")
    fixed = exposure_percentiles(X, fixed_percentile)
    lo = exposure_percentiles(X, p_lo)
    hi = exposure_percentiles(X, p_hi)
    g1 = np.linspace(lo[m1], hi[m1], grid_size)
    g2 = np.linspace(lo[m2], hi[m2], grid_size)
    G1, G2 = np.meshgrid(g1, g2, indexing="ij")
    profiles = np.tile(fixed, (G1.size, 1))
    profiles[:, m1] = G1.ravel()
    profiles[:, m2] = G2.ravel()
    hp = predict_h(samples, profiles)
    contrasts = hp - hp[0]
    point, lower, upper = summarize_draws(contrasts, axis=1)
    shape = (grid_size, grid_size)
    fixed_profile = {
        "fixed_percentile": fixed_percentile,
        "reference_percentile": p_lo,
        "fixed_values": {k: float(fixed[k]) for k in range(M) if k not in (m1, m2)},
    }
    return BivariateSurface(
        exposures=(m1, m2),
        grid1=g1,
        grid2=g2,
        point=point.reshape(shape),
        lower=lower.reshape(shape),
        upper=upper.reshape(shape),
        fixed_profile=fixed_profile,
    )


def pointwise_log_likelihood(samples, data):
    """Normal log-density of each observation under each draw, shape (draws, n)."""
    if samples.h.shape[1] != data.n:
        raise DimensionMismatchError("stored h vs observations", data.n, samples.h.shape[1])
    mean = samples.gamma @ data.Z.T + samples.h
    sigma2 = samples.sigma2[:, None]
    return -0.5 * (np.log(2 * np.pi * sigma2) + (data.Y[None, :] - mean) ** 2 / sigma2)


def waic_components(samples, data):
    """``(waic, lppd, p_waic)``.

    ``p_waic`` sums the per-observation variance of the log-density across
    draws, with the variance taken over draws as a population (ddof=0).
    """
    if samples.n_draws < 2:
        raise ValueError("WAIC needs at least two retained draws")
    ll = pointwise_log_likelihood(samples, data)
    lppd = float(np.sum(logsumexp(ll, axis=0) - np.log(ll.shape[0])))
    # shifting by the first draw makes identical draws give exactly zero
    p_waic = float(np.sum(np.var(ll - ll[0], axis=0)))
    value = -2.0 * (lppd - p_waic)
    if not np.isfinite(value):
        raise NumericalError(f"non-finite WAIC (lppd={lppd}, p_waic={p_waic})")
    return value, lppd, p_waic


def waic(samples, data):
    return waic_components(samples, data)[0]
