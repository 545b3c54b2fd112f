"""MCMC for kernel machine regression with supervised random Fourier features.

The model is

    Y = h(X) + Z gamma + eps,     eps ~ N(0, sigma2)
    h(x) = sum_j a_j cos(omega_j . x) + b_j sin(omega_j . x)
    a_j, b_j ~ N(0, tau2 / J),   omega_j ~ N(0, diag(2 theta)),
    gamma ~ N(0, sigma_gamma2 I),  sigma2, tau2, theta_m ~ IG(shape, rate)

Each iteration performs, in order: a Gibbs draw of ``theta``, an HMC update
of the coefficient block ``(gamma, a, b)``, an HMC update of the frequency
block ``Omega``, then Gibbs draws of ``tau2`` and ``sigma2``. Step sizes of the
two HMC blocks are tuned during the first half of the chain; the second half
is retained.
"""
from __future__ import annotations

import logging
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from .data import Dataset
from .errors import DensityError, DivergenceError
from .rff import Amplitudes, FrequencySet, evaluate_h, projections, sample_frequencies

log = logging.getLogger(__name__)

__all__ = [
    "Priors",
    "ModelState",
    "HmcConfig",
    "PosteriorSamples",
    "HmcStep",
    "initialize",
    "default_theta0",
    "log_density_theta_block",
    "grad_theta_block",
    "log_density_omega_block",
    "grad_omega_block",
    "ThetaBlockTarget",
    "OmegaBlockTarget",
    "leapfrog",
    "acceptance_probability",
    "hmc_update",
    "tune_step_size",
    "theta_conditional",
    "tau2_conditional",
    "sigma2_conditional",
    "gibbs_theta",
    "gibbs_tau2",
    "gibbs_sigma2",
    "run_chain",
]

THETA_FLOOR = 1e-8
THETA_UPDATES = ("conjugate", "verbatim")


@dataclass(frozen=True)
class Priors:
    """Prior hyperparameters.

    ``sigma_gamma2`` is the variance of the Gaussian prior on ``gamma``; the
    default is large enough to be numerically flat. ``ig_shape``/``ig_rate``
    parameterize the inverse-Gamma priors on ``sigma2``, ``tau2`` and every
    ``theta_m``.
    """

    sigma_gamma2: float = 1e6
    ig_shape: float = 0.001
    ig_rate: float = 0.001

    def __post_init__(self):
        if not (self.sigma_gamma2 > 0 and self.ig_shape > 0 and self.ig_rate > 0):
            raise ValueError("prior parameters must be positive")


@dataclass(frozen=True)
class ModelState:
    gamma: np.ndarray
    amps: Amplitudes
    freqs: FrequencySet
    theta: np.ndarray
    tau2: float
    sigma2: float

    @property
    def J(self):
        return self.freqs.J

    def coefficients(self):
        """The stacked coefficient block ``(gamma, a, b)``."""
        return np.concatenate([self.gamma, self.amps.a, self.amps.b])

    def with_coefficients(self, coef):
        P = self.gamma.shape[0]
        J = self.J
        return replace(self, gamma=coef[:P].copy(), amps=Amplitudes(coef[P:P + J].copy(), coef[P + J:].copy()))


@dataclass(frozen=True)
class HmcConfig:
    """Step sizes, trajectory length and tuning schedule for both HMC blocks.

    ``L_omega`` overrides the number of leapfrog steps for the frequency block
    when given; otherwise both blocks use ``L``.
    """

    e_beta: float = 0.01
    e_omega: float = 0.01
    L: int = 10
    e_t: float = 0.2
    tune_interval: int = 200
    accept_low: float = 0.65
    accept_high: float = 0.85
    L_omega: int | None = None

    def __post_init__(self):
        if not (self.e_beta > 0 and self.e_omega > 0):
            raise ValueError("step sizes must be positive")
        if self.L < 1 or (self.L_omega is not None and self.L_omega < 1):
            raise ValueError("leapfrog steps must be >= 1")
        if not 0 <= self.e_t <= 1:
            raise ValueError("e_t must lie in [0, 1]")
        if not self.accept_low < self.accept_high:
            raise ValueError("accept_low must be below accept_high")
        if self.tune_interval < 1:
            raise ValueError("tune_interval must be positive")

    @property
    def steps_omega(self):
        return self.L if self.L_omega is None else self.L_omega


@dataclass
class PosteriorSamples:
    """Retained (second-half) draws plus per-iteration sampler diagnostics.

    Draw arrays have the retained draw as their leading axis. The diagnostic
    arrays (``accept_*``, ``diverged_*``, ``step_*``) cover all ``K``
    iterations; ``burn_in`` is the index of the first retained iteration.
    """

    gamma: np.ndarray
    a: np.ndarray
    b: np.ndarray
    omega: np.ndarray
    theta: np.ndarray
    tau2: np.ndarray
    sigma2: np.ndarray
    h: np.ndarray
    burn_in: int
    accept_beta: np.ndarray
    accept_omega: np.ndarray
    diverged_beta: np.ndarray
    diverged_omega: np.ndarray
    step_beta: np.ndarray
    step_omega: np.ndarray
    seconds: float = 0.0
    warnings: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def n_draws(self):
        return self.tau2.shape[0]

    @property
    def K(self):
        return self.accept_beta.shape[0]

    @property
    def J(self):
        return self.a.shape[1]

    def freqs(self, s):
        return FrequencySet(self.omega[s])

    def amps(self, s):
        return Amplitudes(self.a[s], self.b[s])

    def acceptance_rate(self, block, retained=True):
        """Fraction of accepted proposals for ``block`` in {"beta", "omega"}."""
        acc = {"beta": self.accept_beta, "omega": self.accept_omega}[block]
        acc = acc[self.burn_in:] if retained else acc
        return float(np.mean(acc)) if acc.size else float("nan")

    def h_mean(self):
        return self.h.mean(axis=0)


class HmcStep(NamedTuple):
    position: np.ndarray
    accepted: bool
    diverged: bool
    accept_prob: float


# ---------------------------------------------------------------------------
# initialization


def default_theta0(X):
    """``1 / (2 Var(x_m))`` per exposure, floored at ``THETA_FLOOR``."""
    var = np.var(np.asarray(X, dtype=float), axis=0, ddof=1)
    with np.errstate(divide="ignore"):
        theta = np.where(var > 0, 1.0 / (2.0 * var), 1.0)
    return np.maximum(theta, THETA_FLOOR)


def _trig_design(data, freqs):
    proj = projections(data.X, freqs)
    return np.cos(proj), np.sin(proj)


def initialize(data, theta0, J, priors=None, rng=None, tau2=None, sigma2=None):
    """Starting state: frequencies from the prior, coefficients by ridge regression.

    The coefficients maximize the coefficient-block log-density for pilot
    variances (``tau2`` and ``sigma2`` if given, otherwise ``Var(Y) / 2`` each).
    ``sigma2`` then becomes the residual mean square and ``tau2`` the sample
    variance of ``Y`` minus that, floored at ``0.1 Var(Y)``.
    """
    priors = priors or Priors()
    rng = np.random.default_rng(rng)
    theta0 = np.maximum(np.atleast_1d(np.asarray(theta0, dtype=float)), THETA_FLOOR)
    if theta0.shape[0] != data.M:
        raise ValueError(f"theta0 has length {theta0.shape[0]}, data has {data.M} exposures")
    freqs = sample_frequencies(theta0, J, rng)
    cos_b, sin_b = _trig_design(data, freqs)
    B = np.hstack([data.Z, cos_b, sin_b])

    var_y = float(np.var(data.Y, ddof=1)) if data.n > 1 else 0.0
    pilot = var_y / 2 if var_y > 0 else 1.0
    tau2_p = pilot if tau2 is None else float(tau2)
    sigma2_p = pilot if sigma2 is None else float(sigma2)
    s_inv = _s_inv(data.P, J, priors.sigma_gamma2, tau2_p)
    A = B.T @ B + sigma2_p * np.diag(s_inv)
    try:
        coef = np.linalg.solve(A, B.T @ data.Y)
    except np.linalg.LinAlgError as exc:
        raise DensityError("singular penalized normal equations at initialization") from exc

    resid = data.Y - B @ coef
    if sigma2 is None:
        sigma2 = max(float(resid @ resid) / data.n, np.finfo(float).tiny)
    if tau2 is None:
        tau2 = max(var_y - sigma2, 0.1 * var_y, THETA_FLOOR)
    P = data.P
    return ModelState(
        gamma=coef[:P],
        amps=Amplitudes(coef[P:P + J], coef[P + J:]),
        freqs=freqs,
        theta=theta0,
        tau2=float(tau2),
        sigma2=float(sigma2),
    )


# ---------------------------------------------------------------------------
# block log-densities and gradients


def _s_inv(P, J, sigma_gamma2, tau2):
    return np.concatenate([np.full(P, 1.0 / sigma_gamma2), np.full(2 * J, J / tau2)])


def _check_sigma2(sigma2):
    if not sigma2 > 0:
        raise DensityError(f"sigma2 must be positive, got {sigma2}")


class _CachedTarget:
    """Caches the last (position -> value, gradient) evaluation."""

    def __init__(self):
        self._x = None
        self._val = None
        self._grad = None
        self.n_evals = 0

    def _compute(self, x):
        raise NotImplementedError

    def _eval(self, x):
        if self._x is None or not np.array_equal(self._x, x):
            self._val, self._grad = self._compute(x)
            self._x = np.array(x, copy=True)
            self.n_evals += 1
        return self._val, self._grad

    def log_density(self, x):
        return self._eval(x)[0]

    def grad(self, x):
        return self._eval(x)[1]


class ThetaBlockTarget(_CachedTarget):
    """Log-density of ``Theta = (gamma, a, b)`` with everything else fixed.

    ``L = -||Y - B Theta||^2 / (2 sigma2) - Theta' S^-1 Theta / 2`` with
    ``B = [Z | cos | sin]`` and ``S = diag(sigma_gamma2, ..., tau2/J, ...)``.
    """

    def __init__(self, B, Y, s_inv, sigma2):
        super().__init__()
        _check_sigma2(sigma2)
        self.B = B
        self.Y = Y
        self.s_inv = s_inv
        self.sigma2 = sigma2

    def _compute(self, coef):
        resid = self.Y - self.B @ coef
        val = -0.5 * (resid @ resid) / self.sigma2 - 0.5 * np.dot(self.s_inv * coef, coef)
        grad = (self.B.T @ resid) / self.sigma2 - self.s_inv * coef
        return float(val), grad

    @classmethod
    def from_state(cls, state, data, priors):
        cos_b, sin_b = _trig_design(data, state.freqs)
        B = np.hstack([data.Z, cos_b, sin_b])
        s_inv = _s_inv(data.P, state.J, priors.sigma_gamma2, state.tau2)
        return cls(B, data.Y, s_inv, state.sigma2)


class OmegaBlockTarget(_CachedTarget):
    """Log-density of the flattened J x M frequency matrix.

    ``L = -||R||^2 / (2 sigma2) - sum_j omega_j' Sigma^-1 omega_j / 2`` with
    ``R = Y - Z gamma - cos(X Omega') a - sin(X Omega') b`` and
    ``Sigma = diag(2 theta)``. Exposures with ``theta_m == 0`` are only
    allowed when the corresponding frequency column is identically zero.
    """

    def __init__(self, X, offset_resid, a, b, theta, sigma2):
        super().__init__()
        _check_sigma2(sigma2)
        self.X = X
        self.r0 = offset_resid
        self.a = a
        self.b = b
        self.J = a.shape[0]
        self.M = X.shape[1]
        theta = np.asarray(theta, dtype=float)
        self.zero_theta = theta == 0
        with np.errstate(divide="ignore"):
            self.prec = np.where(self.zero_theta, 0.0, 1.0 / (2.0 * theta))
        self.sigma2 = sigma2
        self.cos = None
        self.sin = None

    def _compute(self, flat):
        W = flat.reshape(self.J, self.M)
        if np.any(self.zero_theta) and np.any(W[:, self.zero_theta] != 0):
            raise DensityError("frequency density undefined: theta_m = 0 with nonzero omega component")
        proj = self.X @ W.T
        C = np.cos(proj)
        S = np.sin(proj)
        R = self.r0 - C @ self.a - S @ self.b
        val = -0.5 * (R @ R) / self.sigma2 - 0.5 * np.sum(W * W * self.prec)
        D = S * self.a - C * self.b
        G = -(D.T @ (self.X * R[:, None])) / self.sigma2 - W * self.prec
        self.cos, self.sin = C, S
        return float(val), G.reshape(-1)

    def trig_at(self, flat):
        """cos/sin design matrices at ``flat`` (reuses the cached evaluation)."""
        self._eval(flat)
        return self.cos, self.sin

    @classmethod
    def from_state(cls, state, data, priors=None):
        return cls(data.X, data.Y - data.Z @ state.gamma, state.amps.a, state.amps.b, state.theta, state.sigma2)


def log_density_theta_block(state, data, priors):
    """Coefficient-block log-density (up to a constant) at ``state``."""
    return ThetaBlockTarget.from_state(state, data, priors).log_density(state.coefficients())


def grad_theta_block(state, data, priors):
    """Gradient of :func:`log_density_theta_block` w.r.t. ``(gamma, a, b)``."""
    return ThetaBlockTarget.from_state(state, data, priors).grad(state.coefficients())


def log_density_omega_block(state, data, priors=None):
    """Frequency-block log-density (up to a constant) at ``state``."""
    return OmegaBlockTarget.from_state(state, data).log_density(state.freqs.omega.reshape(-1))


def grad_omega_block(state, data, priors=None):
    """Gradient of :func:`log_density_omega_block`, shaped J x M."""
    g = OmegaBlockTarget.from_state(state, data).grad(state.freqs.omega.reshape(-1))
    return g.reshape(state.freqs.omega.shape)


# ---------------------------------------------------------------------------
# HMC


def leapfrog(position, momentum, e, n_steps, grad):
    """Run ``n_steps`` half-kick / drift / half-kick steps.

    ``grad`` returns the gradient of the log-density (not the potential).
    Raises :class:`DivergenceError` when a gradient is non-finite.
    """
    x = np.array(position, dtype=float, copy=True)
    r = np.array(momentum, dtype=float, copy=True)
    half = 0.5 * e
    g = grad(x)
    if not np.all(np.isfinite(g)):
        raise DivergenceError(0)
    for step in range(1, n_steps + 1):
        r += half * g
        x += e * r
        g = grad(x)
        if not np.all(np.isfinite(g)):
            raise DivergenceError(step)
        r += half * g
    return x, r


def acceptance_probability(logp_current, r_current, logp_proposed, r_proposed):
    """Metropolis probability ``min(1, exp(H_current - H_proposed))``."""
    log_ratio = (logp_proposed - 0.5 * np.dot(r_proposed, r_proposed)) - (
        logp_current - 0.5 * np.dot(r_current, r_current)
    )
    if np.isnan(log_ratio):
        return 0.0
    return float(np.exp(min(0.0, log_ratio)))


def hmc_update(block, log_density, grad, e, L, rng):
    """One HMC transition with identity mass matrix.

    A divergent trajectory (non-finite gradient or log-density) counts as a
    rejection and is flagged via ``HmcStep.diverged``.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    x0 = np.asarray(block, dtype=float)
    r0 = rng.standard_normal(x0.shape)
    u = rng.random()
    logp0 = log_density(x0)
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            x1, r1 = leapfrog(x0, r0, e, L, grad)
        except DivergenceError:
            return HmcStep(x0, False, True, 0.0)
        logp1 = log_density(x1)
    if not np.isfinite(logp1):
        return HmcStep(x0, False, True, 0.0)
    alpha = acceptance_probability(logp0, r0, logp1, -r1)
    if u < alpha:
        return HmcStep(x1, True, False, alpha)
    return HmcStep(x0, False, False, alpha)


def tune_step_size(e, acceptance_rate, e_t, band=(0.65, 0.85)):
    """Grow ``e`` by ``(1 + e_t)`` above the band, shrink by ``(1 - e_t)`` below it."""
    low, high = band
    if acceptance_rate > high:
        return e * (1 + e_t)
    if acceptance_rate < low:
        return e * (1 - e_t)
    return e


# ---------------------------------------------------------------------------
# Gibbs updates


def _draw_inverse_gamma(shape, rate, rng):
    return rate / rng.gamma(shape)


def theta_conditional(omega, priors, mode="conjugate"):
    """Inverse-Gamma ``(shape, rate)`` arrays for each ``theta_m`` given ``omega``.

    ``conjugate`` uses the exact per-exposure conditional under
    ``omega_jm ~ N(0, 2 theta_m)``: ``IG(a0 + J/2, b0 + sum_j omega_jm^2 / 4)``.
    ``verbatim`` shares the rate ``b0 + sum_j |omega_j|^2 / 2`` across
    exposures.
    """
    omega = omega.omega if isinstance(omega, FrequencySet) else np.asarray(omega, dtype=float)
    J, M = omega.shape
    shape = np.full(M, priors.ig_shape + J / 2.0)
    if mode == "conjugate":
        rate = priors.ig_rate + 0.25 * np.sum(omega * omega, axis=0)
    elif mode == "verbatim":
        rate = np.full(M, priors.ig_rate + 0.5 * np.sum(omega * omega))
    else:
        raise ValueError(f"theta_update must be one of {THETA_UPDATES}, got {mode!r}")
    return shape, rate


def tau2_conditional(amps, priors):
    """``(shape, rate)`` of the inverse-Gamma conditional of ``tau2 / J``."""
    J = amps.J
    ss = float(amps.a @ amps.a + amps.b @ amps.b)
    return priors.ig_shape + J, priors.ig_rate + 0.5 * ss


def sigma2_conditional(residuals, priors):
    residuals = np.asarray(residuals, dtype=float)
    n = residuals.shape[0]
    return priors.ig_shape + n / 2.0, priors.ig_rate + 0.5 * float(residuals @ residuals)


def gibbs_theta(freqs, priors, rng, mode="conjugate"):
    shape, rate = theta_conditional(freqs, priors, mode)
    return _draw_inverse_gamma(shape, rate, rng)


def gibbs_tau2(amps, J, priors, rng):
    """Draw ``tau2 / J`` from its conditional and return ``tau2``."""
    shape, rate = tau2_conditional(amps, priors)
    return J * float(_draw_inverse_gamma(shape, rate, rng))


def gibbs_sigma2(residuals, priors, rng):
    shape, rate = sigma2_conditional(residuals, priors)
    return float(_draw_inverse_gamma(shape, rate, rng))


# ---------------------------------------------------------------------------
# the chain


def run_chain(
    data: Dataset,
    J: int,
    K: int,
    priors: Priors | None = None,
    hmc: HmcConfig | None = None,
    theta0=None,
    seed=0,
    theta_update: str = "conjugate",
    fixed_sigma2: float | None = None,
    init_state: ModelState | None = None,
    callback: Callable | None = None,
) -> PosteriorSamples:
    """Run ``K`` iterations and return the second half of the chain.

    Parameters
    ----------
    data : Dataset
    J : int
        Number of frequency pairs.
    K : int
        Total iterations; must be even.
    priors, hmc : optional
        Defaults to :class:`Priors` and :class:`HmcConfig`.
    theta0 : array_like, optional
        Starting kernel parameters; defaults to :func:`default_theta0`.
    seed : int or numpy.random.SeedSequence
        The only source of randomness; identical seeds give identical output.
    theta_update : {"conjugate", "verbatim"}
    fixed_sigma2 : float, optional
        Hold the residual variance fixed instead of sampling it.
    init_state : ModelState, optional
        Skip :func:`initialize` and start here.
    callback : callable, optional
        Called as ``callback(k, state)`` after every iteration.
    """
    if K < 2 or K % 2:
        raise ValueError(f"K must be a positive even number, got {K}")
    if theta_update not in THETA_UPDATES:
        raise ValueError(f"theta_update must be one of {THETA_UPDATES}, got {theta_update!r}")
    priors = priors or Priors()
    hmc = hmc or HmcConfig()
    rng = np.random.default_rng(seed)
    t_start = time.perf_counter()

    if init_state is None:
        theta0 = default_theta0(data.X) if theta0 is None else theta0
        state = initialize(data, theta0, J, priors, rng, sigma2=fixed_sigma2)
    else:
        state = init_state
    if fixed_sigma2 is not None:
        state = replace(state, sigma2=float(fixed_sigma2))

    n, M, P = data.n, data.M, data.P
    burn = K // 2
    S = K - burn
    out = dict(
        gamma=np.empty((S, P)),
        a=np.empty((S, J)),
        b=np.empty((S, J)),
        omega=np.empty((S, J, M)),
        theta=np.empty((S, M)),
        tau2=np.empty(S),
        sigma2=np.empty(S),
        h=np.empty((S, n)),
    )
    acc_b = np.zeros(K, dtype=bool)
    acc_o = np.zeros(K, dtype=bool)
    div_b = np.zeros(K, dtype=bool)
    div_o = np.zeros(K, dtype=bool)
    step_b = np.empty(K)
    step_o = np.empty(K)
    chain_warnings = []

    e_beta, e_omega = hmc.e_beta, hmc.e_omega
    L_beta, L_omega = hmc.L, hmc.steps_omega
    band = (hmc.accept_low, hmc.accept_high)
    Y, X, Z = data.Y, data.X, data.Z
    gamma = state.gamma.copy()
    a, b = state.amps.a.copy(), state.amps.b.copy()
    omega = state.freqs.omega.copy()
    theta = state.theta.copy()
    tau2, sigma2 = state.tau2, state.sigma2
    cos_b, sin_b = _trig_design(data, state.freqs)

    for k in range(K):
        # (1) kernel parameters
        theta = gibbs_theta(omega, priors, rng, theta_update)

        # (2) coefficient block
        B = np.hstack([Z, cos_b, sin_b])
        target_b = ThetaBlockTarget(B, Y, _s_inv(P, J, priors.sigma_gamma2, tau2), sigma2)
        coef = np.concatenate([gamma, a, b])
        res = hmc_update(coef, target_b.log_density, target_b.grad, e_beta, L_beta, rng)
        acc_b[k], div_b[k], step_b[k] = res.accepted, res.diverged, e_beta
        coef = res.position
        gamma, a, b = coef[:P], coef[P:P + J], coef[P + J:]

        # (3) frequency block
        target_o = OmegaBlockTarget(X, Y - Z @ gamma, a, b, theta, sigma2)
        res = hmc_update(omega.reshape(-1), target_o.log_density, target_o.grad, e_omega, L_omega, rng)
        acc_o[k], div_o[k], step_o[k] = res.accepted, res.diverged, e_omega
        if res.accepted:
            omega = res.position.reshape(J, M)
            cos_b, sin_b = target_o.trig_at(res.position)

        # (4) marginal variance, (5) residual variance
        tau2 = gibbs_tau2(Amplitudes(a, b), J, priors, rng)
        resid = Y - Z @ gamma - cos_b @ a - sin_b @ b
        if fixed_sigma2 is None:
            sigma2 = gibbs_sigma2(resid, priors, rng)

        # (6) record
        if k >= burn:
            s = k - burn
            out["gamma"][s] = gamma
            out["a"][s] = a
            out["b"][s] = b
            out["omega"][s] = omega
            out["theta"][s] = theta
            out["tau2"][s] = tau2
            out["sigma2"][s] = sigma2
            # evaluated from the stored rows so predict_h reproduces it bitwise
            out["h"][s] = evaluate_h(X, FrequencySet(out["omega"][s]), Amplitudes(out["a"][s], out["b"][s]))

        if (k + 1) % hmc.tune_interval == 0:
            lo = k + 1 - hmc.tune_interval
            for name, div in (("coefficient", div_b), ("frequency", div_o)):
                frac = float(np.mean(div[lo:k + 1]))
                if frac > 0.5:
                    msg = f"{name} block diverged in {frac:.0%} of iterations {lo}-{k}"
                    chain_warnings.append(msg)
                    warnings.warn(msg, RuntimeWarning, stacklevel=2)
            if k + 1 <= burn:
                e_beta = tune_step_size(e_beta, float(np.mean(acc_b[lo:k + 1])), hmc.e_t, band)
                e_omega = tune_step_size(e_omega, float(np.mean(acc_o[lo:k + 1])), hmc.e_t, band)
                log.debug("iter %d: e_beta=%.4g e_omega=%.4g", k + 1, e_beta, e_omega)

        if callback is not None:
            callback(k, ModelState(gamma, Amplitudes(a, b), FrequencySet(omega), theta, tau2, sigma2))

    return PosteriorSamples(
        **out,
        burn_in=burn,
        accept_beta=acc_b,
        accept_omega=acc_o,
        diverged_beta=div_b,
        diverged_omega=div_o,
        step_beta=step_b,
        step_omega=step_o,
        seconds=time.perf_counter() - t_start,
        warnings=chain_warnings,
        meta=dict(J=J, K=K, theta_update=theta_update),
    )
