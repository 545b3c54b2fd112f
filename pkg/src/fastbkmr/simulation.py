"""Synthetic data generation and the simulation-study harness.

Exposures and confounders follow fixed marginal distributions (ten normal
exposures with distinct scales, five mixed normal/Bernoulli confounders).
The surface is either a Gaussian-process draw, whose kernel parameters are
calibrated so typical pairwise correlations fall in a "strong" or "weak"
band, or the Friedman benchmark function.
"""
from __future__ import annotations

import csv
import enum
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .data import Dataset
from .errors import CalibrationError
from .kernels import KernelKind, KernelParams, kernel_matrix, sample_gp
from .oracle import MAX_ORACLE_N, oracle_h, rmse
from .posterior import predict_h
from .sampler import HmcConfig, Priors, default_theta0, run_chain

log = logging.getLogger(__name__)

__all__ = [
    "EXPOSURE_SDS",
    "DEFAULT_GAMMA",
    "Correlation",
    "HSource",
    "SimulationSpec",
    "ModelConfig",
    "SimulatedData",
    "generate_exposures",
    "generate_confounders",
    "offdiag_quartiles",
    "calibrate_theta",
    "friedman_h",
    "simulate",
    "generate_dataset",
    "run_replicate",
    "run_experiment",
    "RESULT_COLUMNS",
    "write_results",
]

EXPOSURE_SDS = (0.9, 2.4, 1.2, 2.6, 2.8, 0.1, 1.6, 2.7, 1.7, 1.4)
DEFAULT_GAMMA = (0.5, -1.0, 0.8, 0.3, -0.5)


class Correlation(enum.Enum):
    STRONG = "strong"
    WEAK = "weak"

    @property
    def band(self):
        return (0.75, 0.9) if self is Correlation.STRONG else (0.1, 0.3)


class HSource(enum.Enum):
    GAUSSIAN_PROCESS = "gp"
    FRIEDMAN = "friedman"


@dataclass(frozen=True)
class SimulationSpec:
    n: int
    M: int = 2
    correlation: Correlation = Correlation.STRONG
    kernel_kind: KernelKind = KernelKind.GAUSSIAN_SQUARED
    h_source: HSource = HSource.GAUSSIAN_PROCESS
    holdout_fraction: float = 0.0
    replicates: int = 1
    seed: int = 0
    gamma: tuple = DEFAULT_GAMMA
    sigma2: float = 1.0
    tau2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "correlation", Correlation(self.correlation))
        object.__setattr__(self, "kernel_kind", KernelKind(self.kernel_kind))
        object.__setattr__(self, "h_source", HSource(self.h_source))
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 1 <= self.M <= len(EXPOSURE_SDS):
            raise ValueError(f"M must be between 1 and {len(EXPOSURE_SDS)}")
        if self.h_source is HSource.FRIEDMAN and self.M < 5:
            raise ValueError("the Friedman surface needs M >= 5")
        if not 0 <= self.holdout_fraction < 1:
            raise ValueError("holdout_fraction must lie in [0, 1)")
        if len(self.gamma) != 5:
            raise ValueError("gamma must have one entry per confounder (5)")
        if self.replicates < 1:
            raise ValueError("replicates must be positive")

    @property
    def n_test(self):
        return int(round(self.holdout_fraction * self.n))

    def describe(self):
        return {
            "n": self.n,
            "M": self.M,
            "correlation": self.correlation.value,
            "kernel": self.kernel_kind.value,
            "h_source": self.h_source.value,
            "holdout": self.holdout_fraction,
        }


@dataclass(frozen=True)
class ModelConfig:
    J: int
    K: int = 2000
    priors: Priors = field(default_factory=Priors)
    hmc: HmcConfig = field(default_factory=HmcConfig)
    theta_update: str = "conjugate"


class SimulatedData(NamedTuple):
    train: Dataset
    test: Dataset | None
    theta: np.ndarray | None
    quartiles: tuple | None


def generate_exposures(n, M, rng):
    """n x M matrix with column m ~ N(0, EXPOSURE_SDS[m]^2)."""
    if M > len(EXPOSURE_SDS):
        raise ValueError(f"at most {len(EXPOSURE_SDS)} exposures are defined, got M={M}")
    return rng.standard_normal((n, M)) * np.asarray(EXPOSURE_SDS[:M])


def generate_confounders(n, rng):
    return np.column_stack(
        [
            rng.normal(3.0, 6.0, n),
            rng.binomial(1, 0.7, n).astype(float),
            rng.normal(2.0, 0.5, n),
            rng.normal(1.0, 5.0, n),
            rng.binomial(1, 0.3, n).astype(float),
        ]
    )


def _weighted_distances(X, base_theta, kind):
    n = X.shape[0]
    iu = np.triu_indices(n, 1)
    d = np.zeros(iu[0].shape[0])
    for m, th in enumerate(base_theta):
        d += th * kind.distance(X[iu[0], m] - X[iu[1], m])
    return d


def _quartiles(values):
    q = np.percentile(values, [25, 75], method="median_unbiased")
    return float(q[0]), float(q[1])


def offdiag_quartiles(X, theta, kind=KernelKind.GAUSSIAN_SQUARED):
    """25th and 75th percentiles of the off-diagonal kernel entries."""
    K = kernel_matrix(X, KernelParams(theta), kind)
    return _quartiles(K[np.triu_indices(K.shape[0], 1)])


def calibrate_theta(X, target, kind=KernelKind.GAUSSIAN_SQUARED, strict=True, max_iter=100, return_info=False):
    """Scale the default ``theta`` so off-diagonal kernel quartiles sit in the target band.

    Bisection on the log-multiplier balances the two quartiles around the band
    (their sum equals ``low + high``); that multiplier minimizes the worst
    band violation. If the interquartile range still spills out of the band
    the band is unreachable with a common multiplier: ``strict`` raises
    :class:`CalibrationError`, otherwise the balanced value is returned.
    """
    target = Correlation(target)
    low, high = target.band
    X = np.atleast_2d(np.asarray(X, dtype=float))
    base = default_theta0(X)
    d = _weighted_distances(X, base, kind)
    if not np.any(d > 0):
        raise CalibrationError("exposures are degenerate: all pairwise distances are zero")

    def balance(log_c):
        q25, q75 = _quartiles(np.exp(-math.exp(log_c) * d))
        return q25 + q75 - (low + high), (q25, q75)

    lo, hi = -40.0, 40.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f, _ = balance(mid)
        if f > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    log_c = 0.5 * (lo + hi)
    _, (q25, q75) = balance(log_c)
    theta = base * math.exp(log_c)
    feasible = q25 >= low - 1e-12 and q75 <= high + 1e-12
    if strict and not feasible:
        raise CalibrationError(
            f"{target.value} band [{low}, {high}] unreachable: best interquartile range "
            f"[{q25:.4f}, {q75:.4f}]",
            achieved=(q25, q75),
        )
    if return_info:
        return theta, (q25, q75), feasible
    return theta


def friedman_h(X):
    """``-10 + 2 sin(x1 x2) + 4 (x3 - 0.5)^2 + 2 x4 + x5``; extra columns are ignored."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] < 5:
        raise ValueError(f"Friedman surface needs at least 5 exposures, got {X.shape[1]}")
    x1, x2, x3, x4, x5 = X[:, :5].T
    return -10.0 + 2.0 * np.sin(x1 * x2) + 4.0 * (x3 - 0.5) ** 2 + 2.0 * x4 + x5


def _replicate_seed(spec, replicate):
    return np.random.SeedSequence([spec.seed, replicate])


def simulate(spec, replicate=0):
    """Training and (optional) held-out data for one replicate of ``spec``.

    Test rows (``holdout_fraction * n`` of them) come from the same draw of
    the surface as the training rows.
    """
    rng = np.random.default_rng(_replicate_seed(spec, replicate))
    n_total = spec.n + spec.n_test
    X = generate_exposures(n_total, spec.M, rng)
    Z = generate_confounders(n_total, rng)
    theta = quartiles = None
    if spec.h_source is HSource.GAUSSIAN_PROCESS:
        theta, quartiles, feasible = calibrate_theta(
            X, spec.correlation, spec.kernel_kind, strict=False, return_info=True
        )
        if not feasible:
            log.debug("calibration band not reached; quartiles %s", quartiles)
        K = kernel_matrix(X, KernelParams(theta, spec.tau2), spec.kernel_kind)
        h = sample_gp(K, spec.tau2, rng)
    else:
        h = friedman_h(X)
    gamma = np.asarray(spec.gamma)
    Y = h + Z @ gamma + math.sqrt(spec.sigma2) * rng.standard_normal(n_total)
    full = Dataset(Y=Y, X=X, Z=Z, h_true=h, gamma_true=gamma)
    train = full.subset(np.arange(spec.n))
    test = full.subset(np.arange(spec.n, n_total)) if spec.n_test else None
    return SimulatedData(train, test, theta, quartiles)


def generate_dataset(spec, replicate=0):
    """``(train, test)``; ``test`` is None when ``holdout_fraction`` is 0."""
    sim = simulate(spec, replicate)
    return sim.train, sim.test


RESULT_COLUMNS = (
    "n",
    "M",
    "correlation",
    "kernel",
    "h_source",
    "holdout",
    "J",
    "K",
    "replicate",
    "rmse_in",
    "rmse_out",
    "rmse_oracle",
    "rmse_zero",
    "seconds",
    "accept_beta",
    "accept_omega",
    "error",
)


def run_replicate(spec, config, replicate, oracle=False):
    """Fit one replicate and return its result row (a dict keyed by RESULT_COLUMNS)."""
    row = dict(spec.describe(), J=config.J, K=config.K, replicate=replicate)
    row.update(
        rmse_in=math.nan, rmse_out=math.nan, rmse_oracle=math.nan, rmse_zero=math.nan,
        seconds=math.nan, accept_beta=math.nan, accept_omega=math.nan, error="",
    )
    try:
        sim = simulate(spec, replicate)
        train, test = sim.train, sim.test
        chain_seed = np.random.SeedSequence([spec.seed, replicate, config.J, 1])
        t0 = time.perf_counter()
        samples = run_chain(
            train, config.J, config.K, config.priors, config.hmc,
            seed=chain_seed, theta_update=config.theta_update,
        )
        h_hat = samples.h_mean()
        row["seconds"] = time.perf_counter() - t0
        row["rmse_in"] = rmse(h_hat, train.h_true)
        row["rmse_zero"] = rmse(np.zeros(train.n), train.h_true)
        row["accept_beta"] = samples.acceptance_rate("beta")
        row["accept_omega"] = samples.acceptance_rate("omega")
        if test is not None:
            row["rmse_out"] = rmse(predict_h(samples, test.X).mean(axis=1), test.h_true)
        if oracle and sim.theta is not None and train.n <= MAX_ORACLE_N:
            params = KernelParams(sim.theta, spec.tau2)
            fit = oracle_h(train, params, spec.sigma2, spec.kernel_kind)
            row["rmse_oracle"] = rmse(fit.h_mean, train.h_true)
    except Exception as exc:  # one bad replicate must not stop the study
        log.warning("replicate %d of %s failed: %s", replicate, spec.describe(), exc)
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _row_key(row):
    return tuple(str(row[c]) if isinstance(row[c], str) else row[c] for c in ("h_source", "correlation", "kernel", "n", "M", "holdout", "J", "K", "replicate"))


def run_experiment(specs, configs, oracle=False, workers=1):
    """Every spec x config x replicate; rows sorted canonically.

    ``workers > 1`` fits replicates in separate processes; output does not
    depend on the degree of parallelism because every fit is seeded from
    (spec seed, replicate, J).
    """
    tasks = [(spec, cfg, r, oracle) for spec in specs for cfg in configs for r in range(spec.replicates)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_task, tasks))
    else:
        rows = [_run_task(t) for t in tasks]
    return sorted(rows, key=_row_key)


def _run_task(task):
    return run_replicate(*task)


def write_results(rows, path):
    """Write result rows as comma-separated text with a fixed header."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row.get(k, "")) for k in RESULT_COLUMNS})


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def spec_to_dict(spec):
    d = asdict(spec)
    d["correlation"] = spec.correlation.value
    d["kernel_kind"] = spec.kernel_kind.value
    d["h_source"] = spec.h_source.value
    d["gamma"] = list(spec.gamma)
    return d
