"""Run configuration, CSV ingestion and on-disk formats.

Samples file layout (version 1)
-------------------------------
Line 1 is the ASCII magic ``FBKMR-SAMPLES 1``. Line 2 is a single-line JSON
header with sorted keys::

    {"J": ..., "K": ..., "M": ..., "P": ..., "S": ..., "n": ...,
     "seed": ..., "burn_in": ..., "exposure_scale": [...],
     "exposure_names": [...], "confounder_names": [...],
     "blocks": [["gamma", [S, P]], ["a", [S, J]], ...],
     "meta": {...}, "version": 1}

After the header come the blocks listed in ``blocks``, in that order, each
as raw little-endian float64 values in C order. Boolean diagnostics are
stored as 0.0/1.0. The training data (``Y``, ``X``, ``Z``) travel in the
same file so summaries and WAIC need nothing else, and the exposure
standardization constants in the header are re-applied to any new data
passed to ``predict``.

Files are written to a temporary name and renamed into place, so readers
never observe a partial file.
"""
from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .data import Dataset
from .errors import ConfigError, DataError
from .sampler import HmcConfig, PosteriorSamples, Priors

__all__ = [
    "ColumnSpec",
    "RunConfig",
    "load_config",
    "ingest_csv",
    "read_exposures_csv",
    "write_samples",
    "read_samples",
    "atomic_write_text",
    "write_table",
    "SAMPLES_MAGIC",
]

SAMPLES_MAGIC = b"FBKMR-SAMPLES 1\n"
SAMPLES_VERSION = 1


@dataclass(frozen=True)
class ColumnSpec:
    outcome: str
    exposures: tuple
    confounders: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "exposures", tuple(self.exposures))
        object.__setattr__(self, "confounders", tuple(self.confounders))
        names = [self.outcome, *self.exposures, *self.confounders]
        if len(set(names)) != len(names):
            raise ConfigError(f"outcome, exposure and confounder columns must be distinct: {names}")
        if not self.exposures:
            raise ConfigError("at least one exposure column is required")


@dataclass
class RunConfig:
    """Every tunable of a run. Unknown keys are rejected by :meth:`from_dict`."""

    J: int = 20
    K: int = 2000
    seed: int | None = None
    e_beta: float = 0.01
    e_omega: float = 0.01
    L: int = 10
    L_omega: int | None = None
    e_t: float = 0.2
    tune_interval: int = 200
    accept_low: float = 0.65
    accept_high: float = 0.85
    sigma_gamma2: float = 1e6
    ig_shape: float = 0.001
    ig_rate: float = 0.001
    theta_update: str = "conjugate"
    theta0: list | None = None
    standardize: bool = True
    outcome: str | None = None
    exposures: list = field(default_factory=list)
    confounders: list = field(default_factory=list)
    grid_size: int = 50
    overall_percentiles: list = field(default_factory=lambda: [float(p) for p in range(10, 95, 5)])
    p_ref: float = 25.0
    contrasts: list = field(default_factory=lambda: [[75.0, 25.0], [95.0, 50.0]])
    co_percentiles: list = field(default_factory=lambda: [10.0, 50.0, 90.0])
    window: float = 5.0
    bivariate_fixed: float = 50.0
    bivariate_range: list = field(default_factory=lambda: [25.0, 95.0])
    J_list: list = field(default_factory=lambda: [5, 20, 50])

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def updated(self, **overrides):
        d = asdict(self)
        d.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.from_dict(d)

    def validate(self):
        if self.J < 1:
            raise ConfigError("J must be >= 1")
        if self.K < 2 or self.K % 2:
            raise ConfigError("K must be a positive even number")
        if self.theta_update not in ("conjugate", "verbatim"):
            raise ConfigError("theta_update must be 'conjugate' or 'verbatim'")
        try:
            self.priors()
            self.hmc()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def priors(self):
        return Priors(self.sigma_gamma2, self.ig_shape, self.ig_rate)

    def hmc(self):
        return HmcConfig(
            e_beta=self.e_beta,
            e_omega=self.e_omega,
            L=self.L,
            e_t=self.e_t,
            tune_interval=self.tune_interval,
            accept_low=self.accept_low,
            accept_high=self.accept_high,
            L_omega=self.L_omega,
        )

    def columns(self):
        if not self.outcome or not self.exposures:
            raise ConfigError("config needs 'outcome' and 'exposures' column names")
        return ColumnSpec(self.outcome, tuple(self.exposures), tuple(self.confounders))

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def load_config(path=None):
    """A :class:`RunConfig` from a flat JSON object (defaults when ``path`` is None)."""
    if path is None:
        return RunConfig()
    try:
        with open(path) as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(d, dict) or any(isinstance(v, dict) for v in d.values()):
        raise ConfigError("config must be a flat JSON object")
    return RunConfig.from_dict(d)


def _read_columns(path, names):
    """Parse the named columns as floats; rows with a missing value are dropped."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        missing = [c for c in names if c not in header]
        if missing:
            raise DataError(f"column {missing[0]!r} not found in {path}")
        idx = [header.index(c) for c in names]
        rows = []
        dropped = 0
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            vals = []
            skip = False
            for c, j in zip(names, idx):
                cell = rec[j].strip() if j < len(rec) else ""
                if cell == "" or cell.upper() in ("NA", "NAN"):
                    skip = True
                    break
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(f"non-numeric value {cell!r} at row {lineno}, column {c!r}") from None
            if skip:
                dropped += 1
                continue
            rows.append(vals)
    arr = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return arr, dropped


def ingest_csv(path, colspec: ColumnSpec, standardize=True, return_dropped=False):
    """Load outcome, exposures and confounders from a headed CSV file.

    With ``standardize`` each exposure column is divided by its sample
    standard deviation (the mean is kept); the divisors are stored on the
    returned dataset as ``exposure_scale``.
    """
    names = [colspec.outcome, *colspec.exposures, *colspec.confounders]
    arr, dropped = _read_columns(path, names)
    if arr.shape[0] == 0:
        raise DataError(f"no complete rows in {path}")
    M = len(colspec.exposures)
    Y = arr[:, 0]
    X = arr[:, 1:1 + M]
    Z = arr[:, 1 + M:]
    scale = np.ones(M)
    if standardize:
        sd = np.std(X, axis=0, ddof=1) if X.shape[0] > 1 else np.zeros(M)
        bad = [colspec.exposures[m] for m in range(M) if not sd[m] > 0]
        if bad:
            raise DataError(f"exposure {bad[0]!r} has zero variance; cannot standardize")
        scale = sd
        X = X / scale
    data = Dataset(
        Y=Y, X=X, Z=Z, exposure_scale=scale,
        exposure_names=colspec.exposures, confounder_names=colspec.confounders,
    )
    return (data, dropped) if return_dropped else data


def read_exposures_csv(path, exposure_names, exposure_scale):
    """Exposure matrix from a CSV, divided by stored standardization constants."""
    arr, dropped = _read_columns(path, list(exposure_names))
    return arr / np.asarray(exposure_scale, dtype=float), dropped


def atomic_write_bytes(path, payload):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


_DRAW_BLOCKS = ("gamma", "a", "b", "omega", "theta", "tau2", "sigma2", "h")
_DIAG_BLOCKS = ("accept_beta", "accept_omega", "diverged_beta", "diverged_omega", "step_beta", "step_omega")


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def write_samples(path, samples: PosteriorSamples, data: Dataset, seed=None, meta=None):
    """Write draws, diagnostics and the training data to ``path`` atomically."""
    blocks = [(name, getattr(samples, name)) for name in _DRAW_BLOCKS]
    blocks += [(name, getattr(samples, name).astype(float)) for name in _DIAG_BLOCKS]
    blocks += [("Y", data.Y), ("X", data.X), ("Z", data.Z)]
    S, J = samples.n_draws, samples.J
    header = {
        "version": SAMPLES_VERSION,
        "n": data.n,
        "M": data.M,
        "P": data.P,
        "J": J,
        "K": samples.K,
        "S": S,
        "burn_in": samples.burn_in,
        "seed": seed,
        "exposure_scale": [float(v) for v in data.exposure_scale],
        "exposure_names": list(data.exposure_names),
        "confounder_names": list(data.confounder_names),
        "warnings": list(samples.warnings),
        "meta": _json_safe(meta or {}),
        "blocks": [[name, list(arr.shape)] for name, arr in blocks],
    }
    parts = [SAMPLES_MAGIC, json.dumps(header, sort_keys=True).encode("ascii") + b"\n"]
    for _, arr in blocks:
        parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    atomic_write_bytes(path, b"".join(parts))


def read_samples(path):
    """Inverse of :func:`write_samples`: ``(samples, data, header)``."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read samples file {path}: {exc}") from exc
    if not raw.startswith(SAMPLES_MAGIC):
        raise DataError(f"{path} is not a samples file")
    end = raw.index(b"\n", len(SAMPLES_MAGIC))
    header = json.loads(raw[len(SAMPLES_MAGIC):end])
    if header.get("version") != SAMPLES_VERSION:
        raise DataError(f"unsupported samples file version {header.get('version')}")
    offset = end + 1
    arrays = {}
    for name, shape in header["blocks"]:
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).reshape(shape)
        arrays[name] = arr.astype(float)
        offset += 8 * count
    if offset != len(raw):
        raise DataError(f"{path} has {len(raw) - offset} trailing bytes")
    samples = PosteriorSamples(
        **{name: arrays[name] for name in _DRAW_BLOCKS},
        **{name: arrays[name].astype(bool) for name in _DIAG_BLOCKS[:4]},
        step_beta=arrays["step_beta"],
        step_omega=arrays["step_omega"],
        burn_in=header["burn_in"],
        warnings=list(header.get("warnings", [])),
        meta=header.get("meta", {}),
    )
    data = Dataset(
        Y=arrays["Y"], X=arrays["X"], Z=arrays["Z"],
        exposure_scale=np.asarray(header["exposure_scale"]),
        exposure_names=tuple(header["exposure_names"]),
        confounder_names=tuple(header["confounder_names"]),
    )
    return samples, data, header


def write_table(path, columns, rows):
    """Comma-separated table with a header row; floats written with ``repr``."""
    lines = [",".join(columns)]
    for row in rows:
        vals = [row[c] for c in columns] if isinstance(row, dict) else list(row)
        lines.append(",".join(_cell(v) for v in vals))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str) and any(ch in value for ch in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return str(value)
