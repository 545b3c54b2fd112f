"""The in-memory dataset shared by the sampler, summaries and simulations."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError

__all__ = ["Dataset"]


@dataclass(frozen=True)
class Dataset:
    """Outcome ``Y`` (n), exposures ``X`` (n x M) and confounders ``Z`` (n x P).

    ``h_true`` and ``gamma_true`` are set only for simulated data.
    ``exposure_scale`` holds the per-exposure divisors applied at ingestion
    (all ones when the exposures were not standardized).
    """

    Y: np.ndarray
    X: np.ndarray
    Z: np.ndarray
    h_true: np.ndarray | None = None
    gamma_true: np.ndarray | None = None
    exposure_scale: np.ndarray | None = None
    exposure_names: tuple = field(default=())
    confounder_names: tuple = field(default=())

    def __post_init__(self):
        Y = np.asarray(self.Y, dtype=float).reshape(-1)
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        Z = np.asarray(self.Z, dtype=float)
        if Z.ndim == 1:
            Z = Z[:, None] if Z.size else np.zeros((Y.shape[0], 0))
        n = Y.shape[0]
        for name, arr in (("X", X), ("Z", Z)):
            if arr.shape[0] != n:
                raise DimensionMismatchError(f"rows of {name} vs outcome", n, arr.shape[0])
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "X", np.ascontiguousarray(X))
        object.__setattr__(self, "Z", np.ascontiguousarray(Z))
        if self.h_true is not None:
            h = np.asarray(self.h_true, dtype=float).reshape(-1)
            if h.shape[0] != n:
                raise DimensionMismatchError("h_true vs outcome", n, h.shape[0])
            object.__setattr__(self, "h_true", h)
        if self.gamma_true is not None:
            object.__setattr__(self, "gamma_true", np.asarray(self.gamma_true, dtype=float))
        scale = np.ones(X.shape[1]) if self.exposure_scale is None else np.asarray(self.exposure_scale, dtype=float)
        if scale.shape != (X.shape[1],):
            raise DimensionMismatchError("exposure_scale", X.shape[1], scale.shape[0])
        object.__setattr__(self, "exposure_scale", scale)
        object.__setattr__(self, "exposure_names", tuple(self.exposure_names))
        object.__setattr__(self, "confounder_names", tuple(self.confounder_names))

    @property
    def n(self):
        return self.Y.shape[0]

    @property
    def M(self):
        return self.X.shape[1]

    @property
    def P(self):
        return self.Z.shape[1]

    def subset(self, rows):
        """Rows ``rows`` as a new dataset (standardization constants kept)."""
        rows = np.asarray(rows)
        return Dataset(
            Y=self.Y[rows],
            X=self.X[rows],
            Z=self.Z[rows],
            h_true=None if self.h_true is None else self.h_true[rows],
            gamma_true=self.gamma_true,
            exposure_scale=self.exposure_scale,
            exposure_names=self.exposure_names,
            confounder_names=self.confounder_names,
        )
