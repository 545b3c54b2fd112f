"""Bayesian kernel machine regression with supervised random Fourier features.

The Gaussian-process surface of kernel machine regression is replaced by a
trigonometric basis whose frequencies are sampled along with everything
else, giving a linear mixed model fitted by Gibbs and Hamiltonian Monte
Carlo updates.
"""
__version__ = "0.1.0"

from .data import Dataset
from .errors import FastBKMRError
from .kernels import KernelKind, KernelParams, kernel_matrix, kernel_value, sample_gp
from .oracle import gp_posterior, oracle_h, rmse
from .posterior import (
    EffectEstimate,
    bivariate_surface,
    overall_effect,
    predict_h,
    univariate_response,
    waic,
)
from .rff import Amplitudes, FrequencySet, basis_matrix, evaluate_h, sample_frequencies
from .sampler import HmcConfig, ModelState, PosteriorSamples, Priors, initialize, run_chain
from .simulation import SimulationSpec, generate_dataset, run_experiment

__all__ = [
    "Amplitudes",
    "Dataset",
    "EffectEstimate",
    "FastBKMRError",
    "FrequencySet",
    "HmcConfig",
    "KernelKind",
    "KernelParams",
    "ModelState",
    "PosteriorSamples",
    "Priors",
    "SimulationSpec",
    "basis_matrix",
    "bivariate_surface",
    "evaluate_h",
    "generate_dataset",
    "gp_posterior",
    "initialize",
    "kernel_matrix",
    "kernel_value",
    "oracle_h",
    "overall_effect",
    "predict_h",
    "rmse",
    "run_chain",
    "run_experiment",
    "sample_frequencies",
    "sample_gp",
    "univariate_response",
    "waic",
]
