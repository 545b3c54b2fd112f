import numpy as np
import pytest

from fastbkmr.rff import Amplitudes, FrequencySet, evaluate_h
from fastbkmr.sampler import PosteriorSamples


def build_samples(X, omega, a, b, gamma=None, sigma2=None):
    """Hand-built PosteriorSamples; ``omega`` is (S, J, M), ``a``/``b`` are (S, J)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    omega = np.asarray(omega, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    S, J, M = omega.shape
    h = np.array([evaluate_h(X, FrequencySet(omega[s]), Amplitudes(a[s], b[s])) for s in range(S)])
    K = 2 * S
    return PosteriorSamples(
        gamma=np.zeros((S, 0)) if gamma is None else np.asarray(gamma, dtype=float),
        a=a,
        b=b,
        omega=omega,
        theta=np.ones((S, M)),
        tau2=np.ones(S),
        sigma2=np.ones(S) if sigma2 is None else np.asarray(sigma2, dtype=float),
        h=h,
        burn_in=S,
        accept_beta=np.ones(K, dtype=bool),
        accept_omega=np.ones(K, dtype=bool),
        diverged_beta=np.zeros(K, dtype=bool),
        diverged_omega=np.zeros(K, dtype=bool),
        step_beta=np.full(K, 0.01),
        step_omega=np.full(K, 0.01),
    )


@pytest.fixture
def make_samples():
    return build_samples


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
