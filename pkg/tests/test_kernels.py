import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fastbkmr.errors import DimensionMismatchError, FactorizationError
from fastbkmr.kernels import (
    KernelKind,
    KernelParams,
    jittered_cholesky,
    kernel_matrix,
    kernel_value,
    sample_gp,
)

KINDS = list(KernelKind)
finite = st.floats(-5, 5, allow_nan=False)


@pytest.mark.parametrize("kind", KINDS)
def test_value_at_zero_distance_is_one(kind):
    p = KernelParams([0.3, 2.0])
    assert kernel_value([1.5, -2.0], [1.5, -2.0], p, kind) == 1.0


@pytest.mark.parametrize("kind", KINDS)
def test_zero_theta_gives_one(kind):
    assert kernel_value([0.0, 4.0], [3.0, -1.0], KernelParams([0.0, 0.0]), kind) == 1.0


def test_gaussian_hand_value():
    v = kernel_value([0.0], [1.0], KernelParams([1.0]), KernelKind.GAUSSIAN_SQUARED)
    assert v == pytest.approx(np.exp(-1.0), abs=1e-15)
    assert v == pytest.approx(0.367879, abs=1e-6)


def test_misspecified_forms_by_hand():
    p = KernelParams([0.5, 2.0])
    xi, xj = np.array([0.0, 1.0]), np.array([4.0, 0.0])
    assert kernel_value(xi, xj, p, KernelKind.SQRT_ABSOLUTE) == pytest.approx(np.exp(-(0.5 * 2.0 + 2.0 * 1.0)))
    assert kernel_value(xi, xj, p, KernelKind.ABSOLUTE) == pytest.approx(np.exp(-(0.5 * 4.0 + 2.0 * 1.0)))


def test_dimension_mismatch_names_lengths():
    with pytest.raises(DimensionMismatchError) as info:
        kernel_value([0.0, 1.0, 2.0], [0.0, 1.0, 2.0], KernelParams([1.0, 1.0]))
    assert "2" in str(info.value) and "3" in str(info.value)
    with pytest.raises(DimensionMismatchError):
        kernel_value([0.0, 1.0], [0.0], KernelParams([1.0, 1.0]))


def test_params_validation():
    with pytest.raises(ValueError):
        KernelParams([-0.1])
    with pytest.raises(ValueError):
        KernelParams([1.0], tau2=0.0)


def test_matrix_small_cases():
    p = KernelParams([0.7, 0.2])
    assert np.array_equal(kernel_matrix(np.array([[1.0, 2.0]]), p), np.ones((1, 1)))
    assert np.array_equal(kernel_matrix(np.array([[1.0, 2.0], [1.0, 2.0]]), p), np.ones((2, 2)))


@pytest.mark.parametrize("kind", KINDS)
def test_matrix_matches_pairwise_values(kind):
    rng = np.random.default_rng(3)
    X = rng.normal(size=(6, 3))
    p = KernelParams([0.4, 1.1, 0.0])
    K = kernel_matrix(X, p, kind)
    brute = np.array([[kernel_value(a, b, p, kind) for b in X] for a in X])
    np.testing.assert_allclose(K, brute, rtol=1e-13, atol=1e-15)
    assert np.array_equal(K, K.T)
    assert np.all(np.diag(K) == 1.0)


def test_three_random_rows_psd():
    rng = np.random.default_rng(0)
    K = kernel_matrix(rng.normal(size=(3, 2)), KernelParams([0.5, 0.5]))
    assert np.array_equal(K, K.T)
    assert np.linalg.eigvalsh(K).min() >= -1e-12


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 50),
    theta=arrays(float, 3, elements=st.floats(0, 5)),
    seed=st.integers(0, 2**31),
)
def test_gaussian_matrix_psd(n, theta, seed):
    X = np.random.default_rng(seed).normal(scale=2.0, size=(n, 3))
    K = kernel_matrix(X, KernelParams(theta))
    assert np.linalg.eigvalsh(K).min() >= -1e-8


@settings(max_examples=60, deadline=None)
@given(
    xi=arrays(float, 2, elements=finite),
    xj=arrays(float, 2, elements=finite),
    theta=arrays(float, 2, elements=st.floats(0, 3)),
    kind=st.sampled_from(KINDS),
)
def test_symmetric_and_bounded(xi, xj, theta, kind):
    p = KernelParams(theta)
    v = kernel_value(xi, xj, p, kind)
    assert v == kernel_value(xj, xi, p, kind)
    assert 0 <= v <= 1


@settings(max_examples=60, deadline=None)
@given(
    d1=st.floats(0, 4),
    d2=st.floats(0, 4),
    other=st.floats(-3, 3),
    theta=arrays(float, 2, elements=st.floats(0, 3)),
    kind=st.sampled_from(KINDS),
)
def test_monotone_in_each_coordinate_distance(d1, d2, other, theta, kind):
    near, far = sorted([d1, d2])
    p = KernelParams(theta)
    assert kernel_value([near, other], [0.0, 0.0], p, kind) >= kernel_value([far, other], [0.0, 0.0], p, kind)


def test_sample_gp_zero_variance():
    K = np.eye(4)
    assert np.array_equal(sample_gp(K, 0.0, np.random.default_rng(1)), np.zeros(4))


def test_sample_gp_deterministic():
    K = kernel_matrix(np.linspace(0, 1, 5)[:, None], KernelParams([2.0]))
    a = sample_gp(K, 1.3, np.random.default_rng(42))
    b = sample_gp(K, 1.3, np.random.default_rng(42))
    assert np.array_equal(a, b)


def test_sample_gp_identity_variances():
    draws = sample_gp(np.eye(3), 1.0, np.random.default_rng(7), size=10_000)
    np.testing.assert_allclose(draws.var(axis=0), 1.0, rtol=0.05)


def test_sample_gp_strong_correlation():
    K = np.full((3, 3), 0.9)
    np.fill_diagonal(K, 1.0)
    draws = sample_gp(K, 1.0, np.random.default_rng(8), size=10_000)
    corr = np.corrcoef(draws.T)
    off = corr[np.triu_indices(3, 1)]
    assert np.all(np.abs(off - 0.9) < 0.02)


def test_sample_gp_covariance_converges():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(5, 2))
    tau2 = 2.0
    K = kernel_matrix(X, KernelParams([0.3, 0.6]))
    R = 20_000
    draws = sample_gp(K, tau2, rng, size=R)
    emp = draws.T @ draws / R
    target = tau2 * K
    # Var of x_i x_j under a zero-mean Gaussian is S_ii S_jj + S_ij^2
    se = np.sqrt((np.outer(np.diag(target), np.diag(target)) + target**2) / R)
    assert np.all(np.abs(emp - target) <= 3 * se)


def test_jitter_rescues_singular_matrix():
    X = np.zeros((4, 1))
    K = kernel_matrix(X, KernelParams([1.0]))  # all ones, rank one
    L, jitter = jittered_cholesky(K)
    assert jitter > 0
    np.testing.assert_allclose(L @ L.T, K + jitter * np.eye(4), atol=1e-12)
    draw = sample_gp(K, 1.0, np.random.default_rng(0))
    assert np.ptp(draw) < 1e-3


def test_factorization_failure_reports_jitter():
    A = -np.eye(3)
    with pytest.raises(FactorizationError) as info:
        jittered_cholesky(A)
    assert info.value.jitter is not None
