import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fastbkmr.data import Dataset
from fastbkmr.errors import DimensionMismatchError
from fastbkmr.kernels import KernelParams, kernel_matrix
from fastbkmr.oracle import gls_gamma, gp_posterior, oracle_h, rmse


@pytest.fixture
def small():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(15, 2))
    return X, rng.normal(size=15), KernelParams([0.5, 0.3], tau2=1.7)


def test_no_information_limit(small):
    X, r, p = small
    fit = gp_posterior(X, r, p, 1e12)
    assert np.max(np.abs(fit.h_mean)) < 1e-6 * np.max(np.abs(r))


def test_noiseless_interpolates(small):
    X, r, p = small
    fit = gp_posterior(X, r, p, 1e-12)
    np.testing.assert_allclose(fit.h_mean, r, atol=1e-6)


def test_three_points_dense_solve():
    X = np.array([[0.0, 0.0], [1.0, 0.5], [-0.5, 2.0]])
    r = np.array([1.0, -0.5, 2.0])
    p = KernelParams([0.7, 0.2], tau2=2.0)
    K = np.array([[np.exp(-np.sum(p.theta * (a - b) ** 2)) for b in X] for a in X])
    V = p.tau2 * K + 0.5 * np.eye(3)
    mean = p.tau2 * K @ np.linalg.solve(V, r)
    var = np.diag(p.tau2 * K - p.tau2 * K @ np.linalg.solve(V, p.tau2 * K))
    fit = gp_posterior(X, r, p, 0.5)
    np.testing.assert_allclose(fit.h_mean, mean, rtol=1e-12)
    np.testing.assert_allclose(fit.h_cov_diag, var, rtol=1e-10)


def test_alpha_solves_marginal_system(small):
    X, r, p = small
    fit = gp_posterior(X, r, p, 0.3)
    V = p.tau2 * kernel_matrix(X, p) + 0.3 * np.eye(len(r))
    assert np.linalg.norm(V @ fit.alpha - r) <= 1e-8 * np.linalg.norm(r)
    assert np.all(fit.h_cov_diag >= -1e-10)


def test_new_rows_match_training_rows(small):
    X, r, p = small
    a = gp_posterior(X, r, p, 0.4)
    b = gp_posterior(X, r, p, 0.4, X_new=X)
    np.testing.assert_allclose(a.h_mean, b.h_mean, rtol=1e-12)
    np.testing.assert_allclose(a.h_cov_diag, b.h_cov_diag, atol=1e-12)


def test_length_mismatch(small):
    X, r, p = small
    with pytest.raises(DimensionMismatchError):
        gp_posterior(X, r[:-1], p, 1.0)


def test_gls_recovers_gamma_without_surface():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(80, 2))
    Z = rng.normal(size=(80, 3))
    g = np.array([1.0, -2.0, 0.5])
    est = gls_gamma(X, Z @ g, Z, KernelParams([0.5, 0.5]), 1.0)
    np.testing.assert_allclose(est, g, atol=1e-10)


def test_oracle_h_uses_given_gamma():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(20, 2))
    Z = rng.normal(size=(20, 1))
    data = Dataset(Y=rng.normal(size=20), X=X, Z=Z)
    p = KernelParams([0.5, 0.5])
    fit = oracle_h(data, p, 1.0, gamma=np.array([0.7]))
    direct = gp_posterior(X, data.Y - 0.7 * Z[:, 0], p, 1.0)
    np.testing.assert_array_equal(fit.h_mean, direct.h_mean)


def test_rmse_examples():
    assert rmse([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert rmse(np.arange(4.0) + 1, np.arange(4.0)) == 1.0
    assert rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(3.5355, abs=1e-4)
    with pytest.raises(DimensionMismatchError):
        rmse([1.0], [1.0, 2.0])


vec = arrays(float, 6, elements=st.floats(-100, 100))


@settings(max_examples=100, deadline=None)
@given(a=vec, b=vec, c=vec)
def test_rmse_triangle(a, b, c):
    assert rmse(a, c) <= rmse(a, b) + rmse(b, c) + 1e-9
