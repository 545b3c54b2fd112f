import numpy as np
import pytest

from fastbkmr.data import Dataset
from fastbkmr.errors import DimensionMismatchError, EmptyWindowError
from fastbkmr.posterior import (
    bivariate_surface,
    exposure_percentiles,
    overall_effect,
    overall_effect_curve,
    pointwise_log_likelihood,
    predict_h,
    summarize_draws,
    univariate_response,
    waic,
    waic_components,
)
from fastbkmr.sampler import run_chain


@pytest.fixture
def X():
    return np.random.default_rng(0).normal(size=(40, 3))


@pytest.fixture
def random_samples(X, make_samples):
    rng = np.random.default_rng(1)
    S, J = 30, 4
    return make_samples(X, rng.normal(size=(S, J, 3)), rng.normal(size=(S, J)), rng.normal(size=(S, J)))


@pytest.fixture
def constant_samples(X, make_samples):
    rng = np.random.default_rng(2)
    return make_samples(X, rng.normal(size=(5, 3, 3)), np.zeros((5, 3)), np.zeros((5, 3)))


def test_percentiles_use_median_unbiased():
    x = np.arange(1.0, 5.0)[:, None]
    # type 8 position for p=0.25, n=4 is (n + 1/3) p + 1/3 = 1.4167
    assert exposure_percentiles(x, 25)[0] == pytest.approx(1 + 5 / 12)


def test_summaries_negate_exactly():
    d = np.random.default_rng(3).normal(size=101)
    m, lo, hi = summarize_draws(d)
    m2, lo2, hi2 = summarize_draws(-d)
    assert lo2 == -hi and hi2 == -lo and m2 == -m
    assert lo <= m <= hi


def test_predict_training_rows_bitwise():
    rng = np.random.default_rng(4)
    data = Dataset(Y=rng.normal(size=30), X=rng.normal(size=(30, 2)), Z=np.ones((30, 1)))
    s = run_chain(data, 4, 40, seed=1)
    assert np.array_equal(predict_h(s, data.X), s.h.T)


def test_predict_zero_amplitude_draw(make_samples):
    X = np.random.default_rng(5).normal(size=(6, 2))
    a = np.array([[0.0, 0.0], [1.0, -1.0]])
    s = make_samples(X, np.ones((2, 2, 2)), a, a)
    out = predict_h(s, X)
    assert out.shape == (6, 2)
    assert np.array_equal(out[:, 0], np.zeros(6))


def test_predict_hand_values(make_samples):
    omega = np.array([[[1.0]], [[2.0]], [[0.5]]])
    a = np.array([[1.0], [0.0], [2.0]])
    b = np.array([[0.0], [3.0], [-1.0]])
    s = make_samples(np.zeros((1, 1)), omega, a, b)
    x = 0.3
    expected = [np.cos(x), 3 * np.sin(2 * x), 2 * np.cos(0.5 * x) - np.sin(0.5 * x)]
    np.testing.assert_allclose(predict_h(s, [[x]])[0], expected, rtol=1e-15)


def test_predict_column_mismatch(random_samples):
    with pytest.raises(DimensionMismatchError):
        predict_h(random_samples, np.zeros((2, 2)))


def test_overall_effect_at_reference(random_samples, X):
    e = overall_effect(random_samples, X, 25, 25)
    assert e.point == 0 and e.lower == 0 and e.upper == 0


def test_overall_effect_constant_h(constant_samples, X):
    e = overall_effect(constant_samples, X, 90)
    assert (e.point, e.lower, e.upper) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("p, q", [(75, 25), (10, 90), (50, 60)])
def test_overall_effect_antisymmetric(random_samples, X, p, q):
    e1 = overall_effect(random_samples, X, p, q)
    e2 = overall_effect(random_samples, X, q, p)
    assert e1.point == -e2.point
    assert e1.lower == -e2.upper and e1.upper == -e2.lower


def test_overall_effect_hand_fixture(make_samples):
    X = np.array([[0.0, 1.0], [1.0, 3.0], [2.0, 0.0], [4.0, 2.0], [5.0, 5.0]])
    omega = np.array([[[0.3, 0.0]], [[0.0, 0.4]], [[0.2, 0.1]]])
    a = np.array([[1.0], [2.0], [-1.0]])
    b = np.array([[0.5], [0.0], [1.5]])
    s = make_samples(X, omega, a, b)
    hi = np.percentile(X, 75, axis=0, method="median_unbiased")
    lo = np.percentile(X, 25, axis=0, method="median_unbiased")
    diffs = []
    for w, aa, bb in zip(omega[:, 0], a[:, 0], b[:, 0]):
        f = lambda x: aa * np.cos(w @ x) + bb * np.sin(w @ x)
        diffs.append(f(hi) - f(lo))
    diffs = np.array(diffs)
    e = overall_effect(s, X, 75, 25)
    assert e.point == pytest.approx(diffs.mean(), rel=1e-12)
    assert e.lower == pytest.approx(np.percentile(diffs, 2.5, method="median_unbiased"), rel=1e-12)
    assert e.upper == pytest.approx(np.percentile(diffs, 97.5, method="median_unbiased"), rel=1e-12)


def test_overall_effect_bad_percentile(random_samples, X):
    with pytest.raises(ValueError):
        overall_effect(random_samples, X, 100)
    curve = overall_effect_curve(random_samples, X, [10, 25, 90])
    assert curve[1].point == 0


def test_univariate_constant_h(constant_samples, X):
    c = univariate_response(constant_samples, X, 0, grid_size=10, window=25)
    assert np.all(c.point == 0) and np.all(c.lower == 0) and np.all(c.upper == 0)
    assert np.all(np.diff(c.grid) > 0) and len(c.grid) == 10


def test_univariate_linear_surface(make_samples):
    X = np.random.default_rng(6).uniform(-1, 1, size=(200, 2))
    w = 1e-3
    s = make_samples(X, [[[0.0, w]]], [[0.0]], [[1.0 / w]])
    c = univariate_response(s, X, 1, window=25)
    np.testing.assert_allclose(c.point, c.grid - c.grid[0], atol=1e-3)
    assert c.point[0] == 0


def test_univariate_empty_window(make_samples):
    X = np.array([[1.0, 3.0, 0.0], [2.0, 2.0, 0.0], [3.0, 5.0, 0.0], [4.0, 4.0, 0.0], [5.0, 1.0, 0.0]])
    s = make_samples(X, np.ones((2, 1, 3)), np.ones((2, 1)), np.ones((2, 1)))
    with pytest.raises(EmptyWindowError):
        univariate_response(s, X, 2, co_percentile=50, window=5)


def test_univariate_bad_index(random_samples, X):
    with pytest.raises(IndexError):
        univariate_response(random_samples, X, 3)


def test_bivariate_constant(constant_samples, X):
    surf = bivariate_surface(constant_samples, X, 0, 2, grid_size=7)
    assert surf.point.shape == (7, 7)
    assert np.all(surf.point == 0) and np.all(surf.lower == 0) and np.all(surf.upper == 0)


def test_bivariate_reference_corner(random_samples, X):
    surf = bivariate_surface(random_samples, X, 1, 2, grid_size=5)
    e = surf.estimate(0, 0)
    assert e.point == 0 and e.lower == 0 and e.upper == 0


def test_bivariate_additive(make_samples, X):
    rng = np.random.default_rng(7)
    S = 10
    omega = np.zeros((S, 2, 3))
    omega[:, 0, 0] = rng.normal(size=S)
    omega[:, 1, 1] = rng.normal(size=S)
    s = make_samples(X, omega, rng.normal(size=(S, 2)), rng.normal(size=(S, 2)))
    surf = bivariate_surface(s, X, 0, 1, grid_size=8)
    P = surf.point
    interaction = P - P[:, :1] - P[:1, :] + P[0, 0]
    assert np.max(np.abs(interaction)) < 1e-6


def test_bivariate_same_exposure(random_samples, X):
    with pytest.raises(ValueError):
        bivariate_surface(random_samples, X, 1, 1)


def _waic_data(make_samples, S=4, seed=8):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(12, 2))
    Z = rng.normal(size=(12, 1))
    data = Dataset(Y=rng.normal(size=12), X=X, Z=Z)
    s = make_samples(X, rng.normal(size=(S, 2, 2)), rng.normal(size=(S, 2)), rng.normal(size=(S, 2)),
                     gamma=rng.normal(size=(S, 1)), sigma2=rng.uniform(0.5, 2, size=S))
    return data, s


def test_waic_identical_draws(make_samples):
    data, s = _waic_data(make_samples, S=1)
    dup = make_samples(data.X, np.repeat(s.omega, 3, 0), np.repeat(s.a, 3, 0), np.repeat(s.b, 3, 0),
                       gamma=np.repeat(s.gamma, 3, 0), sigma2=np.repeat(s.sigma2, 3))
    value, lppd, p = waic_components(dup, data)
    assert p == 0
    assert value == pytest.approx(-2 * lppd, rel=1e-14)


def test_waic_hand_two_draws(make_samples):
    data = Dataset(Y=[1.0], X=[[0.0]], Z=np.zeros((1, 0)))
    # h = a at x = 0, so the two draws predict 0 and 2
    s = make_samples(data.X, np.zeros((2, 1, 1)), [[0.0], [2.0]], [[0.0], [0.0]], sigma2=[1.0, 1.0])
    ll = -0.5 * np.log(2 * np.pi) - 0.5
    lppd = np.log(np.exp(ll))
    value, got_lppd, p = waic_components(s, data)
    assert got_lppd == pytest.approx(lppd, rel=1e-14)
    assert p == 0
    s = make_samples(data.X, np.zeros((2, 1, 1)), [[0.0], [2.0]], [[0.0], [0.0]], sigma2=[1.0, 4.0])
    l1 = -0.5 * np.log(2 * np.pi) - 0.5
    l2 = -0.5 * np.log(8 * np.pi) - 1 / 8
    value, got_lppd, p = waic_components(s, data)
    assert got_lppd == pytest.approx(np.log((np.exp(l1) + np.exp(l2)) / 2), rel=1e-14)
    assert p == pytest.approx(((l1 - l2) / 2) ** 2, rel=1e-12)
    assert value == pytest.approx(-2 * (got_lppd - p), rel=1e-14)


def test_waic_duplication_invariant(make_samples):
    data, s = _waic_data(make_samples)
    dup = make_samples(data.X, np.concatenate([s.omega] * 2), np.concatenate([s.a] * 2), np.concatenate([s.b] * 2),
                       gamma=np.concatenate([s.gamma] * 2), sigma2=np.concatenate([s.sigma2] * 2))
    assert waic(dup, data) == pytest.approx(waic(s, data), rel=1e-12)


def test_waic_prefers_truth(make_samples):
    rng = np.random.default_rng(9)
    X = rng.normal(size=(30, 2))
    omega = rng.normal(size=(1, 3, 2))
    a, b = rng.normal(size=(1, 3)), rng.normal(size=(1, 3))
    truth = make_samples(X, np.repeat(omega, 4, 0), np.repeat(a, 4, 0), np.repeat(b, 4, 0), sigma2=np.full(4, 0.1))
    data = Dataset(Y=truth.h[0], X=X, Z=np.zeros((30, 0)))
    wrong = make_samples(X, rng.normal(size=(4, 3, 2)), rng.normal(size=(4, 3)), rng.normal(size=(4, 3)), sigma2=np.full(4, 0.1))
    assert waic(truth, data) < waic(wrong, data)


def test_loglik_shape_check(make_samples):
    data, s = _waic_data(make_samples)
    assert pointwise_log_likelihood(s, data).shape == (4, 12)
    with pytest.raises(DimensionMismatchError):
        pointwise_log_likelihood(s, data.subset(np.arange(5)))


def test_summaries_deterministic(random_samples, X):
    a = bivariate_surface(random_samples, X, 0, 1, grid_size=4)
    b = bivariate_surface(random_samples, X, 0, 1, grid_size=4)
    assert np.array_equal(a.point, b.point) and np.array_equal(a.upper, b.upper)
