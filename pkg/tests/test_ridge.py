import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rashomon import ridge
from rashomon.dataset import Dataset
from rashomon.ridge import (
    RidgeFit,
    RidgeSpec,
    SingularGramError,
    ellipsoid_contains,
    ridge_fit,
    ridge_fit_arrays,
    ridge_volume,
    ridge_volume_lower_bounds,
    theta_from_direction,
)


def J(theta, p):
    return math.pi ** (p / 2) * theta ** (p / 2) / math.gamma(p / 2 + 1)


def one_param_fit(gram=4.0, w=0.0):
    return RidgeFit(np.array([w]), np.array([[gram]]), 0.0)


class TestFit:
    def test_identity_least_squares(self):
        y = np.array([0.3, -1.2, 4.0])
        np.testing.assert_allclose(ridge_fit_arrays(np.eye(3), y, 0.0).w_hat, y)

    def test_identity_ridge(self):
        np.testing.assert_allclose(ridge_fit_arrays(np.eye(2), np.array([2.0, 2.0]), 1.0).w_hat, [1.0, 1.0])

    def test_grid_search_oracle(self):
        rng = np.random.default_rng(0)
        X, y, C = rng.random((15, 2)), rng.standard_normal(15), 0.3
        lo, hi, best = np.array([-20.0, -20.0]), np.array([20.0, 20.0]), None
        for _ in range(30):
            g0, g1 = np.meshgrid(np.linspace(lo[0], hi[0], 41), np.linspace(lo[1], hi[1], 41))
            W = np.column_stack([g0.ravel(), g1.ravel()])
            obj = np.sum((W @ X.T - y) ** 2, axis=1) + C * np.sum(W**2, axis=1)
            best = W[np.argmin(obj)]
            span = (hi - lo) / 8
            lo, hi = best - span, best + span
        np.testing.assert_allclose(ridge_fit_arrays(X, y, C).w_hat, best, atol=1e-4)

    def test_gradient_vanishes(self):
        rng = np.random.default_rng(1)
        X, y = rng.random((30, 4)), rng.standard_normal(30)
        fit = ridge_fit_arrays(X, y, 0.05)
        grad = X.T @ X @ fit.w_hat + 0.05 * fit.w_hat - X.T @ y
        assert np.abs(grad).max() <= 1e-8 * max(1.0, np.abs(X.T @ y).max())

    def test_singular_gram(self):
        X = np.array([[1.0, 1.0], [2.0, 2.0]]) / 2
        with pytest.raises(SingularGramError):
            ridge_fit_arrays(X, np.ones(2), 0.0)
        ridge_fit_arrays(X, np.ones(2), 0.1)

    def test_dataset_wrapper(self):
        d = Dataset(np.vstack([np.eye(3), [0.5, 0.2, 0.1]]), np.array([1.0, 2.0, 3.0, 1.2]), task="regression")
        np.testing.assert_allclose(ridge_fit(d, 0.0).w_hat, [1, 2, 3])
        assert ridge_fit(d, 0.0, intercept=True).w_hat.size == 4
        with pytest.raises(ValueError):
            ridge_fit(Dataset(np.eye(2), np.array([1.0, -1.0])), 0.0)


class TestVolume:
    def test_unit_disk(self):
        assert math.isclose(ridge_volume(RidgeSpec([1, 1], 0, 1)), math.pi, rel_tol=1e-14)

    def test_interval(self):
        assert math.isclose(ridge_volume(RidgeSpec([2], 0, 4)), 2.0, rel_tol=1e-14)

    def test_three_d_with_monte_carlo(self):
        spec = RidgeSpec([1, 2, 3], 1.0, 2.0)
        exact = ridge_volume(spec)
        assert math.isclose(exact, J(2, 3) / 10, rel_tol=1e-12)
        assert math.isclose(exact, 1.1847, rel_tol=1e-4)
        a2 = np.array([1.0, 4.0, 9.0]) + 1.0
        half = np.sqrt(2.0 / a2)
        v = (np.random.default_rng(3).random((1_000_000, 3)) * 2 - 1) * half
        mc = np.mean((v**2 @ a2) <= 2.0) * np.prod(2 * half)
        assert abs(mc - exact) / exact < 0.01

    def test_divergent(self):
        with pytest.raises(SingularGramError):
            ridge_volume(RidgeSpec([1.0, 0.0], 0.0, 1.0))
        assert ridge_volume(RidgeSpec([1.0, 0.0], 0.5, 1.0)) > 0

    def test_large_dimension_log_form(self):
        spec = RidgeSpec(np.full(400, 3.0), 0.1, 0.5)
        logv = ridge.log_ridge_volume(spec)
        assert math.isfinite(logv)
        expected = 200 * math.log(math.pi * 0.5) - math.lgamma(201) - 200 * math.log(9.1)
        assert math.isclose(logv, expected, rel_tol=1e-12)

    def test_target_independence(self):
        rng = np.random.default_rng(4)
        X = rng.random((25, 3))
        vols = []
        for _ in range(2):
            d = Dataset(X, rng.standard_normal(25), task="regression")
            ridge_fit(d, 0.2)
            vols.append(ridge_volume(RidgeSpec.from_matrix(ridge.design(d), 0.2, 1.0)))
        assert vols[0] == vols[1]

    @settings(max_examples=50)
    @given(
        st.lists(st.floats(0.1, 10), min_size=1, max_size=5),
        st.floats(0, 2),
        st.floats(0.01, 5),
        st.floats(1.01, 3),
    )
    def test_monotone(self, sigma, C, theta, f):
        base = ridge_volume(RidgeSpec(sigma, C, theta))
        assert ridge_volume(RidgeSpec(sigma, C, theta * f)) > base
        assert ridge_volume(RidgeSpec(sigma, C * f + 0.01, theta)) < base
        bigger = list(sigma)
        bigger[0] *= f
        assert ridge_volume(RidgeSpec(bigger, C, theta)) < base

    def test_scaling_law(self):
        rng = np.random.default_rng(5)
        X, c, C, theta = rng.random((10, 3)), 2.5, 0.3, 0.7
        s = ridge.singular_values(X)
        expected = J(theta, 3) * np.prod(1 / np.sqrt(c**2 * s**2 + C))
        assert math.isclose(ridge_volume(RidgeSpec.from_matrix(c * X, C, theta)), expected, rel_tol=1e-10)

    def test_risk_identity(self):
        rng = np.random.default_rng(6)
        X, y = rng.random((20, 3)), rng.standard_normal(20)
        fit = ridge_fit_arrays(X, y, 0.0)
        for _ in range(10):
            delta = rng.standard_normal(3)
            gap = ridge.objective(fit.w_hat + delta, X, y, 0.0) - ridge.objective(fit.w_hat, X, y, 0.0)
            assert math.isclose(gap, delta @ X.T @ X @ delta, rel_tol=1e-8)


class TestEllipsoid:
    def test_center(self):
        fit = ridge_fit_arrays(np.random.default_rng(0).random((5, 2)), np.ones(5), 0.1)
        assert ellipsoid_contains(fit.w_hat, fit, 1e-9)

    def test_boundary_inclusive(self):
        assert ellipsoid_contains(np.array([1.0]), one_param_fit(), 4.0)
        assert not ellipsoid_contains(np.array([1.01]), one_param_fit(), 4.0)

    def test_theta_from_direction(self):
        assert theta_from_direction(one_param_fit(), np.array([0.0])) == 0.0
        assert theta_from_direction(one_param_fit(), np.array([0.5])) == 1.0

    @given(st.integers(0, 10_000))
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        X, y = rng.random((8, 3)), rng.standard_normal(8)
        fit = ridge_fit_arrays(X, y, 0.5)
        w = fit.w_hat + rng.standard_normal(3)
        theta = theta_from_direction(fit, w)
        assert ellipsoid_contains(w, fit, theta)
        assert not ellipsoid_contains(w, fit, theta * (1 - 1e-6))

    def test_uses_regularized_gram(self):
        X = np.eye(2)
        fit = ridge_fit_arrays(X, np.zeros(2), 1.0)
        assert theta_from_direction(fit, np.array([1.0, 0.0])) == 2.0


class TestLowerBounds:
    def test_unit_sphere_rows(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((5, 3))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        spec = RidgeSpec.from_matrix(X, 0.2, 1.0)
        assert ridge_volume_lower_bounds(spec, "unit_sphere", n=5) <= ridge_volume(spec)

    def test_amgm_tight_for_equal_singular_values(self):
        X = 1.7 * np.eye(3)
        spec = RidgeSpec.from_matrix(X, 0.0, 0.8)
        bound = ridge_volume_lower_bounds(spec, "frobenius", frobenius=np.linalg.norm(X))
        assert math.isclose(bound, ridge_volume(spec), rel_tol=1e-12)

    @settings(max_examples=50)
    @given(st.integers(0, 10_000), st.integers(1, 4), st.floats(0, 1))
    def test_all_kinds_below_exact(self, seed, p, C):
        rng = np.random.default_rng(seed)
        X = rng.random((6, p)) + 0.05
        spec = RidgeSpec.from_matrix(X, C, 0.5)
        exact = ridge_volume(spec)
        hess = float(np.max(2 * np.sum(X**2, axis=0) + 2 * C))
        assert ridge_volume_lower_bounds(spec, "frobenius", frobenius=np.linalg.norm(X)) <= exact * (1 + 1e-12)
        assert ridge_volume_lower_bounds(spec, "second_derivative", second_derivative=hess) <= exact * (1 + 1e-12)

    def test_literal_form_overshoots_in_one_dimension(self):
        spec = RidgeSpec([1.0], 0.0, 1.0)
        assert ridge_volume(spec) == pytest.approx(2.0)
        assert ridge_volume_lower_bounds(spec, "frobenius", frobenius=1.0, form="literal") == pytest.approx(4.0)
        assert ridge_volume_lower_bounds(spec, "frobenius", frobenius=1.0) == pytest.approx(2.0)

    def test_second_derivative_precondition(self):
        with pytest.raises(ValueError, match="2C"):
            ridge_volume_lower_bounds(RidgeSpec([1.0], 1.0, 1.0), "second_derivative", second_derivative=1.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ridge_volume_lower_bounds(RidgeSpec([1.0], 0.0, 1.0), "spectral")
