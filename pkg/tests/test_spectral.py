import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from toepcov.estimators import sample_acov, tapered_matrix
from toepcov.process import ar1, linear_acov, ma, white_noise, x_process
from toepcov.spectral import (
    LagWindowSpectralDensity,
    SpectralFunction,
    acov_spectral_function,
    lag_window_estimate,
    model_spectral_function,
    periodogram,
    periodogram_fourier_grid,
    toeplitz_spectral_bounds,
    trig_poly_max,
)

series = arrays(np.float64, st.integers(2, 50), elements=st.floats(-10, 10))


def naive_periodogram(x, theta):
    t = np.arange(1, len(x) + 1)
    return abs(np.sum(x * np.exp(1j * t * theta))) ** 2 / len(x)


class TestPeriodogram:
    def test_constant_series(self):
        assert periodogram(np.ones(8), 0.0) == pytest.approx(8.0)
        assert periodogram(np.ones(8), 2 * np.pi / 8) == pytest.approx(0.0, abs=1e-12)

    def test_matches_naive(self):
        x = np.random.default_rng(0).standard_normal(23)
        th = np.linspace(-np.pi, np.pi, 13)
        np.testing.assert_allclose(periodogram(x, th), [naive_periodogram(x, t) for t in th])

    def test_fourier_grid(self):
        x = np.random.default_rng(1).standard_normal(15)
        grid = periodogram_fourier_grid(x)
        assert grid.size == 8
        omega = 2 * np.pi * np.arange(8) / 15
        np.testing.assert_allclose(grid, periodogram(x, omega), atol=1e-12)
        assert periodogram_fourier_grid(x, full=True).size == 15

    @given(series)
    @settings(max_examples=100, deadline=None)
    def test_parseval(self, x):
        full = periodogram_fourier_grid(x, full=True)
        assert full.sum() == pytest.approx(np.sum(x**2), rel=1e-9, abs=1e-9)
        assert full.mean() == pytest.approx(sample_acov(x, 0).values[0], rel=1e-9, abs=1e-9)

    @given(series)
    @settings(max_examples=50, deadline=None)
    def test_equals_acov_series(self, x):
        # I(theta) = sum_{|k|<T} gamma_hat_k cos(k theta)
        g = sample_acov(x, x.size - 1)
        th = np.linspace(-np.pi, np.pi, 9)
        np.testing.assert_allclose(periodogram(x, th), 2 * np.pi * acov_spectral_function(g)(th),
                                   atol=1e-8 * (1 + np.sum(x**2)))


class TestLagWindow:
    def test_matches_naive(self):
        x = np.random.default_rng(2).standard_normal(40)
        B = 6
        f = lag_window_estimate(x, "bartlett", B)
        g = sample_acov(x, B).values
        w = 1 - np.arange(B + 1) / B
        for th in (0.0, 0.7, -2.1, np.pi):
            want = (g[0] + 2 * np.sum(w[1:] * g[1:] * np.cos(np.arange(1, B + 1) * th))) / (2 * np.pi)
            assert f(th) == pytest.approx(want, abs=1e-12)

    def test_symbol_of_tapered_matrix(self):
        x = np.random.default_rng(3).standard_normal(60)
        f = lag_window_estimate(x, "parzen", 8)
        lo, hi = toeplitz_spectral_bounds(f, 60)
        w = np.linalg.eigvalsh(tapered_matrix(x, "parzen", 8).to_dense())
        assert lo - 1e-8 <= w.min() and w.max() <= hi + 1e-8

    def test_estimator_object(self):
        x = np.random.default_rng(4).standard_normal(100)
        est = LagWindowSpectralDensity(bandwidth=5).fit(x)
        th = np.array([0.0, 1.0])
        np.testing.assert_allclose(est.predict(th), lag_window_estimate(x, "bartlett", 5)(th))
        assert est.get_params()["taper"] == "bartlett"

    def test_grid_fast_path(self):
        f = acov_spectral_function(np.array([1.0, 0.3, -0.2, 0.05]))
        np.testing.assert_allclose(f.on_grid(33), f(np.linspace(0, np.pi, 33)), atol=1e-14)


def random_trig_poly(rng):
    n = int(rng.integers(1, 40))
    coef = rng.standard_normal(n + 1) * rng.exponential(1.0, n + 1)
    return acov_spectral_function(coef, scale=1.0)


class TestTrigPolyMax:
    def test_constant(self):
        s = acov_spectral_function(np.array([2.0, 0.0]), scale=1.0)
        assert trig_poly_max(s, 1.0) == pytest.approx(4.0)

    @pytest.mark.parametrize("delta", [0.25, 1.0, 3.0])
    def test_dominates_dense_grid(self, delta):
        rng = np.random.default_rng(int(delta * 4))
        for _ in range(100):
            s = random_trig_poly(rng)
            bound = trig_poly_max(s, delta)
            dense = np.max(np.abs(s(np.linspace(-np.pi, np.pi, 20001))))
            assert dense <= bound * (1 + 1e-12)
            assert bound <= (1 + 1 / delta) * dense * (1 + 1e-12)

    def test_requires_polynomial(self):
        with pytest.raises(ValueError):
            trig_poly_max(SpectralFunction(np.cos), 1.0)
        with pytest.raises(ValueError):
            trig_poly_max(acov_spectral_function([1.0, 0.2]), 0.0)


class TestSpectralBounds:
    def test_ma1_range(self):
        lo, hi = toeplitz_spectral_bounds(model_spectral_function(ma([1, 0.5])), 32)
        assert lo <= 0.25 <= lo + 1e-3
        assert hi - 1e-3 <= 2.25 <= hi

    @pytest.mark.parametrize("model", [white_noise(), ma([1, 0.5]), ar1(0.5), ar1(-0.8),
                                       x_process(0.5, 1.0)], ids=repr)
    @pytest.mark.parametrize("T", [8, 100])
    def test_contains_eigenvalues(self, model, T):
        lo, hi = toeplitz_spectral_bounds(model_spectral_function(model), T)
        w = np.linalg.eigvalsh(linear_acov(model, T - 1).to_toeplitz(T).to_dense())
        assert lo - 1e-8 <= w.min() and w.max() <= hi + 1e-8

    def test_needs_certificate(self):
        with pytest.raises(ValueError):
            toeplitz_spectral_bounds(SpectralFunction(np.cos), 5)
        with pytest.raises(ValueError):
            toeplitz_spectral_bounds(acov_spectral_function([1.0]), 0)

    def test_sequence_models_rejected(self):
        from toepcov.process import SparseLagProcess

        with pytest.raises(TypeError):
            model_spectral_function(SparseLagProcess(4, 2.0))
