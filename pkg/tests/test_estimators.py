import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from sklearn.base import clone

from toepcov.base import AutocovarianceSequence, SymmetricToeplitz
from toepcov.estimators import (
    BandThresholdAutocovariance,
    SampleAutocovariance,
    TaperedAutocovariance,
    ThresholdedAutocovariance,
    bias_bound,
    plug_in_matrix,
    sample_acov,
    sample_acov_centered,
    tapered_matrix,
    theoretical_bandwidth,
    theoretical_threshold,
    threshold_after_banding,
    thresholded_matrix,
)
from toepcov.linalg import operator_norm
from toepcov.process import linear_acov, ma, white_noise, x_process
from toepcov.tapers import BARTLETT, PARZEN, RECTANGULAR, get_taper

series = arrays(np.float64, st.integers(4, 40), elements=st.floats(-10, 10))


def naive_acov(x, kmax):
    T = len(x)
    return np.array([sum(x[t] * x[t + k] for t in range(T - k)) / T for k in range(kmax + 1)])


class TestSampleAcov:
    def test_alternating(self):
        np.testing.assert_allclose(sample_acov([1, -1, 1, -1], 3).values, [1.0, -0.75, 0.5, -0.25])

    def test_matches_naive(self):
        x = np.random.default_rng(1).standard_normal(37)
        np.testing.assert_allclose(sample_acov(x, 36).values, naive_acov(x, 36), atol=1e-13)

    def test_fft_path_matches_naive(self):
        x = np.random.default_rng(2).standard_normal(5000)
        got = sample_acov(x, 10).values
        want = [np.dot(x[: 5000 - k], x[k:]) / 5000 for k in range(11)]
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_centered(self):
        x = np.random.default_rng(3).standard_normal(20) + 5
        np.testing.assert_allclose(sample_acov_centered(x, 5).values,
                                   naive_acov(x - x.mean(), 5), atol=1e-12)

    def test_kmax_bounds(self):
        with pytest.raises(ValueError):
            sample_acov([1.0, 2.0, 3.0], 3)
        with pytest.raises(ValueError):
            sample_acov([1.0, np.nan, 3.0], 1)

    @given(series)
    @settings(max_examples=50, deadline=None)
    def test_plug_in_psd(self, x):
        w = np.linalg.eigvalsh(plug_in_matrix(x).to_dense())
        assert w.min() >= -1e-9 * max(1.0, abs(w).max())

    @given(series, st.floats(-100, 100))
    @settings(max_examples=50, deadline=None)
    def test_centered_translation_invariant(self, x, shift):
        a = sample_acov_centered(x, x.size - 1).values
        b = sample_acov_centered(x + shift, x.size - 1).values
        np.testing.assert_allclose(a, b, atol=1e-8 * (1 + np.abs(x).max() + abs(shift)) ** 2)


class TestTapered:
    def test_banded_zeroes_beyond_B(self):
        x = np.random.default_rng(4).standard_normal(30)
        col = tapered_matrix(x, "rectangular", 3).first_column
        np.testing.assert_allclose(col[:4], naive_acov(x, 3), atol=1e-13)
        assert np.all(col[4:] == 0)

    def test_bartlett_weights(self):
        x = np.random.default_rng(5).standard_normal(30)
        col = tapered_matrix(x, "bartlett", 4).first_column
        g = naive_acov(x, 29)
        np.testing.assert_allclose(col[:5], g[:5] * np.array([1, 0.75, 0.5, 0.25, 0]), atol=1e-13)

    def test_full_band_is_plug_in(self):
        x = np.random.default_rng(6).standard_normal(12)
        np.testing.assert_array_equal(tapered_matrix(x, RECTANGULAR, 11).first_column,
                                      plug_in_matrix(x).first_column)

    @pytest.mark.parametrize("B", [0, 12, 2.5])
    def test_bad_bandwidth(self, B):
        with pytest.raises(ValueError):
            tapered_matrix(np.ones(12), RECTANGULAR, B)

    @given(series, st.integers(1, 39), st.sampled_from([BARTLETT, PARZEN]))
    @settings(max_examples=200, deadline=None)
    def test_positive_definite_tapers_give_psd(self, x, B, taper):
        B = min(B, x.size - 1)
        w = np.linalg.eigvalsh(tapered_matrix(x, taper, B).to_dense())
        assert w.min() >= -1e-9 * max(1.0, abs(w).max())

    def test_banded_can_be_indefinite(self):
        # not PSD in general: a sample with a negative banded eigenvalue exists
        rng = np.random.default_rng(0)
        found = False
        for _ in range(200):
            x = rng.standard_normal(8)
            if np.linalg.eigvalsh(tapered_matrix(x, RECTANGULAR, 2).to_dense()).min() < -1e-8:
                found = True
                break
        assert found


class TestThreshold:
    def test_alternating(self):
        m = thresholded_matrix([1, -1, 1, -1], 0.6)
        np.testing.assert_array_equal(m.nonzero_lags(), [0, 1])

    def test_diagonal_kept(self):
        m = thresholded_matrix([1, -1, 1, -1], 100.0)
        assert m.first_column[0] == 1.0 and np.all(m.first_column[1:] == 0)

    def test_zero_threshold_is_plug_in(self):
        x = np.random.default_rng(7).standard_normal(15)
        np.testing.assert_array_equal(thresholded_matrix(x, 0.0).first_column,
                                      plug_in_matrix(x).first_column)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            thresholded_matrix(np.ones(5), -1.0)

    def test_after_banding(self):
        x = np.array([1, -1, 1, -1.0])
        col = threshold_after_banding(x, RECTANGULAR, 2, 0.6).first_column
        np.testing.assert_allclose(col, [1.0, -0.75, 0.0, 0.0])
        col = threshold_after_banding(x, RECTANGULAR, 2, 0.4).first_column
        np.testing.assert_allclose(col, [1.0, -0.75, 0.5, 0.0])

    @given(series, st.floats(0, 5))
    @settings(max_examples=50, deadline=None)
    def test_entries_are_plug_in_or_zero(self, x, A):
        col = thresholded_matrix(x, A).first_column
        g = plug_in_matrix(x).first_column
        assert col[0] == g[0]
        assert np.all((col == g) | (col == 0))
        assert np.all(np.abs(col[1:][col[1:] != 0]) >= A)


class TestBiasBound:
    def test_white_noise_zero(self):
        assert bias_bound(linear_acov(white_noise(), 99), RECTANGULAR, 5, 100) == 0.0

    def test_ma1_hand_computed(self):
        truth = AutocovarianceSequence([1.25, 0.5, 0.0], tail_bound=0.0)
        # rectangular, B=1: only the (2/T) k |g_k| term remains
        assert bias_bound(truth, RECTANGULAR, 1, 10) == pytest.approx(2 / 10 * 0.5)
        # Bartlett, B=1: K(1)=0 so the first term is 2*|g_1|
        assert bias_bound(truth, BARTLETT, 1, 10) == pytest.approx(2 * 0.5 + 2 / 10 * 0.5)

    def test_truncation_term(self):
        g = np.array([1.0, 0.5, 0.25, 0.125])
        truth = AutocovarianceSequence(g, tail_bound=0.0)
        assert bias_bound(truth, "rectangular", 1, 10) == pytest.approx(
            2 / 10 * 0.5 + 2 * (0.25 + 0.125))

    @pytest.mark.parametrize("taper", ["rectangular", "bartlett", "parzen"])
    @pytest.mark.parametrize("B", [1, 3, 8])
    def test_dominates_exact_bias(self, taper, B):
        model = x_process(0.5, 1.0)
        T = 60
        truth = linear_acov(model, T - 1)
        w = get_taper(taper).weights(B, T)
        expected_col = (1 - np.arange(T) / T) * w * truth.values
        diff = SymmetricToeplitz(expected_col - truth.values)
        exact = operator_norm(diff).value
        bound = bias_bound(truth, taper, B, T)
        assert exact <= bound + 1e-12

    def test_missing_lags(self):
        with pytest.raises(ValueError):
            bias_bound(AutocovarianceSequence([1.0, 0.5]), RECTANGULAR, 5, 20)
        with pytest.raises(ValueError):
            bias_bound(AutocovarianceSequence([1.0, 0.5, 0.2]), RECTANGULAR, 1, 20)


class TestTheoreticalTuning:
    def test_bandwidth(self):
        for T in (250, 1000, 4000):
            assert theoretical_bandwidth(T, 1.0) == round((T / math.log(T)) ** (1 / 3))
        assert theoretical_bandwidth(10, 0.01) <= 9

    def test_threshold_scaling(self):
        m = x_process(0.5, 1.0)
        a, b = theoretical_threshold(m, 250), theoretical_threshold(m, 4000)
        assert a / b == pytest.approx(math.sqrt(math.log(250) / 250 * 4000 / math.log(4000)))
        with pytest.raises(ValueError):
            theoretical_threshold(m, 100, p=4)


class TestEstimatorObjects:
    def test_get_params_and_clone(self):
        est = TaperedAutocovariance(bandwidth=3, taper="bartlett", center=True)
        assert est.get_params() == {"bandwidth": 3, "taper": "bartlett", "center": True}
        c = clone(est).set_params(bandwidth=5)
        assert c.bandwidth == 5 and est.bandwidth == 3

    def test_fit_matches_functions(self):
        x = np.random.default_rng(8).standard_normal(40)
        cases = [
            (SampleAutocovariance(), plug_in_matrix(x)),
            (TaperedAutocovariance(4), tapered_matrix(x, RECTANGULAR, 4)),
            (ThresholdedAutocovariance(0.1), thresholded_matrix(x, 0.1)),
            (BandThresholdAutocovariance(4, 0.1), threshold_after_banding(x, RECTANGULAR, 4, 0.1)),
        ]
        for est, want in cases:
            got = est.fit(x.reshape(-1, 1)).covariance_
            np.testing.assert_array_equal(got.first_column, want.first_column)
            assert est.get_covariance().shape == (40, 40)

    def test_error_against_truth(self):
        m = ma([1, 0.5])
        x = np.random.default_rng(9).standard_normal(50)
        est = TaperedAutocovariance(1).fit(x)
        truth = linear_acov(m, 1)
        dense = np.linalg.eigvalsh(est.get_covariance() - truth.to_toeplitz(50).to_dense())
        assert est.error(truth) == pytest.approx(np.abs(dense).max(), rel=1e-10)

    def test_unfitted(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            SampleAutocovariance().get_covariance()
