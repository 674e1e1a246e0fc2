"""Sample autocovariances and regularized autocovariance-matrix estimators.

Functional API returns :class:`SymmetricToeplitz` objects; the estimator
classes at the bottom wrap the same functions behind ``fit`` /
``get_params`` so they compose with scikit-learn tooling.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .base import AutocovarianceSequence, SymmetricToeplitz, check_lag, check_series
from .tapers import RECTANGULAR, Taper, get_taper

__all__ = [
    "sample_acov",
    "sample_acov_centered",
    "plug_in_matrix",
    "tapered_matrix",
    "thresholded_matrix",
    "threshold_after_banding",
    "bias_bound",
    "theoretical_bandwidth",
    "theoretical_threshold",
    "SampleAutocovariance",
    "TaperedAutocovariance",
    "ThresholdedAutocovariance",
    "BandThresholdAutocovariance",
]


def _acov(x: np.ndarray, kmax: int) -> np.ndarray:
    T = x.size
    if T <= 4096:
        full = np.correlate(x, x, mode="full")[T - 1:T + kmax]
    else:
        n = next_fast_len(2 * T - 1, real=True)
        fx = rfft(x, n)
        full = irfft(fx.real**2 + fx.imag**2, n)[: kmax + 1]
    return full / T


def sample_acov(x, kmax: int) -> AutocovarianceSequence:
    """Sample autocovariances ``(1/T) sum_t X_{t-k} X_t`` for a known zero mean.

    The divisor is ``T`` at every lag.
    """
    x = check_series(x, min_length=1)
    kmax = check_lag(kmax, x.size - 1)
    return AutocovarianceSequence(_acov(x, kmax))


def sample_acov_centered(x, kmax: int) -> AutocovarianceSequence:
    """Sample autocovariances after subtracting the sample mean (divisor ``T``)."""
    x = check_series(x, min_length=1)
    kmax = check_lag(kmax, x.size - 1)
    return AutocovarianceSequence(_acov(x - x.mean(), kmax))


def _gamma_hat(x, center):
    x = check_series(x)
    if center:
        x = x - x.mean()
    return _acov(x, x.size - 1)


def plug_in_matrix(x, center: bool = False) -> SymmetricToeplitz:
    """Plug-in estimate ``(gamma_hat_{s-t})``; nonnegative definite by construction."""
    return SymmetricToeplitz(_gamma_hat(x, center))


def _tapered_column(g: np.ndarray, taper: Taper, B: int) -> np.ndarray:
    B = check_lag(B, g.size - 1, name="B", lower=1)
    return taper.weights(B, g.size) * g


def tapered_matrix(x, taper=RECTANGULAR, B: int = 1, center: bool = False) -> SymmetricToeplitz:
    """Tapered estimate with entries ``K((s-t)/B) * gamma_hat_{s-t}``.

    With the rectangular kernel this is the banded estimate. A positive
    definite kernel keeps the result nonnegative definite; the banded
    estimate may be indefinite and is returned as is.
    """
    taper = get_taper(taper)
    g = _gamma_hat(x, center)
    return SymmetricToeplitz(_tapered_column(g, taper, B))


def _hard_threshold(col: np.ndarray, A: float) -> np.ndarray:
    if not A >= 0:
        raise ValueError(f"threshold must be nonnegative, got {A}")
    out = np.where(np.abs(col) >= A, col, 0.0)
    out[0] = col[0]  # the diagonal is never thresholded
    return out


def thresholded_matrix(x, A: float, center: bool = False) -> SymmetricToeplitz:
    """Hard-thresholded estimate keeping off-diagonal lags with ``|gamma_hat_k| >= A``."""
    return SymmetricToeplitz(_hard_threshold(_gamma_hat(x, center), A))


def threshold_after_banding(x, taper=RECTANGULAR, B: int = 1, A: float = 0.0,
                            center: bool = False) -> SymmetricToeplitz:
    """Taper at bandwidth ``B``, then zero off-diagonal entries smaller than ``A``."""
    taper = get_taper(taper)
    g = _gamma_hat(x, center)
    return SymmetricToeplitz(_hard_threshold(_tapered_column(g, taper, B), A))


def bias_bound(truth: AutocovarianceSequence, taper, B: int, T: int) -> float:
    """Gershgorin bound on the operator-norm bias of the tapered estimate.

    ``2 sum_{k<=B} (1 - K(k/B)) |g_k| + (2/T) sum_{k<=B} k |g_k|
    + 2 sum_{B<k<T} |g_k|``.

    Lags of ``truth`` beyond its ``kmax`` enter through ``truth.tail_bound``;
    a missing bound is accepted only if every needed lag is present.
    """
    taper = get_taper(taper)
    if int(T) != T or T < 2:
        raise ValueError("T must be an integer >= 2")
    if int(B) != B or B < 1:
        raise ValueError("B must be a positive integer")
    T, B = int(T), int(B)
    band = min(B, T - 1)
    tail_bound = truth.tail_bound
    if truth.kmax < band and not (tail_bound is not None and tail_bound <= 1e-10):
        raise ValueError(
            f"truth stops at lag {truth.kmax}, bias needs lags up to {band}"
        )
    if truth.kmax < T - 1 and tail_bound is None:
        raise ValueError(
            f"truth stops at lag {truth.kmax} < T-1 with no tail bound"
        )
    g = np.abs(truth.padded(T))
    k = np.arange(1, band + 1)
    w = taper(k / B)
    bias = 2 * np.sum((1 - w) * g[k]) + 2 / T * np.sum(k * g[k])
    bias += 2 * np.sum(g[band + 1:])
    if truth.kmax < T - 1:
        bias += 2 * tail_bound
    return float(bias)


def theoretical_bandwidth(T: int, alpha: float) -> int:
    """``round((T / log T)^{1/(2 alpha + 1)})``, clipped to ``[1, T-1]``."""
    B = round((T / math.log(T)) ** (1.0 / (2 * alpha + 1)))
    return int(min(max(B, 1), T - 1))


def theoretical_threshold(model, T: int, p: float = 8.0) -> float:
    """``2 c'_p sqrt(log T / T)`` with ``c'_p = 6 (p+4) e^{p/4} ||X_0||_4 Theta_4``.

    ``||X_0||_4`` and ``Theta_4`` come from the model's Gaussian closed forms.
    """
    from .process import dependence_profile, gaussian_abs_moment

    if not p > 4:
        raise ValueError("the threshold constant needs p > 4")
    gamma0 = float(model.autocovariances[0])
    norm4 = gaussian_abs_moment(4) * math.sqrt(gamma0)
    theta4 = dependence_profile(model, 4).theta(0)
    c = 6 * (p + 4) * math.exp(p / 4) * norm4 * theta4
    return 2 * c * math.sqrt(math.log(T) / T)


# -- estimator objects ---------------------------------------------------------


class _AutocovarianceBase(BaseEstimator):
    def fit(self, X, y=None):
        """Estimate from a single realization ``X`` of shape ``(T,)`` or ``(T, 1)``."""
        x = check_series(X)
        self.n_samples_ = x.size
        self.covariance_ = self._estimate(x)
        return self

    def get_covariance(self) -> np.ndarray:
        check_is_fitted(self, "covariance_")
        return self.covariance_.to_dense()

    def error(self, truth, tol: float = 1e-10) -> float:
        """Operator-norm distance from ``truth`` (Toeplitz, sequence or array)."""
        from .linalg import norm_of_difference

        check_is_fitted(self, "covariance_")
        if isinstance(truth, AutocovarianceSequence):
            truth = truth.to_toeplitz(self.n_samples_)
        elif not isinstance(truth, SymmetricToeplitz):
            truth = SymmetricToeplitz(np.asarray(truth, dtype=float)[: self.n_samples_])
        return norm_of_difference(self.covariance_, truth, tol).value


class SampleAutocovariance(_AutocovarianceBase):
    """Plug-in autocovariance matrix.

    Parameters
    ----------
    center : bool, default=False
        Subtract the sample mean before estimating.
    """

    def __init__(self, center=False):
        self.center = center

    def _estimate(self, x):
        return plug_in_matrix(x, center=self.center)


class TaperedAutocovariance(_AutocovarianceBase):
    """Banded (rectangular) or tapered autocovariance matrix.

    Parameters
    ----------
    bandwidth : int
        Lag window width ``B``; must satisfy ``1 <= B <= T - 1``.
    taper : str or Taper, default="rectangular"
    center : bool, default=False
    """

    def __init__(self, bandwidth=1, taper="rectangular", center=False):
        self.bandwidth = bandwidth
        self.taper = taper
        self.center = center

    def _estimate(self, x):
        return tapered_matrix(x, self.taper, self.bandwidth, center=self.center)


class ThresholdedAutocovariance(_AutocovarianceBase):
    """Hard-thresholded autocovariance matrix (diagonal kept).

    Parameters
    ----------
    threshold : float
    center : bool, default=False
    """

    def __init__(self, threshold=0.0, center=False):
        self.threshold = threshold
        self.center = center

    def _estimate(self, x):
        return thresholded_matrix(x, self.threshold, center=self.center)


class BandThresholdAutocovariance(_AutocovarianceBase):
    """Thresholding applied after banding/tapering."""

    def __init__(self, bandwidth=1, threshold=0.0, taper="rectangular", center=False):
        self.bandwidth = bandwidth
        self.threshold = threshold
        self.taper = taper
        self.center = center

    def _estimate(self, x):
        return threshold_after_banding(
            x, self.taper, self.bandwidth, self.threshold, center=self.center
        )
