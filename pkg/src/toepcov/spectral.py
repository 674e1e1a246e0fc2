"""Periodogram, lag-window spectral estimates and Toeplitz eigenvalue brackets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .base import AutocovarianceSequence, check_series
from .estimators import _acov, _tapered_column
from .tapers import get_taper

__all__ = [
    "SpectralFunction",
    "periodogram",
    "periodogram_fourier_grid",
    "lag_window_estimate",
    "trig_poly_max",
    "toeplitz_spectral_bounds",
    "acov_spectral_function",
    "model_spectral_function",
    "LagWindowSpectralDensity",
]


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    """Symmetric function on ``[-pi, pi]``.

    Parameters
    ----------
    evaluator : callable
        Vectorized ``theta -> value``.
    poly_order : int, optional
        Order when the function is a trigonometric polynomial.
    lipschitz : float, optional
        Known bound on ``|derivative|``, used to certify grid extrema.
    grid : callable, optional
        ``n -> values on linspace(0, pi, n)``; a fast path for dense grids.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    poly_order: Optional[int] = None
    lipschitz: Optional[float] = None
    grid: Optional[Callable[[int], np.ndarray]] = None

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.asarray(self.evaluator(theta.ravel()), dtype=float).reshape(theta.shape)
        return float(out) if out.ndim == 0 else out

    def on_grid(self, n: int) -> np.ndarray:
        if self.grid is not None:
            return np.asarray(self.grid(n), dtype=float)
        return self(np.linspace(0.0, np.pi, n))


def _cosine_series(coef: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    # theta -> coef[0] + 2 sum_{k>=1} coef[k] cos(k theta)
    k = np.arange(coef.size)
    w = coef.copy()
    w[1:] *= 2

    def evaluate(theta):
        theta = np.asarray(theta, dtype=float).ravel()
        out = np.empty(theta.size)
        chunk = max(1, 2_000_000 // k.size)
        for i in range(0, theta.size, chunk):
            out[i:i + chunk] = np.cos(np.outer(theta[i:i + chunk], k)) @ w
        return out

    return evaluate


def _cosine_series_grid(coef: np.ndarray) -> Callable[[int], np.ndarray]:
    def grid(n):
        N = 2 * (n - 1)
        full = np.zeros(max(N, 1))
        # fold lags mod N; symmetric extension gives a real spectrum
        idx = np.arange(coef.size)
        np.add.at(full, idx % N, coef)
        np.add.at(full, (-idx[1:]) % N, coef[1:])
        return np.fft.rfft(full).real

    return grid


def acov_spectral_function(acov, scale: float = 1 / (2 * np.pi)) -> SpectralFunction:
    """``scale * sum_{|k|<=kmax} gamma_k cos(k theta)`` as a trigonometric polynomial."""
    g = acov.values if isinstance(acov, AutocovarianceSequence) else np.asarray(acov, float)
    coef = scale * g
    lip = 2 * float(np.sum(np.arange(coef.size) * np.abs(coef)))
    return SpectralFunction(
        _cosine_series(coef), poly_order=coef.size - 1, lipschitz=lip,
        grid=_cosine_series_grid(coef),
    )


def model_spectral_function(model) -> SpectralFunction:
    """Spectral density of a linear model or a sparse-lag sequence model."""
    from .process import (
        LinearProcessModel, linear_spectral_density, spectral_density_grid,
        spectral_lipschitz,
    )

    if isinstance(model, LinearProcessModel):
        return SpectralFunction(
            lambda th: linear_spectral_density(model, th),
            poly_order=model.truncation_lag,
            lipschitz=spectral_lipschitz(model),
            grid=lambda n: spectral_density_grid(model, n),
        )
    # sequence-only models: the symbol is the (finite) trigonometric series
    if hasattr(model, "acov"):
        raise TypeError("use acov_spectral_function(model.acov(kmax)) for sequence models")
    raise TypeError(f"unsupported model {model!r}")


def periodogram(x, theta):
    """``I_T(theta) = T^{-1} |sum_t X_t e^{i t theta}|^2`` at scalar or array ``theta``."""
    x = check_series(x, min_length=1)
    theta = np.asarray(theta, dtype=float)
    flat = theta.ravel()
    t = np.arange(1, x.size + 1)
    out = np.empty(flat.size)
    chunk = max(1, 2_000_000 // x.size)
    for i in range(0, flat.size, chunk):
        ph = np.outer(flat[i:i + chunk], t)
        out[i:i + chunk] = (np.cos(ph) @ x) ** 2 + (np.sin(ph) @ x) ** 2
    out = (out / x.size).reshape(theta.shape)
    return float(out) if out.ndim == 0 else out


def periodogram_fourier_grid(x, full: bool = False) -> np.ndarray:
    """Periodogram at ``omega_s = 2 pi s / T`` via FFT.

    Returns ``s = 0..ceil(T/2)-1`` by default, or all ``s = 0..T-1`` with
    ``full=True``.
    """
    x = check_series(x)
    T = x.size
    I = np.abs(np.fft.fft(x)) ** 2 / T
    return I if full else I[: math.ceil(T / 2)]


def lag_window_estimate(x, taper, B: int, center: bool = False) -> SpectralFunction:
    """Lag-window estimate ``(1/2pi) sum_{|k|<=B} K(k/B) gamma_hat_k cos(k theta)``.

    ``2 pi`` times the result is the symbol of the tapered matrix estimate.
    """
    x = check_series(x)
    if center:
        x = x - x.mean()
    taper = get_taper(taper)
    col = _tapered_column(_acov(x, x.size - 1), taper, B)
    return acov_spectral_function(col[: int(B) + 1])


def trig_poly_max(s: SpectralFunction, delta: float = 1.0) -> float:
    """Certified upper bound on ``max |S|`` for a trigonometric polynomial.

    Evaluates ``S`` at ``x_j = 2 pi j / l``, ``j = 0..l`` with
    ``l = ceil(2 (1 + delta) n)`` and returns ``(1 + 1/delta)`` times the
    largest absolute value; the true maximum lies between the grid maximum
    and the returned value.
    """
    if s.poly_order is None:
        raise ValueError("trig_poly_max needs a trigonometric polynomial (poly_order)")
    if not delta > 0:
        raise ValueError("delta must be positive")
    l = math.ceil(2 * (1 + delta) * s.poly_order)
    grid = 2 * np.pi * np.arange(l + 1) / max(l, 1)
    return (1 + 1 / delta) * float(np.max(np.abs(s(grid))))


def toeplitz_spectral_bounds(symbol: SpectralFunction, T: int, n_grid: int | None = None):
    """Certified bracket ``(2 pi min h, 2 pi max h)`` for the eigenvalues of the
    T x T Toeplitz matrix whose symbol is ``2 pi h``.

    Extrema are taken on a uniform grid over ``[0, pi]`` (the symbol is
    symmetric) and widened by half a grid step times a derivative bound: the
    function's ``lipschitz`` attribute, or Bernstein's inequality for
    trigonometric polynomials.
    """
    if int(T) != T or T < 1:
        raise ValueError("T must be a positive integer")
    if n_grid is None:
        n_grid = max(1 << 14, 8 * (symbol.poly_order or 0)) + 1
    vals = symbol.on_grid(n_grid)
    lo, hi = float(vals.min()), float(vals.max())
    if symbol.lipschitz is not None:
        lip = symbol.lipschitz
    elif symbol.poly_order is not None:
        lip = symbol.poly_order * trig_poly_max(symbol, 1.0)
    else:
        raise ValueError("cannot certify extrema without lipschitz or poly_order")
    slack = lip * (np.pi / (n_grid - 1)) / 2
    return 2 * np.pi * (lo - slack), 2 * np.pi * (hi + slack)


class LagWindowSpectralDensity(BaseEstimator):
    """Lag-window spectral density estimator.

    Parameters
    ----------
    bandwidth : int
    taper : str or Taper, default="bartlett"
    center : bool, default=False
    """

    def __init__(self, bandwidth=1, taper="bartlett", center=False):
        self.bandwidth = bandwidth
        self.taper = taper
        self.center = center

    def fit(self, X, y=None):
        self.spectral_function_ = lag_window_estimate(X, self.taper, self.bandwidth, self.center)
        return self

    def predict(self, theta):
        """Estimated spectral density at frequencies ``theta``."""
        check_is_fitted(self, "spectral_function_")
        return np.asarray(self.spectral_function_(np.asarray(theta, dtype=float)))
