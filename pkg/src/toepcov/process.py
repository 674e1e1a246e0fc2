"""Linear (MA(infinity)) process models with Gaussian innovations.

A model is a coefficient sequence ``a_0, a_1, ...`` truncated at a lag ``L``
chosen so the discarded l2 tail is negligible. Everything else (exact
autocovariances, spectral density, physical dependence measures, sample
paths) is derived from the materialized coefficients, so the simulated
process and its reported truth are the same finite-L linear filter.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property, partial
from typing import Callable, Optional

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft
from scipy.signal import fftconvolve
from scipy.special import gammaln

from .base import AutocovarianceSequence, check_lag

__all__ = [
    "LinearProcessModel",
    "SparseLagProcess",
    "DependenceProfile",
    "x_process",
    "y_process",
    "ma",
    "ar1",
    "white_noise",
    "linear_acov",
    "linear_spectral_density",
    "dependence_profile",
    "physical_dependence",
    "gaussian_abs_moment",
    "zeta",
    "simulate",
    "sparse_lag_acov",
    "parse_model",
    "model_from_dict",
]

MAX_TRUNCATION = 10**6
TAIL_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class LinearProcessModel:
    """Causal linear process ``X_t = sigma * sum_s a_s eps_{t-s}``, ``eps`` i.i.d. N(0, 1).

    Parameters
    ----------
    coefficients : callable
        Maps an integer array of lags ``s >= 0`` to the coefficients ``a_s``.
    truncation_lag : int
        Largest lag ``L`` retained when materializing the coefficients.
    innovation_sd : float
        Standard deviation ``sigma`` of the innovations.
    kind, params : str, dict
        Preset name and parameters, used for serialization.
    """

    coefficients: Callable[[np.ndarray], np.ndarray]
    truncation_lag: int
    innovation_sd: float = 1.0
    kind: str = "linear"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if int(self.truncation_lag) != self.truncation_lag or self.truncation_lag < 0:
            raise ValueError("truncation_lag must be a nonnegative integer")
        if not self.innovation_sd > 0:
            raise ValueError("innovation_sd must be positive")

    @cached_property
    def coefficient_array(self) -> np.ndarray:
        a = np.asarray(
            self.coefficients(np.arange(self.truncation_lag + 1)), dtype=float
        )
        if a.shape != (self.truncation_lag + 1,) or not np.all(np.isfinite(a)):
            raise ValueError("coefficients must be finite for every lag")
        a.setflags(write=False)
        return a

    @cached_property
    def autocovariances(self) -> np.ndarray:
        """Exact ``gamma_0..gamma_L`` of the truncated filter."""
        a = self.coefficient_array
        L = a.size - 1
        if L <= 4096:
            g = np.correlate(a, a, mode="full")[L:]
        else:
            n = next_fast_len(2 * L + 1, real=True)
            fa = rfft(a, n)
            g = irfft(fa.real**2 + fa.imag**2, n)[: L + 1]
        g = self.innovation_sd**2 * g
        g.setflags(write=False)
        return g

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.kind}({args}; L={self.truncation_lag})"


@dataclass(frozen=True)
class SparseLagProcess:
    """Autocovariance-only model: ``gamma_0 = 3``, ``gamma_{A^j} = A^{-alpha j}``.

    No sample paths are available; only the sequence is modeled.
    """

    A: int
    alpha: float

    def __post_init__(self):
        _check_sparse_lag(self.A, self.alpha)

    def acov(self, kmax: int) -> AutocovarianceSequence:
        return sparse_lag_acov(self.A, self.alpha, kmax)

    @property
    def kind(self):
        return "sparse-lag"

    def to_dict(self) -> dict:
        return {"kind": "sparse-lag", "params": {"A": self.A, "alpha": self.alpha}}


# -- coefficient sequences (module level so models pickle) -------------------


def _x_coefficients(s, c, alpha):
    s = np.asarray(s, dtype=float)
    out = np.ones_like(s)
    pos = s > 0
    out[pos] = c * s[pos] ** (-(1.0 + alpha))
    return out


def _y_coefficients(s, c, alpha):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    out[s == 0] = 1.0
    even = (s > 0) & (np.mod(s, 2) == 0)
    out[even] = c * (s[even] / 2.0) ** (-(1.0 + alpha))
    return out


def _finite_coefficients(s, coeffs):
    s = np.asarray(s, dtype=int)
    out = np.zeros(s.shape)
    inside = s < len(coeffs)
    out[inside] = np.asarray(coeffs)[s[inside]]
    return out


def _geometric_coefficients(s, phi):
    return float(phi) ** np.asarray(s, dtype=float)


def _power_law_truncation(c, alpha, spacing, total_sq):
    # l2 tail of c*(s/spacing)^-(1+alpha) beyond L <= spacing*c^2*(L/spacing)^-(1+2a)/(1+2a)
    beta = 1.0 + 2.0 * alpha
    m = (spacing * c**2 / (beta * TAIL_RTOL * total_sq)) ** (1.0 / beta)
    return int(min(MAX_TRUNCATION, spacing * math.ceil(m)))


def x_process(c: float = 0.5, alpha: float = 1.0, innovation_sd: float = 1.0,
              truncation_lag: Optional[int] = None) -> LinearProcessModel:
    """``a_0 = 1``, ``a_s = c s^{-(1+alpha)}`` for ``s > 0``."""
    if not (c > 0 and alpha > 0):
        raise ValueError("x-process needs c > 0 and alpha > 0")
    if truncation_lag is None:
        total = 1.0 + c**2 * _zeta_sum(2 + 2 * alpha)
        truncation_lag = _power_law_truncation(c, alpha, 1, total)
    return LinearProcessModel(
        partial(_x_coefficients, c=c, alpha=alpha), truncation_lag,
        innovation_sd, "x-process", {"c": c, "alpha": alpha},
    )


def y_process(c: float = 0.5, alpha: float = 1.0, innovation_sd: float = 1.0,
              truncation_lag: Optional[int] = None) -> LinearProcessModel:
    """``b_0 = 1``, ``b_s = c (s/2)^{-(1+alpha)}`` for even ``s > 0``, zero for odd ``s``."""
    if not (c > 0 and alpha > 0):
        raise ValueError("y-process needs c > 0 and alpha > 0")
    if truncation_lag is None:
        total = 1.0 + c**2 * _zeta_sum(2 + 2 * alpha)
        truncation_lag = _power_law_truncation(c, alpha, 2, total)
    return LinearProcessModel(
        partial(_y_coefficients, c=c, alpha=alpha), truncation_lag,
        innovation_sd, "y-process", {"c": c, "alpha": alpha},
    )


def ma(coeffs, innovation_sd: float = 1.0) -> LinearProcessModel:
    """Finite moving average with coefficients ``a_0, ..., a_q`` (``a_0`` included)."""
    coeffs = tuple(float(v) for v in np.atleast_1d(coeffs))
    if not coeffs or not all(math.isfinite(v) for v in coeffs):
        raise ValueError("ma needs at least one finite coefficient")
    return LinearProcessModel(
        partial(_finite_coefficients, coeffs=coeffs), len(coeffs) - 1,
        innovation_sd, "ma", {"coeffs": list(coeffs)},
    )


def ar1(phi: float, innovation_sd: float = 1.0) -> LinearProcessModel:
    """AR(1) materialized as the geometric MA filter ``a_t = phi^t``."""
    if not abs(phi) < 1:
        raise ValueError("ar1 needs |phi| < 1")
    if phi == 0:
        L = 0
    else:
        # l1 tail |phi|^(L+1) / (1 - |phi|) below 1e-13 of the total
        L = int(min(MAX_TRUNCATION, math.ceil(math.log(1e-13) / math.log(abs(phi)))))
    return LinearProcessModel(
        partial(_geometric_coefficients, phi=phi), L,
        innovation_sd, "ar1", {"phi": phi},
    )


def white_noise(innovation_sd: float = 1.0) -> LinearProcessModel:
    return LinearProcessModel(
        partial(_finite_coefficients, coeffs=(1.0,)), 0,
        innovation_sd, "white-noise", {},
    )


def _zeta_sum(s):
    from scipy.special import zeta as riemann_zeta

    return float(riemann_zeta(s, 1))


# -- autocovariances and spectra ---------------------------------------------


def linear_acov(model: LinearProcessModel, kmax: int) -> AutocovarianceSequence:
    """Exact autocovariances ``gamma_k = sigma^2 sum_j a_j a_{j+k}`` for ``0 <= k <= kmax``.

    Lags beyond the truncation lag are zero. ``tail_bound`` carries the exact
    ``sum_{k > kmax} |gamma_k|`` of the truncated filter.
    """
    if isinstance(kmax, (bool, np.bool_)) or int(kmax) != kmax or kmax < 0:
        raise ValueError(f"kmax must be a nonnegative integer, got {kmax!r}")
    kmax = int(kmax)
    g = model.autocovariances
    values = np.zeros(kmax + 1)
    m = min(kmax + 1, g.size)
    values[:m] = g[:m]
    tail = float(np.sum(np.abs(g[kmax + 1:]))) if kmax + 1 < g.size else 0.0
    return AutocovarianceSequence(values, tail_bound=tail)


def _fold(a: np.ndarray, n: int) -> np.ndarray:
    if a.size <= n:
        return a
    return np.bincount(np.arange(a.size) % n, weights=a, minlength=n)


def transfer_on_grid(model: LinearProcessModel, n: int) -> np.ndarray:
    """``sum_s a_s e^{i s theta}`` at ``theta = linspace(0, pi, n)`` via one rfft."""
    N = 2 * (n - 1)
    a = _fold(model.coefficient_array, N)
    return np.conj(rfft(a, N))


def linear_spectral_density(model: LinearProcessModel, theta):
    """Spectral density ``f(theta) = sigma^2 / (2 pi) |sum_s a_s e^{i s theta}|^2``.

    ``theta`` may be a scalar or an array; values outside ``[-pi, pi]`` are
    wrapped by periodicity.
    """
    theta = np.asarray(theta, dtype=float)
    flat = np.mod(theta.ravel() + np.pi, 2 * np.pi) - np.pi
    a = model.coefficient_array
    out = np.empty(flat.size)
    s = np.arange(a.size)
    chunk = max(1, 2_000_000 // a.size)
    for i in range(0, flat.size, chunk):
        th = flat[i:i + chunk]
        ph = np.outer(th, s)
        re = np.cos(ph) @ a
        im = np.sin(ph) @ a
        out[i:i + chunk] = re**2 + im**2
    out *= model.innovation_sd**2 / (2 * np.pi)
    out = out.reshape(theta.shape)
    return float(out) if out.ndim == 0 else out


def spectral_density_grid(model: LinearProcessModel, n: int) -> np.ndarray:
    """Spectral density on ``linspace(0, pi, n)``."""
    h = transfer_on_grid(model, n)
    return model.innovation_sd**2 / (2 * np.pi) * (h.real**2 + h.imag**2)


def spectral_lipschitz(model: LinearProcessModel) -> float:
    """Upper bound on ``|f'(theta)|``: ``sigma^2/pi * sum|a_s| * sum s|a_s|``."""
    a = np.abs(model.coefficient_array)
    s = np.arange(a.size)
    return model.innovation_sd**2 / np.pi * float(a.sum() * (s * a).sum())


# -- physical dependence ------------------------------------------------------


def gaussian_abs_moment(p: float) -> float:
    """``(E|Z|^p)^{1/p}`` for standard normal ``Z``."""
    if not p > 0:
        raise ValueError("p must be positive")
    log_m = 0.5 * p * math.log(2) + gammaln((p + 1) / 2) - 0.5 * math.log(math.pi)
    return math.exp(log_m / p)


def physical_dependence(model: LinearProcessModel, p: float) -> np.ndarray:
    """``delta_p(t) = |a_t| * ||eps_0 - eps_0'||_p`` for ``t = 0..L``.

    The innovation difference is N(0, 2 sigma^2), so its p-norm is
    ``sqrt(2) sigma nu_p``.
    """
    scale = math.sqrt(2.0) * model.innovation_sd * gaussian_abs_moment(p)
    return scale * np.abs(model.coefficient_array)


def _moment_constant(p):
    return 1.0 / (p - 1) if p <= 2 else math.sqrt(p - 1)


@dataclass(frozen=True, eq=False)
class DependenceProfile:
    """Tail sums of the physical dependence measures of a linear model.

    ``theta(m) = sum_{t>=m} delta_p(t)``,
    ``psi(m) = (sum_{t>=m} delta_p(t)^{p'})^{1/p'}`` with ``p' = min(2, p)``,
    ``delta_tail(m) = sum_{t>=0} min(C_p psi(m), delta_p(t))``.
    """

    p: float
    delta: np.ndarray
    theta_tail: np.ndarray
    psi_tail: np.ndarray
    moment_constant: float

    def _at(self, arr, m):
        m = np.asarray(m)
        if np.any(m < 0):
            raise ValueError("m must be nonnegative")
        out = arr[np.minimum(m, arr.size - 1)]
        return float(out) if out.ndim == 0 else out

    def theta(self, m):
        return self._at(self.theta_tail, m)

    def psi(self, m):
        return self._at(self.psi_tail, m)

    def delta_tail(self, m):
        cap = self.moment_constant * np.atleast_1d(self.psi(m))
        out = np.minimum(cap[:, None], self.delta[None, :]).sum(axis=1)
        return float(out[0]) if np.ndim(m) == 0 else out


def dependence_profile(model: LinearProcessModel, p: float) -> DependenceProfile:
    """Dependence profile at moment order ``p > 2``."""
    if not p > 2:
        raise ValueError(f"dependence_profile needs p > 2, got {p}")
    delta = physical_dependence(model, p)
    p_prime = min(2.0, p)
    # trailing zero makes index L+1 (and beyond) the empty tail
    theta_tail = np.append(np.cumsum(delta[::-1])[::-1], 0.0)
    psi_tail = np.append(np.cumsum((delta**p_prime)[::-1])[::-1], 0.0) ** (1 / p_prime)
    return DependenceProfile(p, delta, theta_tail, psi_tail, _moment_constant(p))


def zeta(model: LinearProcessModel, p: float, k: int) -> float:
    """``zeta_p(k) = sum_j delta_p(j) delta_p(j + k)``; ``zeta_2`` dominates ``|gamma_k|``."""
    if isinstance(k, (bool, np.bool_)) or int(k) != k or k < 0:
        raise ValueError(f"k must be a nonnegative integer, got {k!r}")
    d = physical_dependence(model, p)
    k = int(k)
    if k >= d.size:
        return 0.0
    return float(np.dot(d[: d.size - k], d[k:]))


# -- simulation ---------------------------------------------------------------


def simulate(model: LinearProcessModel, T: int, seed=None) -> np.ndarray:
    """Sample ``X_1..X_T`` using ``L + T`` Gaussian innovations.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    T = check_lag(T, upper=np.iinfo(np.int64).max, name="T", lower=1)
    rng = np.random.default_rng(seed)
    a = model.coefficient_array
    eps = rng.standard_normal(a.size - 1 + T)
    if a.size > 64:
        x = fftconvolve(eps, a, mode="valid")
    else:
        x = np.convolve(eps, a, mode="valid")
    return model.innovation_sd * x


# -- the sparse-lag sequence --------------------------------------------------


def _check_sparse_lag(A, alpha):
    if isinstance(A, (bool, np.bool_)) or int(A) != A or A < 2 or A % 2:
        raise ValueError(f"A must be an even integer >= 2, got {A!r}")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if float(A) ** (-alpha) > 0.2:
        raise ValueError(f"need A^-alpha <= 1/5, got {float(A) ** (-alpha):.4g}")


def sparse_lag_acov(A: int, alpha: float, kmax: int) -> AutocovarianceSequence:
    """``gamma_0 = 3``; ``gamma_k = A^{-alpha j}`` when ``k = A^j`` (``j >= 1``), else 0."""
    _check_sparse_lag(A, alpha)
    if isinstance(kmax, (bool, np.bool_)) or int(kmax) != kmax or kmax < 0:
        raise ValueError(f"kmax must be a nonnegative integer, got {kmax!r}")
    A, kmax = int(A), int(kmax)
    values = np.zeros(kmax + 1)
    values[0] = 3.0
    j, k = 1, A
    while k <= kmax:
        values[k] = float(A) ** (-alpha * j)
        j, k = j + 1, k * A
    r = float(A) ** (-alpha)
    tail = r**j / (1 - r)
    return AutocovarianceSequence(values, tail_bound=tail)


# -- presets ------------------------------------------------------------------

_PRESET = re.compile(r"^\s*([a-z0-9\-]+)\s*(?:\((.*)\))?\s*$", re.IGNORECASE)


def model_from_dict(d: dict):
    """Build a model from ``{"kind": ..., "params": {...}}``."""
    kind = str(d["kind"]).lower()
    params = dict(d.get("params") or {})
    if kind == "x-process":
        return x_process(**params)
    if kind == "y-process":
        return y_process(**params)
    if kind == "ma":
        return ma(params.pop("coeffs"), **params)
    if kind == "ar1":
        return ar1(**params)
    if kind == "white-noise":
        return white_noise(**params)
    if kind == "sparse-lag":
        return SparseLagProcess(int(params["A"]), float(params["alpha"]))
    raise ValueError(f"unknown model kind {kind!r}")


def parse_model(text: str):
    """Parse presets such as ``"x-process(0.5,1)"``, ``"ma(1,0.5)"``, ``"ar1(0.5)"``,
    ``"white-noise"`` or ``"sparse-lag(4,2)"``."""
    m = _PRESET.match(text)
    if not m:
        raise ValueError(f"cannot parse model {text!r}")
    kind = m.group(1).lower()
    args = [float(v) for v in m.group(2).split(",")] if m.group(2) and m.group(2).strip() else []
    if kind in ("x-process", "y-process"):
        if len(args) != 2:
            raise ValueError(f"{kind} takes (c, alpha)")
        return model_from_dict({"kind": kind, "params": {"c": args[0], "alpha": args[1]}})
    if kind == "ma":
        return ma(args)
    if kind == "ar1":
        if len(args) != 1:
            raise ValueError("ar1 takes (phi)")
        return ar1(args[0])
    if kind == "white-noise":
        return white_noise()
    if kind == "sparse-lag":
        if len(args) != 2:
            raise ValueError("sparse-lag takes (A, alpha)")
        return SparseLagProcess(int(args[0]), args[1])
    raise ValueError(f"unknown model kind {kind!r}")
