"""Monte Carlo harness: oracle-tuned banding vs thresholding, rate and bracket checks.

Replicate ``r`` of a run seeded with ``seed`` draws from the stream
``SeedSequence(seed, spawn_key=(..., r))``, so results do not depend on how
replicates are scheduled across workers.
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from .base import SymmetricToeplitz, check_series
from .estimators import _acov, _hard_threshold, theoretical_bandwidth, theoretical_threshold
from .linalg import operator_norm, operator_norms
from .process import LinearProcessModel, linear_acov, physical_dependence, simulate
from .spectral import model_spectral_function, toeplitz_spectral_bounds
from .tapers import RECTANGULAR, Taper, get_taper

__all__ = [
    "ESTIMATORS",
    "ExperimentConfig",
    "EstimatorSummary",
    "ExperimentReport",
    "RateCheckResult",
    "BracketRow",
    "BracketCheckResult",
    "oracle_bandwidth",
    "oracle_threshold",
    "oracle_threshold_after_banding",
    "run_table_cell",
    "theorem1_bracket",
    "theorem1_bracket_check",
    "rate_check",
    "replicate_rng",
    "default_n_jobs",
]

ESTIMATORS = ("banded", "thresholded", "plug_in", "threshold_after_banding")


def default_n_jobs() -> int:
    """Worker count: CPU count, capped by ``TOEPCOV_THREADS`` when set."""
    n = os.cpu_count() or 1
    cap = os.environ.get("TOEPCOV_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def replicate_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def _map_replicates(fn, n: int, n_jobs: Optional[int], *args):
    n_jobs = default_n_jobs() if n_jobs is None else n_jobs
    n_jobs = max(1, min(n_jobs, n))
    if n_jobs == 1:
        return [fn(r, *args) for r in range(n)]
    chunks = np.array_split(np.arange(n), n_jobs)
    parts = Parallel(n_jobs=n_jobs)(
        delayed(_run_chunk)(fn, chunk, args) for chunk in chunks
    )
    return [item for part in parts for item in part]


def _run_chunk(fn, chunk, args):
    return [fn(int(r), *args) for r in chunk]


# -- oracle selection -----------------------------------------------------------


def _truth_column(truth, T):
    col = truth.first_column if isinstance(truth, SymmetricToeplitz) else np.asarray(truth, float)
    if col.size != T:
        raise ValueError(f"truth has dimension {col.size}, series has length {T}")
    return col


def _oracle_bandwidth_from_acov(g, truth_col, taper):
    T = g.size
    B = np.arange(1, T)
    weights = taper(np.arange(T)[None, :] / B[:, None])
    errors = operator_norms(weights * g - truth_col)
    i = int(np.argmin(errors))  # first minimum: smallest bandwidth on ties
    return int(B[i]), float(errors[i])


def oracle_bandwidth(x, truth, taper=RECTANGULAR):
    """Bandwidth in ``1..T-1`` minimizing the operator-norm error against ``truth``.

    Returns ``(bandwidth, error)``; ties go to the smaller bandwidth.
    """
    x = check_series(x)
    truth_col = _truth_column(truth, x.size)
    return _oracle_bandwidth_from_acov(_acov(x, x.size - 1), truth_col, get_taper(taper))


def _oracle_threshold_from_column(col, truth_col):
    cands = np.unique(np.abs(col))[::-1]  # descending: ties go to the larger threshold
    keep = np.abs(col)[None, :] >= cands[:, None]
    keep[:, 0] = True
    errors = operator_norms(np.where(keep, col, 0.0) - truth_col)
    i = int(np.argmin(errors))
    return float(cands[i]), float(errors[i])


def oracle_threshold(x, truth):
    """Threshold among ``{|gamma_hat_k| : 0 <= k < T}`` minimizing the error against ``truth``.

    Returns ``(threshold, error)``; ties go to the larger (sparser) threshold.
    """
    x = check_series(x)
    truth_col = _truth_column(truth, x.size)
    return _oracle_threshold_from_column(_acov(x, x.size - 1), truth_col)


def oracle_threshold_after_banding(x, truth, taper=RECTANGULAR):
    """Oracle bandwidth first, then the oracle threshold on the banded entries.

    Returns ``(bandwidth, threshold, error)``.
    """
    x = check_series(x)
    taper = get_taper(taper)
    truth_col = _truth_column(truth, x.size)
    g = _acov(x, x.size - 1)
    B, _ = _oracle_bandwidth_from_acov(g, truth_col, taper)
    col = taper.weights(B, g.size) * g
    A, err = _oracle_threshold_from_column(col, truth_col)
    return B, A, err


def _nonzero_lags(col):
    return int(np.count_nonzero(col))


# -- table cells ------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """One (model, T) cell of the simulation tables."""

    model: LinearProcessModel
    T: int
    replications: int = 1000
    seed: int = 0
    estimators: Sequence[str] = ("banded", "thresholded", "plug_in")
    taper: Taper = RECTANGULAR
    center: bool = True
    n_jobs: Optional[int] = None

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.T < 4:
            raise ValueError("T must be >= 4")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown:
            raise ValueError(f"unknown estimators {sorted(unknown)}")
        self.estimators = tuple(e for e in ESTIMATORS if e in self.estimators)
        self.taper = get_taper(self.taper)

    def echo(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "truncation_lag": self.model.truncation_lag,
            "T": self.T,
            "replications": self.replications,
            "seed": self.seed,
            "estimators": list(self.estimators),
            "taper": self.taper.name,
            "center": self.center,
        }


@dataclass
class EstimatorSummary:
    mean_error: float
    sd_error: float
    mean_bandwidth_or_nnz: Optional[float]
    sd_bandwidth_or_nnz: Optional[float]
    replications: int


@dataclass
class ExperimentReport:
    config: dict
    summaries: dict
    errors: dict = field(repr=False)
    statistics: dict = field(repr=False)
    selected: dict = field(repr=False)

    def to_dict(self, include_replicates: bool = False) -> dict:
        d = {
            "config": self.config,
            "summaries": {k: asdict(v) for k, v in self.summaries.items()},
        }
        if include_replicates:
            d["replicates"] = {
                k: {"error": self.errors[k].tolist(),
                    "bandwidth_or_nnz": self.statistics[k].tolist(),
                    "selected": self.selected[k].tolist()}
                for k in self.errors
            }
        return d

    def table_lines(self) -> list[str]:
        """One ``error (sd) & stat (sd)`` line per estimator, in table order."""
        lines = []
        for name, s in self.summaries.items():
            text = f"{s.mean_error:.2f} ({s.sd_error:.2f})"
            if s.mean_bandwidth_or_nnz is not None:
                text += f" & {s.mean_bandwidth_or_nnz:.2f} ({s.sd_bandwidth_or_nnz:.2f})"
            lines.append(f"{name:>24}: {text}")
        return lines

    def to_table(self) -> str:
        m = self.config["model"]
        params = ", ".join(f"{k}={v}" for k, v in m["params"].items())
        head = f"{m['kind']}({params})  T={self.config['T']}  reps={self.config['replications']}"
        return "\n".join([head] + self.table_lines())


def _table_replicate(r, config: ExperimentConfig, truth_col):
    x = simulate(config.model, config.T, replicate_rng(config.seed, r))
    if config.center:
        x = x - x.mean()
    g = _acov(x, x.size - 1)
    out = {}
    B = None
    if "banded" in config.estimators or "threshold_after_banding" in config.estimators:
        B, err = _oracle_bandwidth_from_acov(g, truth_col, config.taper)
        if "banded" in config.estimators:
            # diagonals 0..B, counted like the thresholded statistic
            out["banded"] = (err, float(B + 1), float(B))
    if "thresholded" in config.estimators:
        A, err = _oracle_threshold_from_column(g, truth_col)
        out["thresholded"] = (err, float(_nonzero_lags(_hard_threshold(g, A))), A)
    if "plug_in" in config.estimators:
        out["plug_in"] = (float(operator_norms(g - truth_col)[0]), np.nan, np.nan)
    if "threshold_after_banding" in config.estimators:
        col = config.taper.weights(B, g.size) * g
        A, err = _oracle_threshold_from_column(col, truth_col)
        out["threshold_after_banding"] = (
            err, float(_nonzero_lags(_hard_threshold(col, A))), A)
    return out


def run_table_cell(config: ExperimentConfig) -> ExperimentReport:
    """Run one table cell with oracle bandwidth/threshold selection.

    Reported spreads are population standard deviations over replicates.
    The size statistic counts the lags ``k >= 0`` carried by the estimate:
    ``B + 1`` for the oracle band, the nonzero lags for thresholding. The raw
    oracle bandwidth ``B`` or threshold ``A`` is kept in ``selected``.
    """
    truth_col = linear_acov(config.model, config.T - 1).values
    results = _map_replicates(_table_replicate, config.replications,
                              config.n_jobs, config, truth_col)
    errors, stats, selected, summaries = {}, {}, {}, {}
    for name in config.estimators:
        e = np.array([res[name][0] for res in results])
        b = np.array([res[name][1] for res in results])
        errors[name], stats[name] = e, b
        selected[name] = np.array([res[name][2] for res in results])
        has_stat = not np.all(np.isnan(b))
        summaries[name] = EstimatorSummary(
            float(e.mean()), float(e.std()),
            float(b.mean()) if has_stat else None,
            float(b.std()) if has_stat else None,
            config.replications,
        )
    return ExperimentReport(config.echo(), summaries, errors, stats, selected)


# -- consistency checks ---------------------------------------------------------------


@dataclass
class RateCheckResult:
    T_grid: list
    mean_errors: list
    parameters: list
    fitted_slope: float
    theoretical_slope: float
    estimator: str

    def to_dict(self) -> dict:
        return asdict(self)


def _rate_replicate(r, i, model, T, seed, estimator, param, truth_col):
    x = simulate(model, T, replicate_rng(seed, i, r))
    g = _acov(x, T - 1)
    if estimator == "banded_theoretical_B":
        col = np.where(np.arange(T) <= param, g, 0.0)
    else:
        col = _hard_threshold(g, param)
    return operator_norm(SymmetricToeplitz(col - truth_col)).value


def rate_check(model: LinearProcessModel, estimator: str, T_grid: Sequence[int],
               replications: int, seed: int = 0, alpha: Optional[float] = None,
               p: float = 8.0, n_jobs: Optional[int] = None) -> RateCheckResult:
    """Regress log mean error on ``log(log T / T)`` using theoretical tuning.

    ``banded_theoretical_B`` bands at ``round((T / log T)^{1/(2 alpha + 1)})``
    (slope ``alpha / (2 alpha + 1)``); ``thresholded_theoretical_A`` thresholds
    at ``2 c'_p sqrt(log T / T)`` (slope ``alpha / (2 (1 + alpha))``).
    ``alpha`` defaults to the model's decay parameter.
    """
    if estimator not in ("banded_theoretical_B", "thresholded_theoretical_A"):
        raise ValueError(f"unknown estimator {estimator!r}")
    T_grid = [int(t) for t in T_grid]
    if len(T_grid) < 3:
        raise ValueError("rate_check needs at least 3 sample sizes")
    if any(b <= a for a, b in zip(T_grid, T_grid[1:])):
        raise ValueError("T_grid must be strictly increasing")
    if alpha is None:
        alpha = model.params.get("alpha")
        if alpha is None:
            raise ValueError("model has no alpha parameter; pass alpha explicitly")
    means, params = [], []
    for i, T in enumerate(T_grid):
        if estimator == "banded_theoretical_B":
            param = theoretical_bandwidth(T, alpha)
        else:
            param = theoretical_threshold(model, T, p)
        truth_col = linear_acov(model, T - 1).values
        errs = _map_replicates(_rate_replicate, replications, n_jobs,
                               i, model, T, seed, estimator, param, truth_col)
        means.append(float(np.mean(errs)))
        params.append(param)
    xs = np.log(np.log(T_grid) / np.asarray(T_grid, float))
    slope = float(np.polyfit(xs, np.log(means), 1)[0])
    theory = alpha / (2 * alpha + 1) if estimator == "banded_theoretical_B" else alpha / (2 * (1 + alpha))
    return RateCheckResult(T_grid, means, params, slope, theory, estimator)


@dataclass
class BracketRow:
    T: int
    lower: float
    upper: float
    containment: float
    median_norm: float
    mean_norm_over_log_T: float
    sd_norm_over_log_T: float


@dataclass
class BracketCheckResult:
    f_min: float
    theta2: float
    rows: list
    norms: dict = field(repr=False)

    def median_ratio(self, T_hi: int, T_lo: int) -> float:
        by_T = {row.T: row for row in self.rows}
        return by_T[T_hi].median_norm / by_T[T_lo].median_norm

    def to_dict(self) -> dict:
        return {"f_min": self.f_min, "theta2": self.theta2,
                "rows": [asdict(r) for r in self.rows]}


def theorem1_bracket(model: LinearProcessModel, T: int):
    """``(pi f_min^2 log T / (12 Theta_2^2), 10 Theta_2^2 log T)`` plus ``f_min``, ``Theta_2``.

    ``f_min`` is the certified lower end of the spectral density range.
    """
    lo, _ = toeplitz_spectral_bounds(model_spectral_function(model), T)
    f_min = lo / (2 * np.pi)
    if f_min <= 0:
        raise ValueError("spectral density minimum is not certified positive")
    theta2 = float(physical_dependence(model, 2).sum())
    logT = math.log(T)
    return (np.pi * f_min**2 * logT / (12 * theta2**2), 10 * theta2**2 * logT, f_min, theta2)


def _plug_in_norm(r, i, model, T, seed):
    x = simulate(model, T, replicate_rng(seed, i, r))
    return operator_norm(SymmetricToeplitz(_acov(x, T - 1))).value


def theorem1_bracket_check(model: LinearProcessModel, T_grid: Sequence[int],
                           replications: int, seed: int = 0,
                           n_jobs: Optional[int] = None) -> BracketCheckResult:
    """Frequency with which the plug-in norm falls inside the log T bracket, per T."""
    rows, norms = [], {}
    f_min = theta2 = None
    for i, T in enumerate(int(t) for t in T_grid):
        lower, upper, f_min, theta2 = theorem1_bracket(model, T)
        lam = np.array(_map_replicates(_plug_in_norm, replications, n_jobs, i, model, T, seed))
        norms[T] = lam
        ratio = lam / math.log(T)
        rows.append(BracketRow(
            T, lower, upper, float(np.mean((lam >= lower) & (lam <= upper))),
            float(np.median(lam)), float(ratio.mean()), float(ratio.std()),
        ))
    return BracketCheckResult(f_min, theta2, rows, norms)
