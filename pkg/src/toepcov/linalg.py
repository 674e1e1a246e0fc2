"""Symmetric Toeplitz linear algebra: FFT matvec and operator norms."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .base import SymmetricToeplitz, _check_same_dimension

__all__ = [
    "NormResult",
    "NormConvergenceError",
    "toeplitz_matvec",
    "toeplitz_operator",
    "gershgorin_bound",
    "operator_norm",
    "norm_of_difference",
    "operator_norms",
    "DENSE_THRESHOLD",
]

DENSE_THRESHOLD = int(os.environ.get("TOEPCOV_DENSE_THRESHOLD", 1024))


@dataclass(frozen=True)
class NormResult:
    value: float
    method: str
    iterations: int
    residual: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "iterations": self.iterations,
            "residual": self.residual,
        }


class NormConvergenceError(RuntimeError):
    """Iterative norm did not converge; carries the best estimate so far."""

    def __init__(self, message, estimate, residual):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual


def toeplitz_matvec(m: SymmetricToeplitz, v) -> np.ndarray:
    """``(c_{|s-t|}) v`` in O(T log T) through a circulant embedding.

    ``v`` may also be 2-D with one column per vector.
    """
    v = np.asarray(v, dtype=float)
    T = m.dimension
    if v.shape[0] != T:
        raise ValueError(f"dimension mismatch: matrix {T}, vector {v.shape[0]}")
    spec = m.circulant_spectrum
    n = 2 * (spec.size - 1)
    if v.ndim == 1:
        return np.fft.irfft(spec * np.fft.rfft(v, n), n)[:T]
    fv = np.fft.rfft(v, n, axis=0)
    return np.fft.irfft(spec[:, None] * fv, n, axis=0)[:T]


def toeplitz_operator(m: SymmetricToeplitz, counter=None) -> LinearOperator:
    """Wrap ``m`` as a scipy ``LinearOperator``; ``counter`` is a one-item list
    incremented per matvec."""

    def mv(v):
        if counter is not None:
            counter[0] += 1
        return toeplitz_matvec(m, np.ravel(v))

    return LinearOperator(m.shape, matvec=mv, rmatvec=mv, dtype=float)


def gershgorin_bound(m: SymmetricToeplitz) -> float:
    """``|c_0| + 2 sum_{k>=1} |c_k|``, an upper bound on the spectral radius."""
    c = np.abs(m.first_column)
    return float(c[0] + 2 * c[1:].sum())


def _dense_norm(m):
    w = eigvalsh(m.to_dense(), check_finite=False)
    return NormResult(float(max(abs(w[0]), abs(w[-1]))), "dense", 0, 0.0)


def operator_norm(m: SymmetricToeplitz, tol: float = 1e-10, method: str = "auto",
                  dense_threshold: int | None = None, max_iter: int | None = None) -> NormResult:
    """Spectral radius ``max(|lambda_min|, |lambda_max|)``.

    Parameters
    ----------
    m : SymmetricToeplitz
    tol : float
        Relative accuracy of the iterative eigenvalues; the reported residual
        ``||A v - lambda v||`` must not exceed ``tol`` times the Gershgorin bound.
    method : {"auto", "dense", "iterative"}
        ``auto`` uses a dense symmetric eigensolve up to ``dense_threshold``.
    max_iter : int, optional
        Iteration cap for the Lanczos solver, default ``10 * T``.

    Raises
    ------
    NormConvergenceError
        When the iterative solver fails to reach ``tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if method not in ("auto", "dense", "iterative"):
        raise ValueError(f"unknown method {method!r}")
    T = m.dimension
    if dense_threshold is None:
        dense_threshold = DENSE_THRESHOLD
    if method == "dense" or (method == "auto" and T <= dense_threshold) or T < 3:
        return _dense_norm(m)

    scale = gershgorin_bound(m)
    if scale == 0:
        return NormResult(0.0, "iterative", 0, 0.0)
    counter = [0]
    op = toeplitz_operator(m, counter)
    max_iter = 10 * T if max_iter is None else max_iter
    v0 = np.random.default_rng(0).standard_normal(T)
    ncv = min(T - 1, 40)
    values, residuals = [], []
    for which in ("LA", "SA"):
        try:
            w, vec = eigsh(op, k=1, which=which, tol=tol, maxiter=max_iter, v0=v0, ncv=ncv)
        except ArpackNoConvergence as exc:
            best = max((abs(x) for x in values + list(exc.eigenvalues)), default=float("nan"))
            raise NormConvergenceError(
                f"Lanczos ({which}) did not converge in {max_iter} iterations",
                best, float("nan"),
            ) from exc
        lam, v = float(w[0]), vec[:, 0]
        values.append(lam)
        residuals.append(float(np.linalg.norm(toeplitz_matvec(m, v) - lam * v)))
    value = max(abs(values[0]), abs(values[1]))
    residual = max(residuals)
    if residual > tol * scale:
        raise NormConvergenceError(
            f"residual {residual:.3g} above tolerance {tol * scale:.3g}", value, residual
        )
    return NormResult(value, "iterative", counter[0], residual)


def norm_of_difference(a: SymmetricToeplitz, b: SymmetricToeplitz, tol: float = 1e-10,
                       **kwargs) -> NormResult:
    """Operator norm of ``a - b``, computed on first columns."""
    _check_same_dimension(a, b)
    return operator_norm(SymmetricToeplitz(a.first_column - b.first_column), tol, **kwargs)


def _half_blocks(columns, T):
    """Split stacked symmetric Toeplitz matrices into their symmetric and
    skew-symmetric half-size blocks (the matrices are centrosymmetric)."""
    idx = np.abs(np.subtract.outer(np.arange(T), np.arange(T)))
    m = T // 2
    full = columns[:, idx]
    A = full[:, :m, :m]
    CJ = full[:, :m, T - m:][:, :, ::-1]
    skew = A - CJ
    sym = A + CJ
    if T % 2:
        x = full[:, :m, m] * np.sqrt(2.0)
        sym = np.concatenate(
            [np.concatenate([sym, x[:, :, None]], axis=2),
             np.concatenate([x[:, None, :], full[:, m:m + 1, m:m + 1]], axis=2)],
            axis=1,
        )
    return sym, skew


def operator_norms(columns, tol: float = 1e-10, dense_threshold: int | None = None,
                   max_elements: int = 4_000_000) -> np.ndarray:
    """Operator norms of many symmetric Toeplitz matrices given as rows of ``columns``.

    Small dimensions are solved densely in batches, each matrix reduced to
    its two half-size centrosymmetric blocks; large ones go through
    :func:`operator_norm`.
    """
    columns = np.atleast_2d(np.asarray(columns, dtype=float))
    K, T = columns.shape
    if dense_threshold is None:
        dense_threshold = DENSE_THRESHOLD
    if T > dense_threshold:
        return np.array([operator_norm(SymmetricToeplitz(c), tol).value for c in columns])
    if T < 2:
        return np.abs(columns[:, 0])
    batch = max(1, max_elements // (T * T))
    out = np.empty(K)
    for i in range(0, K, batch):
        sym, skew = _half_blocks(columns[i:i + batch], T)
        w1 = np.linalg.eigvalsh(sym)
        w2 = np.linalg.eigvalsh(skew)
        lo = np.minimum(w1[:, 0], w2[:, 0])
        hi = np.maximum(w1[:, -1], w2[:, -1])
        out[i:i + batch] = np.maximum(np.abs(lo), np.abs(hi))
    return out
