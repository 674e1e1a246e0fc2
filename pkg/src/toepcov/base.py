"""Value types shared across the package and input validation helpers."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.linalg import toeplitz


@dataclass(frozen=True, eq=False)
class AutocovarianceSequence:
    """Lag-indexed autocovariances ``gamma_0, ..., gamma_kmax``.

    Parameters
    ----------
    values : array_like
        Autocovariances at lags ``0..kmax``.
    tail_bound : float or None
        Upper bound on ``sum_{k > kmax} |gamma_k|``. ``0.0`` means the
        sequence is known to vanish beyond ``kmax``; ``None`` means unknown.
    """

    values: np.ndarray
    tail_bound: Optional[float] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("autocovariances must be a non-empty 1-D array")
        if not np.all(np.isfinite(values)):
            raise ValueError("autocovariances must be finite")
        object.__setattr__(self, "values", values)

    @property
    def kmax(self) -> int:
        return self.values.size - 1

    def __len__(self):
        return self.values.size

    def __getitem__(self, k):
        return self.values[k]

    def padded(self, n: int) -> np.ndarray:
        """Return lags ``0..n-1``, zero-filled past ``kmax``."""
        out = np.zeros(n)
        m = min(n, self.values.size)
        out[:m] = self.values[:m]
        return out

    def to_toeplitz(self, T: int) -> "SymmetricToeplitz":
        """Autocovariance matrix of dimension ``T``.

        Raises if the sequence is too short and not known to vanish
        beyond ``kmax``.
        """
        if T - 1 > self.kmax and self.tail_bound != 0.0:
            raise ValueError(
                f"need lags up to {T - 1}, sequence stops at {self.kmax}"
            )
        return SymmetricToeplitz(self.padded(T))


@dataclass(frozen=True, eq=False)
class SymmetricToeplitz:
    """T x T symmetric Toeplitz matrix ``(c_{|s-t|})`` stored by its first column."""

    first_column: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        col = np.asarray(self.first_column, dtype=float)
        if col.ndim != 1 or col.size == 0:
            raise ValueError("first_column must be a non-empty 1-D array")
        if not np.all(np.isfinite(col)):
            raise ValueError("first_column must be finite")
        col.setflags(write=False)
        object.__setattr__(self, "first_column", col)

    @property
    def dimension(self) -> int:
        return self.first_column.size

    @property
    def shape(self):
        return (self.dimension, self.dimension)

    def to_dense(self) -> np.ndarray:
        return toeplitz(self.first_column)

    @cached_property
    def circulant_spectrum(self) -> np.ndarray:
        """rfft of the zero-padded circulant embedding (length next pow2 >= 2T)."""
        T = self.dimension
        n = 1 << max(1, (2 * T - 1).bit_length())
        emb = np.zeros(n)
        emb[:T] = self.first_column
        emb[n - T + 1:] = self.first_column[:0:-1]
        return np.fft.rfft(emb)

    def __matmul__(self, v):
        from .linalg import toeplitz_matvec

        return toeplitz_matvec(self, v)

    def __sub__(self, other: "SymmetricToeplitz") -> "SymmetricToeplitz":
        _check_same_dimension(self, other)
        return SymmetricToeplitz(self.first_column - other.first_column)

    def __add__(self, other: "SymmetricToeplitz") -> "SymmetricToeplitz":
        _check_same_dimension(self, other)
        return SymmetricToeplitz(self.first_column + other.first_column)

    def __mul__(self, scalar: float) -> "SymmetricToeplitz":
        return SymmetricToeplitz(float(scalar) * self.first_column)

    __rmul__ = __mul__

    def __neg__(self):
        return SymmetricToeplitz(-self.first_column)

    def nonzero_lags(self) -> np.ndarray:
        """Lags ``k >= 0`` whose diagonal carries a nonzero entry."""
        return np.flatnonzero(self.first_column)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "first_column": self.first_column.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SymmetricToeplitz":
        col = np.asarray(d["first_column"], dtype=float)
        if "dimension" in d and int(d["dimension"]) != col.size:
            raise ValueError("dimension does not match first_column length")
        return cls(col)


def _check_same_dimension(a: SymmetricToeplitz, b: SymmetricToeplitz):
    if a.dimension != b.dimension:
        raise ValueError(
            f"dimension mismatch: {a.dimension} vs {b.dimension}"
        )


def check_series(x, min_length: int = 2) -> np.ndarray:
    """Validate a univariate series and return it as a float array."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 2 and 1 in x.shape:
        x = x.ravel()
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D series, got shape {x.shape}")
    if x.size < min_length:
        raise ValueError(
            f"series has {x.size} observations, need at least {min_length}"
        )
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return x


def check_lag(k, upper: int, name: str = "kmax", lower: int = 0) -> int:
    """Validate an integer lag in ``[lower, upper]``."""
    if isinstance(k, (bool, np.bool_)) or int(k) != k:
        raise ValueError(f"{name} must be an integer, got {k!r}")
    k = int(k)
    if k < lower or k > upper:
        raise ValueError(f"{name}={k} outside [{lower}, {upper}]")
    return k
