"""Lag-window kernels used to taper sample autocovariances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Taper:
    """Symmetric kernel ``K`` with ``K(0) = 1``, ``|K| <= 1`` and support ``[-1, 1]``.

    ``positive_definite`` marks kernels whose weight matrix
    ``[K((s - t) / B)]`` is nonnegative definite for every ``B``, so tapering
    a nonnegative definite matrix keeps it nonnegative definite.
    """

    name: str
    k: Callable[[np.ndarray], np.ndarray]
    positive_definite: bool

    def __call__(self, u):
        return self.k(np.asarray(u, dtype=float))

    def weights(self, B: int, n: int) -> np.ndarray:
        """Weights ``K(k / B)`` for lags ``k = 0..n-1``."""
        return self(np.arange(n) / B)


def _rectangular(u):
    return (np.abs(u) <= 1).astype(float)


def _bartlett(u):
    return np.maximum(0.0, 1.0 - np.abs(u))


def _parzen(u):
    a = np.abs(u)
    out = np.where(a <= 0.5, 1 - 6 * a**2 + 6 * a**3, 2 * (1 - a) ** 3)
    return np.where(a <= 1, out, 0.0)


RECTANGULAR = Taper("rectangular", _rectangular, positive_definite=False)
BARTLETT = Taper("bartlett", _bartlett, positive_definite=True)
# Parzen is the self-convolution of a triangle, hence positive definite.
PARZEN = Taper("parzen", _parzen, positive_definite=True)

TAPERS = {t.name: t for t in (RECTANGULAR, BARTLETT, PARZEN)}
TAPERS["banded"] = RECTANGULAR
TAPERS["triangular"] = BARTLETT


def get_taper(taper) -> Taper:
    """Resolve a taper by name, passing ``Taper`` instances through."""
    if isinstance(taper, Taper):
        return taper
    try:
        return TAPERS[str(taper).lower()]
    except KeyError:
        raise ValueError(
            f"unknown taper {taper!r}; choose from {sorted(TAPERS)}"
        ) from None
