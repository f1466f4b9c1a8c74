"""Max-plus scalars and grid densities.

Scalars live in R u {-inf} with ``oplus = max`` and ``odot = +``.  The
bottom element is the IEEE negative infinity, so numpy arithmetic gives the
absorption laws for free (``-inf + a == -inf`` for every finite ``a``).

A density is a float64 array indexed by grid position (shape ``(M+1,)`` or
``(M+1, M+1)``) holding values in ``[-inf, 0]``.  Densities are treated as
immutable: every operation here returns a fresh array.
"""
from __future__ import annotations

import numpy as np

from .errors import EmptySupport

BOTTOM = float("-inf")
ONE = 0.0


def oplus(a: float, b: float) -> float:
    """Max-plus addition; ``BOTTOM`` is the neutral element."""
    return a if a >= b else b


def odot(a: float, b: float) -> float:
    """Max-plus multiplication; ``BOTTOM`` absorbs."""
    if a == BOTTOM or b == BOTTOM:
        return BOTTOM
    return a + b


def as_density(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if np.isnan(arr).any():
        raise ValueError("density contains NaN")
    if (arr > 0).any():
        raise ValueError("density values must lie in [-inf, 0]")
    return arr


def sup_of(density) -> float:
    arr = np.asarray(density, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("empty density")
    return float(arr.max())


def support(density) -> np.ndarray:
    """Boolean mask of entries different from ``BOTTOM``."""
    return np.isfinite(np.asarray(density))


def is_normalized(density) -> bool:
    return sup_of(density) == 0.0


def renormalize(density) -> np.ndarray:
    """Shift a density so that its maximum is exactly 0.

    Raises :class:`EmptySupport` when every value is ``BOTTOM``.
    """
    arr = np.asarray(density, dtype=np.float64)
    top = sup_of(arr)
    if top == BOTTOM:
        raise EmptySupport("density has empty support")
    if top == 0.0:
        return arr.copy()
    out = arr - top
    # the argmax entries cancel exactly; pin them anyway against -0.0
    out[arr == top] = 0.0
    return out
