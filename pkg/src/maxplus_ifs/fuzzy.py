"""Fuzzification ``u = exp(lambda)`` and the level-set distance between densities."""
from __future__ import annotations

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from .errors import EmptySupport, ShapeMismatch
from .grid import UniformGrid


def fuzzify(density) -> np.ndarray:
    """Grey levels in [0, 1]; ``exp(-inf) == 0``."""
    return np.exp(np.asarray(density, dtype=np.float64))


def defuzzify(field) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(field, dtype=np.float64))


def superlevel_set(values, beta: float) -> np.ndarray:
    """Flat indices whose value is at least ``beta``."""
    return np.flatnonzero(np.asarray(values).ravel() >= beta)


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between two non-empty point clouds of shape (k, d)."""
    return max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])


def discrete_dtheta(a, b, grid: UniformGrid) -> float:
    """Sup over thresholds of the Hausdorff distance between superlevel sets.

    Thresholds run over the values present in either density; on a finite
    grid the supremum over all ``beta <= 0`` is attained there.  A level at
    which exactly one of the two sets is empty contributes the diameter of
    the unit cube.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != grid.shape or b.shape != grid.shape:
        raise ShapeMismatch("densities must live on the given grid")
    fa = a.ravel()
    fb = b.ravel()
    if not np.isfinite(fa).any() or not np.isfinite(fb).any():
        raise EmptySupport("d_theta needs densities with non-empty support")
    coords = grid.coordinates()
    levels = np.union1d(fa[np.isfinite(fa)], fb[np.isfinite(fb)])
    worst = 0.0
    for beta in levels:
        sa = fa >= beta
        sb = fb >= beta
        has_a = sa.any()
        has_b = sb.any()
        if has_a != has_b:
            return grid.diameter
        if not has_a or np.array_equal(sa, sb):
            continue
        worst = max(worst, hausdorff(coords[sa], coords[sb]))
    return worst
