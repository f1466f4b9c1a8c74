"""Uniform eps-nets on [0,1] and [0,1]^2 and discretized maps.

Grid points are ``i / M`` per axis, ``0 <= i <= M``.  A 2D grid is square and
its points are stored in C order: flat index ``i1 * (M + 1) + i2`` addresses
the point ``(i1 / M, i2 / M)``, which matches ``density.ravel()`` for a
density of shape ``(M + 1, M + 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OutOfDomain
from .ifs import AffineMap

DOMAIN_TOL = 1e-9


@dataclass(frozen=True)
class UniformGrid:
    dimension: int
    M: int

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("grid dimension must be 1 or 2")
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"need an integer M >= 2, got {self.M!r}")

    @property
    def side(self) -> int:
        return self.M + 1

    @property
    def shape(self) -> tuple:
        return (self.side,) * self.dimension

    @property
    def size(self) -> int:
        return self.side ** self.dimension

    @property
    def epsilon(self) -> float:
        """Largest max-metric distance from a point of the cube to the grid."""
        return 1.0 / (2 * self.M)

    @property
    def diameter(self) -> float:
        return float(np.sqrt(self.dimension))

    def coordinates(self) -> np.ndarray:
        """Coordinates of every grid point, shape ``(size, dimension)``."""
        axis = np.arange(self.side) / self.M
        if self.dimension == 1:
            return axis[:, None]
        return np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)

    def value(self, index) -> np.ndarray:
        return np.asarray(index, dtype=np.float64) / self.M

    def flat(self, index) -> np.ndarray:
        """Per-axis indices of shape ``(..., d)`` to flat indices."""
        idx = np.asarray(index)
        if self.dimension == 1:
            return idx[..., 0]
        return idx[..., 0] * self.side + idx[..., 1]

    def unflat(self, flat) -> np.ndarray:
        flat = np.asarray(flat)
        if self.dimension == 1:
            return flat[..., None]
        return np.stack(np.divmod(flat, self.side), axis=-1)


def project_points(points, grid: UniformGrid, clamp: bool = False) -> np.ndarray:
    """Nearest grid index per axis for an array of shape ``(..., d)``.

    Exact ties go to the larger index.  Coordinates within ``DOMAIN_TOL`` of
    the cube are clamped silently; farther ones raise :class:`OutOfDomain`
    unless ``clamp`` is set.
    """
    pts = np.asarray(points, dtype=np.float64)
    if not clamp:
        outside = (pts < -DOMAIN_TOL) | (pts > 1 + DOMAIN_TOL)
        if outside.any():
            bad = pts[outside.any(axis=-1)] if pts.ndim > 1 else pts[outside]
            raise OutOfDomain(f"point {np.atleast_1d(bad)[0]!r} lies outside [0,1]^{grid.dimension}")
    pts = np.clip(pts, 0.0, 1.0)
    return np.floor(pts * grid.M + 0.5).astype(np.int64)


def project(x, grid: UniformGrid, clamp: bool = False):
    """Index of the grid point nearest to ``x`` (int in 1D, tuple in 2D)."""
    pt = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if pt.shape != (grid.dimension,):
        raise ValueError(f"expected a point of dimension {grid.dimension}")
    idx = project_points(pt, grid, clamp=clamp)
    return int(idx[0]) if grid.dimension == 1 else tuple(int(i) for i in idx)


@lru_cache(maxsize=512)
def discretize_map(phi: AffineMap, grid: UniformGrid, clamp: bool = False) -> np.ndarray:
    """Tabulate ``r o phi`` as a flat-index -> flat-index lookup table."""
    if phi.dimension != grid.dimension:
        raise ValueError("map and grid dimensions differ")
    images = phi(grid.coordinates())
    table = grid.flat(project_points(images, grid, clamp=clamp))
    table = np.ascontiguousarray(table, dtype=np.int64)
    table.flags.writeable = False
    return table
