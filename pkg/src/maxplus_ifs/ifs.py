"""Countable affine IFS families, their weights and finite truncations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, InvalidTruncation, NotContractive, UnknownFamily

# generators are probed on this many leading indices to find sup Lip
LIP_PROBE = 256


@dataclass(frozen=True)
class AffineMap:
    """``x -> A @ x + b`` on ``[0, 1]**d`` with ``d`` in {1, 2}."""

    matrix: tuple
    offset: tuple

    def __post_init__(self):
        A = tuple(tuple(float(v) for v in row) for row in self.matrix)
        b = tuple(float(v) for v in self.offset)
        d = len(b)
        if d not in (1, 2) or len(A) != d or any(len(row) != d for row in A):
            raise ValueError(f"inconsistent affine map shapes: A={A!r}, b={b!r}")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "offset", b)

    @classmethod
    def line(cls, slope: float, offset: float) -> "AffineMap":
        return cls(((slope,),), (offset,))

    @classmethod
    def planar(cls, matrix, offset) -> "AffineMap":
        return cls(tuple(map(tuple, matrix)), tuple(offset))

    @property
    def dimension(self) -> int:
        return len(self.offset)

    @property
    def lipschitz(self) -> float:
        if self.dimension == 1:
            return abs(self.matrix[0][0])
        return float(np.linalg.norm(np.array(self.matrix), ord=2))

    def __call__(self, points) -> np.ndarray:
        """Apply to an array of shape ``(..., d)``."""
        pts = np.asarray(points, dtype=np.float64)
        A = np.array(self.matrix)
        return pts @ A.T + np.array(self.offset)

    def corner_images(self) -> np.ndarray:
        corners = np.array(list(product((0.0, 1.0), repeat=self.dimension)))
        return self(corners)

    def maps_unit_cube(self, tol: float = 1e-9) -> bool:
        img = self.corner_images()
        return bool(((img >= -tol) & (img <= 1 + tol)).all())


@dataclass(frozen=True)
class CountableSystem:
    """A (possibly infinite) family of maps ``phi_j`` with weights ``q_j <= 0``.

    Indices are 1-based as in the usual notation.  ``length`` is None for a
    generated family and the list length for an explicit one.  ``clamp``
    marks families whose maps leave the unit cube; their discretized images
    are clamped back onto the grid.
    """

    name: str
    dimension: int
    map_at: Callable[[int], AffineMap] = field(repr=False)
    weight_at: Callable[[int], float] = field(repr=False)
    length: int | None = None
    clamp: bool = False

    def maps(self, n: int) -> tuple:
        return tuple(self.map_at(j) for j in range(1, n + 1))

    def weights(self, n: int) -> tuple:
        return tuple(float(self.weight_at(j)) for j in range(1, n + 1))

    @classmethod
    def from_lists(cls, maps: Sequence[AffineMap], weights: Sequence[float],
                   name: str = "explicit", clamp: bool = False) -> "CountableSystem":
        maps = tuple(maps)
        weights = tuple(float(w) for w in weights)
        if not maps:
            raise ConfigError("system.maps", "at least one map is required")
        if len(maps) != len(weights):
            raise ConfigError("system.weights",
                              f"{len(weights)} weights for {len(maps)} maps")
        dims = {m.dimension for m in maps}
        if len(dims) != 1:
            raise ConfigError("system.maps", "maps of mixed dimension")
        bad = [i for i, w in enumerate(weights) if not w <= 0]
        if bad:
            raise ConfigError(f"system.weights[{bad[0]}]", "weights must be <= 0")
        return cls(name, dims.pop(), lambda j: maps[j - 1], lambda j: weights[j - 1],
                   length=len(maps), clamp=clamp)


@dataclass(frozen=True)
class PartialSystem:
    """The normalized truncation ``S_n`` of a countable system."""

    n: int
    maps: tuple
    raw_weights: tuple
    alpha: float
    weights: tuple
    clamp: bool = False

    @property
    def dimension(self) -> int:
        return self.maps[0].dimension


def build_partial(system: CountableSystem, n: int) -> PartialSystem:
    """Keep the first ``n`` maps and shift the weights so the largest is 0."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise InvalidTruncation(f"truncation order must be a positive integer, got {n!r}")
    if system.length is not None and n > system.length:
        raise InvalidTruncation(f"n={n} exceeds the {system.length} maps supplied")
    n = int(n)
    raw = system.weights(n)
    alpha = max(raw)
    if alpha == -math.inf:
        raise ConfigError("system.weights", "all weights are -inf")
    weights = tuple(q - alpha for q in raw)
    return PartialSystem(n, system.maps(n), raw, alpha, weights, system.clamp)


def contraction_rate(system: CountableSystem | PartialSystem) -> float:
    """Common contraction rate ``sup_j Lip(phi_j)``.

    For generated families the supremum is taken over the first
    ``LIP_PROBE`` maps, which is exact for families whose Lipschitz
    constants are eventually non-increasing or periodic.
    """
    if isinstance(system, PartialSystem):
        maps = system.maps
    else:
        count = system.length if system.length is not None else LIP_PROBE
        maps = system.maps(count)
    lips = [m.lipschitz for m in maps]
    worst = max(lips)
    if worst >= 1:
        j = lips.index(worst) + 1
        raise NotContractive(f"map {j} has Lipschitz constant {worst:g} >= 1")
    return worst


def resolution_delta(gamma: float, epsilon: float) -> float:
    """Resolution ``2 eps / (1 - gamma)`` reached on an eps-net."""
    if gamma >= 1:
        raise NotContractive(f"contraction rate {gamma:g} >= 1")
    if gamma < 0 or epsilon <= 0:
        raise ValueError("need 0 <= gamma < 1 and epsilon > 0")
    return 2 * epsilon / (1 - gamma)


# --- built-in families -----------------------------------------------------

def _dyadic_shift(j: int) -> AffineMap:
    s = 0.5 ** j
    return AffineMap.line(s, s)


_CHECKER_OFFSETS = ((0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5))


def _checker(j: int) -> AffineMap:
    return AffineMap.planar(((0.5, 0.0), (0.0, 0.5)), _CHECKER_OFFSETS[j % 4])


def _maple_leaf(j: int) -> AffineMap:
    if j == 1:
        return AffineMap.planar(((0.008, 0.0), (0.0, 0.008)), (0.1, 0.04))
    if j == 2:
        return AffineMap.planar(((0.5, 0.0), (0.0, 0.5)), (0.25, 0.4))
    if j == 3:
        return AffineMap.planar(((0.355, -0.355), (0.355, 0.355)), (0.266, 0.078))
    drift = 1 - 1 / j
    return AffineMap.planar(((0.355, 0.355), (-0.355, 0.355)),
                            (0.378 * drift, 0.434 * drift))


MAP_FAMILIES = {
    "dyadic-shift-1d": (1, _dyadic_shift, False),
    "checker-2d": (2, _checker, False),
    # several branches leave [0,1]^2; images are clamped onto the grid
    "maple-leaf-2d": (2, _maple_leaf, True),
}

WEIGHT_FAMILIES = {
    "neg-square": lambda j: -float((j - 1) ** 2),
    "neg-geometric": lambda j: -(0.5 ** j),
}


def builtin_family(name: str, weights="neg-square") -> CountableSystem:
    """Look up a built-in map family paired with a weight family.

    ``weights`` is a weight-family name or an explicit list ``q_1, q_2, ...``
    (which then bounds the usable truncation order).
    """
    try:
        dim, map_at, clamp = MAP_FAMILIES[name]
    except KeyError:
        raise UnknownFamily(f"unknown map family {name!r}; "
                            f"choose from {sorted(MAP_FAMILIES)}") from None
    length = None
    if isinstance(weights, str):
        try:
            weight_at = WEIGHT_FAMILIES[weights]
        except KeyError:
            raise UnknownFamily(f"unknown weight family {weights!r}; choose from "
                                f"{sorted(WEIGHT_FAMILIES)} or give a list",
                                path="system.weights") from None
        label = f"{name}/{weights}"
    else:
        values = tuple(float(w) for w in weights)
        if not values:
            raise ConfigError("system.weights", "empty weight list")
        bad = [i for i, w in enumerate(values) if not w <= 0]
        if bad:
            raise ConfigError(f"system.weights[{bad[0]}]", "weights must be <= 0")
        weight_at = lambda j: values[j - 1]  # noqa: E731
        length = len(values)
        label = f"{name}/explicit"
    return CountableSystem(label, dim, map_at, weight_at, length=length, clamp=clamp)
