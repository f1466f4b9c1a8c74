"""Fixed-point iteration of the discrete idempotent Markov operator.

One step pushes a density forward through every discretized map::

    out(x) = max { q_j + density(y) : j <= n, r(phi_j(y)) = x }

with ``-inf`` wherever nothing lands.  Iterating from a density that is 0 on
a finite set ``K`` reproduces the draw algorithm for invariant idempotent
measures; :func:`word_oracle` computes the same K-step result by brute-force
enumeration of map words and serves as an independent check.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import ConfigError, OracleBudgetExceeded, ShapeMismatch
from .grid import UniformGrid, discretize_map
from .ifs import CountableSystem, PartialSystem
from .maxplus import BOTTOM, renormalize

DEFAULT_ORACLE_BUDGET = 10 ** 7


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class IterationConfig:
    """``initial_support`` is None for the full grid, else a list of grid
    indices (ints in 1D, ``(i1, i2)`` pairs in 2D)."""

    max_iterations: int = 30
    tolerance: float = 0.0
    initial_support: tuple | None = None

    def __post_init__(self):
        if isinstance(self.max_iterations, bool) or int(self.max_iterations) != self.max_iterations \
                or self.max_iterations < 1:
            raise ConfigError("iteration.N", "must be a positive integer")
        if not self.tolerance >= 0:
            raise ConfigError("iteration.tolerance", "must be non-negative")
        if self.initial_support is not None:
            support = tuple(tuple(p) if isinstance(p, (list, tuple)) else p
                            for p in self.initial_support)
            if not support:
                raise ConfigError("iteration.initial_support", "must be non-empty")
            object.__setattr__(self, "initial_support", support)


@dataclass
class IterationReport:
    iterations_run: int = 0
    sup_change_trace: list = field(default_factory=list)
    support_size_trace: list = field(default_factory=list)
    converged: bool = False


def _check_shapes(density: np.ndarray, system: PartialSystem, grid: UniformGrid):
    if density.shape != grid.shape:
        raise ShapeMismatch(f"density shape {density.shape} does not match grid {grid.shape}")
    if system.dimension != grid.dimension:
        raise ShapeMismatch(f"{system.dimension}D system on a {grid.dimension}D grid")


def map_tables(system: PartialSystem, grid: UniformGrid) -> list:
    return [discretize_map(phi, grid, system.clamp) for phi in system.maps]


def support_indices(grid: UniformGrid, initial_support=None) -> np.ndarray:
    """Flat indices of an initial support (all points when None)."""
    if initial_support is None or initial_support == "full":
        return np.arange(grid.size)
    idx = np.array(initial_support, dtype=np.int64)
    if idx.size == 0:
        raise ConfigError("iteration.initial_support", "must be non-empty")
    if grid.dimension == 1:
        idx = idx.reshape(-1)
    elif idx.ndim != 2 or idx.shape[1] != 2:
        raise ConfigError("iteration.initial_support", "2D support needs [i1, i2] pairs")
    if (idx < 0).any() or (idx > grid.M).any():
        raise ConfigError("iteration.initial_support", f"indices must lie in 0..{grid.M}")
    flat = idx if grid.dimension == 1 else grid.flat(idx)
    return np.unique(flat)


def initial_density(grid: UniformGrid, initial_support=None) -> np.ndarray:
    dens = np.full(grid.size, BOTTOM)
    dens[support_indices(grid, initial_support)] = 0.0
    return dens.reshape(grid.shape)


def _push(flat: np.ndarray, src: np.ndarray, tables, weights, size: int) -> np.ndarray:
    out = np.full(size, BOTTOM)
    vals = flat[src]
    for table, q in zip(tables, weights):
        np.maximum.at(out, table[src], vals + q)
    return out


def push_forward(density, tables, weights, workers: int | None = None) -> np.ndarray:
    """Max-plus pushforward of ``density`` through tabulated maps.

    Only the support of the input is visited.  With ``workers > 1`` the
    support is split into chunks whose partial outputs are merged by
    pointwise max, which gives the same array as the serial loop.
    """
    density = np.asarray(density, dtype=np.float64)
    flat = density.ravel()
    src = np.flatnonzero(np.isfinite(flat))
    workers = default_workers() if workers is None else workers
    if workers <= 1 or src.size < 4096:
        out = _push(flat, src, tables, weights, flat.size)
    else:
        chunks = np.array_split(src, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _push(flat, c, tables, weights, flat.size), chunks))
        out = np.maximum.reduce(parts)
    return out.reshape(density.shape)


def markov_step(density, system: PartialSystem, grid: UniformGrid,
                workers: int | None = None) -> np.ndarray:
    """One application of the normalized operator of ``system``."""
    density = np.asarray(density, dtype=np.float64)
    _check_shapes(density, system, grid)
    return push_forward(density, map_tables(system, grid), system.weights, workers)


def raw_step(density, system: CountableSystem, grid: UniformGrid, n: int) -> np.ndarray:
    """Like :func:`markov_step` for the first ``n`` maps, but with the raw
    (un-normalized) weights ``q_j``."""
    density = np.asarray(density, dtype=np.float64)
    if density.shape != grid.shape or system.dimension != grid.dimension:
        raise ShapeMismatch("density, system and grid dimensions differ")
    tables = [discretize_map(phi, grid, system.clamp) for phi in system.maps(n)]
    return push_forward(density, tables, system.weights(n))


def sup_change(old, new) -> float:
    """Sup-norm of ``new - old`` in the lambda scale.

    Entries that are ``-inf`` in both count as unchanged; entries that are
    finite in exactly one count as an infinite change.
    """
    old = np.asarray(old)
    new = np.asarray(new)
    fo = np.isfinite(old)
    fn = np.isfinite(new)
    if (fo != fn).any():
        return float("inf")
    if not fo.any():
        return 0.0
    return float(np.abs(new[fo] - old[fo]).max())


def iterate(system: PartialSystem, grid: UniformGrid, config: IterationConfig | None = None,
            workers: int | None = None):
    """Iterate :func:`markov_step` from the initial density of ``config``.

    Stops once the sup change is at most ``config.tolerance`` or after
    ``config.max_iterations`` steps.  Returns ``(density, report)``.
    """
    config = config or IterationConfig()
    density = initial_density(grid, config.initial_support)
    _check_shapes(density, system, grid)
    tables = map_tables(system, grid)
    report = IterationReport()
    for _ in range(int(config.max_iterations)):
        new = push_forward(density, tables, system.weights, workers)
        change = sup_change(density, new)
        density = new
        report.iterations_run += 1
        report.sup_change_trace.append(change)
        report.support_size_trace.append(int(np.isfinite(new).sum()))
        if change <= config.tolerance:
            report.converged = True
            break
    return renormalize(density), report


def word_oracle(system: PartialSystem, grid: UniformGrid, depth: int, initial_support=None,
                budget: int = DEFAULT_ORACLE_BUDGET) -> np.ndarray:
    """Depth-``depth`` word maximum, by exhaustive enumeration.

    For every word ``(j_1, ..., j_K)`` and start point ``y`` in the initial
    support, the point ``phi_j1(...phi_jK(y))`` receives ``sum q_ji`` and the
    output keeps the maximum per point.  Budget counts word x start pairs.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if system.dimension != grid.dimension:
        raise ShapeMismatch(f"{system.dimension}D system on a {grid.dimension}D grid")
    start = support_indices(grid, initial_support)
    n = len(system.maps)
    cost = n ** depth * start.size
    if cost > budget:
        raise OracleBudgetExceeded(f"{n}^{depth} words x {start.size} points = {cost} > {budget}")
    tables = map_tables(system, grid)
    out = np.full(grid.size, BOTTOM)
    if depth == 0:
        out[start] = 0.0
        return out.reshape(grid.shape)
    for word in product(range(n), repeat=depth):
        pos = start
        total = 0.0
        # innermost map first: same summation order as repeated stepping
        for j in reversed(word):
            pos = tables[j][pos]
            total = total + system.weights[j]
        np.maximum.at(out, pos, total)
    return out.reshape(grid.shape)
