"""End-to-end runs behind the CLI subcommands."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .engine import IterationConfig, IterationReport, initial_density, iterate, word_oracle
from .errors import ConfigError, NonFiniteInput
from .fuzzy import discrete_dtheta, fuzzify
from .grid import UniformGrid
from .higuchi import HiguchiResult, higuchi_1d, higuchi_2d
from .ifs import PartialSystem, build_partial, contraction_rate, resolution_delta
from .io import (RunConfig, load_config, read_density_csv, read_series, write_density_csv,
                 write_fit_csv, write_fuzzy_csv, write_pgm)


@dataclass
class AttractorRun:
    grid: UniformGrid
    partial: PartialSystem
    density: np.ndarray
    field: np.ndarray
    report: IterationReport
    gamma: float

    @property
    def epsilon(self) -> float:
        return self.grid.epsilon

    @property
    def delta(self) -> float:
        return resolution_delta(self.gamma, self.epsilon)

    def summary(self) -> dict:
        return {
            "n": self.partial.n,
            "alpha_n": self.partial.alpha + 0.0,
            "gamma": self.gamma,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "iterations": self.report.iterations_run,
            "converged": self.report.converged,
            "support_size": int(np.isfinite(self.density).sum()),
            "sup_change_trace": [c if math.isfinite(c) else "inf"
                                 for c in self.report.sup_change_trace],
        }


def compute_attractor(cfg: RunConfig, workers: int | None = None) -> AttractorRun:
    gamma = contraction_rate(cfg.system)
    partial = build_partial(cfg.system, cfg.n)
    density, report = iterate(partial, cfg.grid, cfg.iteration, workers=workers)
    return AttractorRun(cfg.grid, partial, density, fuzzify(density), report, gamma)


def run_attractor(cfg: RunConfig, binary: bool | None = None,
                  workers: int | None = None) -> AttractorRun:
    """Compute the discrete attractor and write the configured outputs."""
    run = compute_attractor(cfg, workers)
    outs = cfg.outputs
    if "density_path" in outs:
        write_density_csv(outs["density_path"], run.density, cfg.grid)
    if "fuzzy_path" in outs:
        write_fuzzy_csv(outs["fuzzy_path"], run.field, cfg.grid)
    if "image_path" in outs:
        if cfg.grid.dimension != 2:
            raise ConfigError("outputs.image_path", "images are only written for 2D runs")
        write_pgm(outs["image_path"], run.field, cfg.pgm_binary if binary is None else binary)
    return run


def higuchi(field_u, k_max: int) -> HiguchiResult:
    u = np.asarray(field_u, dtype=np.float64)
    if not np.isfinite(u).all():
        raise NonFiniteInput("HFD input contains non-finite values")
    return higuchi_2d(u, k_max) if u.ndim == 2 else higuchi_1d(u, k_max)


def run_hfd(source, k_max, fit_path=None) -> dict:
    """HFD of a config's fuzzified attractor or of a series file.

    ``k_max`` may be an int or a list; the fit CSV is written for the
    largest value and carries the cumulative dimension curve.
    """
    cfg = None
    if isinstance(source, RunConfig):
        cfg = source
    elif Path(source).suffix.lower() == ".json":
        cfg = load_config(source)
    if cfg is not None:
        field_u = compute_attractor(cfg).field
        ks = list(k_max) if k_max else list(cfg.k_max)
        fit_path = fit_path or cfg.outputs.get("fit_path")
    else:
        field_u = read_series(source)
        ks = list(k_max) if k_max else []
    if isinstance(ks, int):
        ks = [ks]
    if not ks:
        raise ConfigError("higuchi.k_max", "no k_max given")
    results = {k: higuchi(field_u, k) for k in sorted(set(ks))}
    if fit_path:
        write_fit_csv(fit_path, results[max(results)])
    return {
        "dimensions": {str(k): r.dimension for k, r in results.items()},
        "degenerate": {str(k): r.degenerate for k, r in results.items()},
        "series_shape": list(np.shape(field_u)),
        "_results": results,
    }


def max_discrepancy(a, b) -> float:
    """Sup-norm distance with ``-inf`` vs ``-inf`` counting as equal."""
    a = np.asarray(a)
    b = np.asarray(b)
    fa, fb = np.isfinite(a), np.isfinite(b)
    if (fa != fb).any():
        return math.inf
    if not fa.any():
        return 0.0
    return float(np.abs(a[fa] - b[fa]).max())


def run_oracle_check(cfg: RunConfig, depth: int | None = None) -> dict:
    """Compare ``depth`` exact steps of the engine with the word oracle."""
    K = cfg.oracle_depth if depth is None else depth
    partial = build_partial(cfg.system, cfg.n)
    support = cfg.iteration.initial_support
    oracle = word_oracle(partial, cfg.grid, K, support, budget=cfg.oracle_budget)
    if K == 0:
        engine = initial_density(cfg.grid, support)
    else:
        engine, _ = iterate(partial, cfg.grid,
                            replace(cfg.iteration, max_iterations=K, tolerance=0.0))
    gap = max_discrepancy(engine, oracle)
    return {"n": partial.n, "depth": K, "M": cfg.grid.M,
            "max_discrepancy": gap if math.isfinite(gap) else "inf", "passed": gap == 0.0}


def run_dtheta(path_a, path_b) -> float:
    a, grid_a = read_density_csv(path_a)
    b, grid_b = read_density_csv(path_b)
    if grid_a != grid_b:
        raise ConfigError("", "densities live on different grids")
    return discrete_dtheta(a, b, grid_a)
