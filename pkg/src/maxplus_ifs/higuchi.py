"""Higuchi fractal dimension of series and square surfaces.

1D follows Higuchi's original normalization: for scale ``k`` and offset
``m`` the sub-sampled curve length is

    L_m(k) = (1/k) * sum_i |X(m + i k) - X(m + (i-1) k)| * (N - 1) / (c_m k)

with ``c_m = floor((N - m) / k)`` increments, and ``L(k)`` is the mean over
offsets.  The dimension is the least-squares slope of ``ln L(k)`` against
``ln(1/k)``.

2D sums the four absolute edge increments of every ``k x k`` cell of the
sub-sampled lattice, rescales the cell count to the full lattice and divides
by ``k``:

    A_{n,m}(k) = (1/k) * V_{n,m}(k) * (N - 1)^2 / (c_n k * c_m k)
    A(k)       = (1/2) * mean_{n,m} A_{n,m}(k)

so that a plane gives ``A(k) ~ k^-2`` exactly.  The dimension is
``1 + slope`` of ``ln A(k)`` against ``ln(1/k^2)``.

Offsets with no complete increment (possible only at ``k`` close to
``N / 2``) are left out of the mean.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFit, InvalidScale, NonFiniteInput


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    points: tuple
    used_k: tuple = ()


@dataclass(frozen=True)
class HiguchiResult:
    dimension: float
    k: np.ndarray
    measure: np.ndarray
    fit: FitResult | None
    surface: bool = False

    @property
    def degenerate(self) -> bool:
        return self.fit is None


def least_squares_fit(points) -> FitResult:
    """Ordinary least-squares line through ``(x, y)`` pairs."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 2:
        raise DegenerateFit("need at least two points")
    x, y = pts[:, 0], pts[:, 1]
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateFit("all abscissae are equal")
    slope = float(dx @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    return FitResult(slope, intercept, tuple(map(tuple, pts.tolist())))


def _as_series(values, ndim: int) -> np.ndarray:
    X = np.asarray(values, dtype=np.float64)
    if X.ndim != ndim:
        raise ValueError(f"expected a {ndim}D array, got shape {X.shape}")
    if ndim == 2 and X.shape[0] != X.shape[1]:
        raise ValueError(f"surface must be square, got {X.shape}")
    if X.shape[0] < 2:
        raise ValueError("series needs at least 2 samples per axis")
    if not np.isfinite(X).all():
        raise NonFiniteInput("series contains non-finite values")
    return X


def _check_kmax(k_max, N: int) -> int:
    limit = math.ceil(N / 2)
    if isinstance(k_max, bool) or int(k_max) != k_max or not 2 <= k_max <= limit:
        raise InvalidScale(f"k_max must be an integer in [2, {limit}] for N={N}, got {k_max!r}")
    return int(k_max)


def _offset_counts(N: int, k: int) -> np.ndarray:
    """Increments per 0-based offset class ``m0 = 0..k-1``."""
    return (N - 1 - np.arange(k)) // k


def curve_lengths_1d(series, k_max: int) -> np.ndarray:
    """``L(k)`` for ``k = 1..k_max``."""
    X = _as_series(series, 1)
    N = X.size
    k_max = _check_kmax(k_max, N)
    out = np.empty(k_max)
    for k in range(1, k_max + 1):
        inc = np.abs(X[k:] - X[:-k])
        V = np.bincount(np.arange(inc.size) % k, weights=inc, minlength=k)
        cnt = _offset_counts(N, k)
        ok = cnt > 0
        Lm = V[ok] * (N - 1) / (cnt[ok] * k) / k
        out[k - 1] = Lm.mean()
    return out


def surface_areas_2d(series, k_max: int) -> np.ndarray:
    """``A(k)`` for ``k = 1..k_max``."""
    X = _as_series(series, 2)
    N = X.shape[0]
    k_max = _check_kmax(k_max, N)
    out = np.empty(k_max)
    for k in range(1, k_max + 1):
        s = N - k  # cells have lower-left corner in [0, s)^2
        d0 = np.abs(X[k:, :] - X[:-k, :])
        d1 = np.abs(X[:, k:] - X[:, :-k])
        cell = d0[:, :s] + d0[:, k:] + d1[:s, :] + d1[k:, :]
        # fold cell sums into their (row, col) offset classes
        r = -(-s // k)
        padded = np.zeros((r * k, r * k))
        padded[:s, :s] = cell
        V = padded.reshape(r, k, r, k).sum(axis=(0, 2))
        cnt = _offset_counts(N, k)
        ok = cnt > 0
        norm = (N - 1) / (cnt[ok] * k)
        A = V[np.ix_(ok, ok)] * np.outer(norm, norm) / k
        out[k - 1] = 0.5 * A.mean()
    return out


def _fit_scales(measure: np.ndarray, abscissa: np.ndarray) -> FitResult | None:
    k = np.arange(1, measure.size + 1)
    used = measure > 0
    if used.sum() < 2:
        return None
    fit = least_squares_fit(np.column_stack([abscissa[used], np.log(measure[used])]))
    return FitResult(fit.slope, fit.intercept, fit.points, tuple(int(v) for v in k[used]))


def higuchi_1d(series, k_max: int) -> HiguchiResult:
    L = curve_lengths_1d(series, k_max)
    k = np.arange(1, L.size + 1)
    fit = _fit_scales(L, np.log(1.0 / k))
    return HiguchiResult(1.0 if fit is None else fit.slope, k, L, fit)


def higuchi_2d(series, k_max: int) -> HiguchiResult:
    A = surface_areas_2d(series, k_max)
    k = np.arange(1, A.size + 1)
    fit = _fit_scales(A, np.log(1.0 / k.astype(np.float64) ** 2))
    return HiguchiResult(2.0 if fit is None else 1.0 + fit.slope, k, A, fit, surface=True)


def hfd_1d(series, k_max: int) -> float:
    return higuchi_1d(series, k_max).dimension


def hfd_2d(series, k_max: int) -> float:
    return higuchi_2d(series, k_max).dimension


def dimension_curve(result: HiguchiResult) -> np.ndarray:
    """Dimension refitted over scales ``1..K`` for every ``K = 2..k_max``.

    Entry ``K - 2`` holds the dimension that ``k_max = K`` would report.
    """
    k = result.k.astype(np.float64)
    absc = np.log(1.0 / k ** 2) if result.surface else np.log(1.0 / k)
    base = 1.0 if result.surface else 0.0
    out = []
    for K in range(2, result.measure.size + 1):
        fit = _fit_scales(result.measure[:K], absc[:K])
        out.append(base + 1.0 if fit is None else base + fit.slope)
    return np.array(out)
