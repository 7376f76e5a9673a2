"""Gauss-Kuzmin distribution iteration on gridded functions.

A distribution function F on [0,1] is advanced by

    (TF)(x) = sum_{i>=0} [ F(alpha^i) - F(alpha^i / (1 + (m-1)x)) ],

with alpha = 1/m; its unique fixed point is the invariant-measure CDF from
:mod:`chancf.measure`.  The companion density form advances
f(x) = (1+(m-1)x)(m+(m-1)x) F'(x) through the transfer coefficients
``pf_coefficient`` and has the constant k_m as fixed point.

Grids are uniform over [0,1]; off-grid values use the shape-preserving
cubic of :mod:`chancf.interpolation`, and truncated series tails are
bounded by explicit geometric envelopes kept below the caller's tolerance.
Per grid point the i-series is always summed in increasing i, so results
are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .interpolation import MonotoneCubic
from .measure import MeasureParams, gamma_cdf, gamma_density

DEFAULT_GRID_SIZE = 4097
DEFAULT_TOL = 1e-12

# Below this sup-error, grid interpolation noise dominates and step-to-step
# ratios stop meaning anything; they are reported as None.
RATIO_FLOOR = 1e-11

_GRID_RTOL = 5e-15  # allowed relative wobble of uniform spacing
_ENDPOINT_TOL = 1e-8
_MONOTONE_SLACK = 1e-12
_SERIES_CAP = 4000

_CSV_HEADER = "x,F"


def _check_grid(grid: np.ndarray) -> float:
    if grid.ndim != 1 or grid.shape[0] < 2:
        raise DomainError("grid must be a 1-d array with at least 2 points")
    if grid[0] != 0.0 or grid[-1] != 1.0:
        raise DomainError("grid must span [0, 1] exactly")
    diffs = np.diff(grid)
    h = (grid[-1] - grid[0]) / (grid.shape[0] - 1)
    if np.any(diffs <= 0.0):
        raise DomainError("grid must be strictly increasing")
    if np.max(np.abs(diffs - h)) > _GRID_RTOL * h + 5e-16:
        raise DomainError("grid must be uniform")
    return float(h)


def uniform_grid(size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    """Uniform grid of `size` points spanning [0, 1]."""
    if size < 2:
        raise DomainError(f"grid size must be >= 2, got {size}")
    return np.linspace(0.0, 1.0, size)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A distribution function sampled on a uniform grid over [0,1].

    Values must be non-decreasing with F(0) ~ 0 and F(1) ~ 1; both are
    enforced on construction (endpoints up to a small drift tolerance, so
    iterated outputs remain valid inputs).
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = np.array(self.grid, dtype=float)
        values = np.array(self.values, dtype=float)
        h = _check_grid(grid)
        if values.shape != grid.shape:
            raise DomainError("values must match the grid shape")
        if not np.all(np.isfinite(values)):
            raise DomainError("values must be finite")
        if abs(values[0]) > _ENDPOINT_TOL or abs(values[-1] - 1.0) > _ENDPOINT_TOL:
            raise DomainError("distribution values must satisfy F(0)=0 and F(1)=1")
        if np.any(np.diff(values) < -_MONOTONE_SLACK):
            raise DomainError("distribution values must be non-decreasing")
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_h", h)

    @property
    def spacing(self) -> float:
        return self._h  # type: ignore[attr-defined]

    @classmethod
    def from_callable(
        cls, fn: Callable[[np.ndarray], np.ndarray], size: int = DEFAULT_GRID_SIZE
    ) -> "GridFunction":
        grid = uniform_grid(size)
        return cls(grid, np.asarray(fn(grid), dtype=float))

    @classmethod
    def lebesgue(cls, size: int = DEFAULT_GRID_SIZE) -> "GridFunction":
        """The uniform (Lebesgue) initial distribution F(x) = x."""
        grid = uniform_grid(size)
        return cls(grid, grid.copy())

    @classmethod
    def gamma_limit(cls, mp: MeasureParams, size: int = DEFAULT_GRID_SIZE) -> "GridFunction":
        """The invariant-measure CDF sampled on the grid (the fixed point)."""
        return cls.from_callable(lambda x: gamma_cdf(x, mp), size)

    def to_csv(self, path) -> None:
        """Write `x,F` rows at full float precision."""
        with open(path, "w", encoding="ascii") as fh:
            fh.write(_CSV_HEADER + "\n")
            for x, v in zip(self.grid, self.values):
                fh.write(f"{float(x)!r},{float(v)!r}\n")

    @classmethod
    def from_csv(cls, path) -> "GridFunction":
        """Read a grid written by :meth:`to_csv` (header `x,F`)."""
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().strip()
            if header != _CSV_HEADER:
                raise DomainError(f"expected CSV header {_CSV_HEADER!r}, got {header!r}")
            xs: list[float] = []
            vs: list[float] = []
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 2:
                    raise DomainError(f"malformed CSV row at line {lineno}: {line!r}")
                try:
                    xs.append(float(parts[0]))
                    vs.append(float(parts[1]))
                except ValueError as exc:
                    raise DomainError(f"malformed CSV row at line {lineno}: {line!r}") from exc
        return cls(np.asarray(xs), np.asarray(vs))


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Non-negative density-like values sampled on a uniform grid over [0,1]."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = np.array(self.grid, dtype=float)
        values = np.array(self.values, dtype=float)
        h = _check_grid(grid)
        if values.shape != grid.shape:
            raise DomainError("values must match the grid shape")
        if not np.all(np.isfinite(values)):
            raise DomainError("density values must be finite")
        if np.any(values < 0.0):
            raise DomainError("density values must be non-negative")
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_h", h)

    @property
    def spacing(self) -> float:
        return self._h  # type: ignore[attr-defined]

    @classmethod
    def from_callable(
        cls, fn: Callable[[np.ndarray], np.ndarray], size: int = DEFAULT_GRID_SIZE
    ) -> "DensityGrid":
        grid = uniform_grid(size)
        return cls(grid, np.asarray(fn(grid), dtype=float))

    @classmethod
    def constant(cls, mp: MeasureParams, size: int = DEFAULT_GRID_SIZE) -> "DensityGrid":
        """The fixed-point density: constant k_m."""
        grid = uniform_grid(size)
        return cls(grid, np.full_like(grid, mp.k))

    @classmethod
    def lebesgue(cls, mp: MeasureParams, size: int = DEFAULT_GRID_SIZE) -> "DensityGrid":
        """Weighted density of the Lebesgue start: (1+(m-1)x)(m+(m-1)x)."""
        m = mp.m
        grid = uniform_grid(size)
        return cls(grid, (1.0 + (m - 1) * grid) * (m + (m - 1) * grid))


@dataclass(frozen=True)
class IterationReport:
    """Per-step convergence diagnostics of the distribution iteration."""

    n: int
    sup_error: float
    ratio: Optional[float]
    deriv_max: Optional[float]


@dataclass(frozen=True)
class RateFit:
    """Fitted geometric decay rate; degenerate when errors hit grid noise."""

    rate: Optional[float]
    degenerate: bool
    points: int


def _series_length(scale: float, m: int, tol: float) -> int:
    """Smallest I >= 1 with scale * m^-I < tol (capped)."""
    if scale <= 0.0:
        return 1
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    n = max(1, math.ceil(math.log(scale / tol) / math.log(m)))
    n = min(n, _SERIES_CAP)
    while n < _SERIES_CAP and scale * float(m) ** -n >= tol:
        n += 1
    return n


def apply_gk(F: GridFunction, mp: MeasureParams, tol: float = DEFAULT_TOL) -> GridFunction:
    """One step of the distribution iteration.

    The i-series is truncated once its geometric tail envelope
    L * alpha^I (L = max grid slope of F) drops below tol; off-grid values
    of F are interpolated shape-preservingly.  The output keeps F(0) = 0
    exactly and F(1) = 1 up to tol.
    """
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    m = mp.m
    interp = MonotoneCubic(F.grid, F.values)
    lip = float(np.max(np.diff(F.values))) / F.spacing
    nterms = _series_length(lip, m, tol)
    shrink = 1.0 / (1.0 + (m - 1) * F.grid)
    out = np.zeros_like(F.grid)
    apow = 1.0
    for _ in range(nterms):
        out += interp(apow) - interp(apow * shrink)
        apow /= m
    np.maximum.accumulate(out, out=out)  # absorb roundoff-level dips
    return GridFunction(F.grid, out)


def sup_error(F: GridFunction, mp: MeasureParams) -> float:
    """Max over the grid of |F(x_j) - G(x_j)| against the limit CDF."""
    return float(np.max(np.abs(F.values - gamma_cdf(F.grid, mp))))


def _grid_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Second-order derivative estimates: central interior, 3-point ends."""
    if values.shape[0] < 3:
        raise DomainError("derivative estimates need at least 3 grid points")
    d = np.empty_like(values)
    d[1:-1] = (values[2:] - values[:-2]) / (2.0 * h)
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
    d[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * h)
    return d


def derivative_max(f: DensityGrid) -> float:
    """Estimate of max |f'| over the grid by finite differences."""
    return float(np.max(np.abs(_grid_derivative(f.values, f.spacing))))


def distribution_to_density(F: GridFunction, mp: MeasureParams) -> DensityGrid:
    """Convert a distribution grid to the weighted density representation.

    f(x) = (1+(m-1)x)(m+(m-1)x) F'(x) with F' from finite differences;
    tiny negative values from differencing noise are clipped to 0.
    """
    m = mp.m
    weight = (1.0 + (m - 1) * F.grid) * (m + (m - 1) * F.grid)
    vals = weight * _grid_derivative(F.values, F.spacing)
    return DensityGrid(F.grid, np.maximum(vals, 0.0))


def iterate_with_final(
    F0: GridFunction,
    mp: MeasureParams,
    steps: int,
    tol: float = DEFAULT_TOL,
    floor: float = RATIO_FLOOR,
) -> tuple[list[IterationReport], GridFunction]:
    """Like :func:`iterate`, but also hands back the final iterate."""
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    F = F0
    e = sup_error(F, mp)
    reports = [IterationReport(0, e, None, derivative_max(distribution_to_density(F, mp)))]
    for n in range(1, steps + 1):
        F = apply_gk(F, mp, tol)
        e_prev, e = e, sup_error(F, mp)
        ratio = e / e_prev if (e_prev > floor and e > floor) else None
        dm = derivative_max(distribution_to_density(F, mp))
        reports.append(IterationReport(n, e, ratio, dm))
    return reports, F


def iterate(
    F0: GridFunction,
    mp: MeasureParams,
    steps: int,
    tol: float = DEFAULT_TOL,
    floor: float = RATIO_FLOOR,
) -> list[IterationReport]:
    """Run `steps` distribution-iteration steps, recording diagnostics.

    Report n holds e_n = sup|F_n - G|, the ratio e_n/e_{n-1} (None at n=0
    or once either error is below `floor`), and the derivative maximum of
    the weighted density of F_n.  The default floor matches the
    interpolation noise of the default grid; runs on finer grids resolve
    smaller errors and may lower it.
    """
    return iterate_with_final(F0, mp, steps, tol, floor)[0]


def pf_coefficient(i: int, t, mp: MeasureParams):
    """Transfer coefficient of the density iteration, in (0, 1).

    P_i(t) = (m-1) alpha^{i+1} (t+1)(t+m)
             / ((t + (m-1) alpha^i + 1)(t + (m-1) alpha^{i+1} + 1)),

    evaluated at t = (m-1)x, t in [0, m-1].  The family sums to 1 over i.
    """
    if i < 0:
        raise DomainError(f"series index must be >= 0, got {i}")
    m = mp.m
    ai = float(m) ** -i
    ai1 = ai / m
    ts = np.asarray(t, dtype=float)
    num = (m - 1) * ai1 * (ts + 1.0) * (ts + m)
    den = (ts + (m - 1) * ai + 1.0) * (ts + (m - 1) * ai1 + 1.0)
    val = num / den
    return float(val) if ts.ndim == 0 else val


def density_transfer(f: DensityGrid, mp: MeasureParams, tol: float = DEFAULT_TOL) -> DensityGrid:
    """One step of the density iteration.

    (Tf)(x) = sum_{i>=0} P_i((m-1)x) f(alpha^i / (1+(m-1)x)), truncated when
    the tail envelope max|f| * m * alpha^I falls below tol; interpolation as
    in apply_gk.  The constant k_m is the fixed point.
    """
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    m = mp.m
    interp = MonotoneCubic(f.grid, f.values)
    scale = float(np.max(f.values))
    nterms = _series_length(scale * m, m, tol)
    t = (m - 1) * f.grid
    shrink = 1.0 / (1.0 + t)
    out = np.zeros_like(f.grid)
    apow = 1.0
    for i in range(nterms):
        out += pf_coefficient(i, t, mp) * interp(apow * shrink)
        apow /= m
    np.maximum(out, 0.0, out=out)
    return DensityGrid(f.grid, out)


def rate_estimate(
    reports: Sequence[IterationReport], window: int, floor: float = RATIO_FLOOR
) -> RateFit:
    """Geometric rate fitted to the trailing `window`+1 sup-errors.

    Least-squares slope of log e_n against n, exponentiated.  If any error
    in the window sits at or below `floor` (grid resolution) the fit is
    meaningless and a degenerate RateFit is returned instead of a number.
    """
    if window < 1:
        raise DomainError(f"window must be >= 1, got {window}")
    if len(reports) < window + 1:
        raise DomainError(
            f"need at least {window + 1} reports for a window of {window}, got {len(reports)}"
        )
    tail = reports[-(window + 1):]
    errors = np.array([r.sup_error for r in tail])
    if np.any(errors <= floor):
        return RateFit(rate=None, degenerate=True, points=len(tail))
    ns = np.array([r.n for r in tail], dtype=float)
    slope = np.polyfit(ns, np.log(errors), 1)[0]
    return RateFit(rate=float(np.exp(slope)), degenerate=False, points=len(tail))
