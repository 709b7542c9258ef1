"""Lorenz curves: share of total claim mass held by the poorest fraction p.

The analytic path uses the identity LC(p) = partial_moment(quantile(p)) / mean,
so closed-form partial moments carry over directly; the empirical path is the
exact piecewise-linear curve of a finite sample.  Higher curve means more
equal: the line of equality LC(p) = p sits on top, the perfect-inequality
limit (all mass on one shoulder) at the bottom.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import Constant, Empirical

_DEFAULT_GRID = 1025
_FLAT_TOL = 1e-12


class LorenzCurve:
    """Base interface: evaluate(p) on [0, 1], 0 at 0 and 1 at 1."""

    def evaluate(self, p: float) -> float:
        raise NotImplementedError

    def evaluate_grid(self, ps: np.ndarray) -> np.ndarray:
        return np.array([self.evaluate(float(p)) for p in ps])

    def __call__(self, p: float) -> float:
        return self.evaluate(p)


class LineOfEquality(LorenzCurve):
    """Everyone holds the same: LC(p) = p."""

    def evaluate(self, p: float) -> float:
        _check_level(p)
        return p

    def __repr__(self):
        return "LineOfEquality()"


class PerfectInequality(LorenzCurve):
    """Limit curve with all mass in a vanishing top fraction."""

    def evaluate(self, p: float) -> float:
        _check_level(p)
        return 1.0 if p == 1.0 else 0.0

    def __repr__(self):
        return "PerfectInequality()"


class AnalyticLorenz(LorenzCurve):
    """Lorenz curve of a parametric distribution with positive mean."""

    def __init__(self, dist):
        if dist.mean <= 0.0:
            raise ValueError("Lorenz curve needs a positive mean")
        self.dist = dist

    def evaluate(self, p: float) -> float:
        _check_level(p)
        if p == 0.0:
            return 0.0
        if p == 1.0:
            return 1.0
        x = self.dist.quantile(p)
        return self.dist.partial_moment(x) / self.dist.mean

    def __repr__(self):
        return f"AnalyticLorenz({self.dist!r})"


class PiecewiseLinearLorenz(LorenzCurve):
    """Exact Lorenz curve of a finite sample: knots (k/n, S_k/S_n)."""

    def __init__(self, knots_p: np.ndarray, knots_v: np.ndarray):
        self.knots_p = np.asarray(knots_p, dtype=np.float64)
        self.knots_v = np.asarray(knots_v, dtype=np.float64)
        if self.knots_p.shape != self.knots_v.shape or self.knots_p.ndim != 1:
            raise ValueError("knot arrays must be 1-d and equal length")

    def evaluate(self, p: float) -> float:
        _check_level(p)
        return float(np.interp(p, self.knots_p, self.knots_v))

    def evaluate_grid(self, ps: np.ndarray) -> np.ndarray:
        return np.interp(ps, self.knots_p, self.knots_v)

    def __repr__(self):
        return f"PiecewiseLinearLorenz(<{self.knots_p.size} knots>)"


def _check_level(p: float):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")


def lc_empirical(sample: Sequence[float]) -> PiecewiseLinearLorenz:
    """Lorenz curve of a sample: sort, prefix-sum, normalize by the total."""
    arr = np.sort(np.asarray(sample, dtype=np.float64))
    if arr.size == 0:
        raise ValueError("sample must be nonempty")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise ValueError("sample values must be finite and nonnegative")
    prefix = np.cumsum(arr)
    total = float(prefix[-1])
    if total <= 0.0:
        raise ValueError("sample total must be positive")
    n = arr.size
    knots_p = np.arange(n + 1, dtype=np.float64) / n
    knots_v = np.concatenate(([0.0], prefix / total))
    return PiecewiseLinearLorenz(knots_p, knots_v)


def curve_of(dist) -> LorenzCurve:
    """The Lorenz curve belonging to a claim or resource distribution."""
    if isinstance(dist, Constant):
        return LineOfEquality()
    if isinstance(dist, Empirical):
        return lc_empirical(dist.values)
    return AnalyticLorenz(dist)


def lc_eval(curve: LorenzCurve, p: float) -> float:
    return curve.evaluate(p)


def lc_inverse(curve: LorenzCurve, y: float, *, tol: float = 1e-12) -> float:
    """Smallest p with LC(p) >= y, by bisection.

    Lorenz curves are nondecreasing but may have flat stretches; keeping the
    invariant LC(lo) < y <= LC(hi) makes the limit the left edge of any flat
    segment at height y.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"y must be in [0, 1], got {y}")
    lo, hi = 0.0, 1.0
    if curve.evaluate(lo) >= y:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if curve.evaluate(mid) >= y:
            hi = mid
        else:
            lo = mid
    return hi


class Relation(enum.Enum):
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated_by"
    EQUIVALENT = "equivalent"
    CROSSES = "crosses"


@dataclass(frozen=True)
class DominanceVerdict:
    """Pointwise grid comparison of curve a against curve b.

    max_above is the largest a - b gap, max_below the most negative one;
    the witnesses are grid points attaining them (None when the side never
    exceeds tolerance).
    """

    relation: Relation
    max_above: float
    max_below: float
    witness_above: float | None
    witness_below: float | None


def lc_dominates(a: LorenzCurve, b: LorenzCurve, *,
                 grid_points: int = _DEFAULT_GRID,
                 tol: float = _FLAT_TOL) -> DominanceVerdict:
    """Compare two curves pointwise on a uniform grid.

    `a dominates b` means a >= b everywhere (a at least as equal as b),
    with strict excess somewhere beyond tolerance.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    ps = np.linspace(0.0, 1.0, grid_points)
    diff = a.evaluate_grid(ps) - b.evaluate_grid(ps)
    hi_idx = int(np.argmax(diff))
    lo_idx = int(np.argmin(diff))
    max_above = float(diff[hi_idx])
    max_below = float(diff[lo_idx])
    some_above = max_above > tol
    some_below = max_below < -tol
    if some_above and some_below:
        relation = Relation.CROSSES
    elif some_above:
        relation = Relation.DOMINATES
    elif some_below:
        relation = Relation.DOMINATED_BY
    else:
        relation = Relation.EQUIVALENT
    return DominanceVerdict(
        relation=relation,
        max_above=max_above,
        max_below=max_below,
        witness_above=float(ps[hi_idx]) if some_above else None,
        witness_below=float(ps[lo_idx]) if some_below else None,
    )


def gini(curve: LorenzCurve, *, grid_points: int = _DEFAULT_GRID) -> float:
    """Gini coefficient 1 - 2 * integral of LC, by trapezoid on the grid."""
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    ps = np.linspace(0.0, 1.0, grid_points)
    vals = curve.evaluate_grid(ps)
    area = float(np.trapezoid(vals, ps))
    return 1.0 - 2.0 * area


def lorenz_table(curve: LorenzCurve, grid_points: int = 101) -> list[tuple[float, float]]:
    """(p, LC(p)) pairs on a uniform grid, ready for plotting."""
    ps = np.linspace(0.0, 1.0, grid_points)
    vals = curve.evaluate_grid(ps)
    return [(float(p), float(v)) for p, v in zip(ps, vals)]
