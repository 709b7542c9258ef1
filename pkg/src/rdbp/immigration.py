"""Two populations, one resource pool: when can hosts and immigrants coexist?

With immigrants arriving at rate alpha per host, the pooled society serves
weakest-first against the combined income r_h + alpha * r_i, so the common
service threshold tau solves

    m_h * PM_h(tau) + alpha * m_i * PM_i(tau) = r_h + alpha * r_i.

Stable coexistence asks the served reproduction rates to balance at or
above replacement: m_h * F_h(tau) = m_i * F_i(tau) >= 1.  scan_alpha walks
an alpha grid, brackets sign changes of the imbalance, and refines each to
a candidate equilibrium ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .distributions import PopulationParams
from .errors import ResourceSurplus

_MAX_BISECT = 1200
_GAP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ImmigrationScenario:
    """Host and immigrant populations plus the arrival ratio alpha."""

    home: PopulationParams
    immigrant: PopulationParams
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise ValueError("alpha must be nonnegative and finite")


@dataclass(frozen=True)
class EquilibriumReport:
    tau: float
    lhs: float
    rhs: float
    gap: float
    above_replacement: bool
    condition_met: bool
    tolerance: float


@dataclass(frozen=True)
class AlphaPoint:
    alpha: float
    tau: float | None
    lhs: float | None
    rhs: float | None
    gap: float | None


@dataclass(frozen=True)
class AlphaRoot:
    alpha: float
    tau: float
    gap: float
    bracket: tuple[float, float]


@dataclass(frozen=True)
class AlphaScan:
    points: list[AlphaPoint]
    roots: list[AlphaRoot]


def _mixed_demand(scenario: ImmigrationScenario, x: float) -> float:
    m_h = scenario.home.mean_offspring
    m_i = scenario.immigrant.mean_offspring
    return (m_h * scenario.home.claims.partial_moment(x)
            + scenario.alpha * m_i * scenario.immigrant.claims.partial_moment(x))


def solve_tau_mixed(scenario: ImmigrationScenario) -> float:
    """Pooled service threshold; smallest root, as in the one-population case.

    Raises ResourceSurplus when the combined income exceeds the combined
    mean demand m_h*mu_h + alpha*m_i*mu_i.
    """
    home, imm = scenario.home, scenario.immigrant
    alpha = scenario.alpha
    target = home.mean_resource + alpha * imm.mean_resource
    demand_cap = (home.mean_offspring * home.mean_claim
                  + alpha * imm.mean_offspring * imm.mean_claim)
    if target > demand_cap:
        # Report the combined quantities through the same signal type.
        raise ResourceSurplus(target, 1.0, demand_cap)
    lo = min(home.claims.support[0], imm.claims.support[0])
    hi = max(home.claims.support[1], imm.claims.support[1])
    if target <= 0.0:
        return lo
    if target >= demand_cap:
        return hi
    if math.isinf(hi):
        hi = max(1.0, 2.0 * lo)
        while _mixed_demand(scenario, hi) < target:
            hi *= 2.0
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _mixed_demand(scenario, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def check_equilibrium(scenario: ImmigrationScenario, *,
                      tolerance: float = 1e-9) -> EquilibriumReport:
    """Evaluate the coexistence condition at this scenario's alpha.

    lhs and rhs are the served reproduction rates m_h*F_h(tau) and
    m_i*F_i(tau); the condition holds when they agree within tolerance
    and sit at or above replacement (>= 1 - tolerance).
    """
    tau = solve_tau_mixed(scenario)
    lhs = scenario.home.mean_offspring * scenario.home.claims.cdf(tau)
    rhs = scenario.immigrant.mean_offspring * scenario.immigrant.claims.cdf(tau)
    gap = lhs - rhs
    above = min(lhs, rhs) >= 1.0 - tolerance
    met = abs(gap) <= tolerance and above
    return EquilibriumReport(tau=tau, lhs=lhs, rhs=rhs, gap=gap,
                             above_replacement=above, condition_met=met,
                             tolerance=tolerance)


def _gap_at(home: PopulationParams, immigrant: PopulationParams,
            alpha: float) -> AlphaPoint:
    scenario = ImmigrationScenario(home, immigrant, alpha)
    try:
        tau = solve_tau_mixed(scenario)
    except ResourceSurplus:
        return AlphaPoint(alpha=alpha, tau=None, lhs=None, rhs=None, gap=None)
    lhs = home.mean_offspring * home.claims.cdf(tau)
    rhs = immigrant.mean_offspring * immigrant.claims.cdf(tau)
    return AlphaPoint(alpha=alpha, tau=tau, lhs=lhs, rhs=rhs, gap=lhs - rhs)


def scan_alpha(home: PopulationParams, immigrant: PopulationParams,
               alpha_grid: Sequence[float], *,
               gap_tol: float = _GAP_TOL) -> AlphaScan:
    """Trace the rate imbalance across alpha and refine its sign changes.

    Surplus points (no threshold) appear with None fields and break any
    bracket that would span them.  Each sign change is bisected in alpha
    until |gap| <= gap_tol or the interval exhausts floating point.
    """
    alphas = [float(a) for a in alpha_grid]
    if not alphas:
        raise ValueError("alpha_grid must be nonempty")
    if any(a < 0.0 for a in alphas):
        raise ValueError("alpha values must be nonnegative")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha_grid must be strictly increasing")
    points = [_gap_at(home, immigrant, a) for a in alphas]
    roots = []
    for left, right in zip(points, points[1:]):
        if left.gap is None or right.gap is None:
            continue
        if left.gap == 0.0:
            roots.append(AlphaRoot(alpha=left.alpha, tau=left.tau,
                                   gap=left.gap,
                                   bracket=(left.alpha, left.alpha)))
            continue
        if left.gap * right.gap < 0.0:
            roots.append(_refine(home, immigrant, left, right, gap_tol))
    last = points[-1]
    if last.gap == 0.0:
        roots.append(AlphaRoot(alpha=last.alpha, tau=last.tau, gap=last.gap,
                               bracket=(last.alpha, last.alpha)))
    return AlphaScan(points=points, roots=roots)


def _refine(home, immigrant, left: AlphaPoint, right: AlphaPoint,
            gap_tol: float) -> AlphaRoot:
    lo, hi = left.alpha, right.alpha
    lo_gap = left.gap
    best = left if abs(left.gap) <= abs(right.gap) else right
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        point = _gap_at(home, immigrant, mid)
        if point.gap is None:
            # The surplus set is a half-line in alpha, so a bracket between
            # two non-surplus grid points cannot contain one; bail anyway.
            break
        if abs(point.gap) < abs(best.gap):
            best = point
        if abs(point.gap) <= gap_tol:
            break
        if (point.gap > 0.0) == (lo_gap > 0.0):
            lo = mid
            lo_gap = point.gap
        else:
            hi = mid
    return AlphaRoot(alpha=best.alpha, tau=best.tau, gap=best.gap,
                     bracket=(left.alpha, right.alpha))
