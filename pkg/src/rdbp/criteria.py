"""Extinction and survival criteria, in threshold and Lorenz-curve form.

Serving weakest-first, the long-run service threshold tau solves
partial_moment(tau) = r/m: claims below tau get served, and the society
behaves like a branching process with mean m*F(tau).  Serving
strongest-first the threshold theta solves mean - partial_moment(theta) =
r/m and the criterion value is m*(1 - F(theta)).  Both criteria compare
against 1; the Lorenz reformulation moves the same comparison onto the
claim distribution's Lorenz curve at abscissae 1/m and 1 - 1/m.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .distributions import ClaimDistribution, PopulationParams
from .errors import ResourceSurplus
from .lorenz import curve_of

#: Width of the band around 1 inside which a criterion is called critical.
DEFAULT_CRITICAL_EPS = 1e-9

_MAX_BISECT = 1200


class Verdict(enum.Enum):
    EXTINCTION_CERTAIN = "ExtinctionCertain"
    SURVIVAL_POSSIBLE = "SurvivalPossible"
    CRITICAL = "Critical"


class Regime(enum.Enum):
    SURE_EXTINCTION = "SureExtinction"
    SURE_SURVIVAL = "SureSurvival"
    POLICY_DEPENDENT = "PolicyDependent"
    CRITICAL = "Critical"


@dataclass(frozen=True)
class RegimeClassification:
    regime: Regime
    critical_criterion: str | None = None
    note: str | None = None


@dataclass(frozen=True)
class CriterionReport:
    """Both criteria plus their Lorenz-curve restatements, side by side.

    The threshold fields are None when mean resources exceed mean demand
    (no threshold exists); the lc_* fields are None when m <= 1 (the
    abscissa 1/m leaves the unit interval).
    """

    tau: float | None
    theta: float | None
    wfs_value: float | None
    sfs_value: float | None
    lc_wfs_lhs: float | None
    lc_wfs_rhs: float | None
    lc_sfs_lhs: float | None
    lc_sfs_rhs: float | None
    regime: RegimeClassification


@dataclass(frozen=True)
class SweepRow:
    m: float
    inv_m: float
    f_tau: float
    f_theta: float
    one_minus_f_theta: float
    regime: Regime


def _bisect_smallest(accept: Callable[[float], bool], lo: float, hi: float) -> float:
    """Leftmost x with accept(x), given not accept(lo) and accept(hi).

    Runs to floating-point exhaustion (the midpoint collides with an
    endpoint), so flat stretches resolve to their left edge and no
    tolerance parameter is needed.
    """
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if accept(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _check_m_r(m: float, r: float):
    if not (math.isfinite(m) and m > 0.0):
        raise ValueError(f"mean offspring m must be positive, got {m}")
    if not (math.isfinite(r) and r >= 0.0):
        raise ValueError(f"mean resource r must be nonnegative, got {r}")


def solve_tau(dist: ClaimDistribution, m: float, r: float) -> float:
    """Weakest-first service threshold: smallest root of PM(tau) = r/m.

    Returns the generalized root inf{x : partial_moment(x) >= r/m}, which
    for step partial moments (empirical claims) is the left edge of the
    jump.  Raises ResourceSurplus when r > m * mean (no root).
    """
    _check_m_r(m, r)
    mu = dist.mean
    if r > m * mu:
        raise ResourceSurplus(r, m, mu)
    target = r / m
    lo, hi = dist.support
    if target <= 0.0:
        return lo
    if target >= mu:
        return hi
    if math.isinf(hi):
        hi = max(1.0, 2.0 * lo)
        while dist.partial_moment(hi) < target:
            hi *= 2.0
    return _bisect_smallest(lambda x: dist.partial_moment(x) >= target, lo, hi)


def solve_theta(dist: ClaimDistribution, m: float, r: float) -> float:
    """Strongest-first threshold: smallest root of mean - PM(theta) = r/m.

    The tail mean - PM is nonincreasing, so this is the smallest theta at
    which the mass above theta fits the resource flow.  At r = m * mean it
    degenerates to the essential infimum; raises ResourceSurplus beyond.
    """
    _check_m_r(m, r)
    mu = dist.mean
    if r > m * mu:
        raise ResourceSurplus(r, m, mu)
    target = r / m
    lo, hi = dist.support
    if target >= mu:
        return lo
    if target <= 0.0:
        return hi
    if math.isinf(hi):
        probe = max(1.0, 2.0 * lo)
        while mu - dist.partial_moment(probe) > target:
            probe *= 2.0
        hi = probe
    return _bisect_smallest(lambda x: mu - dist.partial_moment(x) <= target, lo, hi)


def _wfs_value(dist: ClaimDistribution, m: float, r: float) -> float:
    return m * dist.cdf(solve_tau(dist, m, r))


def _sfs_value(dist: ClaimDistribution, m: float, r: float) -> float:
    return m * (1.0 - dist.cdf(solve_theta(dist, m, r)))


def _verdict_of(value: float, eps_crit: float) -> Verdict:
    if abs(value - 1.0) <= eps_crit:
        return Verdict.CRITICAL
    return Verdict.SURVIVAL_POSSIBLE if value > 1.0 else Verdict.EXTINCTION_CERTAIN


def wfs_criterion(params: PopulationParams, *,
                  eps_crit: float = DEFAULT_CRITICAL_EPS) -> tuple[float | None, Verdict]:
    """(m * F(tau), verdict) for the weakest-first society.

    Requires supercritical reproduction.  When resources exceed total mean
    demand there is no tau and the value is None with survival possible.
    """
    m = params.mean_offspring
    if m <= 1.0:
        raise ValueError("criterion assumes supercritical reproduction (m > 1)")
    if params.resources_exceed_claims:
        return (None, Verdict.SURVIVAL_POSSIBLE)
    value = _wfs_value(params.claims, m, params.mean_resource)
    return (value, _verdict_of(value, eps_crit))


def sfs_criterion(params: PopulationParams, *,
                  eps_crit: float = DEFAULT_CRITICAL_EPS) -> tuple[float | None, Verdict]:
    """(m * (1 - F(theta)), verdict) for the strongest-first society."""
    m = params.mean_offspring
    if m <= 1.0:
        raise ValueError("criterion assumes supercritical reproduction (m > 1)")
    if params.resources_exceed_claims:
        return (None, Verdict.SURVIVAL_POSSIBLE)
    value = _sfs_value(params.claims, m, params.mean_resource)
    return (value, _verdict_of(value, eps_crit))


def _classify_values(dist: ClaimDistribution, m: float, r: float,
                     eps_crit: float) -> RegimeClassification:
    if m <= 1.0:
        return RegimeClassification(Regime.SURE_EXTINCTION,
                                    note="subcritical reproduction")
    if r > m * dist.mean:
        return RegimeClassification(Regime.SURE_SURVIVAL,
                                    note="resource surplus")
    wfs = _wfs_value(dist, m, r)
    sfs = _sfs_value(dist, m, r)
    wfs_crit = abs(wfs - 1.0) <= eps_crit
    sfs_crit = abs(sfs - 1.0) <= eps_crit
    if wfs_crit or sfs_crit:
        which = "both" if (wfs_crit and sfs_crit) else ("wfs" if wfs_crit else "sfs")
        return RegimeClassification(Regime.CRITICAL, critical_criterion=which)
    wfs_survives = wfs > 1.0
    sfs_survives = sfs > 1.0
    if wfs_survives and sfs_survives:
        return RegimeClassification(Regime.SURE_SURVIVAL)
    if not wfs_survives and not sfs_survives:
        return RegimeClassification(Regime.SURE_EXTINCTION)
    if wfs_survives:
        return RegimeClassification(Regime.POLICY_DEPENDENT)
    # m*F(tau) < 1 < m*(1-F(theta)) would let the least able policy beat the
    # most able one; the Lorenz identities rule it out.
    raise RuntimeError(
        f"inconsistent criteria: wfs={wfs!r} < 1 < sfs={sfs!r}")


def classify_regime(params: PopulationParams, *,
                    eps_crit: float = DEFAULT_CRITICAL_EPS) -> RegimeClassification:
    """Which of the four regimes the society is in.

    SureExtinction: even serving weakest-first dies out (or m <= 1).
    SureSurvival: even serving strongest-first can persist (or resources
    exceed mean demand).  PolicyDependent: the choice of policy decides.
    Critical: a criterion sits within eps_crit of 1.
    """
    return _classify_values(params.claims, params.mean_offspring,
                            params.mean_resource, eps_crit)


def lc_criterion_check(params: PopulationParams, *,
                       eps_crit: float = DEFAULT_CRITICAL_EPS) -> CriterionReport:
    """Evaluate both criteria and their Lorenz restatements, cross-checked.

    Extinction under weakest-first is equivalent to the claim Lorenz curve
    exceeding r/(m*mu) at p = 1/m; survival under strongest-first is
    equivalent to the curve at 1 - 1/m exceeding 1 - r/(m*mu).  Outside
    the critical band the two formulations must agree; disagreement is a
    bug, not a result, and raises RuntimeError.
    """
    dist = params.claims
    m = params.mean_offspring
    r = params.mean_resource
    mu = params.mean_claim
    regime = _classify_values(dist, m, r, eps_crit)
    if m <= 1.0:
        return CriterionReport(tau=None, theta=None, wfs_value=None,
                               sfs_value=None, lc_wfs_lhs=None, lc_wfs_rhs=None,
                               lc_sfs_lhs=None, lc_sfs_rhs=None, regime=regime)
    curve = curve_of(dist)
    lc_wfs_lhs = curve.evaluate(1.0 / m)
    lc_wfs_rhs = r / (m * mu)
    lc_sfs_lhs = curve.evaluate(1.0 - 1.0 / m)
    lc_sfs_rhs = 1.0 - r / (m * mu)
    if r > m * mu:
        return CriterionReport(tau=None, theta=None, wfs_value=None,
                               sfs_value=None, lc_wfs_lhs=lc_wfs_lhs,
                               lc_wfs_rhs=lc_wfs_rhs, lc_sfs_lhs=lc_sfs_lhs,
                               lc_sfs_rhs=lc_sfs_rhs, regime=regime)
    tau = solve_tau(dist, m, r)
    theta = solve_theta(dist, m, r)
    wfs_value = m * dist.cdf(tau)
    sfs_value = m * (1.0 - dist.cdf(theta))
    _assert_agreement(wfs_value, lc_wfs_lhs > lc_wfs_rhs, "wfs",
                      lc_wfs_lhs, lc_wfs_rhs, eps_crit, extinct_side="above")
    _assert_agreement(sfs_value, lc_sfs_lhs > lc_sfs_rhs, "sfs",
                      lc_sfs_lhs, lc_sfs_rhs, eps_crit, extinct_side="below")
    return CriterionReport(tau=tau, theta=theta, wfs_value=wfs_value,
                           sfs_value=sfs_value, lc_wfs_lhs=lc_wfs_lhs,
                           lc_wfs_rhs=lc_wfs_rhs, lc_sfs_lhs=lc_sfs_lhs,
                           lc_sfs_rhs=lc_sfs_rhs, regime=regime)


def _assert_agreement(value: float, lc_exceeds: bool, name: str,
                      lhs: float, rhs: float, eps_crit: float,
                      extinct_side: str):
    # Near-critical configurations may flip either comparison by rounding;
    # only decisively separated values are cross-checked.
    if abs(value - 1.0) <= eps_crit or abs(lhs - rhs) <= eps_crit:
        return
    if extinct_side == "above":
        cdf_says_extinct = value < 1.0
        lc_says_extinct = lc_exceeds
    else:
        cdf_says_extinct = value < 1.0
        lc_says_extinct = not lc_exceeds
    if cdf_says_extinct != lc_says_extinct:
        raise RuntimeError(
            f"{name} criterion disagrees with its Lorenz form: "
            f"value={value!r}, lc lhs={lhs!r}, rhs={rhs!r}")


def envelope_sweep(dist: ClaimDistribution, r: float,
                   m_grid: Sequence[float], *,
                   eps_crit: float = DEFAULT_CRITICAL_EPS) -> list[SweepRow]:
    """F(tau) and 1 - F(theta) across a grid of reproduction means.

    Plotted against 1/m these trace the two regime boundaries; the gap
    between them is the corridor where policy choice decides the outcome.
    Rows where resources exceed m * mean carry NaN thresholds.
    """
    grid = [float(m) for m in m_grid]
    if not grid:
        raise ValueError("m_grid must be nonempty")
    if any(m <= 1.0 for m in grid):
        raise ValueError("m_grid entries must be > 1")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("m_grid must be strictly increasing")
    rows = []
    for m in grid:
        cls = _classify_values(dist, m, r, eps_crit)
        if r > m * dist.mean:
            f_tau = f_theta = one_minus = math.nan
        else:
            f_tau = dist.cdf(solve_tau(dist, m, r))
            f_theta = dist.cdf(solve_theta(dist, m, r))
            one_minus = 1.0 - f_theta
        rows.append(SweepRow(m=m, inv_m=1.0 / m, f_tau=f_tau, f_theta=f_theta,
                             one_minus_f_theta=one_minus, regime=cls.regime))
    return rows
