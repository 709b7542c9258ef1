"""rdbp: resource dependent branching processes.

Societies whose descendants file claims against a shared resource flow,
served in a policy's priority order.  The package solves the service
thresholds and extinction/survival criteria for the two extremal policies
(weakest-first, strongest-first), restates them on Lorenz curves,
classifies the regime in between, simulates trajectories with a keyed
counter-based sampler, and checks two-population immigration equilibria.
"""

__version__ = "0.1.0"

from .criteria import (
    CriterionReport,
    Regime,
    RegimeClassification,
    SweepRow,
    Verdict,
    classify_regime,
    envelope_sweep,
    lc_criterion_check,
    sfs_criterion,
    solve_tau,
    solve_theta,
    wfs_criterion,
)
from .distributions import (
    UNBOUNDED,
    Constant,
    Empirical,
    Exponential,
    NearDegenerate,
    Pareto,
    PopulationParams,
    ReproductionLaw,
    Uniform,
    sample_at,
    sample_offspring,
    sample_stream,
)
from .engine import (
    DEFAULT_POP_CAP,
    EnvelopmentPoint,
    ExtinctionEstimate,
    Outcome,
    Policy,
    Trajectory,
    envelopment_experiment,
    estimate_extinction,
    policy_count,
    sfs_count,
    simulate_trajectory,
    step,
    wfs_count,
)
from .errors import ConfigError, RdbpError, ResourceSurplus
from .immigration import (
    AlphaPoint,
    AlphaRoot,
    AlphaScan,
    EquilibriumReport,
    ImmigrationScenario,
    check_equilibrium,
    scan_alpha,
    solve_tau_mixed,
)
from .kernels import BACKEND
from .lorenz import (
    AnalyticLorenz,
    DominanceVerdict,
    LineOfEquality,
    LorenzCurve,
    PerfectInequality,
    PiecewiseLinearLorenz,
    Relation,
    curve_of,
    gini,
    lc_dominates,
    lc_empirical,
    lc_eval,
    lc_inverse,
    lorenz_table,
)

__all__ = [
    "AlphaPoint", "AlphaRoot", "AlphaScan", "AnalyticLorenz", "BACKEND",
    "ConfigError", "Constant", "CriterionReport", "DEFAULT_POP_CAP",
    "DominanceVerdict", "Empirical", "EnvelopmentPoint", "EquilibriumReport",
    "Exponential", "ExtinctionEstimate", "ImmigrationScenario",
    "LineOfEquality", "LorenzCurve", "NearDegenerate", "Outcome", "Pareto",
    "PerfectInequality", "PiecewiseLinearLorenz", "Policy", "PopulationParams",
    "RdbpError", "Regime", "RegimeClassification", "Relation",
    "ReproductionLaw", "ResourceSurplus", "SweepRow", "Trajectory",
    "UNBOUNDED", "Uniform", "Verdict", "check_equilibrium", "classify_regime",
    "curve_of", "envelope_sweep", "envelopment_experiment",
    "estimate_extinction", "gini", "lc_criterion_check", "lc_dominates",
    "lc_empirical", "lc_eval", "lc_inverse", "lorenz_table", "policy_count",
    "sample_at", "sample_offspring", "sample_stream", "scan_alpha",
    "sfs_count", "sfs_criterion", "simulate_trajectory", "solve_tau",
    "solve_tau_mixed", "solve_theta", "step", "wfs_count", "wfs_criterion",
]
