"""End-to-end acceptance checks for the toolkit.

Each test covers one numbered claim about the package as a whole:
counting bounds, threshold/Lorenz identities, regime verdicts, Monte
Carlo limits, envelope behavior, empirical-curve consistency, the
immigration reductions, and CLI determinism. Every test prints a single
``[acceptance]`` line with the measured quantity so a verbose run reads
as a scorecard.
"""

import itertools
import json
import math

import numpy as np

from rdbp.cli import main
from rdbp.criteria import (
    envelope_sweep,
    sfs_criterion,
    solve_tau,
    solve_theta,
    wfs_criterion,
)
from rdbp.distributions import (
    Constant,
    Exponential,
    NearDegenerate,
    Pareto,
    PopulationParams,
    ReproductionLaw,
    Uniform,
    sample_stream,
)
from rdbp.engine import (
    Policy,
    envelopment_experiment,
    estimate_extinction,
    policy_count,
    sfs_count,
    wfs_count,
)
from rdbp.immigration import ImmigrationScenario, solve_tau_mixed
from rdbp.lorenz import curve_of, lc_empirical

U01 = Uniform(0.0, 1.0)


def _report(num, slug, ok, detail):
    print(f"[acceptance] {num:02d} {slug}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def test_01_counting_sandwich_over_all_orders():
    # 500 random instances, up to 8 claimants, every t! priority order:
    # the served count must sit between the strongest-first and
    # weakest-first counts, as exact integers.
    rng = np.random.default_rng(20260822)
    perms = {t: [np.array(p, dtype=int) for p in itertools.permutations(range(t))]
             for t in range(1, 9)}
    holder = {}
    probe = Policy.from_ordering("probe", lambda claims: holder["order"])
    checked = 0
    witness = None
    for _ in range(500):
        t = int(rng.integers(1, 9))
        kind = int(rng.integers(0, 3))
        if kind == 0:
            claims = rng.uniform(0.0, 1.0, size=t)
        elif kind == 1:
            claims = rng.exponential(1.0, size=t)
        else:
            # rounded claims so ties are common
            claims = np.round(rng.uniform(0.0, 1.0, size=t), 1)
        budget = float(rng.uniform(0.0, 1.2) * claims.sum())
        lo = sfs_count(claims, budget)
        hi = wfs_count(claims, budget)
        for order in perms[t]:
            holder["order"] = order
            n = policy_count(probe, claims, budget)
            checked += 1
            if not lo <= n <= hi:
                witness = (claims.tolist(), budget, order.tolist(), lo, n, hi)
                break
        if witness is not None:
            break
    assert _report(1, "counting-sandwich", witness is None,
                   f"{checked} orders checked, witness={witness}")


def test_02_threshold_matches_lorenz_identity():
    # tau and theta from the integral equations must land exactly on the
    # Lorenz curve: LC(F(tau)) = r/(m mu) and LC(F(theta)) = 1 - r/(m mu).
    rng = np.random.default_rng(7)
    worst = 0.0
    for dist in (U01, Exponential(1.0), Pareto(1.0, 2.0)):
        curve = curve_of(dist)
        mu = dist.mean
        for _ in range(100):
            m = math.exp(rng.uniform(math.log(1.02), math.log(25.0)))
            r = float(rng.uniform(1e-6, 0.999)) * m * mu
            ratio = r / (m * mu)
            tau = solve_tau(dist, m, r)
            theta = solve_theta(dist, m, r)
            worst = max(worst,
                        abs(curve.evaluate(dist.cdf(tau)) - ratio),
                        abs(curve.evaluate(dist.cdf(theta)) - (1.0 - ratio)))
    assert _report(2, "lorenz-identity", worst <= 1e-9,
                   f"300 (m, r) pairs over 3 families, worst residual {worst:.3e}")


def test_03_cdf_and_lorenz_verdicts_agree():
    # the survival/extinction verdicts can be read either from the
    # criteria m F(tau), m (1 - F(theta)) or from the Lorenz curve at
    # 1/m and 1 - 1/m; both readings must agree off the critical band
    rng = np.random.default_rng(11)
    dists = [U01, Uniform(0.5, 3.0), Exponential(1.0), Exponential(0.25),
             Pareto(1.0, 2.0), Pareto(2.0, 3.5)]
    kept = 0
    disagreements = 0
    while kept < 100:
        dist = dists[int(rng.integers(len(dists)))]
        mu = dist.mean
        m = math.exp(rng.uniform(math.log(1.05), math.log(20.0)))
        r = float(rng.uniform(0.02, 0.98)) * m * mu
        wval = m * dist.cdf(solve_tau(dist, m, r))
        sval = m * (1.0 - dist.cdf(solve_theta(dist, m, r)))
        if min(abs(wval - 1.0), abs(sval - 1.0)) < 1e-5:
            continue
        kept += 1
        curve = curve_of(dist)
        ratio = r / (m * mu)
        cdf_extinct = wval < 1.0
        cdf_survive = sval > 1.0
        lc_extinct = curve.evaluate(1.0 / m) > ratio
        lc_survive = curve.evaluate(1.0 - 1.0 / m) > 1.0 - ratio
        if cdf_extinct != lc_extinct or cdf_survive != lc_survive:
            disagreements += 1
    assert _report(3, "verdict-equivalence", disagreements == 0,
                   f"{kept} configurations, {disagreements} disagreements")


def test_04_extinction_regime_monte_carlo():
    # m = 1.2, r = 0.05 on uniform claims puts the weakest-first
    # criterion at sqrt(2 r m) = 0.346 < 1, so extinction is certain;
    # the simulator must agree almost always
    params = PopulationParams(ReproductionLaw([0.2, 0.4, 0.4]),
                              Constant(0.05), U01)
    value, _ = wfs_criterion(params)
    assert abs(value - math.sqrt(0.12)) <= 1e-12
    est = estimate_extinction(params, Policy.weakest_first(), ancestors=20,
                              replicates=500, gen_cap=300, seed=11)
    frac = est.extinct / est.replicates
    assert _report(4, "extinction-regime-mc", frac >= 0.99,
                   f"criterion {value:.6f}, extinct fraction {frac:.4f}")


def test_05_survival_regime_monte_carlo():
    # m = 10, r = 1: the strongest-first criterion 10 (1 - sqrt(0.8)) is
    # about 1.056 > 1, so survival has positive probability; from 200
    # ancestors the surviving fraction should be near one
    p11 = 10.0 / 11.0
    law = ReproductionLaw([1.0 - p11] + [0.0] * 10 + [p11])  # mean 10
    params = PopulationParams(law, Constant(1.0), U01)
    value, _ = sfs_criterion(params)
    assert abs(value - (10.0 - 10.0 * math.sqrt(0.8))) <= 1e-12
    est = estimate_extinction(params, Policy.strongest_first(), ancestors=200,
                              replicates=200, gen_cap=100,
                              pop_cap=1_000_000, seed=12)
    frac = 1.0 - est.q_hat
    assert _report(5, "survival-regime-mc", frac >= 0.90,
                   f"criterion {value:.6f}, surviving fraction {frac:.4f}")


def test_06_reduces_to_galton_watson_when_resources_never_bind():
    # offspring 0 or 2 with p2 = 3/4 and a budget of 5 per parent: at
    # most 2 children per parent, each claiming under 1, so allocation
    # never binds and the process is a plain branching process whose
    # extinction probability is the pgf fixed point 1/3
    law = ReproductionLaw([0.25, 0.0, 0.75])
    params = PopulationParams(law, Constant(5.0), U01)
    est = estimate_extinction(params, Policy.weakest_first(), ancestors=1,
                              replicates=10_000, gen_cap=200,
                              pop_cap=2000, seed=21)
    dev = abs(est.q_hat - 1.0 / 3.0)
    assert _report(6, "galton-watson-limit", dev <= 0.02,
                   f"q_hat {est.q_hat:.4f}, |q_hat - 1/3| = {dev:.4f}")


def test_07_near_equal_claims_collapse_the_envelope():
    # when all claims are nearly identical, F(tau) and 1 - F(theta) both
    # approach r/(m mu) and the band between the weakest-first and
    # strongest-first frontiers collapses at the rate of the claim spread
    dist = NearDegenerate(0.5, 1e-3)
    tau = solve_tau(dist, 4.0, 0.5)
    theta = solve_theta(dist, 4.0, 0.5)
    ratio = 0.5 / (4.0 * dist.mean)
    d_tau = abs(dist.cdf(tau) - ratio)
    d_theta = abs((1.0 - dist.cdf(theta)) - ratio)
    rows = envelope_sweep(dist, 0.5, np.linspace(1.5, 8.0, 66))
    band = max(row.f_tau - row.one_minus_f_theta for row in rows)
    ok = d_tau <= 1e-2 and d_theta <= 1e-2 and band <= 2e-2
    assert _report(7, "perfect-equality-limit", ok,
                   f"|F(tau)-r/(m mu)| = {d_tau:.2e}, "
                   f"|(1-F(theta))-r/(m mu)| = {d_theta:.2e}, band {band:.2e}")


def test_08_sandwich_fraction_grows_with_ancestors():
    # coupled triples (strongest-first, arrival order, weakest-first)
    # from shared draws: the fraction of runs enveloped at the horizon
    # must not drop as the ancestor count grows, and is near 1 at 1000
    law = ReproductionLaw([0.2, 0.0, 0.0, 0.0, 0.0, 0.8])  # mean 4
    params = PopulationParams(law, Constant(0.5), U01)
    points = envelopment_experiment(params, Policy.arrival_order(),
                                    ancestor_grid=[10, 1000], replicates=200,
                                    horizon=50, pop_cap=1_000_000, seed=31)
    frac_small, frac_large = points[0].fraction, points[1].fraction
    ok = frac_large >= frac_small and frac_large >= 0.95
    assert _report(8, "envelopment-fraction", ok,
                   f"fraction at 10 ancestors {frac_small:.3f}, "
                   f"at 1000 ancestors {frac_large:.3f}")


def test_09_empirical_lorenz_tracks_analytic_curves():
    # 1e5 seeded draws per family; the empirical curve is evaluated at
    # its own knots k/n, where the piecewise-linear values are exact.
    # Between knots the gap (analytic - empirical) is convex, so its
    # maximum is attained at knots; the knot maximum therefore bounds
    # the sup-distance up to the chord error over one 1e-5 cell.
    worst = 0.0
    per_family = []
    for dist in (U01, NearDegenerate(0.5, 1e-3), Exponential(1.0),
                 Pareto(1.0, 2.0), Constant(0.7)):
        draws = sample_stream(dist, 20260822, count=100_000)
        emp = lc_empirical(draws)
        ana = curve_of(dist)
        knots = np.arange(draws.size + 1) / draws.size
        sup = float(np.max(np.abs(emp.evaluate_grid(knots)
                                  - ana.evaluate_grid(knots))))
        per_family.append(f"{type(dist).__name__}={sup:.2e}")
        worst = max(worst, sup)
    assert _report(9, "empirical-lorenz", worst <= 0.01,
                   "sup distance " + ", ".join(per_family))


def test_10_immigration_reductions():
    # alpha = 0 must reproduce the single-population threshold, and two
    # populations with identical claims and mean pool to a single
    # process at the size-weighted resource rate
    law4 = ReproductionLaw([0.2, 0.0, 0.0, 0.0, 0.0, 0.8])
    home = PopulationParams(law4, Constant(0.5), U01)
    lone = ImmigrationScenario(
        home, PopulationParams(law4, Constant(0.7), Uniform(0.0, 2.0)), 0.0)
    worst = abs(solve_tau_mixed(lone) - solve_tau(U01, 4.0, 0.5))
    immigrant = PopulationParams(law4, Constant(0.2), U01)
    for alpha in (0.5, 1.0, 2.0, 3.0):
        tau = solve_tau_mixed(ImmigrationScenario(home, immigrant, alpha))
        r_eff = (0.5 + alpha * 0.2) / (1.0 + alpha)
        worst = max(worst, abs(tau - solve_tau(U01, 4.0, r_eff)))
    assert _report(10, "immigration-reductions", worst <= 1e-10,
                   f"worst threshold deviation {worst:.3e}")


def test_11_stochastic_subcommands_are_byte_deterministic(tmp_path):
    # rerunning simulate and envelope-mc with the same seed must leave
    # byte-identical artifacts, trajectory dumps included
    pop = {
        "reproduction": {"probabilities": [0.2, 0.0, 0.0, 0.0, 0.0, 0.8]},
        "resources": {"family": "constant", "value": 0.5},
        "claims": {"family": "uniform", "a": 0.0, "b": 1.0},
    }
    sim_cfg = tmp_path / "sim.json"
    sim_cfg.write_text(json.dumps(dict(
        pop, policy="weakest_first",
        simulation={"seed": 99, "ancestors": 3, "replicates": 30,
                    "gen_cap": 25, "record_trajectories": 2})))
    env_cfg = tmp_path / "env.json"
    env_cfg.write_text(json.dumps(dict(
        pop, simulation={"seed": 5, "replicates": 25, "horizon": 12,
                         "ancestor_grid": [2, 8]})))
    pairs = []
    for tag in ("a", "b"):
        sim_out = tmp_path / f"sim-{tag}.json"
        traj_out = tmp_path / f"traj-{tag}.csv"
        env_out = tmp_path / f"env-{tag}.json"
        assert main(["simulate", "--config", str(sim_cfg), "--out",
                     str(sim_out), "--trajectories-out", str(traj_out)]) == 0
        assert main(["envelope-mc", "--config", str(env_cfg), "--out",
                     str(env_out)]) == 0
        pairs.append((sim_out.read_bytes(), traj_out.read_bytes(),
                      env_out.read_bytes()))
    same = pairs[0] == pairs[1]
    sizes = tuple(len(b) for b in pairs[0])
    assert _report(11, "byte-determinism", same,
                   f"3 artifacts compared, {sizes} bytes each")
