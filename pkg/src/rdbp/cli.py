"""Command-line front end: JSON config in, plot-ready CSV/JSON out.

Subcommands: classify, solve-tau, lorenz, sweep, simulate, envelope-mc,
immigration-check, immigration-scan, validate.  Exit status 0 on success,
2 for configuration or validation problems, 3 for domain signals (no
service threshold because resources exceed mean demand).

Outputs are deterministic: a given config and seed produce byte-identical
files on every run and every backend.  Stochastic outputs embed the seed
and a sha256 of the canonicalized config.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from typing import Mapping, Sequence

import numpy as np

from . import __version__
from .criteria import (
    DEFAULT_CRITICAL_EPS,
    envelope_sweep,
    lc_criterion_check,
    solve_tau,
    solve_theta,
)
from .distributions import (
    distribution_from_config,
    population_from_config,
)
from .engine import (
    DEFAULT_POP_CAP,
    Policy,
    envelopment_experiment,
    estimate_extinction,
    simulate_trajectory,
)
from .errors import ConfigError, ResourceSurplus
from .immigration import ImmigrationScenario, check_equilibrium, scan_alpha
from .lorenz import LineOfEquality, PerfectInequality, curve_of, lorenz_table

SCHEMA_VERSION = 1

_POLICIES = {
    "weakest_first": Policy.weakest_first,
    "strongest_first": Policy.strongest_first,
    "arrival_order": Policy.arrival_order,
    "alternating": Policy.alternating,
}


# -- config plumbing ---------------------------------------------------------

def _load_config(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}")
    if not isinstance(cfg, Mapping):
        raise ConfigError("config", "top level must be an object")
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(canon.encode("utf-8")).hexdigest()
    return cfg, digest, os.path.dirname(os.path.abspath(path))


def _section(cfg: Mapping, key: str, path: str | None = None) -> Mapping:
    val = cfg.get(key)
    if not isinstance(val, Mapping):
        raise ConfigError(path or key, "missing or not an object")
    return val


def _population(cfg: Mapping, base_dir: str):
    return population_from_config(
        {"claims": cfg.get("claims"), "resources": cfg.get("resources"),
         "reproduction": cfg.get("reproduction")},
        "config", base_dir=base_dir)


def _policy(cfg: Mapping) -> Policy:
    name = cfg.get("policy", "weakest_first")
    if name not in _POLICIES:
        raise ConfigError("policy",
                          f"unknown policy {name!r}; choose from "
                          f"{sorted(_POLICIES)}")
    return _POLICIES[name]()


def _int_field(section: Mapping, key: str, path: str, *, minimum: int,
               default=None) -> int:
    if key not in section:
        if default is not None:
            return default
        raise ConfigError(f"{path}.{key}", "missing required field")
    val = section[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{path}.{key}", f"expected an integer, got {val!r}")
    if val < minimum:
        raise ConfigError(f"{path}.{key}", f"must be at least {minimum}")
    return val


def _float_field(section: Mapping, key: str, path: str, default=None) -> float:
    if key not in section:
        if default is not None:
            return default
        raise ConfigError(f"{path}.{key}", "missing required field")
    val = section[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {val!r}")
    return float(val)


def _resolve_seed(args, sim: Mapping, path: str) -> int:
    if getattr(args, "seed", None) is not None:
        seed = args.seed
    elif "seed" in sim:
        seed = sim["seed"]
    else:
        raise ConfigError(f"{path}.seed",
                          "stochastic subcommands need a seed (config or --seed)")
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"{path}.seed", "seed must be an integer")
    if not 0 <= seed < 2 ** 64:
        raise ConfigError(f"{path}.seed", "seed must fit in 64 unsigned bits")
    return seed


def _parse_grid(spec: str, flag: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(flag, f"grid must look like start:stop:count, got {spec!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        raise ConfigError(flag, f"grid must look like start:stop:count, got {spec!r}")
    if count < 2:
        raise ConfigError(flag, "grid count must be at least 2")
    return [float(x) for x in np.linspace(start, stop, count)]


def _grid_from(args, section: Mapping, key: str, path: str,
               default: list[float] | None = None) -> list[float]:
    if getattr(args, "grid", None) is not None:
        return _parse_grid(args.grid, "--grid")
    if key in section:
        val = section[key]
        if isinstance(val, str):
            return _parse_grid(val, f"{path}.{key}")
        if isinstance(val, Sequence) and not isinstance(val, (str, bytes)):
            out = []
            for i, x in enumerate(val):
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    raise ConfigError(f"{path}.{key}[{i}]", "expected a number")
                out.append(float(x))
            if not out:
                raise ConfigError(f"{path}.{key}", "grid must be nonempty")
            return out
        raise ConfigError(f"{path}.{key}", "expected an array or start:stop:count")
    if default is not None:
        return default
    raise ConfigError(f"{path}.{key}", "missing grid (config or --grid)")


def _eps_critical(cfg: Mapping) -> float:
    crit = cfg.get("criteria")
    if crit is None:
        return DEFAULT_CRITICAL_EPS
    if not isinstance(crit, Mapping):
        raise ConfigError("criteria", "expected an object")
    return _float_field(crit, "eps_critical", "criteria",
                        default=DEFAULT_CRITICAL_EPS)


# -- output plumbing ---------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_json(path: str, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, meta: dict, header: list[str], rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        pairs = " ".join(f"{k}={v}" for k, v in meta.items())
        fh.write(f"# {pairs}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _json_float(value):
    if value is None:
        return None
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)  # JSON has no inf/nan literals
    return value


def _report_payload(report) -> dict:
    return {
        "tau": _json_float(report.tau),
        "theta": _json_float(report.theta),
        "wfs_value": _json_float(report.wfs_value),
        "sfs_value": _json_float(report.sfs_value),
        "lc_wfs_lhs": _json_float(report.lc_wfs_lhs),
        "lc_wfs_rhs": _json_float(report.lc_wfs_rhs),
        "lc_sfs_lhs": _json_float(report.lc_sfs_lhs),
        "lc_sfs_rhs": _json_float(report.lc_sfs_rhs),
        "regime": report.regime.regime.value,
        "critical_criterion": report.regime.critical_criterion,
        "note": report.regime.note,
    }


# -- subcommands -------------------------------------------------------------

def _cmd_classify(args) -> int:
    cfg, digest, base = _load_config(args.config)
    params = _population(cfg, base)
    report = lc_criterion_check(params, eps_crit=_eps_critical(cfg))
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "classify",
        "config_sha256": digest,
        "means": {"m": params.mean_offspring, "r": params.mean_resource,
                  "mu": params.mean_claim},
        "resources_exceed_claims": params.resources_exceed_claims,
        "report": _report_payload(report),
    }
    _write_json(args.out, payload)
    reg = report.regime
    extra = f" ({reg.note})" if reg.note else ""
    print(f"classify: regime={reg.regime.value}{extra} "
          f"wfs={_fmt(report.wfs_value)} sfs={_fmt(report.sfs_value)} "
          f"-> {args.out}")
    return 0


def _cmd_solve_tau(args) -> int:
    cfg, digest, base = _load_config(args.config)
    params = _population(cfg, base)
    dist = params.claims
    m, r, mu = params.mean_offspring, params.mean_resource, params.mean_claim
    base_payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "solve-tau",
        "config_sha256": digest,
        "m": m, "r": r, "mu": mu, "target": r / m,
    }
    try:
        tau = solve_tau(dist, m, r)
        theta = solve_theta(dist, m, r)
    except ResourceSurplus as exc:
        payload = dict(base_payload, surplus=True, tau=None, theta=None,
                       note=str(exc))
        _write_json(args.out, payload)
        print(f"solve-tau: surplus (r > m*mu), no threshold -> {args.out}")
        return 3
    payload = dict(
        base_payload, surplus=False,
        tau=_json_float(tau), theta=_json_float(theta),
        residual_tau=abs(dist.partial_moment(tau) - r / m),
        residual_theta=abs((mu - dist.partial_moment(theta)) - r / m),
        f_tau=dist.cdf(tau), f_theta=dist.cdf(theta),
    )
    _write_json(args.out, payload)
    print(f"solve-tau: tau={_fmt(tau)} theta={_fmt(theta)} -> {args.out}")
    return 0


_CURVE_SOURCES = ("claims", "resources", "line_of_equality", "perfect_inequality")


def _cmd_lorenz(args) -> int:
    cfg, digest, base = _load_config(args.config)
    lz = cfg.get("lorenz", {})
    if not isinstance(lz, Mapping):
        raise ConfigError("lorenz", "expected an object")
    source = lz.get("source", "claims")
    if source == "line_of_equality":
        curve = LineOfEquality()
    elif source == "perfect_inequality":
        curve = PerfectInequality()
    elif source in ("claims", "resources"):
        dist = distribution_from_config(
            _section(cfg, source), source, base_dir=base,
            allow_constant=(source == "resources"))
        curve = curve_of(dist)
    elif isinstance(source, Mapping):
        dist = distribution_from_config(source, "lorenz.source", base_dir=base,
                                        allow_constant=True)
        curve = curve_of(dist)
    else:
        raise ConfigError("lorenz.source",
                          f"expected one of {_CURVE_SOURCES} or a "
                          f"distribution object, got {source!r}")
    if getattr(args, "grid", None) is not None:
        ps = _parse_grid(args.grid, "--grid")
        if any(not 0.0 <= p <= 1.0 for p in ps):
            raise ConfigError("--grid", "lorenz grid must stay within [0, 1]")
        rows = [(p, curve.evaluate(p)) for p in ps]
    else:
        points = _int_field(lz, "grid_points", "lorenz", minimum=2, default=101)
        rows = lorenz_table(curve, points)
    _write_csv(args.out, {"schema_version": SCHEMA_VERSION,
                          "config_sha256": digest, "command": "lorenz"},
               ["p", "lc"], rows)
    print(f"lorenz: {len(rows)} points -> {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    cfg, digest, base = _load_config(args.config)
    claims = distribution_from_config(_section(cfg, "claims"), "claims",
                                      base_dir=base)
    resources = distribution_from_config(_section(cfg, "resources"),
                                         "resources", base_dir=base,
                                         allow_constant=True)
    sweep_cfg = cfg.get("sweep", {})
    if not isinstance(sweep_cfg, Mapping):
        raise ConfigError("sweep", "expected an object")
    m_grid = _grid_from(args, sweep_cfg, "m_grid", "sweep")
    try:
        rows = envelope_sweep(claims, resources.mean, m_grid,
                              eps_crit=_eps_critical(cfg))
    except ValueError as exc:
        raise ConfigError("sweep.m_grid", str(exc))
    _write_csv(args.out, {"schema_version": SCHEMA_VERSION,
                          "config_sha256": digest, "command": "sweep"},
               ["m", "inv_m", "F_tau", "F_theta", "one_minus_F_theta", "regime"],
               [(row.m, row.inv_m, row.f_tau, row.f_theta,
                 row.one_minus_f_theta, row.regime.value) for row in rows])
    print(f"sweep: {len(rows)} rows over m in "
          f"[{m_grid[0]:g}, {m_grid[-1]:g}] -> {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    cfg, digest, base = _load_config(args.config)
    params = _population(cfg, base)
    policy = _policy(cfg)
    sim = _section(cfg, "simulation")
    seed = _resolve_seed(args, sim, "simulation")
    ancestors = _int_field(sim, "ancestors", "simulation", minimum=1)
    replicates = _int_field(sim, "replicates", "simulation", minimum=1)
    gen_cap = _int_field(sim, "gen_cap", "simulation", minimum=1)
    pop_cap = _int_field(sim, "pop_cap", "simulation", minimum=1,
                         default=DEFAULT_POP_CAP)
    n_record = _int_field(sim, "record_trajectories", "simulation", minimum=0,
                          default=0)
    est = estimate_extinction(params, policy, ancestors=ancestors,
                              replicates=replicates, gen_cap=gen_cap,
                              pop_cap=pop_cap, seed=seed)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "config_sha256": digest,
        "seed": seed,
        "policy": policy.name,
        "ancestors": ancestors,
        "replicates": replicates,
        "gen_cap": gen_cap,
        "pop_cap": pop_cap,
        "estimate": {
            "q_hat": est.q_hat,
            "half_width": est.half_width,
            "extinct": est.extinct,
            "alive_at_horizon": est.alive_at_horizon,
            "pop_cap_reached": est.pop_cap_reached,
            "censored_scored_as": est.censored_scored_as,
        },
    }
    _write_json(args.out, payload)
    if args.trajectories_out is not None and n_record > 0:
        rows = []
        for run in range(min(n_record, replicates)):
            traj = simulate_trajectory(params, policy, ancestors=ancestors,
                                       max_generations=gen_cap,
                                       pop_cap=pop_cap, seed=seed, run=run)
            for gen, size in enumerate(traj.sizes):
                rows.append((run, gen, int(size)))
        _write_csv(args.trajectories_out,
                   {"schema_version": SCHEMA_VERSION, "config_sha256": digest,
                    "command": "simulate", "seed": seed},
                   ["run", "generation", "size"], rows)
    print(f"simulate: q_hat={est.q_hat:.6g} +/- {est.half_width:.3g} "
          f"(extinct {est.extinct}/{replicates}, capped {est.pop_cap_reached}) "
          f"-> {args.out}")
    return 0


def _cmd_envelope_mc(args) -> int:
    cfg, digest, base = _load_config(args.config)
    params = _population(cfg, base)
    policy = _policy(cfg) if "policy" in cfg else Policy.arrival_order()
    sim = _section(cfg, "simulation")
    seed = _resolve_seed(args, sim, "simulation")
    replicates = _int_field(sim, "replicates", "simulation", minimum=1)
    horizon = _int_field(sim, "horizon", "simulation", minimum=1)
    pop_cap = _int_field(sim, "pop_cap", "simulation", minimum=1,
                         default=DEFAULT_POP_CAP)
    grid = sim.get("ancestor_grid")
    if (not isinstance(grid, Sequence) or isinstance(grid, (str, bytes))
            or not grid):
        raise ConfigError("simulation.ancestor_grid", "expected a nonempty array")
    for i, v in enumerate(grid):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ConfigError(f"simulation.ancestor_grid[{i}]",
                              "expected a positive integer")
    points = envelopment_experiment(params, policy, ancestor_grid=list(grid),
                                    replicates=replicates, horizon=horizon,
                                    pop_cap=pop_cap, seed=seed)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "envelope-mc",
        "config_sha256": digest,
        "seed": seed,
        "policy": policy.name,
        "horizon": horizon,
        "replicates": replicates,
        "pop_cap": pop_cap,
        "points": [{
            "ancestors": p.ancestors,
            "fraction": p.fraction,
            "half_width": p.half_width,
            "failures": p.failures,
        } for p in points],
    }
    _write_json(args.out, payload)
    frac = " ".join(f"L={p.ancestors}:{p.fraction:.3f}" for p in points)
    print(f"envelope-mc: {frac} -> {args.out}")
    return 0


def _immigration_pair(cfg: Mapping, base: str):
    imm = _section(cfg, "immigration")
    home = population_from_config(_section(imm, "home", "immigration.home"),
                                  "immigration.home", base_dir=base)
    other = population_from_config(
        _section(imm, "immigrant", "immigration.immigrant"),
        "immigration.immigrant", base_dir=base)
    return imm, home, other


def _cmd_immigration_check(args) -> int:
    cfg, digest, base = _load_config(args.config)
    imm, home, other = _immigration_pair(cfg, base)
    alpha = _float_field(imm, "alpha", "immigration")
    if alpha < 0.0:
        raise ConfigError("immigration.alpha", "must be nonnegative")
    tolerance = _float_field(imm, "tolerance", "immigration", default=1e-9)
    scenario = ImmigrationScenario(home, other, alpha)
    base_payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "immigration-check",
        "config_sha256": digest,
        "alpha": alpha,
        "tolerance": tolerance,
    }
    try:
        report = check_equilibrium(scenario, tolerance=tolerance)
    except ResourceSurplus as exc:
        _write_json(args.out, dict(base_payload, surplus=True, note=str(exc)))
        print(f"immigration-check: surplus, no threshold -> {args.out}")
        return 3
    payload = dict(
        base_payload, surplus=False, tau=report.tau, lhs=report.lhs,
        rhs=report.rhs, gap=report.gap,
        above_replacement=report.above_replacement,
        condition_met=report.condition_met,
    )
    _write_json(args.out, payload)
    if args.curves_out is not None:
        curve_h = curve_of(home.claims)
        curve_i = curve_of(other.claims)
        ps = np.linspace(0.0, 1.0, 101)
        rows = [(float(p), curve_h.evaluate(float(p)), curve_i.evaluate(float(p)))
                for p in ps]
        _write_csv(args.curves_out,
                   {"schema_version": SCHEMA_VERSION, "config_sha256": digest,
                    "command": "immigration-check"},
                   ["p", "lc_home", "lc_immigrant"], rows)
    verdict = "met" if report.condition_met else "not met"
    print(f"immigration-check: tau={report.tau:.6g} gap={report.gap:.3g} "
          f"condition {verdict} -> {args.out}")
    return 0


def _cmd_immigration_scan(args) -> int:
    cfg, digest, base = _load_config(args.config)
    imm, home, other = _immigration_pair(cfg, base)
    alpha_grid = _grid_from(args, imm, "alpha_grid", "immigration")
    try:
        scan = scan_alpha(home, other, alpha_grid)
    except ValueError as exc:
        raise ConfigError("immigration.alpha_grid", str(exc))
    rows = [(p.alpha, p.tau, p.lhs, p.rhs, p.gap) for p in scan.points]
    _write_csv(args.out, {"schema_version": SCHEMA_VERSION,
                          "config_sha256": digest, "command": "immigration-scan"},
               ["alpha", "tau", "lhs", "rhs", "gap"], rows)
    with open(args.out, "a", encoding="utf-8") as fh:
        for root in scan.roots:
            fh.write(f"# root alpha={_fmt(root.alpha)} tau={_fmt(root.tau)} "
                     f"gap={_fmt(root.gap)} bracket={_fmt(root.bracket[0])}"
                     f":{_fmt(root.bracket[1])}\n")
    print(f"immigration-scan: {len(rows)} rows, {len(scan.roots)} candidate "
          f"equilibria -> {args.out}")
    return 0


def _cmd_validate(args) -> int:
    problems = []
    try:
        cfg, _, base = _load_config(args.config)
    except ConfigError as exc:
        print(f"{exc.path}: {exc.message}")
        return 2
    checks = []
    if any(k in cfg for k in ("claims", "resources", "reproduction")):
        checks.append(lambda: _population(cfg, base))
        checks.append(lambda: _policy(cfg))
    if "immigration" in cfg:
        checks.append(lambda: _immigration_pair(cfg, base))
    if "criteria" in cfg:
        checks.append(lambda: _eps_critical(cfg))
    if not checks:
        problems.append(ConfigError(
            "config", "nothing to validate: no population or immigration"))
    for check in checks:
        try:
            check()
        except ConfigError as exc:
            problems.append(exc)
    if problems:
        for p in problems:
            print(f"{p.path}: {p.message}")
        return 2
    print("ok")
    return 0


# -- entry point -------------------------------------------------------------

def _add_common(sub, *, out_required=True, seed=False, grid=False):
    sub.add_argument("--config", required=True, help="JSON configuration file")
    if out_required:
        sub.add_argument("--out", required=True, help="output artifact path")
    if seed:
        sub.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
    if grid:
        sub.add_argument("--grid", default=None,
                         help="grid as start:stop:count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdbp",
        description="Resource dependent branching process toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("classify", help="regime classification as JSON")
    _add_common(sub)
    sub.set_defaults(func=_cmd_classify)

    sub = subs.add_parser("solve-tau",
                          help="service thresholds tau and theta as JSON")
    _add_common(sub)
    sub.set_defaults(func=_cmd_solve_tau)

    sub = subs.add_parser("lorenz", help="(p, LC(p)) table as CSV")
    _add_common(sub, grid=True)
    sub.set_defaults(func=_cmd_lorenz)

    sub = subs.add_parser("sweep",
                          help="regime boundaries across m as CSV")
    _add_common(sub, grid=True)
    sub.set_defaults(func=_cmd_sweep)

    sub = subs.add_parser("simulate",
                          help="Monte Carlo extinction estimate as JSON")
    _add_common(sub, seed=True)
    sub.add_argument("--trajectories-out", default=None,
                     help="also dump recorded trajectories as CSV")
    sub.set_defaults(func=_cmd_simulate)

    sub = subs.add_parser("envelope-mc",
                          help="sandwich check fractions as JSON")
    _add_common(sub, seed=True)
    sub.set_defaults(func=_cmd_envelope_mc)

    sub = subs.add_parser("immigration-check",
                          help="coexistence condition at one alpha as JSON")
    _add_common(sub)
    sub.add_argument("--curves-out", default=None,
                     help="also dump both Lorenz curves as CSV")
    sub.set_defaults(func=_cmd_immigration_check)

    sub = subs.add_parser("immigration-scan",
                          help="rate imbalance across alpha as CSV")
    _add_common(sub, grid=True)
    sub.set_defaults(func=_cmd_immigration_scan)

    sub = subs.add_parser("validate", help="check a config and report problems")
    _add_common(sub, out_required=False)
    sub.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ResourceSurplus as exc:
        print(f"domain signal: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
