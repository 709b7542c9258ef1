"""Monte Carlo engine: policies, one-generation transitions, trajectories.

A society is a branching process in which each generation's descendants
file claims against the resource income their parents' generation created.
A policy is a priority order over claims; service stops at the first
claimant the remaining budget cannot cover in full.  Weakest-first and
strongest-first are the two extremes and every other order lands between
them claimant-for-claimant, which is what envelopment_experiment measures.

Replicates are addressed by (seed, run): the same pair under different
policies reads the same offspring counts, claims, and resources, so policy
comparisons are coupled by construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from ._mixbits import CLAIM_STREAM, RESOURCE_STREAM
from ._transforms import (
    FAMILY_CONSTANT,
    OUTCOME_ALIVE,
    OUTCOME_EXTINCT,
    OUTCOME_POP_CAP,
    POLICY_ARRIVAL,
    POLICY_STRONGEST_FIRST,
    POLICY_WEAKEST_FIRST,
)
from .distributions import (
    PopulationParams,
    _check_seed,
    sample_offspring,
    sample_stream,
)

#: Cumulative-individuals cap applied when the caller does not choose one.
DEFAULT_POP_CAP = 1_000_000

_Z95 = 1.96


class Outcome(enum.Enum):
    ALIVE_AT_HORIZON = "AliveAtHorizon"
    EXTINCT = "Extinct"
    POP_CAP_REACHED = "PopCapReached"


_OUTCOME_BY_CODE = {
    OUTCOME_ALIVE: Outcome.ALIVE_AT_HORIZON,
    OUTCOME_EXTINCT: Outcome.EXTINCT,
    OUTCOME_POP_CAP: Outcome.POP_CAP_REACHED,
}


@dataclass(frozen=True)
class Policy:
    """A priority order over a generation's claims.

    The three built-in orders run on the compiled kernel; a custom order
    supplies `order_fn(claims) -> permutation indices` and runs on the
    Python path with the same keyed draws.
    """

    name: str
    kernel_code: int | None = None
    order_fn: Callable[[np.ndarray], np.ndarray] | None = None

    @staticmethod
    def weakest_first() -> "Policy":
        return Policy("weakest_first", kernel_code=POLICY_WEAKEST_FIRST)

    @staticmethod
    def strongest_first() -> "Policy":
        return Policy("strongest_first", kernel_code=POLICY_STRONGEST_FIRST)

    @staticmethod
    def arrival_order() -> "Policy":
        return Policy("arrival_order", kernel_code=POLICY_ARRIVAL)

    @staticmethod
    def alternating() -> "Policy":
        """Smallest, largest, second smallest, second largest, ..."""
        return Policy("alternating", order_fn=_alternating_order)

    @staticmethod
    def from_ordering(name: str,
                      order_fn: Callable[[np.ndarray], np.ndarray]) -> "Policy":
        return Policy(name, order_fn=order_fn)

    def ordering(self, claims: np.ndarray) -> np.ndarray:
        if self.kernel_code == POLICY_WEAKEST_FIRST:
            return np.argsort(claims, kind="stable")
        if self.kernel_code == POLICY_STRONGEST_FIRST:
            return np.argsort(-claims, kind="stable")
        if self.kernel_code == POLICY_ARRIVAL:
            return np.arange(claims.size)
        order = np.asarray(self.order_fn(claims))
        if (order.shape != claims.shape
                or not np.array_equal(np.sort(order), np.arange(claims.size))):
            raise ValueError(f"policy {self.name!r} did not return a permutation")
        return order


def _alternating_order(claims: np.ndarray) -> np.ndarray:
    asc = np.argsort(claims, kind="stable")
    out = np.empty_like(asc)
    out[0::2] = asc[:(asc.size + 1) // 2]
    out[1::2] = asc[:(asc.size + 1) // 2 - 1:-1]
    return out


def _as_claims(claims) -> np.ndarray:
    arr = np.asarray(claims, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("claims must be one-dimensional")
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr < 0.0)):
        raise ValueError("claims must be finite and nonnegative")
    return arr


def _prefix_count(ordered: np.ndarray, budget: float) -> int:
    csum = np.cumsum(ordered)
    return int(np.searchsorted(csum, budget, side="right"))


def wfs_count(claims, budget: float) -> int:
    """How many get served when the smallest claims go first.

    This is the longest prefix of the ascending order whose sum stays
    within budget; 0 when even the smallest claim does not fit.
    """
    arr = _as_claims(claims)
    return _prefix_count(np.sort(arr), budget)


def sfs_count(claims, budget: float) -> int:
    """Served count when the largest claims go first."""
    arr = _as_claims(claims)
    return _prefix_count(np.sort(arr)[::-1], budget)


def policy_count(policy: Policy, claims, budget: float) -> int:
    """Served count under an arbitrary priority order."""
    arr = _as_claims(claims)
    if policy.kernel_code == POLICY_WEAKEST_FIRST:
        return wfs_count(arr, budget)
    if policy.kernel_code == POLICY_STRONGEST_FIRST:
        return sfs_count(arr, budget)
    if policy.kernel_code == POLICY_ARRIVAL:
        return _prefix_count(arr, budget)
    return _prefix_count(arr[policy.ordering(arr)], budget)


def step(pop_size: int, params: PopulationParams, policy: Policy, *,
         seed: int, run: int = 0, generation: int = 0) -> int:
    """One generation: reproduce, pool resources, serve claims in order.

    Uses the same keyed draws as full trajectories, so stepping by hand
    reproduces simulate_trajectory generation for generation.
    """
    if pop_size < 0:
        raise ValueError("population size must be nonnegative")
    if pop_size == 0:
        return 0
    kids = sample_offspring(params.reproduction, seed, run=run,
                            generation=generation, count=pop_size)
    d = int(kids.sum())
    if d == 0:
        return 0
    rspec = params.resources._kernel_spec()
    if rspec[0] == FAMILY_CONSTANT:
        budget = rspec[1] * pop_size
    else:
        draws = sample_stream(params.resources, seed, run=run,
                              generation=generation, count=pop_size,
                              stream=RESOURCE_STREAM)
        budget = float(np.cumsum(draws)[-1])
    claims = sample_stream(params.claims, seed, run=run, generation=generation,
                           count=d, stream=CLAIM_STREAM)
    return policy_count(policy, claims, budget)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One replicate's recorded path.

    sizes[0] is the ancestor count; once a 0 is recorded nothing follows
    it (extinction is absorbing).  A PopCapReached path ends at the last
    fully formed generation.
    """

    run: int
    ancestors: int
    sizes: np.ndarray | None
    final_size: int
    outcome: Outcome
    outcome_generation: int
    total_individuals: int

    @property
    def extinct(self) -> bool:
        return self.outcome is Outcome.EXTINCT


@dataclass(frozen=True)
class ExtinctionEstimate:
    """Monte Carlo extinction probability with a 95% binomial half-width.

    Replicates that hit the population cap are censored: they are scored
    as survived, which biases q_hat downward by at most the probability
    that a capped line would still have died.
    """

    q_hat: float
    half_width: float
    replicates: int
    extinct: int
    alive_at_horizon: int
    pop_cap_reached: int
    censored_scored_as: str
    seed: int
    ancestors: int
    gen_cap: int
    pop_cap: int
    policy: str


@dataclass(frozen=True)
class EnvelopmentPoint:
    ancestors: int
    replicates: int
    fraction: float
    half_width: float
    failures: int
    horizon: int


def _run_backend(params: PopulationParams, policy: Policy, *, ancestors: int,
                 max_generations: int, pop_cap: int, seed: int, run: int,
                 record: bool):
    cfam, cp0, cp1, cvals = params.claims._kernel_spec()
    rfam, rp0, rp1, rvals = params.resources._kernel_spec()
    return kernels.run_trajectory(
        seed, run, policy.kernel_code, ancestors, max_generations, pop_cap,
        params.reproduction.cumulative, cfam, cp0, cp1, cvals,
        rfam, rp0, rp1, rvals, record)


def _run_custom(params: PopulationParams, policy: Policy, *, ancestors: int,
                max_generations: int, pop_cap: int, seed: int, run: int,
                record: bool):
    """Python trajectory for policies without a kernel code.

    Keyed identically to the backend path; only the claim ordering differs.
    """
    pop = ancestors
    total = ancestors
    sizes = [ancestors] if record else None
    if pop == 0:
        out = np.array(sizes, dtype=np.int64) if record else None
        return (out, 0, OUTCOME_EXTINCT, 0, total)
    if total > pop_cap:
        out = np.array(sizes, dtype=np.int64) if record else None
        return (out, pop, OUTCOME_POP_CAP, 0, total)
    rspec = params.resources._kernel_spec()
    outcome = OUTCOME_ALIVE
    outcome_gen = max_generations
    for gen in range(max_generations):
        kids = sample_offspring(params.reproduction, seed, run=run,
                                generation=gen, count=pop)
        d = int(kids.sum())
        total += d
        if total > pop_cap:
            outcome = OUTCOME_POP_CAP
            outcome_gen = gen + 1
            break
        if d == 0:
            pop = 0
            if record:
                sizes.append(0)
            outcome = OUTCOME_EXTINCT
            outcome_gen = gen + 1
            break
        if rspec[0] == FAMILY_CONSTANT:
            budget = rspec[1] * pop
        else:
            draws = sample_stream(params.resources, seed, run=run,
                                  generation=gen, count=pop,
                                  stream=RESOURCE_STREAM)
            budget = float(np.cumsum(draws)[-1])
        claims = sample_stream(params.claims, seed, run=run, generation=gen,
                               count=d, stream=CLAIM_STREAM)
        pop = policy_count(policy, claims, budget)
        if record:
            sizes.append(pop)
        if pop == 0:
            outcome = OUTCOME_EXTINCT
            outcome_gen = gen + 1
            break
    out = np.array(sizes, dtype=np.int64) if record else None
    return (out, pop, outcome, outcome_gen, total)


def simulate_trajectory(params: PopulationParams, policy: Policy, *,
                        ancestors: int, max_generations: int,
                        pop_cap: int = DEFAULT_POP_CAP, seed: int,
                        run: int = 0, record_sizes: bool = True) -> Trajectory:
    """One replicate, recorded generation by generation."""
    _check_run_args(ancestors, max_generations, pop_cap, seed)
    runner = _run_backend if policy.kernel_code is not None else _run_custom
    sizes, final, code, gen, total = runner(
        params, policy, ancestors=ancestors, max_generations=max_generations,
        pop_cap=pop_cap, seed=seed, run=run, record=record_sizes)
    return Trajectory(run=run, ancestors=ancestors, sizes=sizes,
                      final_size=int(final), outcome=_OUTCOME_BY_CODE[int(code)],
                      outcome_generation=int(gen), total_individuals=int(total))


def _check_run_args(ancestors: int, max_generations: int, pop_cap: int,
                    seed: int):
    _check_seed(seed)
    if ancestors < 0:
        raise ValueError("ancestors must be nonnegative")
    if max_generations < 1:
        raise ValueError("max_generations must be at least 1")
    if pop_cap < 1:
        raise ValueError("pop_cap must be at least 1")


def estimate_extinction(params: PopulationParams, policy: Policy, *,
                        ancestors: int, replicates: int, gen_cap: int,
                        pop_cap: int = DEFAULT_POP_CAP,
                        seed: int) -> ExtinctionEstimate:
    """Fraction of replicates extinct by gen_cap, with binomial error bar."""
    _check_run_args(ancestors, gen_cap, pop_cap, seed)
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    runner = _run_backend if policy.kernel_code is not None else _run_custom
    extinct = alive = capped = 0
    for run in range(replicates):
        _, _, code, _, _ = runner(
            params, policy, ancestors=ancestors, max_generations=gen_cap,
            pop_cap=pop_cap, seed=seed, run=run, record=False)
        code = int(code)
        if code == OUTCOME_EXTINCT:
            extinct += 1
        elif code == OUTCOME_POP_CAP:
            capped += 1
        else:
            alive += 1
    q_hat = extinct / replicates
    half = _Z95 * math.sqrt(q_hat * (1.0 - q_hat) / replicates)
    return ExtinctionEstimate(
        q_hat=q_hat, half_width=half, replicates=replicates, extinct=extinct,
        alive_at_horizon=alive, pop_cap_reached=capped,
        censored_scored_as="survived", seed=seed, ancestors=ancestors,
        gen_cap=gen_cap, pop_cap=pop_cap, policy=policy.name)


def envelopment_experiment(params: PopulationParams, policy: Policy, *,
                           ancestor_grid: Sequence[int], replicates: int,
                           horizon: int, pop_cap: int = DEFAULT_POP_CAP,
                           seed: int) -> list[EnvelopmentPoint]:
    """Check S_n <= G_n <= W_n at the horizon, replicate by replicate.

    All three processes share each replicate's keyed draws, so the
    comparison is the coupled one.  A process that hits the population cap
    counts as +inf in the comparison (it out-grew the horizon, not died).
    """
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    grid = [int(x) for x in ancestor_grid]
    if not grid or any(x < 1 for x in grid):
        raise ValueError("ancestor_grid must be nonempty with entries >= 1")
    sfs = Policy.strongest_first()
    wfs = Policy.weakest_first()
    points = []
    for ancestors in grid:
        _check_run_args(ancestors, horizon, pop_cap, seed)
        ok = 0
        for run in range(replicates):
            g = _final_value(params, policy, ancestors, horizon, pop_cap,
                             seed, run)
            s = _final_value(params, sfs, ancestors, horizon, pop_cap,
                             seed, run)
            w = _final_value(params, wfs, ancestors, horizon, pop_cap,
                             seed, run)
            if s <= g <= w:
                ok += 1
        fraction = ok / replicates
        half = _Z95 * math.sqrt(fraction * (1.0 - fraction) / replicates)
        points.append(EnvelopmentPoint(
            ancestors=ancestors, replicates=replicates, fraction=fraction,
            half_width=half, failures=replicates - ok, horizon=horizon))
    return points


def _final_value(params, policy, ancestors, horizon, pop_cap, seed, run) -> float:
    runner = _run_backend if policy.kernel_code is not None else _run_custom
    _, final, code, _, _ = runner(
        params, policy, ancestors=ancestors, max_generations=horizon,
        pop_cap=pop_cap, seed=seed, run=run, record=False)
    if int(code) == OUTCOME_POP_CAP:
        return math.inf
    return float(final)
