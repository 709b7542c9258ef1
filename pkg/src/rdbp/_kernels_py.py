"""Pure numpy trajectory kernel; the reference the compiled twin must match.

Bit-identity ground rules shared with _kernels.pyx:
  * uniforms come from the keyed hash in _mixbits (exact integer ops);
  * transcendental quantile transforms go through _transforms so both
    backends call the same numpy ufuncs;
  * every floating-point reduction is a sequential left fold (np.cumsum
    is one; the C side uses a running sum), never a pairwise tree.
"""

from __future__ import annotations

import numpy as np

from ._mixbits import (
    CLAIM_STREAM,
    OFFSPRING_STREAM,
    RESOURCE_STREAM,
    _mix64_array,
    stream_prefix,
)
from ._transforms import (
    FAMILY_CONSTANT,
    OUTCOME_ALIVE,
    OUTCOME_EXTINCT,
    OUTCOME_POP_CAP,
    POLICY_ARRIVAL,
    POLICY_STRONGEST_FIRST,
    POLICY_WEAKEST_FIRST,
    quantiles_from_uniforms,
)

BACKEND_NAME = "python"

_INV53 = 1.0 / 9007199254740992.0


def _stream(seed, stream, run, generation, count):
    prefix = stream_prefix(seed, stream, run, generation)
    slots = np.arange(count, dtype=np.uint64)
    h = _mix64_array(prefix ^ slots)
    return (h >> np.uint64(11)).astype(np.float64) * _INV53


def run_trajectory(seed: int, run: int, policy: int, ancestors: int,
                   max_generations: int, pop_cap: int,
                   offspring_cumprobs: np.ndarray,
                   claim_fam: int, claim_p0: float, claim_p1: float,
                   claim_values: np.ndarray | None,
                   res_fam: int, res_p0: float, res_p1: float,
                   res_values: np.ndarray | None,
                   record: bool):
    """One society from generation 0 to extinction, cap, or the horizon.

    Returns (sizes or None, final_size, outcome, outcome_generation,
    total_individuals).  `total_individuals` counts ancestors plus every
    descendant conceived, served or not; the cap is checked against it
    before the next generation's claims are even drawn.
    """
    max_kid = offspring_cumprobs.size - 1
    pop = ancestors
    total = ancestors
    sizes = [ancestors] if record else None

    if pop == 0:
        out = np.array(sizes, dtype=np.int64) if record else None
        return (out, 0, OUTCOME_EXTINCT, 0, total)
    if total > pop_cap:
        out = np.array(sizes, dtype=np.int64) if record else None
        return (out, pop, OUTCOME_POP_CAP, 0, total)

    outcome = OUTCOME_ALIVE
    outcome_gen = max_generations
    for gen in range(max_generations):
        u = _stream(seed, OFFSPRING_STREAM, run, gen, pop)
        kids = np.minimum(np.searchsorted(offspring_cumprobs, u, side="right"),
                          max_kid)
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

        if res_fam == FAMILY_CONSTANT:
            budget = res_p0 * pop
        else:
            ru = _stream(seed, RESOURCE_STREAM, run, gen, pop)
            rx = quantiles_from_uniforms(ru, res_fam, res_p0, res_p1, res_values)
            budget = float(np.cumsum(rx)[-1])

        cu = _stream(seed, CLAIM_STREAM, run, gen, d)
        claims = quantiles_from_uniforms(cu, claim_fam, claim_p0, claim_p1,
                                         claim_values)
        if policy == POLICY_WEAKEST_FIRST:
            claims.sort()
        elif policy == POLICY_STRONGEST_FIRST:
            claims.sort()
            claims = claims[::-1]
        elif policy != POLICY_ARRIVAL:
            raise ValueError(f"unknown policy code {policy}")
        csum = np.cumsum(claims)
        pop = int(np.searchsorted(csum, budget, side="right"))

        if record:
            sizes.append(pop)
        if pop == 0:
            outcome = OUTCOME_EXTINCT
            outcome_gen = gen + 1
            break

    out = np.array(sizes, dtype=np.int64) if record else None
    return (out, pop, outcome, outcome_gen, total)
