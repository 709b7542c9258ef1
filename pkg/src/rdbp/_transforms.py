"""Shared inverse-CDF transforms and the integer codes both backends speak.

Byte-identical cross-backend output is a hard requirement, and numpy's SIMD
log1p/power do not round identically to libm.  The rule that keeps the two
backends in lockstep: transcendental transforms (exponential, Pareto) go
through these numpy ufunc calls in *every* path, while purely arithmetic
families (uniform, constant, empirical lookup) may be reimplemented in C
because IEEE754 +,*,ceil are correctly rounded and therefore identical.
The extension is compiled with -ffp-contract=off so no path fuses them.
"""

from __future__ import annotations

import numpy as np

FAMILY_UNIFORM = 0
FAMILY_EXPONENTIAL = 1
FAMILY_PARETO = 2
FAMILY_CONSTANT = 3
FAMILY_EMPIRICAL = 4

POLICY_WEAKEST_FIRST = 0
POLICY_STRONGEST_FIRST = 1
POLICY_ARRIVAL = 2

OUTCOME_ALIVE = 0
OUTCOME_EXTINCT = 1
OUTCOME_POP_CAP = 2


def quantiles_from_uniforms(u: np.ndarray, family: int, p0: float, p1: float,
                            values: np.ndarray | None = None) -> np.ndarray:
    """Map uniforms in [0,1) through the family's generalized inverse CDF.

    Parameter packing: uniform -> (low, width); exponential -> (rate, -);
    pareto -> (scale, shape); constant -> (value, -); empirical -> values.
    """
    if family == FAMILY_UNIFORM:
        return p0 + p1 * u
    if family == FAMILY_EXPONENTIAL:
        return -np.log1p(-u) / p0
    if family == FAMILY_PARETO:
        return p0 * np.power(1.0 - u, -1.0 / p1)
    if family == FAMILY_CONSTANT:
        return np.full_like(u, p0)
    if family == FAMILY_EMPIRICAL:
        n = len(values)
        k = np.ceil(u * n).astype(np.int64)
        np.clip(k, 1, n, out=k)
        return values[k - 1]
    raise ValueError(f"unknown family code {family}")
