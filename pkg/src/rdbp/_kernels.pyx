# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trajectory kernel; must match _kernels_py bit for bit.

The hash, the uniform conversion, and every pure-arithmetic transform are
restated here in C (exact IEEE754 ops, compiled with -ffp-contract=off so
nothing fuses).  Transcendental transforms are NOT restated: exponential
and Pareto claims go back through _transforms.quantiles_from_uniforms, the
same numpy ufuncs the reference backend uses, because numpy's SIMD log1p
and power round differently from libm.  Reductions are sequential left
folds, matching np.cumsum.
"""

import numpy as np

from libc.math cimport ceil

from . import _mixbits, _transforms
from ._transforms import quantiles_from_uniforms

BACKEND_NAME = "compiled"

cdef unsigned long long GOLDEN = 0x9E3779B97F4A7C15
cdef unsigned long long MIX1 = 0xBF58476D1CE4E5B9
cdef unsigned long long MIX2 = 0x94D049BB133111EB
cdef double INV53 = 1.0 / 9007199254740992.0

cdef unsigned long long STREAM_OFFSPRING = 0x11
cdef unsigned long long STREAM_CLAIM = 0x22
cdef unsigned long long STREAM_RESOURCE = 0x33

cdef int FAM_UNIFORM = 0
cdef int FAM_EXPONENTIAL = 1
cdef int FAM_PARETO = 2
cdef int FAM_CONSTANT = 3
cdef int FAM_EMPIRICAL = 4

cdef int POL_WFS = 0
cdef int POL_SFS = 1
cdef int POL_ARRIVAL = 2

cdef int OUT_ALIVE = 0
cdef int OUT_EXTINCT = 1
cdef int OUT_POP_CAP = 2

# The duplicated codes must agree with the shared modules.
assert STREAM_OFFSPRING == _mixbits.OFFSPRING_STREAM
assert STREAM_CLAIM == _mixbits.CLAIM_STREAM
assert STREAM_RESOURCE == _mixbits.RESOURCE_STREAM
assert FAM_UNIFORM == _transforms.FAMILY_UNIFORM
assert FAM_EXPONENTIAL == _transforms.FAMILY_EXPONENTIAL
assert FAM_PARETO == _transforms.FAMILY_PARETO
assert FAM_CONSTANT == _transforms.FAMILY_CONSTANT
assert FAM_EMPIRICAL == _transforms.FAMILY_EMPIRICAL
assert POL_WFS == _transforms.POLICY_WEAKEST_FIRST
assert POL_SFS == _transforms.POLICY_STRONGEST_FIRST
assert POL_ARRIVAL == _transforms.POLICY_ARRIVAL
assert OUT_ALIVE == _transforms.OUTCOME_ALIVE
assert OUT_EXTINCT == _transforms.OUTCOME_EXTINCT
assert OUT_POP_CAP == _transforms.OUTCOME_POP_CAP


cdef inline unsigned long long _mix64(unsigned long long z) noexcept nogil:
    z = z + GOLDEN
    z ^= z >> 30
    z = z * MIX1
    z ^= z >> 27
    z = z * MIX2
    return z ^ (z >> 31)


cdef inline unsigned long long _prefix(unsigned long long seed,
                                       unsigned long long stream,
                                       unsigned long long run,
                                       unsigned long long gen) noexcept nogil:
    cdef unsigned long long h = _mix64(seed ^ GOLDEN)
    h = _mix64(h ^ stream)
    h = _mix64(h ^ run)
    return _mix64(h ^ gen)


cdef inline double _uniform(unsigned long long prefix,
                            unsigned long long slot) noexcept nogil:
    return <double>(_mix64(prefix ^ slot) >> 11) * INV53


def stream_uniforms(seed, stream, run, generation, count):
    """C twin of _mixbits.uniforms (slots 0..count-1); used by benchmarks."""
    cdef unsigned long long pfx = _prefix(seed, stream, run, generation)
    cdef long long n = count
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] mv = out
    cdef long long j
    for j in range(n):
        mv[j] = _uniform(pfx, <unsigned long long>j)
    return out


cdef double _draw_budget(unsigned long long seed, unsigned long long run,
                         long long gen, long long pop,
                         int fam, double p0, double p1, vals_obj):
    """Total resource income of a generation: sequential sum of pop draws."""
    cdef unsigned long long pfx
    cdef double budget = 0.0
    cdef double u
    cdef long long j, kk, n
    cdef double[::1] vals
    cdef double[::1] xs
    if fam == FAM_CONSTANT:
        return p0 * <double>pop
    pfx = _prefix(seed, STREAM_RESOURCE, run, <unsigned long long>gen)
    if fam == FAM_UNIFORM:
        for j in range(pop):
            u = _uniform(pfx, <unsigned long long>j)
            budget = budget + (p0 + p1 * u)
        return budget
    if fam == FAM_EMPIRICAL:
        vals = vals_obj
        n = vals.shape[0]
        for j in range(pop):
            u = _uniform(pfx, <unsigned long long>j)
            kk = <long long>ceil(u * <double>n)
            if kk < 1:
                kk = 1
            if kk > n:
                kk = n
            budget = budget + vals[kk - 1]
        return budget
    # transcendental families: same ufunc route as the reference backend
    u_arr = np.empty(pop, dtype=np.float64)
    xs = u_arr
    for j in range(pop):
        xs[j] = _uniform(pfx, <unsigned long long>j)
    x_arr = quantiles_from_uniforms(u_arr, fam, p0, p1, None)
    xs = x_arr
    for j in range(pop):
        budget = budget + xs[j]
    return budget


cdef object _draw_claims(unsigned long long seed, unsigned long long run,
                         long long gen, long long d,
                         int fam, double p0, double p1, vals_obj):
    cdef unsigned long long pfx = _prefix(seed, STREAM_CLAIM, run,
                                          <unsigned long long>gen)
    cdef long long j, kk, n
    cdef double u
    cdef double[::1] mv
    cdef double[::1] vals
    out = np.empty(d, dtype=np.float64)
    mv = out
    if fam == FAM_UNIFORM:
        for j in range(d):
            u = _uniform(pfx, <unsigned long long>j)
            mv[j] = p0 + p1 * u
        return out
    if fam == FAM_CONSTANT:
        for j in range(d):
            mv[j] = p0
        return out
    if fam == FAM_EMPIRICAL:
        vals = vals_obj
        n = vals.shape[0]
        for j in range(d):
            u = _uniform(pfx, <unsigned long long>j)
            kk = <long long>ceil(u * <double>n)
            if kk < 1:
                kk = 1
            if kk > n:
                kk = n
            mv[j] = vals[kk - 1]
        return out
    for j in range(d):
        mv[j] = _uniform(pfx, <unsigned long long>j)
    return quantiles_from_uniforms(out, fam, p0, p1, None)


def run_trajectory(seed, run, policy, ancestors, max_generations, pop_cap,
                   offspring_cumprobs, claim_fam, claim_p0, claim_p1,
                   claim_values, res_fam, res_p0, res_p1, res_values, record):
    """Same contract and same bits as _kernels_py.run_trajectory."""
    cdef unsigned long long c_seed = seed
    cdef unsigned long long c_run = run
    cdef int pol = policy
    cdef long long pop = ancestors
    cdef long long total = ancestors
    cdef long long maxgen = max_generations
    cdef long long cap = pop_cap
    cdef int cfam = claim_fam
    cdef int rfam = res_fam
    cdef double cp0 = claim_p0
    cdef double cp1 = claim_p1
    cdef double rp0 = res_p0
    cdef double rp1 = res_p1
    cdef bint rec = record

    if pol != POL_WFS and pol != POL_SFS and pol != POL_ARRIVAL:
        raise ValueError(f"unknown policy code {policy}")

    cum_arr = np.ascontiguousarray(offspring_cumprobs, dtype=np.float64)
    cdef double[::1] cum = cum_arr
    cdef long long ncum = cum.shape[0]
    cdef long long max_kid = ncum - 1

    cdef unsigned long long pfx
    cdef long long gen, j, k, d, count
    cdef double u, budget, running
    cdef double[::1] cl

    sizes_arr = None
    cdef long long[::1] sizes = None
    cdef long long n_sizes = 0
    if rec:
        sizes_arr = np.empty(maxgen + 1, dtype=np.int64)
        sizes = sizes_arr
        sizes[0] = pop
        n_sizes = 1

    if pop == 0:
        out = sizes_arr[:n_sizes].copy() if rec else None
        return (out, 0, OUT_EXTINCT, 0, total)
    if total > cap:
        out = sizes_arr[:n_sizes].copy() if rec else None
        return (out, pop, OUT_POP_CAP, 0, total)

    cdef int outcome = OUT_ALIVE
    cdef long long outcome_gen = maxgen

    for gen in range(maxgen):
        pfx = _prefix(c_seed, STREAM_OFFSPRING, c_run, <unsigned long long>gen)
        d = 0
        for j in range(pop):
            u = _uniform(pfx, <unsigned long long>j)
            k = 0
            while k < ncum and u >= cum[k]:
                k += 1
            if k > max_kid:
                k = max_kid
            d += k
        total += d
        if total > cap:
            outcome = OUT_POP_CAP
            outcome_gen = gen + 1
            break
        if d == 0:
            pop = 0
            if rec:
                sizes[n_sizes] = 0
                n_sizes += 1
            outcome = OUT_EXTINCT
            outcome_gen = gen + 1
            break

        budget = _draw_budget(c_seed, c_run, gen, pop, rfam, rp0, rp1, res_values)
        claims = _draw_claims(c_seed, c_run, gen, d, cfam, cp0, cp1, claim_values)
        if pol == POL_WFS or pol == POL_SFS:
            claims.sort()
        cl = claims

        running = 0.0
        count = 0
        if pol == POL_SFS:
            for j in range(d - 1, -1, -1):
                running = running + cl[j]
                if running <= budget:
                    count += 1
                else:
                    break
        else:
            for j in range(d):
                running = running + cl[j]
                if running <= budget:
                    count += 1
                else:
                    break
        pop = count

        if rec:
            sizes[n_sizes] = pop
            n_sizes += 1
        if pop == 0:
            outcome = OUT_EXTINCT
            outcome_gen = gen + 1
            break

    out = sizes_arr[:n_sizes].copy() if rec else None
    return (out, pop, outcome, outcome_gen, total)
