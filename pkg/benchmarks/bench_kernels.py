"""Compare the compiled trajectory kernels against the pure Python path.

Runs the same three workloads through each available backend, times the
best of ``--repeat`` attempts, and checks that both produce identical
results before reporting a table. Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from rdbp import _kernels_py, kernels
from rdbp._mixbits import CLAIM_STREAM, uniforms
from rdbp._transforms import POLICY_WEAKEST_FIRST
from rdbp.distributions import Constant, ReproductionLaw, Uniform

SEED = 97


def _uniform_block(backend):
    # 20 generations x 100k slots of keyed uniforms
    fn = uniforms if backend is _kernels_py else backend.stream_uniforms
    parts = [fn(SEED, CLAIM_STREAM, 0, gen, 100_000) for gen in range(20)]
    return np.concatenate(parts)


def _extinction_batch(backend):
    # 400 short subcritical societies, the estimate_extinction shape
    law = ReproductionLaw([0.2, 0.4, 0.4])
    cfam, cp0, cp1, cvals = Uniform(0.0, 1.0)._kernel_spec()
    rfam, rp0, rp1, rvals = Constant(0.05)._kernel_spec()
    out = []
    for run in range(400):
        res = backend.run_trajectory(
            SEED, run, POLICY_WEAKEST_FIRST, 20, 200, 1_000_000,
            law.cumulative, cfam, cp0, cp1, cvals,
            rfam, rp0, rp1, rvals, False)
        out.append(res[1:])
    return out


def _large_trajectory(backend):
    # one growing weakest-first society up to the population cap; the
    # strongest-first criterion is below 1 here, so SFS would die young
    law = ReproductionLaw([0.2, 0.0, 0.0, 0.0, 0.0, 0.8])
    cfam, cp0, cp1, cvals = Uniform(0.0, 1.0)._kernel_spec()
    rfam, rp0, rp1, rvals = Constant(0.5)._kernel_spec()
    sizes, *rest = backend.run_trajectory(
        SEED, 3, POLICY_WEAKEST_FIRST, 50, 60, 1_000_000,
        law.cumulative, cfam, cp0, cp1, cvals,
        rfam, rp0, rp1, rvals, True)
    return sizes, tuple(rest)


WORKLOADS = [
    ("keyed-uniforms (2e6 draws)", _uniform_block),
    ("extinction-batch (400 runs)", _extinction_batch),
    ("large-wfs-trajectory", _large_trajectory),
]


def _same(a, b):
    if isinstance(a, np.ndarray):
        return isinstance(b, np.ndarray) and np.array_equal(a, b)
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5,
                    help="timing attempts per workload (best is reported)")
    args = ap.parse_args()
    if args.repeat < 1:
        ap.error("--repeat must be at least 1")

    backends = kernels.available_backends()
    names = list(backends)
    print(f"backends: {', '.join(names)} (default in use: {kernels.BACKEND})")
    if "compiled" not in backends:
        print("compiled kernels not built; timing the python path only")

    width = max(len(label) for label, _ in WORKLOADS)
    header = f"{'workload':<{width}}" + "".join(f"  {n:>10}" for n in names)
    if len(names) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for label, fn in WORKLOADS:
        times = {}
        results = {}
        for name in names:
            backend = backends[name]
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                results[name] = fn(backend)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
        if len(names) == 2 and not _same(results["python"], results["compiled"]):
            raise SystemExit(f"backend results disagree on: {label}")
        row = f"{label:<{width}}" + "".join(f"  {times[n]:>8.4f} s" for n in names)
        if len(names) == 2:
            row += f"  {times['python'] / times['compiled']:>7.1f}x"
        print(row)

    if len(names) == 2:
        print("results identical across backends for every workload")


if __name__ == "__main__":
    main()
