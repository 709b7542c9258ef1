"""Claim and resource distributions, reproduction laws, population parameters.

The claim menu: Uniform, NearDegenerate, Exponential, Pareto (shape > 1),
Empirical.  Resources use the same menu plus Constant.  Every family exposes
cdf / quantile / partial_moment / mean / support, with the generalized
inverse convention quantile(t) = inf{x : F(x) >= t} and the essential
supremum reported as math.inf for unbounded families.

partial_moment(x) = E[X * 1{X <= x}] has a closed form for every family;
quadrature exists only in the test suite as an independent oracle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from . import _mixbits
from ._mixbits import CLAIM_STREAM, OFFSPRING_STREAM, RESOURCE_STREAM  # noqa: F401
from ._transforms import (
    FAMILY_CONSTANT,
    FAMILY_EMPIRICAL,
    FAMILY_EXPONENTIAL,
    FAMILY_PARETO,
    FAMILY_UNIFORM,
    quantiles_from_uniforms,
)
from .errors import ConfigError

#: Distinguished "essential supremum is unbounded" value.
UNBOUNDED = math.inf


def _require(cond: bool, message: str):
    if not cond:
        raise ValueError(message)


@dataclass(frozen=True)
class Uniform:
    """Uniform law on [low, high], 0 <= low < high."""

    low: float
    high: float

    def __post_init__(self):
        _require(math.isfinite(self.low) and math.isfinite(self.high),
                 "uniform bounds must be finite")
        _require(0.0 <= self.low < self.high,
                 "uniform requires 0 <= low < high")

    @property
    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def support(self) -> tuple[float, float]:
        return (self.low, self.high)

    def cdf(self, x: float) -> float:
        if x <= self.low:
            return 0.0
        if x >= self.high:
            return 1.0
        return (x - self.low) / (self.high - self.low)

    def quantile(self, t: float) -> float:
        _check_prob(t)
        return self.low + t * (self.high - self.low)

    def pdf(self, x: float) -> float:
        if self.low <= x <= self.high:
            return 1.0 / (self.high - self.low)
        return 0.0

    def partial_moment(self, x: float) -> float:
        if x <= self.low:
            return 0.0
        if x >= self.high:
            return self.mean
        return (x * x - self.low * self.low) / (2.0 * (self.high - self.low))

    def _kernel_spec(self):
        return (FAMILY_UNIFORM, self.low, self.high - self.low, None)


@dataclass(frozen=True)
class NearDegenerate:
    """Uniform mass on [center - halfwidth, center + halfwidth].

    A continuous stand-in for a point mass at `center`; shrinking
    `halfwidth` tightens the band in which policy choice can matter.
    """

    center: float
    halfwidth: float

    def __post_init__(self):
        _require(math.isfinite(self.center) and math.isfinite(self.halfwidth),
                 "near-degenerate parameters must be finite")
        _require(self.center > 0.0, "center must be positive")
        _require(0.0 < self.halfwidth <= self.center,
                 "halfwidth must be in (0, center]")

    @property
    def _as_uniform(self) -> Uniform:
        return Uniform(self.center - self.halfwidth, self.center + self.halfwidth)

    @property
    def mean(self) -> float:
        return self.center

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.halfwidth, self.center + self.halfwidth)

    def cdf(self, x: float) -> float:
        return self._as_uniform.cdf(x)

    def quantile(self, t: float) -> float:
        return self._as_uniform.quantile(t)

    def pdf(self, x: float) -> float:
        return self._as_uniform.pdf(x)

    def partial_moment(self, x: float) -> float:
        return self._as_uniform.partial_moment(x)

    def _kernel_spec(self):
        lo, hi = self.support
        return (FAMILY_UNIFORM, lo, hi - lo, None)


@dataclass(frozen=True)
class Exponential:
    """Exponential law with the given rate; mean 1/rate, unbounded support."""

    rate: float

    def __post_init__(self):
        _require(math.isfinite(self.rate) and self.rate > 0.0,
                 "rate must be positive and finite")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, UNBOUNDED)

    def cdf(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        return -math.expm1(-self.rate * x)

    def quantile(self, t: float) -> float:
        _check_prob(t)
        if t == 1.0:
            return UNBOUNDED
        return -math.log1p(-t) / self.rate

    def pdf(self, x: float) -> float:
        if x < 0.0:
            return 0.0
        return self.rate * math.exp(-self.rate * x)

    def partial_moment(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        if math.isinf(x):
            return self.mean
        rx = self.rate * x
        return (1.0 - (1.0 + rx) * math.exp(-rx)) / self.rate

    def _kernel_spec(self):
        return (FAMILY_EXPONENTIAL, self.rate, 0.0, None)


@dataclass(frozen=True)
class Pareto:
    """Pareto law: F(x) = 1 - (scale/x)^shape for x >= scale.

    shape > 1 is required so the mean is finite; heavy tails with infinite
    mean have no service threshold to solve for.
    """

    scale: float
    shape: float

    def __post_init__(self):
        _require(math.isfinite(self.scale) and self.scale > 0.0,
                 "scale must be positive and finite")
        _require(math.isfinite(self.shape) and self.shape > 1.0,
                 "shape must be > 1 so the mean is finite")

    @property
    def mean(self) -> float:
        return self.shape * self.scale / (self.shape - 1.0)

    @property
    def support(self) -> tuple[float, float]:
        return (self.scale, UNBOUNDED)

    def cdf(self, x: float) -> float:
        if x <= self.scale:
            return 0.0
        return 1.0 - (self.scale / x) ** self.shape

    def quantile(self, t: float) -> float:
        _check_prob(t)
        if t == 1.0:
            return UNBOUNDED
        return self.scale * (1.0 - t) ** (-1.0 / self.shape)

    def pdf(self, x: float) -> float:
        if x < self.scale:
            return 0.0
        return self.shape * self.scale ** self.shape / x ** (self.shape + 1.0)

    def partial_moment(self, x: float) -> float:
        if x <= self.scale:
            return 0.0
        if math.isinf(x):
            return self.mean
        return self.mean * (1.0 - (self.scale / x) ** (self.shape - 1.0))

    def _kernel_spec(self):
        return (FAMILY_PARETO, self.scale, self.shape, None)


@dataclass(frozen=True, eq=False)
class Empirical:
    """Step CDF putting mass 1/n on each of n sample values.

    Values are stored sorted.  quantile(t) returns the ceil(t*n)-th order
    statistic (the generalized inverse of the step CDF), and
    partial_moment uses exact prefix sums, no binning or interpolation.
    """

    values: np.ndarray

    def __init__(self, values: Sequence[float]):
        arr = np.asarray(values, dtype=np.float64)
        _require(arr.ndim == 1 and arr.size > 0,
                 "empirical requires a nonempty 1-d sample")
        _require(bool(np.all(np.isfinite(arr))), "sample values must be finite")
        _require(bool(np.all(arr >= 0.0)), "sample values must be nonnegative")
        arr = np.sort(arr)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "_prefix", np.cumsum(arr))

    @property
    def mean(self) -> float:
        return float(self._prefix[-1]) / self.values.size

    @property
    def support(self) -> tuple[float, float]:
        return (float(self.values[0]), float(self.values[-1]))

    def cdf(self, x: float) -> float:
        n = self.values.size
        return float(np.searchsorted(self.values, x, side="right")) / n

    def quantile(self, t: float) -> float:
        _check_prob(t)
        n = self.values.size
        k = max(1, math.ceil(t * n))
        return float(self.values[min(k, n) - 1])

    def partial_moment(self, x: float) -> float:
        idx = int(np.searchsorted(self.values, x, side="right"))
        if idx == 0:
            return 0.0
        return float(self._prefix[idx - 1]) / self.values.size

    def _kernel_spec(self):
        return (FAMILY_EMPIRICAL, 0.0, 0.0, self.values)


@dataclass(frozen=True)
class Constant:
    """Point mass; a resource term of fixed size per individual."""

    value: float

    def __post_init__(self):
        _require(math.isfinite(self.value) and self.value >= 0.0,
                 "value must be nonnegative and finite")

    @property
    def mean(self) -> float:
        return self.value

    @property
    def support(self) -> tuple[float, float]:
        return (self.value, self.value)

    def cdf(self, x: float) -> float:
        return 1.0 if x >= self.value else 0.0

    def quantile(self, t: float) -> float:
        _check_prob(t)
        return self.value

    def partial_moment(self, x: float) -> float:
        return self.value if x >= self.value else 0.0

    def _kernel_spec(self):
        return (FAMILY_CONSTANT, self.value, 0.0, None)


ClaimDistribution = Union[Uniform, NearDegenerate, Exponential, Pareto, Empirical]
ResourceDistribution = Union[ClaimDistribution, Constant]

_CLAIM_FAMILIES = (Uniform, NearDegenerate, Exponential, Pareto, Empirical)
_RESOURCE_FAMILIES = _CLAIM_FAMILIES + (Constant,)


def _check_prob(t: float):
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"probability level must be in [0, 1], got {t}")


@dataclass(frozen=True, eq=False)
class ReproductionLaw:
    """Offspring distribution on {0, 1, ..., J} given by its probabilities.

    By default demands p_0 > 0 (extinction always reachable) and some
    p_j > 0 with j >= 2; pass strict=False for controlled experiments with
    deterministic offspring counts.
    """

    probabilities: np.ndarray
    strict: bool = True

    def __init__(self, probabilities: Sequence[float], strict: bool = True):
        probs = np.asarray(probabilities, dtype=np.float64)
        _require(probs.ndim == 1 and probs.size >= 1,
                 "probabilities must be a nonempty 1-d sequence")
        _require(bool(np.all(probs >= 0.0)), "probabilities must be nonnegative")
        total = float(np.cumsum(probs)[-1])
        _require(abs(total - 1.0) <= 1e-12,
                 f"probabilities must sum to 1 (got {total!r})")
        if strict:
            _require(probs[0] > 0.0,
                     "p_0 must be positive (strict=False to override)")
            _require(probs.size >= 3 and bool(np.any(probs[2:] > 0.0)),
                     "some p_j with j >= 2 must be positive "
                     "(strict=False to override)")
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "strict", strict)
        object.__setattr__(self, "_cumulative", np.cumsum(probs))

    @property
    def mean(self) -> float:
        return float(np.arange(self.probabilities.size) @ self.probabilities)

    @property
    def max_children(self) -> int:
        return self.probabilities.size - 1

    @property
    def cumulative(self) -> np.ndarray:
        """Cumulative probabilities; treat as read-only."""
        return self._cumulative


@dataclass(frozen=True, eq=False)
class PopulationParams:
    """Everything one population needs: who reproduces, what arrives, who asks.

    resources_exceed_claims flags the regime r > m * mu in which even full
    service cannot exhaust the resource flow; it is recomputed from the
    component means on every access.
    """

    reproduction: ReproductionLaw
    resources: ResourceDistribution
    claims: ClaimDistribution

    def __post_init__(self):
        _require(isinstance(self.reproduction, ReproductionLaw),
                 "reproduction must be a ReproductionLaw")
        _require(isinstance(self.resources, _RESOURCE_FAMILIES),
                 "resources must be a distribution from the supported menu")
        _require(isinstance(self.claims, _CLAIM_FAMILIES),
                 "claims must be a distribution from the supported menu")
        _require(self.claims.mean > 0.0, "claims must have positive mean")

    @property
    def mean_offspring(self) -> float:
        return self.reproduction.mean

    @property
    def mean_resource(self) -> float:
        return self.resources.mean

    @property
    def mean_claim(self) -> float:
        return self.claims.mean

    @property
    def resources_exceed_claims(self) -> bool:
        return self.mean_resource > self.mean_offspring * self.mean_claim


def _check_seed(seed: int):
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValueError("seed must be an integer")
    if not 0 <= int(seed) < 2 ** 64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")


def sample_stream(dist, seed: int, *, run: int = 0, generation: int = 0,
                  count: int = 1, first_slot: int = 0,
                  stream: int = CLAIM_STREAM) -> np.ndarray:
    """Draw `count` values from dist at slots first_slot, first_slot+1, ...

    Purely key-addressed: the same (seed, stream, run, generation, slot)
    always yields the same value, byte for byte, on every backend.
    """
    _check_seed(seed)
    u = _mixbits.uniforms(int(seed), stream, run, generation, count, first_slot)
    return quantiles_from_uniforms(u, *dist._kernel_spec())


def sample_at(dist, seed: int, *, run: int = 0, generation: int = 0,
              slot: int = 0, stream: int = CLAIM_STREAM) -> float:
    """Single draw; equals sample_stream(...)[slot] exactly."""
    out = sample_stream(dist, seed, run=run, generation=generation,
                        count=1, first_slot=slot, stream=stream)
    return float(out[0])


def sample_offspring(law: ReproductionLaw, seed: int, *, run: int = 0,
                     generation: int = 0, count: int = 1,
                     first_slot: int = 0) -> np.ndarray:
    """Offspring counts for `count` parents, int64."""
    _check_seed(seed)
    u = _mixbits.uniforms(int(seed), OFFSPRING_STREAM, run, generation,
                          count, first_slot)
    idx = np.searchsorted(law.cumulative, u, side="right")
    return np.minimum(idx, law.max_children).astype(np.int64)


# -- configuration parsing ---------------------------------------------------

def _cfg_float(section: Mapping, key: str, path: str) -> float:
    if key not in section:
        raise ConfigError(f"{path}.{key}", "missing required field")
    val = section[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {val!r}")
    return float(val)


def distribution_from_config(section: Mapping, path: str, *,
                             base_dir: str | None = None,
                             allow_constant: bool = False):
    """Build a distribution from a tagged config record.

    Records look like {"family": "uniform", "a": 0, "b": 1}; empirical
    accepts inline "values" or a one-column "csv" path resolved relative
    to base_dir.
    """
    if not isinstance(section, Mapping):
        raise ConfigError(path, "expected an object")
    family = section.get("family")
    if not isinstance(family, str):
        raise ConfigError(f"{path}.family", "missing or non-string family tag")
    try:
        if family == "uniform":
            return Uniform(_cfg_float(section, "a", path),
                           _cfg_float(section, "b", path))
        if family == "near_degenerate":
            return NearDegenerate(_cfg_float(section, "center", path),
                                  _cfg_float(section, "halfwidth", path))
        if family == "exponential":
            return Exponential(_cfg_float(section, "rate", path))
        if family == "pareto":
            return Pareto(_cfg_float(section, "scale", path),
                          _cfg_float(section, "shape", path))
        if family == "empirical":
            return Empirical(_empirical_values(section, path, base_dir))
        if family == "constant":
            if not allow_constant:
                raise ConfigError(f"{path}.family",
                                  "constant is only valid for resources")
            return Constant(_cfg_float(section, "value", path))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(f"{path}.family", f"unknown family {family!r}")


def _empirical_values(section: Mapping, path: str, base_dir: str | None):
    if "values" in section and "csv" in section:
        raise ConfigError(path, "give either values or csv, not both")
    if "values" in section:
        vals = section["values"]
        if (not isinstance(vals, Sequence) or isinstance(vals, (str, bytes))
                or not vals):
            raise ConfigError(f"{path}.values", "expected a nonempty array")
        return [float(v) for v in vals]
    if "csv" in section:
        import os
        fname = section["csv"]
        if not isinstance(fname, str):
            raise ConfigError(f"{path}.csv", "expected a file path string")
        full = os.path.join(base_dir, fname) if base_dir else fname
        try:
            with open(full, newline="") as fh:
                rows = [row for row in csv.reader(fh) if row]
        except OSError as exc:
            raise ConfigError(f"{path}.csv", f"cannot read {full}: {exc}")
        try:
            return [float(row[0]) for row in rows]
        except ValueError as exc:
            raise ConfigError(f"{path}.csv", f"non-numeric entry: {exc}")
    raise ConfigError(path, "empirical needs values or csv")


def distribution_to_config(dist) -> dict:
    """Inverse of distribution_from_config (empirical inlines its values)."""
    if isinstance(dist, Uniform):
        return {"family": "uniform", "a": dist.low, "b": dist.high}
    if isinstance(dist, NearDegenerate):
        return {"family": "near_degenerate", "center": dist.center,
                "halfwidth": dist.halfwidth}
    if isinstance(dist, Exponential):
        return {"family": "exponential", "rate": dist.rate}
    if isinstance(dist, Pareto):
        return {"family": "pareto", "scale": dist.scale, "shape": dist.shape}
    if isinstance(dist, Empirical):
        return {"family": "empirical", "values": [float(v) for v in dist.values]}
    if isinstance(dist, Constant):
        return {"family": "constant", "value": dist.value}
    raise TypeError(f"not a known distribution: {dist!r}")


def reproduction_from_config(section: Mapping, path: str) -> ReproductionLaw:
    if not isinstance(section, Mapping):
        raise ConfigError(path, "expected an object")
    probs = section.get("probabilities")
    if (not isinstance(probs, Sequence) or isinstance(probs, (str, bytes))
            or not probs):
        raise ConfigError(f"{path}.probabilities", "expected a nonempty array")
    strict = section.get("strict", True)
    if not isinstance(strict, bool):
        raise ConfigError(f"{path}.strict", "expected true or false")
    try:
        return ReproductionLaw([float(p) for p in probs], strict=strict)
    except ValueError as exc:
        raise ConfigError(f"{path}.probabilities", str(exc)) from exc


def population_from_config(section: Mapping, path: str, *,
                           base_dir: str | None = None) -> PopulationParams:
    if not isinstance(section, Mapping):
        raise ConfigError(path, "expected an object")
    for key in ("reproduction", "resources", "claims"):
        if key not in section:
            raise ConfigError(f"{path}.{key}", "missing required section")
    unknown = set(section) - {"reproduction", "resources", "claims"}
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown field")
    repro = reproduction_from_config(section["reproduction"], f"{path}.reproduction")
    resources = distribution_from_config(section["resources"], f"{path}.resources",
                                         base_dir=base_dir, allow_constant=True)
    claims = distribution_from_config(section["claims"], f"{path}.claims",
                                      base_dir=base_dir)
    try:
        return PopulationParams(repro, resources, claims)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc
