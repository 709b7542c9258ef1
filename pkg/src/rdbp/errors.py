"""Exception types shared across the package."""

from __future__ import annotations


class RdbpError(Exception):
    """Base class for package-specific errors."""


class ConfigError(RdbpError):
    """A configuration value failed validation.

    `path` is the dotted location of the offending field, e.g.
    "claims.family" or "reproduction.probabilities".
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class ResourceSurplus(RdbpError):
    """Mean resources exceed mean claim demand (r > m * mu).

    The service threshold equation has no root in this case: even serving
    everyone leaves resources to spare, so survival is possible under every
    policy.  Callers that classify regimes treat this as a branch, not a
    failure; the CLI maps it to its own exit status.
    """

    def __init__(self, r: float, m: float, mu: float):
        super().__init__(
            f"no service threshold: mean resources r={r:g} exceed mean "
            f"demand m*mu={m * mu:g} (m={m:g}, mu={mu:g})")
        self.r = r
        self.m = m
        self.mu = mu
