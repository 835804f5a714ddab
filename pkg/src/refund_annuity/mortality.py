"""Parametric mortality laws.

Two laws are supported: Gompertz, with modal age ``m`` and dispersion ``b``,
and a constant-hazard (exponential) law. Every method accepts scalars or numpy
arrays and returns a float for scalar input.

The Gompertz survival function used throughout is::

    tpx = exp(exp((x - m) / b) * (1 - exp(t / b)))

which decreases in both ``t`` and ``x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "MortalityLaw",
    "GompertzLaw",
    "ExponentialLaw",
    "survival_probability",
    "hazard_rate",
    "density",
    "sample_lifetime",
]

# codes understood by the integration kernels
GOMPERTZ = 0
EXPONENTIAL = 1


def _scalar_or_array(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


def _check_nonnegative(name, value):
    if np.any(np.asarray(value) < 0) or np.any(np.isnan(value)):
        raise DomainError(f"{name} must be >= 0, got {value!r}")


class MortalityLaw:
    """Common interface of the parametric laws."""

    kernel_code: int

    def kernel_params(self) -> tuple[int, float, float]:
        """Law code and two parameters, in the layout the kernels expect."""
        raise NotImplementedError

    def survival(self, x, t):
        """Probability that a life aged ``x`` survives ``t`` more years."""
        raise NotImplementedError

    def hazard(self, s):
        """Force of mortality at attained age ``s``."""
        raise NotImplementedError

    def density(self, x, t):
        """Density of the remaining lifetime of a life aged ``x``."""
        return _scalar_or_array(
            np.asarray(self.survival(x, t)) * np.asarray(self.hazard(np.add(x, t)))
        )

    def inverse_survival(self, x, u):
        """Horizon ``t`` at which ``survival(x, t) == u``."""
        raise NotImplementedError


@dataclass(frozen=True)
class GompertzLaw(MortalityLaw):
    """Gompertz law with modal age ``m`` and dispersion ``b`` (both in years)."""

    m: float = 90.0
    b: float = 10.0
    kernel_code = GOMPERTZ

    def __post_init__(self):
        if not (self.m > 0 and math.isfinite(self.m)):
            raise DomainError(f"Gompertz modal age must be > 0, got {self.m!r}")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise DomainError(f"Gompertz dispersion must be > 0, got {self.b!r}")

    def kernel_params(self):
        return GOMPERTZ, float(self.m), float(self.b)

    def survival(self, x, t):
        _check_nonnegative("age", x)
        _check_nonnegative("horizon", t)
        scale = np.exp((np.asarray(x, dtype=float) - self.m) / self.b)
        with np.errstate(over="ignore"):
            # survival underflows cleanly to 0 when expm1 overflows
            return _scalar_or_array(np.exp(-scale * np.expm1(np.asarray(t, dtype=float) / self.b)))

    def hazard(self, s):
        _check_nonnegative("attained age", s)
        return _scalar_or_array(np.exp((np.asarray(s, dtype=float) - self.m) / self.b) / self.b)

    def inverse_survival(self, x, u):
        _check_nonnegative("age", x)
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0) | (u >= 1)) or np.any(np.isnan(u)):
            raise DomainError("uniform draw must lie in the open interval (0, 1)")
        scale = np.exp(-(np.asarray(x, dtype=float) - self.m) / self.b)
        return _scalar_or_array(self.b * np.log1p(-np.log(u) * scale))


@dataclass(frozen=True)
class ExponentialLaw(MortalityLaw):
    """Constant force of mortality ``lam`` per year, independent of age."""

    lam: float = 0.02
    kernel_code = EXPONENTIAL

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError(f"hazard must be > 0, got {self.lam!r}")

    def kernel_params(self):
        return EXPONENTIAL, float(self.lam), 0.0

    def survival(self, x, t):
        _check_nonnegative("age", x)
        _check_nonnegative("horizon", t)
        return _scalar_or_array(np.exp(-self.lam * np.asarray(t, dtype=float)))

    def hazard(self, s):
        _check_nonnegative("attained age", s)
        return _scalar_or_array(np.full(np.shape(s), self.lam, dtype=float))

    def inverse_survival(self, x, u):
        _check_nonnegative("age", x)
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0) | (u >= 1)) or np.any(np.isnan(u)):
            raise DomainError("uniform draw must lie in the open interval (0, 1)")
        return _scalar_or_array(-np.log(u) / self.lam)


def survival_probability(law: MortalityLaw, x, t):
    return law.survival(x, t)


def hazard_rate(law: MortalityLaw, s):
    return law.hazard(s)


def density(law: MortalityLaw, x, t):
    return law.density(x, t)


def sample_lifetime(law: MortalityLaw, x, u):
    """Inverse-transform draw of the remaining lifetime from uniform ``u``."""
    return law.inverse_survival(x, u)
