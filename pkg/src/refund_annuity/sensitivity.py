"""Age and rate sensitivities, life annuity duration and Macaulay duration.

Derivatives of the refund prices come from implicit differentiation of their
defining equations at the solved price; nothing here finite-differences a
price. With ``Phi(alpha) = delta*alpha + tail(alpha) - interest(alpha)`` for
the cash refund,

    d alpha / d r = -Phi_r / Phi_alpha,    d alpha / d x = -Phi_x / Phi_alpha,

and ``Phi_alpha`` tends to zero at the viability frontier, which is reported
as :class:`~refund_annuity.errors.DurationBlowUp` instead of an overflow.

Life annuity duration is ``-(d price / d r) / price``. Macaulay duration holds
the cash flows fixed and differentiates their present value in ``r``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, DurationBlowUp, NonViableError, NumericalFailure
from .kernels import survival_moments
from .pricing import ProductKind, ProductSpec, ValuationContext, price

__all__ = [
    "SensitivityReport",
    "Regime",
    "AsymptoticApproximation",
    "AsymptoticRangeWarning",
    "analytic_sensitivities",
    "macaulay_duration",
    "cashflow_macaulay_duration",
    "asymptotic_price_exponential",
]

BLOW_UP_THRESHOLD = 1e-10


@dataclass(frozen=True)
class SensitivityReport:
    price: float
    d_price_d_age: float
    d_price_d_rate: float
    life_annuity_duration: float
    macaulay_duration: float


def _moments(ctx, x, r, lo=0.0, hi=math.inf):
    return survival_moments(ctx.law, x, r, lo, hi, ctx.quadrature)


def _life_only(ctx, spec):
    x, r, load = spec.x, spec.r, 1.0 + spec.pi
    a, a1, _ = _moments(ctx, x, r)
    hazard = ctx.law.hazard(x)
    d_rate = -load * a1
    d_age = -load * (1.0 - (r + hazard) * a)
    return load * a, d_age, d_rate, a1 / a


def _cash_refund(ctx, spec, alpha):
    x, r, delta = spec.x, spec.r, spec.delta
    tail0, tail1, _ = _moments(ctx, x, r, alpha)
    head0, head1, head2 = _moments(ctx, x, r, 0.0, alpha)
    edge = math.exp(-r * alpha) * ctx.law.survival(x, alpha)
    hazard = ctx.law.hazard(x)

    phi_alpha = delta - edge - r * head0
    if abs(phi_alpha) < BLOW_UP_THRESHOLD:
        raise DurationBlowUp(
            f"cash-refund price {alpha:.6g} is at the viability frontier "
            f"(d/d alpha = {phi_alpha:.3g})"
        )
    phi_rate = -tail1 - (alpha * head0 - (1.0 + r * alpha) * head1 + r * head2)
    # tail - interest equals -delta * alpha at the solved price
    phi_age = r * alpha - edge - r * head0 - (r + hazard) * delta * alpha

    d_rate = -phi_rate / phi_alpha
    d_age = -phi_age / phi_alpha
    macaulay = -(1.0 + spec.pi) * phi_rate / alpha
    return d_age, d_rate, macaulay


def _instalment_refund(ctx, spec, alpha):
    x, r = spec.x, spec.r
    tail0, tail1, _ = _moments(ctx, x, r, alpha)
    survival = ctx.law.survival(x, alpha)
    decay = math.exp(-r * alpha)
    hazard = ctx.law.hazard(x)
    y = r * alpha
    # (e^{-y}(1 + y) - 1) / r^2 without cancellation for small y
    h_rate = (math.expm1(-y) + y * decay) / (r * r) - tail1
    h_alpha = decay * (1.0 - survival)
    h_age = -decay * survival + (r + hazard) * tail0

    denom = 1.0 / (1.0 + spec.pi) - h_alpha
    d_rate = h_rate / denom
    d_age = h_age / denom
    macaulay = -(1.0 + spec.pi) * h_rate / alpha
    return d_age, d_rate, macaulay


def analytic_sensitivities(ctx: ValuationContext, spec: ProductSpec) -> SensitivityReport:
    """Price, its age and rate partials, and both durations for one product."""
    if spec.kind is ProductKind.LIFE_ONLY:
        value, d_age, d_rate, macaulay = _life_only(ctx, spec)
    else:
        try:
            result = price(ctx, spec)
        except NumericalFailure as exc:
            if spec.kind is ProductKind.CASH_REFUND and spec.pi > 0:
                # the price itself diverges at the frontier
                raise DurationBlowUp(f"cash-refund price diverges at x={spec.x}, r={spec.r}: {exc}") from exc
            raise
        if not result.viable:
            raise NonViableError(f"{spec.kind.value} at x={spec.x}, r={spec.r}: {result.reason}")
        value = result.price
        if spec.kind is ProductKind.CASH_REFUND:
            d_age, d_rate, macaulay = _cash_refund(ctx, spec, value)
        else:
            d_age, d_rate, macaulay = _instalment_refund(ctx, spec, value)
    return SensitivityReport(
        price=value,
        d_price_d_age=d_age,
        d_price_d_rate=d_rate,
        life_annuity_duration=-d_rate / value,
        macaulay_duration=macaulay,
    )


def macaulay_duration(ctx: ValuationContext, spec: ProductSpec) -> float:
    return analytic_sensitivities(ctx, spec).macaulay_duration


def cashflow_macaulay_duration(rate: float, times: Sequence[float], amounts: Sequence[float]) -> float:
    """Present-value weighted mean arrival time of discrete cash flows."""
    if len(times) != len(amounts) or not times:
        raise DomainError("times and amounts must be non-empty and of equal length")
    pv = [a * math.exp(-rate * t) for t, a in zip(times, amounts)]
    total = math.fsum(pv)
    if total <= 0:
        raise DomainError("cash flows must have positive present value")
    return math.fsum(t * v for t, v in zip(times, pv)) / total


class Regime(str, enum.Enum):
    RATE_TO_ZERO = "rate_to_zero"
    RATE_TO_INFINITY = "rate_to_infinity"


class AsymptoticRangeWarning(UserWarning):
    """The rate is outside the range where the two-term expansion is useful."""


@dataclass(frozen=True)
class AsymptoticApproximation:
    product: ProductKind
    regime: Regime
    price: float
    life_annuity_duration: float


def asymptotic_price_exponential(product, lam: float, r: float, regime) -> AsymptoticApproximation:
    """Two-term expansions of price and duration under constant hazard ``lam``.

    As ``r -> 0`` the refund prices grow like ``log(lam / r) / lam``; as
    ``r -> inf`` every price approaches ``1 / r``. Life-only values are exact.
    """
    product = ProductKind.parse(product)
    regime = Regime(regime)
    if not (lam > 0 and r > 0):
        raise DomainError("expansions need lam > 0 and r > 0")
    ratio = r / lam
    if regime is Regime.RATE_TO_ZERO and ratio > 0.1:
        warnings.warn(f"r/lam = {ratio:.3g} is too large for the r -> 0 expansion",
                      AsymptoticRangeWarning, stacklevel=2)
    if regime is Regime.RATE_TO_INFINITY and ratio < 10:
        warnings.warn(f"r/lam = {ratio:.3g} is too small for the r -> inf expansion",
                      AsymptoticRangeWarning, stacklevel=2)

    if product is ProductKind.LIFE_ONLY:
        exact = 1.0 / (r + lam)
        return AsymptoticApproximation(product, regime, exact, exact)

    if regime is Regime.RATE_TO_ZERO:
        big = math.log(lam / r)
        if big <= 1.0:
            raise DomainError(f"r/lam = {ratio:.3g} leaves log log(lam/r) undefined")
        k = 1.0 if product is ProductKind.CASH_REFUND else 2.0
        loglog = math.log(big)
        value = (big - k * loglog) / lam
        duration = (1.0 + k * loglog / big) / (r * big)
        return AsymptoticApproximation(product, regime, value, duration)

    c = (1.0 - 1.0 / math.e) if product is ProductKind.CASH_REFUND else 2.0 / math.e
    value = (1.0 - c / ratio) / r
    return AsymptoticApproximation(product, regime, value, value)
