"""Prices of life-only, instalment-refund and cash-refund income annuities.

All products pay $1 per year continuously. Prices are per $1 of annual income.

Notation used in the code:

* ``a`` -- life-only price, ``int_0^inf e^{-rt} tpx dt``.
* ``tail(alpha)`` -- ``int_alpha^inf e^{-rt} tpx dt``: lifetime income still
  owed once the refund window ``[0, alpha]`` has closed.
* ``interest(alpha)`` -- ``r int_0^alpha e^{-rt} (alpha - t) tpx dt``: interest
  earned on the shrinking refundable balance ``alpha - t``.

A cash-refund price ``alpha`` (loading ``pi``, ``delta = pi / (1 + pi)``)
solves ``delta * alpha + tail(alpha) = interest(alpha)``. An instalment-refund
price solves ``alpha / (1 + pi) = (1 - e^{-r alpha}) / r + tail(alpha)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import DomainError, NumericalFailure
from .kernels import survival_moments
from .mortality import ExponentialLaw, GompertzLaw, MortalityLaw
from .quadrature import BisectionSettings, QuadratureSettings, bisect
from .special import upper_incomplete_gamma

__all__ = [
    "ProductKind",
    "ProductSpec",
    "PriceResult",
    "ValuationContext",
    "loia_price",
    "loia_price_gompertz_closed_form",
    "period_certain_price",
    "insurance_price",
    "mortality_credits",
    "cria_price",
    "iria_price",
    "price",
    "refund_tail",
    "refund_interest",
    "iria_value",
    "cria_insurance_form_residual",
    "verify_survival_convention",
]

# relative guard band on the loaded cash-refund viability test
VIABILITY_GUARD = 1e-10
# the loaded cash-refund bracket is doubled up to this multiple of 1/r
BRACKET_CAP = 1e6

RATE_NOT_POSITIVE = "rate at or below zero"
LOADING_TOO_HIGH = "loading at or above r * a(x, r)"


class ProductKind(str, enum.Enum):
    LIFE_ONLY = "LO"
    INSTALMENT_REFUND = "IR"
    CASH_REFUND = "CR"

    @classmethod
    def parse(cls, text) -> "ProductKind":
        if isinstance(text, cls):
            return text
        key = str(text).strip().upper().replace("-", "_")
        aliases = {
            "LO": cls.LIFE_ONLY, "LIFE_ONLY": cls.LIFE_ONLY, "LOIA": cls.LIFE_ONLY,
            "IR": cls.INSTALMENT_REFUND, "INSTALMENT_REFUND": cls.INSTALMENT_REFUND,
            "IRIA": cls.INSTALMENT_REFUND,
            "CR": cls.CASH_REFUND, "CASH_REFUND": cls.CASH_REFUND, "CRIA": cls.CASH_REFUND,
        }
        try:
            return aliases[key]
        except KeyError:
            raise DomainError(f"unknown product kind {text!r}; expected LO, IR or CR") from None


@dataclass(frozen=True)
class ProductSpec:
    """Product kind, issue age ``x``, continuously compounded rate ``r`` and loading ``pi``."""

    kind: ProductKind
    x: float
    r: float
    pi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ProductKind.parse(self.kind))
        if not (self.x >= 0 and math.isfinite(self.x)):
            raise DomainError(f"issue age must be >= 0, got {self.x!r}")
        if not math.isfinite(self.r):
            raise DomainError(f"rate must be finite, got {self.r!r}")
        if not (self.pi >= 0 and math.isfinite(self.pi)):
            raise DomainError(f"loading must be >= 0, got {self.pi!r}")

    @property
    def delta(self) -> float:
        return self.pi / (1.0 + self.pi)


@dataclass(frozen=True)
class PriceResult:
    """Solved price with the residual of its defining equation.

    When ``viable`` is false the price is NaN and ``reason`` says why.
    """

    price: float
    residual: float
    iterations: int
    viable: bool
    reason: str | None = None

    @property
    def income_per_million(self) -> float:
        return 1e6 / self.price


@dataclass(frozen=True)
class ValuationContext:
    law: MortalityLaw = field(default_factory=GompertzLaw)
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    bisection: BisectionSettings = field(default_factory=BisectionSettings)


def _non_viable(reason: str) -> PriceResult:
    return PriceResult(math.nan, math.nan, 0, False, reason)


def _check_rate(ctx: ValuationContext, r: float):
    if isinstance(ctx.law, ExponentialLaw) and not r + ctx.law.lam > 0:
        raise DomainError("exponential law needs r + lambda > 0 for a finite price")


def _moments(ctx, x, r, lo=0.0, hi=math.inf):
    return survival_moments(ctx.law, x, r, lo, hi, ctx.quadrature)


def _certain(r: float, horizon: float) -> float:
    """Present value of $1 per year paid for ``horizon`` years."""
    if r == 0.0:
        return horizon
    return -math.expm1(-r * horizon) / r


def loia_price(ctx: ValuationContext, x: float, r: float) -> PriceResult:
    _check_rate(ctx, r)
    a = _moments(ctx, x, r)[0]
    return PriceResult(a, 0.0, 0, True)


def loia_price_gompertz_closed_form(m: float, b: float, x: float, r: float) -> float:
    """Life-only price under Gompertz(m, b) via the upper incomplete gamma function."""
    GompertzLaw(m, b)
    z = math.exp((x - m) / b)
    return b * upper_incomplete_gamma(-r * b, z) * math.exp(z - (m - x) * r)


def period_certain_price(ctx: ValuationContext, x: float, r: float, tau: float) -> float:
    """Price of a life annuity with payments guaranteed for ``tau`` years."""
    if not tau >= 0:
        raise DomainError(f"guarantee period must be >= 0, got {tau!r}")
    _check_rate(ctx, r)
    return _certain(r, tau) + _moments(ctx, x, r, tau)[0]


def insurance_price(ctx: ValuationContext, x: float, r: float) -> float:
    """Price of $1 paid at death, ``1 - r a(x, r)``."""
    return 1.0 - r * loia_price(ctx, x, r).price


def mortality_credits(ctx: ValuationContext, x: float, r: float) -> float:
    """Excess yield ``1 / a(x, r) - r`` earned by survivors."""
    return 1.0 / loia_price(ctx, x, r).price - r


def refund_tail(ctx: ValuationContext, x: float, r: float, alpha: float) -> float:
    """``int_alpha^inf e^{-rt} tpx dt``."""
    return _moments(ctx, x, r, alpha)[0]


def refund_interest(ctx: ValuationContext, x: float, r: float, alpha: float) -> float:
    """``r int_0^alpha e^{-rt} (alpha - t) tpx dt``."""
    m0, m1, _ = _moments(ctx, x, r, 0.0, alpha)
    return r * (alpha * m0 - m1)


def iria_value(ctx: ValuationContext, x: float, r: float, alpha: float) -> float:
    """Value of a life annuity with ``alpha`` years certain (``alpha`` as the guarantee)."""
    return _certain(r, alpha) + refund_tail(ctx, x, r, alpha)


def cria_insurance_form_residual(ctx: ValuationContext, x: float, r: float,
                                 pi: float, alpha: float) -> float:
    """``alpha/(1+pi) - a - int_0^alpha (alpha-s) e^{-rs} spx hazard(x+s) ds``.

    The death-benefit form of the cash-refund equation; it vanishes at the
    same price as the two-account form used by :func:`cria_price`.
    """
    a = _moments(ctx, x, r)[0]
    j0, j1, _ = survival_moments(ctx.law, x, r, 0.0, alpha, ctx.quadrature, hazard_weight=True)
    return alpha / (1.0 + pi) - a - (alpha * j0 - j1)


class _CashRefundEquation:
    """``delta*alpha + tail(alpha) - interest(alpha)`` evaluated with one tail integral.

    With ``head = full - tail`` for both moments, the residual becomes
    ``alpha (delta - r a) + (1 + r alpha) tail0(alpha) + r (a1 - tail1(alpha))``,
    which stays well conditioned when ``alpha`` is far beyond the lifetime
    horizon (the near-frontier regime).
    """

    def __init__(self, ctx, x, r, pi):
        self.ctx, self.x, self.r = ctx, x, r
        self.delta = pi / (1.0 + pi)
        self.a, self.a1, _ = _moments(ctx, x, r)
        self.margin = self.delta - r * self.a

    def __call__(self, alpha):
        tail0, tail1, _ = _moments(self.ctx, self.x, self.r, alpha)
        r = self.r
        return alpha * self.margin + (1.0 + r * alpha) * tail0 + r * (self.a1 - tail1)


def cria_price(ctx: ValuationContext, spec: ProductSpec) -> PriceResult:
    """Cash-refund price by bisection on the two-account equation."""
    x, r, pi = spec.x, spec.r, spec.pi
    if not r > 0:
        return _non_viable(RATE_NOT_POSITIVE)
    _check_rate(ctx, r)
    eq = _CashRefundEquation(ctx, x, r, pi)
    if pi > 0 and eq.delta >= r * eq.a * (1.0 - VIABILITY_GUARD):
        return _non_viable(LOADING_TOO_HIGH)

    if pi == 0:
        hi = 1.0 / r
    else:
        hi = (1.0 + pi) / r
        while eq(hi) >= 0:
            hi *= 2.0
            if hi > BRACKET_CAP / r:
                raise NumericalFailure(
                    f"cash-refund bracket exceeded {BRACKET_CAP:g}/r at x={x}, r={r}, pi={pi}"
                )
    res = bisect(eq, 0.0, hi, ctx.bisection)
    if not res.converged:
        raise NumericalFailure(
            f"cash-refund bisection stalled at residual {res.residual:.3g}",
            PriceResult(res.root, res.residual, res.iterations, False),
        )
    return PriceResult(res.root, res.residual, res.iterations, res.root > 0)


def iria_price(ctx: ValuationContext, spec: ProductSpec) -> PriceResult:
    """Instalment-refund price by bisection on ``alpha/(1+pi) = iria_value(alpha)``."""
    x, r, pi = spec.x, spec.r, spec.pi
    if not r > 0:
        return _non_viable(RATE_NOT_POSITIVE)
    _check_rate(ctx, r)
    scale = 1.0 / (1.0 + pi)

    def eq(alpha):
        return alpha * scale - iria_value(ctx, x, r, alpha)

    res = bisect(eq, 0.0, (1.0 + pi) / r, ctx.bisection)
    if not res.converged:
        raise NumericalFailure(
            f"instalment-refund bisection stalled at residual {res.residual:.3g}",
            PriceResult(res.root, res.residual, res.iterations, False),
        )
    return PriceResult(res.root, res.residual, res.iterations, res.root > 0)


def price(ctx: ValuationContext, spec: ProductSpec) -> PriceResult:
    if spec.kind is ProductKind.LIFE_ONLY:
        base = loia_price(ctx, spec.x, spec.r)
        return PriceResult((1.0 + spec.pi) * base.price, 0.0, 0, True)
    if spec.kind is ProductKind.CASH_REFUND:
        return cria_price(ctx, spec)
    return iria_price(ctx, spec)


def verify_survival_convention() -> None:
    """Guard against a flipped sign in the Gompertz survival exponent.

    a(65, 2%) under Gompertz(90, 10) is 17.04378 to the printed digits; the
    opposite sign convention gives a price below 1.
    """
    value = loia_price(ValuationContext(), 65.0, 0.02).price
    if abs(value - 17.04378) > 5e-5:
        raise RuntimeError(f"survival convention check failed: a(65, 0.02) = {value}")
