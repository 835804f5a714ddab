"""Viability frontier of loaded cash-refund annuities.

A cash-refund annuity with loading ``pi`` has a price iff
``r * a(x, r) > pi / (1 + pi)``. The left side increases from 0 to 1 in ``r``
and decreases to 0 in ``x`` (for an unbounded increasing hazard), so each
frontier is a one-dimensional root.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import AnnuityError, DomainError, NumericalFailure
from .mortality import ExponentialLaw, MortalityLaw
from .pricing import ValuationContext, loia_price
from .quadrature import bisect

__all__ = [
    "FrontierPoint",
    "FrontierRow",
    "min_viable_rate",
    "max_viable_age",
    "frontier_sweep",
]

AGE_CAP = 150.0
RATE_CAP = 1e3


@dataclass(frozen=True)
class FrontierPoint:
    threshold: float
    residual: float
    iterations: int
    exists: bool = True
    reason: str | None = None

    @property
    def basis_points(self) -> int:
        return round(self.threshold * 1e4)


@dataclass(frozen=True)
class FrontierRow:
    axis: str
    coordinate: float
    loading: float
    point: FrontierPoint | None
    error: str | None = None


def _context(law_or_ctx) -> ValuationContext:
    if isinstance(law_or_ctx, ValuationContext):
        return law_or_ctx
    if isinstance(law_or_ctx, MortalityLaw):
        return ValuationContext(law=law_or_ctx)
    raise TypeError(f"expected a MortalityLaw or ValuationContext, got {law_or_ctx!r}")


def _delta(pi: float) -> float:
    if not (pi > 0 and math.isfinite(pi)):
        raise DomainError(f"frontier needs a finite loading > 0, got {pi!r}")
    return pi / (1.0 + pi)


def min_viable_rate(law, x: float, pi: float) -> FrontierPoint:
    """Lowest rate at which a cash-refund annuity issued at ``x`` with loading ``pi`` is viable."""
    ctx = _context(law)
    delta = _delta(pi)

    def gap(r):
        if r == 0.0:
            return -delta
        return r * loia_price(ctx, x, r).price - delta

    hi = 0.01
    while gap(hi) <= 0:
        hi *= 2.0
        if hi > RATE_CAP:
            raise NumericalFailure(f"no viable rate below {RATE_CAP:g} at x={x}, pi={pi}")
    res = bisect(gap, 0.0, hi, ctx.bisection)
    if not res.converged:
        raise NumericalFailure(f"rate frontier stalled at residual {res.residual:.3g}")
    return FrontierPoint(res.root, res.residual, res.iterations)


def max_viable_age(law, r: float, pi: float) -> FrontierPoint:
    """Oldest issue age at which a cash-refund annuity at rate ``r`` with loading ``pi`` is viable."""
    ctx = _context(law)
    if isinstance(ctx.law, ExponentialLaw):
        raise DomainError("age frontier needs an increasing, unbounded hazard")
    if not r > 0:
        raise DomainError(f"age frontier needs r > 0, got {r!r}")
    delta = _delta(pi)

    def gap(x):
        return r * loia_price(ctx, x, r).price - delta

    at_birth = gap(0.0)
    if at_birth <= 0:
        return FrontierPoint(math.nan, at_birth, 0, False, "not viable at any age")
    if gap(AGE_CAP) > 0:
        raise NumericalFailure(f"still viable at the age cap {AGE_CAP:g}")
    res = bisect(gap, 0.0, AGE_CAP, ctx.bisection)
    if not res.converged:
        raise NumericalFailure(f"age frontier stalled at residual {res.residual:.3g}")
    return FrontierPoint(res.root, res.residual, res.iterations)


def frontier_sweep(law, pi: float, axis: str, values: Iterable[float]) -> list[FrontierRow]:
    """Apply the frontier solver along one axis.

    ``axis="age"`` solves for the minimum rate at each age; ``axis="rate"``
    for the maximum age at each rate. Failed cells are kept with an error.
    """
    if axis not in ("age", "rate"):
        raise DomainError(f"axis must be 'age' or 'rate', got {axis!r}")
    solver = min_viable_rate if axis == "age" else max_viable_age
    rows = []
    for value in sorted(values):
        try:
            rows.append(FrontierRow(axis, value, pi, solver(law, value, pi)))
        except AnnuityError as exc:
            rows.append(FrontierRow(axis, value, pi, None, str(exc)))
    return rows
