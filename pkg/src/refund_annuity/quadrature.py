"""Adaptive integration and a guarded bisection root finder.

The integrator is a globally adaptive 7/15-point Gauss-Kronrod scheme: the
panel with the largest error estimate is halved until the summed estimate
meets ``max(absolute_tolerance, relative_tolerance * |integral|)``. The error
estimate of a panel is ``|K15 - G7|``, which is deliberately pessimistic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import BracketError, DomainError, NumericalFailure

__all__ = [
    "QuadratureSettings",
    "BisectionSettings",
    "BisectionResult",
    "integrate_finite",
    "integrate_to_infinity",
    "truncation_horizon",
    "bisect",
]

# Kronrod abscissae on [0, 1]; odd indices are the Gauss points
GK_NODES = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
K15_WEIGHTS = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
G7_WEIGHTS = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

# hard limit on how far past the lower limit a tail is searched
HORIZON_CAP = 1.0e6


@dataclass(frozen=True)
class QuadratureSettings:
    relative_tolerance: float = 1e-10
    absolute_tolerance: float = 1e-12
    truncation_survival_floor: float = 1e-14
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.relative_tolerance > 0 and self.absolute_tolerance > 0):
            raise DomainError("quadrature tolerances must be > 0")
        if not 0 < self.truncation_survival_floor < 1:
            raise DomainError("truncation floor must lie in (0, 1)")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class BisectionSettings:
    residual_tolerance: float = 1e-9
    max_iterations: int = 200

    def __post_init__(self):
        if not self.residual_tolerance > 0:
            raise DomainError("residual_tolerance must be > 0")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")


@dataclass(frozen=True)
class BisectionResult:
    """Outcome of :func:`bisect`.

    ``bracket_residuals`` records ``max(|f(lo)|, |f(hi)|)`` after each
    iteration; for monotone ``f`` it never increases.
    """

    root: float
    residual: float
    iterations: int
    converged: bool
    bracket: tuple[float, float]
    bracket_residuals: tuple[float, ...] = field(default=(), repr=False)


def _gk15(f, a, b):
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(center)
    kronrod = K15_WEIGHTS[7] * fc
    gauss = G7_WEIGHTS[3] * fc
    for j in range(7):
        dx = half * GK_NODES[j]
        pair = f(center - dx) + f(center + dx)
        kronrod += K15_WEIGHTS[j] * pair
        if j % 2 == 1:
            gauss += G7_WEIGHTS[j // 2] * pair
    kronrod *= half
    gauss *= half
    return kronrod, abs(kronrod - gauss)


def integrate_finite(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    settings: QuadratureSettings = QuadratureSettings(),
    initial_panels: int = 1,
) -> float:
    """Integrate ``f`` over ``[lo, hi]``.

    Raises :class:`NumericalFailure` (with the partial estimate attached) when
    the tolerance is not met within ``settings.max_subdivisions`` panels.
    """
    if hi < lo:
        raise DomainError(f"integration limits out of order: {lo} > {hi}")
    if hi == lo:
        return 0.0
    n0 = max(1, min(int(initial_panels), settings.max_subdivisions))
    width = (hi - lo) / n0
    panels = []
    for i in range(n0):
        a = lo + i * width
        b = hi if i == n0 - 1 else lo + (i + 1) * width
        est, err = _gk15(f, a, b)
        panels.append([a, b, est, err])

    while True:
        total = math.fsum(p[2] for p in panels)
        error = math.fsum(p[3] for p in panels)
        if not math.isfinite(total):
            raise NumericalFailure("integrand is not finite on the interval", total)
        if error <= max(settings.absolute_tolerance, settings.relative_tolerance * abs(total)):
            return total
        if len(panels) >= settings.max_subdivisions:
            raise NumericalFailure(
                f"quadrature did not converge in {len(panels)} panels "
                f"(estimate {total!r}, error {error!r})",
                total,
            )
        worst = max(range(len(panels)), key=lambda i: panels[i][3])
        a, b, _, _ = panels[worst]
        mid = 0.5 * (a + b)
        left = _gk15(f, a, mid)
        right = _gk15(f, mid, b)
        panels[worst] = [a, mid, left[0], left[1]]
        panels.append([mid, b, right[0], right[1]])


def truncation_horizon(
    envelope: Callable[[float], float],
    lo: float,
    floor: float,
    cap: float = HORIZON_CAP,
) -> float:
    """First ``T >= lo`` (to bisection accuracy) where ``envelope(T) < floor``.

    The search doubles a step away from ``lo`` and then bisects the last
    step, so an envelope that first rises (negative rates) is handled.
    """
    if envelope(lo) < floor:
        return lo
    step = 1.0
    prev = lo
    while True:
        t = lo + step
        if envelope(t) < floor:
            break
        if step > cap:
            raise NumericalFailure(
                f"envelope stays above {floor:g} for {cap:g} years past {lo:g}"
            )
        prev = t
        step *= 2.0
    a, b = prev, t
    for _ in range(60):
        mid = 0.5 * (a + b)
        if envelope(mid) < floor:
            b = mid
        else:
            a = mid
        if b - a <= 1e-9 * max(1.0, abs(b)):
            break
    return b


def integrate_to_infinity(
    f: Callable[[float], float],
    lo: float,
    envelope: Callable[[float], float],
    settings: QuadratureSettings = QuadratureSettings(),
) -> float:
    """Integrate ``f`` over ``[lo, inf)``, truncated where ``envelope`` drops below the floor."""
    horizon = truncation_horizon(envelope, lo, settings.truncation_survival_floor)
    panels = max(1, min(64, math.ceil((horizon - lo) / 8.0)))
    return integrate_finite(f, lo, horizon, settings, initial_panels=panels)


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    settings: BisectionSettings = BisectionSettings(),
) -> BisectionResult:
    """Root of ``f`` on ``[lo, hi]`` by bisection.

    Stops at the first midpoint with ``|f| <= residual_tolerance``. If the
    iteration budget runs out, or the bracket can no longer be halved in
    floating point, the last midpoint is returned with ``converged`` set by
    the same residual test.
    """
    if not lo <= hi:
        raise DomainError(f"bracket out of order: [{lo}, {hi}]")
    tol = settings.residual_tolerance
    f_lo = f(lo)
    f_hi = f(hi)
    if abs(f_lo) <= tol:
        return BisectionResult(lo, f_lo, 0, True, (lo, hi))
    if abs(f_hi) <= tol:
        return BisectionResult(hi, f_hi, 0, True, (lo, hi))
    if (f_lo > 0) == (f_hi > 0):
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: f(lo)={f_lo!r}, f(hi)={f_hi!r}"
        )
    history = []
    mid = 0.5 * (lo + hi)
    f_mid = f(mid)
    for iteration in range(1, settings.max_iterations + 1):
        if abs(f_mid) <= tol:
            return BisectionResult(mid, f_mid, iteration, True, (lo, hi), tuple(history))
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        history.append(max(abs(f_lo), abs(f_hi)))
        new_mid = 0.5 * (lo + hi)
        if new_mid in (lo, hi) or iteration == settings.max_iterations:
            break
        mid = new_mid
        f_mid = f(mid)
    best, f_best = (lo, f_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi)
    return BisectionResult(
        best, f_best, iteration, abs(f_best) <= tol, (lo, hi), tuple(history)
    )
