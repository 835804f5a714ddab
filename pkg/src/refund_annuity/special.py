"""Upper incomplete gamma function for any real shape.

scipy's ``gammaincc`` only accepts positive shape, while the Gompertz annuity
closed form needs ``Gamma(-r b, z)`` with a negative shape whenever ``r > 0``.

For ``z >= 1`` the Legendre continued fraction converges quickly for every
real shape. For ``z < 1`` a negative shape is reached with the downward
recurrence

    Gamma(s, z) = (Gamma(s + 1, z) - z**s * exp(-z)) / s

started from a shape in ``(0, 1]``. A link whose shape lies within
``SMALL_SHAPE`` of zero would divide a cancellation by a tiny number, so it
is replaced by a series in the shape about zero.
"""
from __future__ import annotations

import math

from scipy import special as sp

from .errors import DomainError, NumericalFailure

__all__ = ["upper_incomplete_gamma"]

SMALL_SHAPE = 0.01
CF_THRESHOLD = 1.0
_EULER = 0.57721566490153286061
_ZETA = [float(sp.zeta(k)) for k in range(2, 16)]


def _log_gamma_1p(eps):
    """``log Gamma(1 + eps)`` for ``|eps| <= SMALL_SHAPE``."""
    total = -_EULER * eps
    power = -eps
    # power runs through (-eps)**k
    for k, zeta in enumerate(_ZETA, start=2):
        power *= -eps
        total += zeta * power / k
    return total


def _near_zero_shape(eps, z):
    """``Gamma(eps, z)`` for ``|eps| <= SMALL_SHAPE`` and ``0 < z < 1``."""
    if eps == 0.0:
        return float(sp.exp1(z))
    head = (math.expm1(_log_gamma_1p(eps)) - math.expm1(eps * math.log(z))) / eps
    series = 0.0
    term = 1.0
    for k in range(1, 60):
        term *= -z / k
        piece = term / (k + eps)
        series += piece
        if abs(piece) < 1e-18 * abs(series):
            break
    return head - z ** eps * series


def _continued_fraction(s, z):
    """Modified Lentz evaluation, accurate for ``z >= 1`` and ``s <= 1``."""
    tiny = 1e-300
    b = z + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < 1e-16:
            return math.exp(-z + s * math.log(z)) * h
    raise NumericalFailure(f"continued fraction for Gamma({s}, {z}) did not converge")


def upper_incomplete_gamma(s: float, z: float) -> float:
    """``int_z^inf t**(s-1) e^{-t} dt`` for real ``s`` and ``z > 0``."""
    if not z > 0:
        raise DomainError(f"incomplete gamma needs z > 0, got {z!r}")
    if s > SMALL_SHAPE:
        value = float(sp.gammaincc(s, z) * sp.gamma(s))
    elif z >= CF_THRESHOLD:
        value = _continued_fraction(s, z)
    else:
        shifts = math.floor(-s) + 1
        top = s + shifts
        # top lies in (0, 1]; start one link lower if that link is near zero
        if top > 1.0 - SMALL_SHAPE:
            shifts -= 1
            value = _near_zero_shape(top - 1.0, z)
        elif top <= SMALL_SHAPE:
            value = _near_zero_shape(top, z)
        else:
            value = float(sp.gammaincc(top, z) * sp.gamma(top))
        for k in range(shifts - 1, -1, -1):
            shape = s + k
            value = (value - z ** shape * math.exp(-z)) / shape
    if not math.isfinite(value):
        raise NumericalFailure(f"Gamma({s}, {z}) is not representable")
    return value
