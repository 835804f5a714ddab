"""Brute-force valuations for cross-checking the pricers.

Two independent routes to the same numbers:

* Monte Carlo. Draw the remaining lifetime ``T`` by inverse transform and
  average the discounted payoff of one contract bought at a candidate price.
  At the solved price the average should equal ``price / (1 + pi)``.
* Discrete time. Replace every integral by a left Riemann sum on a uniform
  grid and solve the discretized price equation by fixed-point iteration.

Neither route shares code with the adaptive quadrature or the bisection
solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalFailure
from .mortality import MortalityLaw, sample_lifetime
from .pricing import ProductKind, ProductSpec

__all__ = [
    "SimulationSettings",
    "OracleEstimate",
    "uniform_draws",
    "mc_value_at_price",
    "discrete_time_price",
]

CHUNK = 1 << 18
SURVIVAL_CUTOFF = 1e-16
GRID_CAP = 1e5


@dataclass(frozen=True)
class SimulationSettings:
    """Monte Carlo path count and seed, plus the discrete-time grid step in years."""

    paths: int = 1_000_000
    seed: int = 20210710
    time_step: float = 1.0 / 365.0

    def __post_init__(self):
        if int(self.paths) != self.paths or self.paths < 1:
            raise DomainError(f"paths must be a positive integer, got {self.paths!r}")
        if not (self.time_step > 0 and math.isfinite(self.time_step)):
            raise DomainError(f"time_step must be > 0, got {self.time_step!r}")


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    standard_error: float = 0.0
    paths: int = 0


def uniform_draws(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniforms strictly inside (0, 1): 53 random bits centred in their cell.

    Stated in terms of raw integers so any PCG64 implementation reproduces it.
    """
    return (rng.integers(0, 1 << 53, size=n, dtype=np.int64) + 0.5) / float(1 << 53)


def _payoff(kind, r, alpha, t):
    if r == 0.0:
        income = t.copy()
    else:
        income = -np.expm1(-r * t) / r
    if kind is ProductKind.CASH_REFUND:
        return income + np.maximum(alpha - t, 0.0) * np.exp(-r * t)
    if kind is ProductKind.INSTALMENT_REFUND:
        paid = np.maximum(t, alpha)
        return -np.expm1(-r * paid) / r
    return income


def mc_value_at_price(law: MortalityLaw, spec: ProductSpec, candidate_price: float,
                      sim: SimulationSettings = SimulationSettings()) -> OracleEstimate:
    """Expected discounted payout of one contract sold at ``candidate_price``.

    The refund window is ``candidate_price`` years long (the refund is the
    premium less income received). Life-only ignores the price.
    Chunks are drawn and summed in a fixed order, so a seed gives a
    bit-identical estimate.
    """
    if not candidate_price >= 0:
        raise DomainError(f"candidate price must be >= 0, got {candidate_price!r}")
    if spec.kind is not ProductKind.LIFE_ONLY and not spec.r > 0:
        raise DomainError("refund products need r > 0")
    rng = np.random.Generator(np.random.PCG64(sim.seed))
    total = 0.0
    total_sq = 0.0
    remaining = int(sim.paths)
    while remaining:
        n = min(CHUNK, remaining)
        t = sample_lifetime(law, spec.x, uniform_draws(rng, n))
        pay = _payoff(spec.kind, spec.r, candidate_price, np.atleast_1d(t))
        total += float(np.sum(pay))
        total_sq += float(np.sum(pay * pay))
        remaining -= n
    n = int(sim.paths)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return OracleEstimate(mean, math.sqrt(var / n), n)


def _horizon(law, x):
    t = 1.0
    while law.survival(x, t) > SURVIVAL_CUTOFF:
        t *= 2.0
        if t > GRID_CAP:
            raise NumericalFailure(f"survival stays above {SURVIVAL_CUTOFF:g} past {GRID_CAP:g} years")
    return t


class _Grid:
    """Left-point cumulative sums on ``t_k = k h``; partial last cell included."""

    def __init__(self, law, x, r, h, end):
        n = int(math.ceil(end / h))
        t = np.arange(n + 1) * h
        self.h = h
        self.t = t
        p = np.asarray(law.survival(x, t), dtype=float)
        disc = np.exp(-r * t)
        self.live = disc * p
        self.dead = disc * (1.0 - p)
        self.cum_live = np.concatenate(([0.0], np.cumsum(self.live * h)))
        self.cum_dead0 = np.concatenate(([0.0], np.cumsum(self.dead * h)))
        self.cum_dead1 = np.concatenate(([0.0], np.cumsum(t * self.dead * h)))
        self.end = t[-1]

    def _split(self, alpha):
        if alpha > self.end:
            raise NumericalFailure(f"price {alpha:.6g} ran past the grid end {self.end:.6g}")
        k = min(int(alpha / self.h), len(self.t) - 1)
        return k, alpha - k * self.h

    def live_sum(self, alpha):
        k, frac = self._split(alpha)
        return float(self.cum_live[k] + self.live[k] * frac)

    def dead_sums(self, alpha):
        k, frac = self._split(alpha)
        s0 = self.cum_dead0[k] + self.dead[k] * frac
        s1 = self.cum_dead1[k] + self.t[k] * self.dead[k] * frac
        return float(s0), float(s1)


def discrete_time_price(law: MortalityLaw, spec: ProductSpec, time_step: float,
                        tolerance: float = 1e-12, max_iterations: int = 10_000) -> float:
    """Price from left Riemann sums and fixed-point iteration.

    The cash-refund map is ``alpha -> (1+pi) [a + sum e^{-rt} (1 + r(alpha-t)) (1-tpx) dt]``,
    the death-benefit form integrated by parts. The instalment-refund map is
    ``alpha -> (1+pi) [(1 - e^{-r alpha})/r + a - sum_{[0, alpha)} e^{-rt} tpx dt]``.
    """
    if not (time_step > 0 and math.isfinite(time_step)):
        raise DomainError(f"time_step must be > 0, got {time_step!r}")
    kind, x, r, pi = spec.kind, spec.x, spec.r, spec.pi
    if kind is not ProductKind.LIFE_ONLY and not r > 0:
        raise DomainError("refund products need r > 0")
    horizon = _horizon(law, x)
    if horizon / time_step < 2.0:
        raise NumericalFailure(
            f"time step {time_step:g} leaves fewer than 2 grid points inside the {horizon:g}-year horizon"
        )
    end = horizon if kind is ProductKind.LIFE_ONLY else max(horizon, 4.0 * (1.0 + pi) / r)
    grid = _Grid(law, x, r, time_step, end)
    a = float(grid.cum_live[-1])
    load = 1.0 + pi
    if kind is ProductKind.LIFE_ONLY:
        return load * a

    if kind is ProductKind.CASH_REFUND:
        def step(alpha):
            s0, s1 = grid.dead_sums(alpha)
            return load * (a + (1.0 + r * alpha) * s0 - r * s1)
    else:
        def step(alpha):
            return load * (-math.expm1(-r * alpha) / r + a - grid.live_sum(alpha))

    alpha = load * a
    for _ in range(max_iterations):
        new = step(alpha)
        if abs(new - alpha) <= tolerance * max(1.0, abs(new)):
            return new
        alpha = new
    raise NumericalFailure(f"fixed-point iteration did not settle in {max_iterations} steps", alpha)
