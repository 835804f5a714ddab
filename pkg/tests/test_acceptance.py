"""Acceptance suite: one test, and one printed PASS/FAIL line, per criterion."""
import itertools
import warnings

import pytest

from refund_annuity.mortality import ExponentialLaw, GompertzLaw
from refund_annuity.mwr import mwr_batch, sample_quotes_path
from refund_annuity.oracle import SimulationSettings, discrete_time_price, mc_value_at_price
from refund_annuity.pricing import ProductSpec, ValuationContext, loia_price, price
from refund_annuity.quadrature import BisectionSettings, QuadratureSettings
from refund_annuity.sensitivity import (AsymptoticRangeWarning, analytic_sensitivities,
                                        asymptotic_price_exponential)
from refund_annuity.viability import max_viable_age, min_viable_rate

G = GompertzLaw(90.0, 10.0)
CTX = ValuationContext(law=G)
EXP = ValuationContext(law=ExponentialLaw(0.02))


def _price(kind, x, r, pi=0.0, ctx=CTX):
    return price(ctx, ProductSpec(kind, x, r, pi))


def _golden(kind, table):
    checks = []
    for (x, r), printed in table.items():
        got = _price(kind, x, r).price
        decimals = len(printed.split(".")[1])
        ok = abs(got - float(printed)) <= 1e-4 and round(got, decimals) == float(printed)
        checks.append((f"{kind}({x},{r})={got:.7f} vs {printed}", ok))
    return checks


def test_life_only_price_table(record):
    table = {(55, 0.02): "22.12615", (55, 0.04): "16.82003", (65, 0.02): "17.04378",
             (65, 0.04): "13.73359", (75, 0.02): "11.91615", (75, 0.04): "10.17229"}
    record(1, "life-only price table", _golden("LO", table))


def test_cash_refund_price_table(record):
    table = {(55, 0.02): "23.79569", (55, 0.04): "17.47113", (65, 0.02): "19.54472",
             (65, 0.04): "14.90225", (75, 0.02): "15.19471", (75, 0.04): "11.97156"}
    record(2, "cash-refund price table", _golden("CR", table))


def test_instalment_refund_price_table(record):
    table = {(55, 0.02): "23.55514", (55, 0.04): "17.34376", (65, 0.02): "19.18235",
             (65, 0.04): "14.68173", (75, 0.02): "14.7048", (75, 0.04): "11.63911"}
    record(3, "instalment-refund price table", _golden("IR", table))


def test_income_per_million_and_rate_three_prices(record):
    checks = []
    for r, income in [(0.02, 51164.71), (0.03, 59169.89), (0.04, 67103.97)]:
        got = _price("CR", 65, r).income_per_million
        checks.append((f"CR income at r={r}: {got:.4f} vs {income}", abs(got - income) <= 0.01))
    got = _price("LO", 65, 0.02).income_per_million
    checks.append((f"LO income at r=0.02: {got:.4f} vs 58672.44", abs(got - 58672.44) <= 0.01))
    a = loia_price(CTX, 65, 0.03).price
    checks.append((f"a(65,0.03)={a:.5f} rounds to {round(a, 2)} vs 15.25", round(a, 2) == 15.25))
    a_star = _price("CR", 65, 0.03).price
    checks.append((f"a*(65,0.03)={a_star:.5f} rounds to {round(a_star, 2)} vs 16.91", round(a_star, 2) == 16.91))
    record(4, "income per $1M and 3% prices", checks)


def test_threshold_rate_table(record):
    table = {(55, 0.05): 16, (55, 0.15): 46, (55, 0.25): 74,
             (65, 0.05): 23, (65, 0.15): 65, (65, 0.25): 105,
             (75, 0.05): 35, (75, 0.15): 101, (75, 0.25): 163}
    checks = []
    for (x, pi), bp in table.items():
        got = min_viable_rate(G, x, pi).threshold * 1e4
        checks.append((f"r({pi},{x})={got:.2f}bp vs {bp}", abs(round(got) - bp) <= 1))
    record(5, "minimum viable rate table", checks)


def test_moneys_worth_table(record):
    expected = [0.996, 1.031, 1.005, 1.043, 1.002, 1.017, 1.008, 1.033]
    rows = mwr_batch(ValuationContext(), sample_quotes_path(), 0.02)
    checks = [(f"{len(rows)} rows", len(rows) == 8)]
    for row, value in zip(rows, expected):
        got = row.result.mwr if row.result else float("nan")
        checks.append((f"{row.label} mwr={got:.5f} vs {value}", abs(got - value) <= 0.005))
    record(6, "money's worth ratios", checks)


def test_frontier_age_and_loaded_price_upturn(record):
    frontier = max_viable_age(G, 0.02, 0.15).threshold
    checks = [(f"max viable age {frontier:.4f} in [79, 83]", 79.0 <= frontier <= 83.0)]
    ages = list(range(60, int(frontier) + 1))
    prices = [_price("CR", x, 0.02, 0.15).price for x in ages]
    low = prices.index(min(prices))
    turns_up = 0 < low < len(prices) - 1 and all(b > a for a, b in zip(prices[low:], prices[low + 1:]))
    checks.append((f"loaded price minimum at age {ages[low]} then rising to the frontier", turns_up))
    record(7, "age frontier and loaded price upturn", checks)


def test_theorem_properties(record):
    ages = [55, 60, 65, 70, 75, 80, 85]
    rates = [0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06]
    loadings = [0.0, 0.05, 0.15, 0.25]
    grid = {}
    for x, r, pi, kind in itertools.product(ages, rates, loadings, ("LO", "IR", "CR")):
        res = _price(kind, x, r, pi)
        grid[kind, x, r, pi] = res.price if res.viable else None
    failures = []
    viable_cr = 0
    for x, r, pi in itertools.product(ages, rates, loadings):
        cr, ir, lo = grid["CR", x, r, pi], grid["IR", x, r, pi], grid["LO", x, r, pi]
        if cr is not None:
            viable_cr += 1
            if not cr > ir > lo:
                failures.append(f"ordering at {(x, r, pi)}")
        if pi == 0 and not r * cr < 1:
            failures.append(f"r*a* bound at {(x, r)}")
        if not r * ir < 1 + pi:
            failures.append(f"r*a_ir bound at {(x, r, pi)}")
    for kind, x, pi in itertools.product(("LO", "IR", "CR"), ages, loadings):
        seq = [grid[kind, x, r, pi] for r in rates if grid[kind, x, r, pi] is not None]
        if not all(b < a for a, b in zip(seq, seq[1:])):
            failures.append(f"{kind} not decreasing in r at {(x, pi)}")
    for kind, r in itertools.product(("LO", "IR", "CR"), rates):
        seq = [grid[kind, x, r, 0.0] for x in ages]
        if not all(b < a for a, b in zip(seq, seq[1:])):
            failures.append(f"{kind} not decreasing in x at r={r}")
        if kind == "CR":
            expiry = [x + grid[kind, x, r, 0.0] for x in ages]
            if not all(b > a for a, b in zip(expiry, expiry[1:])):
                failures.append(f"x + a* not increasing at r={r}")
    for x, r in itertools.product(ages, rates):
        seq = [grid["CR", x, r, pi] for pi in loadings if grid["CR", x, r, pi] is not None]
        if not all(b > a for a, b in zip(seq, seq[1:])):
            failures.append(f"a* not increasing in loading at {(x, r)}")
    checks = [(f"{viable_cr} viable cash-refund cells, {len(failures)} property failures", not failures)]
    checks += [(f, False) for f in failures[:10]]
    record(8, "ordering, bounds and monotonicity properties", checks)


def test_sensitivity_validation(record):
    tight = ValuationContext(law=G, quadrature=QuadratureSettings(1e-13, 1e-15),
                             bisection=BisectionSettings(1e-13))
    step = 1e-5
    points = list(itertools.product((60, 70, 80), (0.02, 0.04), (0.0, 0.15)))
    checks = [(f"{len(points)} interior grid points", len(points) == 12)]
    worst = 0.0
    for (x, r, pi), kind in itertools.product(points, ("LO", "IR", "CR")):
        rep = analytic_sensitivities(tight, ProductSpec(kind, x, r, pi))
        p = lambda xx, rr: price(tight, ProductSpec(kind, xx, rr, pi)).price
        fd_age = (p(x + step, r) - p(x - step, r)) / (2 * step)
        fd_rate = (p(x, r + step) - p(x, r - step)) / (2 * step)
        for analytic, fd, name in ((rep.d_price_d_age, fd_age, "d/dx"), (rep.d_price_d_rate, fd_rate, "d/dr")):
            rel = abs(analytic - fd) / abs(fd)
            worst = max(worst, rel)
            if rel > 1e-4:
                checks.append((f"{kind} {name} at {(x, r, pi)} off by {rel:.2e}", False))
    checks.append((f"worst relative gap {worst:.2e} <= 1e-4", worst <= 1e-4))
    rep = analytic_sensitivities(EXP, ProductSpec("LO", 65, 0.03))
    checks.append((f"exponential duration {rep.life_annuity_duration!r} equals price {rep.price!r}",
                   abs(rep.life_annuity_duration - rep.price) <= 1e-9 * rep.price))
    bumped = _price("LO", 65, 0.0325, ctx=EXP).price
    change = (bumped / rep.price - 1) * 100
    checks.append((f"worked example price {rep.price:.6f}, duration {rep.life_annuity_duration:.6f}, "
                   f"change {change:.3f}%",
                   round(rep.price, 6) == 20 and round(rep.life_annuity_duration, 6) == 20
                   and round(change, 2) == -4.76))
    record(9, "analytic sensitivities", checks)


def test_oracle_agreement(record):
    checks = []
    sim = SimulationSettings(paths=1_000_000, seed=20210710)
    for kind in ("LO", "IR", "CR"):
        alpha = _price(kind, 65, 0.02).price
        est = mc_value_at_price(G, ProductSpec(kind, 65, 0.02), alpha, sim)
        z = (est.value - alpha) / est.standard_error
        checks.append((f"{kind} Monte Carlo {est.value:.5f} vs {alpha:.5f} ({z:+.2f} SE)", abs(z) < 3))
        disc = discrete_time_price(G, ProductSpec(kind, 65, 0.02), 1 / 365)
        rel = abs(disc / alpha - 1)
        checks.append((f"{kind} daily grid {disc:.5f} rel gap {rel:.1e}", rel <= 1e-3))
    record(10, "Monte Carlo and discrete-time oracles", checks)


def test_exponential_asymptotics(record):
    lam = 0.02
    checks = []
    exact = {}
    for r in (1e-3, 1e-4, 1e-5, 5.0, 10.0, 20.0):
        for kind in ("LO", "IR", "CR"):
            exact[kind, r] = analytic_sensitivities(EXP, ProductSpec(kind, 0.0, r))
    with warnings.catch_warnings():
        warnings.simplefilter("error", AsymptoticRangeWarning)
        for regime, rates in (("rate_to_zero", (1e-3, 1e-4, 1e-5)), ("rate_to_infinity", (5.0, 10.0, 20.0))):
            for kind in ("IR", "CR"):
                gaps = []
                for r in rates:
                    approx = asymptotic_price_exponential(kind, lam, r, regime)
                    gaps.append(abs(approx.price / exact[kind, r].price - 1))
                checks.append((f"{kind} {regime} price gaps {['%.2e' % g for g in gaps]} shrink",
                               all(b < a for a, b in zip(gaps, gaps[1:]))))
            for r in rates:
                approx = asymptotic_price_exponential("LO", lam, r, regime)
                checks.append((f"LO {regime} exact at r={r}",
                               abs(approx.price / exact["LO", r].price - 1) < 1e-10))
    for r in (5.0, 10.0, 20.0):
        cr, ir, lo = (exact[k, r].price for k in ("CR", "IR", "LO"))
        checks.append((f"CR > IR > LO at r={r}", cr > ir > lo))
    for r in (1e-3, 1e-4, 1e-5):
        checks.append((f"CR price > IR price at r={r}", exact["CR", r].price > exact["IR", r].price))
    small = 1e-5
    d_ir, d_cr = exact["IR", small].life_annuity_duration, exact["CR", small].life_annuity_duration
    checks.append((f"IR duration {d_ir:.1f} > CR duration {d_cr:.1f} at r={small}", d_ir > d_cr))
    record(11, "exponential-law asymptotics", checks)
