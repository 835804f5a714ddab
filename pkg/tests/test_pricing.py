import itertools
import math

import pytest

from refund_annuity.errors import DomainError
from refund_annuity.mortality import ExponentialLaw, GompertzLaw
from refund_annuity.pricing import (LOADING_TOO_HIGH, RATE_NOT_POSITIVE, ProductKind, ProductSpec,
                                    ValuationContext, cria_insurance_form_residual, cria_price,
                                    insurance_price, iria_price, iria_value, loia_price,
                                    loia_price_gompertz_closed_form, mortality_credits,
                                    period_certain_price, price, refund_interest, refund_tail)
from refund_annuity.quadrature import integrate_to_infinity

CTX = ValuationContext()
EXP = ValuationContext(law=ExponentialLaw(0.02))

AGES = [55, 60, 65, 70, 75, 80, 85]
RATES = [0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06]
LOADINGS = [0.0, 0.05, 0.15, 0.25]


def _solve(kind, x, r, pi=0.0):
    return price(CTX, ProductSpec(kind, x, r, pi))


def test_loia_examples():
    assert loia_price(CTX, 65, 0.02).price == pytest.approx(17.04378, abs=5e-6)
    assert loia_price(CTX, 75, 0.04).price == pytest.approx(10.17229, abs=5e-6)
    assert loia_price(EXP, 40, 0.03).price == pytest.approx(20.0, rel=1e-12)


@pytest.mark.parametrize("x,r", list(itertools.product(AGES, [-0.02, 0.0, 0.005, 0.02, 0.06, 0.2])))
def test_closed_form_agrees_with_quadrature(x, r):
    closed = loia_price_gompertz_closed_form(90, 10, x, r)
    assert closed == pytest.approx(loia_price(CTX, x, r).price, rel=1e-8)


def test_closed_form_zero_rate_is_life_expectancy():
    g = GompertzLaw()
    expectancy = integrate_to_infinity(lambda t: g.survival(65, t), 0.0, lambda t: g.survival(65, t))
    assert loia_price_gompertz_closed_form(90, 10, 65, 1e-12) == pytest.approx(expectancy, rel=1e-9)


def test_period_certain():
    a = loia_price(CTX, 65, 0.02).price
    assert period_certain_price(CTX, 65, 0.02, 0.0) == pytest.approx(a, rel=1e-14)
    values = [period_certain_price(CTX, 65, 0.02, tau) for tau in (0, 5, 10, 20, 40)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert period_certain_price(CTX, 65, 0.02, 1000.0) == pytest.approx(50.0, rel=1e-8)
    assert period_certain_price(CTX, 65, 0.02, 19.18235) == pytest.approx(19.18235, abs=1e-5)
    with pytest.raises(DomainError):
        period_certain_price(CTX, 65, 0.02, -1.0)


def test_insurance_identity():
    assert insurance_price(CTX, 65, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert insurance_price(CTX, 65, 0.02) == pytest.approx(1 - 0.02 * 17.04378, abs=1e-6)
    assert insurance_price(EXP, 65, 0.03) == pytest.approx(0.02 / 0.05, rel=1e-12)


def test_mortality_credits():
    assert mortality_credits(EXP, 70, 0.035) == pytest.approx(0.02, rel=1e-10)
    assert mortality_credits(CTX, 65, 0.02) == pytest.approx(1 / 17.04378 - 0.02, abs=1e-7)
    assert all(mortality_credits(CTX, x, r) > 0 for x in AGES for r in RATES)


def test_exponential_needs_finite_price():
    with pytest.raises(DomainError):
        loia_price(EXP, 65, -0.02)


@pytest.mark.parametrize("x,r,expected", [(65, 0.02, 19.54472), (55, 0.04, 17.47113)])
def test_cria_examples(x, r, expected):
    res = cria_price(CTX, ProductSpec("CR", x, r))
    assert res.viable and res.price == pytest.approx(expected, abs=5e-6)
    assert abs(res.residual) <= CTX.bisection.residual_tolerance


def test_cria_below_frontier_rate():
    res = cria_price(CTX, ProductSpec("CR", 75, 0.0099, 0.15))
    assert not res.viable and res.reason == LOADING_TOO_HIGH
    assert math.isnan(res.price)


@pytest.mark.parametrize("kind", ["CR", "IR"])
@pytest.mark.parametrize("r", [0.0, -0.01])
def test_refund_products_need_positive_rate(kind, r):
    res = _solve(kind, 65, r)
    assert not res.viable and res.reason == RATE_NOT_POSITIVE


def test_loia_accepts_negative_rate():
    assert loia_price(CTX, 65, -0.01).price > loia_price(CTX, 65, 0.0).price


@pytest.mark.parametrize("x,r,expected", [(65, 0.02, 19.18235), (75, 0.04, 11.63911)])
def test_iria_examples(x, r, expected):
    res = iria_price(CTX, ProductSpec("IR", x, r))
    assert res.price == pytest.approx(expected, abs=5e-6)
    assert iria_value(CTX, x, r, res.price) == pytest.approx(res.price, abs=1e-8)


def test_loaded_life_only_is_linear():
    for x, r in [(55, 0.02), (75, 0.04)]:
        assert _solve("LO", x, r, 0.15).price == pytest.approx(1.15 * loia_price(CTX, x, r).price, rel=1e-15)


@pytest.mark.parametrize("x,r,pi", [(65, 0.02, 0.0), (75, 0.03, 0.15), (55, 0.01, 0.05)])
def test_death_benefit_form_has_the_same_root(x, r, pi):
    alpha = cria_price(CTX, ProductSpec("CR", x, r, pi)).price
    assert cria_insurance_form_residual(CTX, x, r, pi, alpha) == pytest.approx(0.0, abs=1e-8)
    assert cria_insurance_form_residual(CTX, x, r, pi, alpha * 1.01) > 0
    assert cria_insurance_form_residual(CTX, x, r, pi, alpha * 0.99) < 0


def test_two_account_balance_at_root():
    alpha = 19.54472079523839
    assert refund_tail(CTX, 65, 0.02, alpha) == pytest.approx(refund_interest(CTX, 65, 0.02, alpha), abs=1e-9)


def test_product_kind_aliases():
    assert ProductKind.parse("cria") is ProductKind.CASH_REFUND
    assert ProductKind.parse("instalment-refund") is ProductKind.INSTALMENT_REFUND
    with pytest.raises(DomainError):
        ProductKind.parse("annuity")


@pytest.mark.parametrize("bad", [dict(x=-1.0), dict(pi=-0.1), dict(r=math.nan)])
def test_spec_validation(bad):
    args = dict(kind="LO", x=65.0, r=0.02, pi=0.0) | bad
    with pytest.raises(DomainError):
        ProductSpec(**args)


# Ordering, bounds and monotonicity over the full grid. Non-viable cells are skipped.

def _grid_prices():
    table = {}
    for x, r, pi in itertools.product(AGES, RATES, LOADINGS):
        for kind in ("LO", "IR", "CR"):
            res = _solve(kind, x, r, pi)
            table[kind, x, r, pi] = res.price if res.viable else None
    return table


GRID = _grid_prices()


@pytest.mark.parametrize("pi", LOADINGS)
def test_ordering_cash_over_instalment_over_life(pi):
    for x, r in itertools.product(AGES, RATES):
        cr = GRID["CR", x, r, pi]
        if cr is None:
            continue
        assert cr > GRID["IR", x, r, pi] > GRID["LO", x, r, pi], (x, r, pi)


def test_rate_bounds():
    for x, r, pi in itertools.product(AGES, RATES, LOADINGS):
        if pi == 0:
            assert r * GRID["CR", x, r, 0.0] < 1
        assert r * GRID["IR", x, r, pi] < 1 + pi


@pytest.mark.parametrize("kind", ["LO", "IR", "CR"])
def test_prices_decrease_in_rate(kind):
    for x, pi in itertools.product(AGES, LOADINGS):
        seq = [GRID[kind, x, r, pi] for r in RATES if GRID[kind, x, r, pi] is not None]
        assert all(b < a for a, b in zip(seq, seq[1:])), (kind, x, pi)


@pytest.mark.parametrize("kind", ["LO", "IR", "CR"])
def test_unloaded_prices_decrease_in_age(kind):
    for r in RATES:
        seq = [GRID[kind, x, r, 0.0] for x in AGES]
        assert all(b < a for a, b in zip(seq, seq[1:])), (kind, r)


def test_refund_expiry_age_increases():
    for r in RATES:
        ages = [x + GRID["CR", x, r, 0.0] for x in AGES]
        assert all(b > a for a, b in zip(ages, ages[1:])), r


def test_cash_refund_increases_with_loading():
    for x, r in itertools.product(AGES, RATES):
        seq = [GRID["CR", x, r, pi] for pi in LOADINGS if GRID["CR", x, r, pi] is not None]
        assert all(b > a for a, b in zip(seq, seq[1:])), (x, r)


@pytest.mark.parametrize("kind", ["IR", "CR"])
@pytest.mark.parametrize("pi", LOADINGS)
def test_large_rate_asymptote(kind, pi):
    for x in AGES:
        value = 5.0 * _solve(kind, x, 5.0, pi).price
        assert value == pytest.approx(1 + pi, rel=0.05)
