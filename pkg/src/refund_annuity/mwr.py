"""Money's worth ratios of market annuity quotes.

A quote of premium ``P`` for annual income ``C`` implies an empirical price
``P / C`` per $1 of income. The money's worth ratio divides the unloaded model
price by it: above 1 the buyer gets more than the model says the income is
worth.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .errors import AnnuityError, DomainError, InputError, NoFairRate, NonViableError
from .mortality import GompertzLaw
from .pricing import ProductKind, ProductSpec, ValuationContext, price
from .quadrature import BisectionSettings, bisect

__all__ = [
    "SexMortality",
    "MarketQuote",
    "MwrResult",
    "MwrRow",
    "moneys_worth",
    "implied_fair_rate",
    "read_quotes",
    "mwr_batch",
    "sample_quotes_path",
]

QUOTE_COLUMNS = ("label", "age", "sex", "kind", "premium", "annual_income")
RATE_RANGE = (1e-6, 1.0)


@dataclass(frozen=True)
class SexMortality:
    """Gompertz parameters per sex. Females get a later modal age."""

    male_modal_age: float = 90.0
    female_modal_age: float = 92.0
    dispersion: float = 10.0

    def law_for(self, sex: str) -> GompertzLaw:
        key = str(sex).strip().upper()
        if key == "M":
            return GompertzLaw(self.male_modal_age, self.dispersion)
        if key == "F":
            return GompertzLaw(self.female_modal_age, self.dispersion)
        raise DomainError(f"sex must be M or F, got {sex!r}")


@dataclass(frozen=True)
class MarketQuote:
    label: str
    age: float
    sex: str
    premium: float
    annual_income: float
    kind: ProductKind = ProductKind.LIFE_ONLY

    def __post_init__(self):
        object.__setattr__(self, "kind", ProductKind.parse(self.kind))
        object.__setattr__(self, "sex", str(self.sex).strip().upper())
        if self.sex not in ("M", "F"):
            raise DomainError(f"sex must be M or F, got {self.sex!r}")
        if not (self.premium > 0 and math.isfinite(self.premium)):
            raise DomainError(f"premium must be > 0, got {self.premium!r}")
        if not (self.annual_income > 0 and math.isfinite(self.annual_income)):
            raise DomainError(f"annual income must be > 0, got {self.annual_income!r}")
        if not (self.age >= 0 and math.isfinite(self.age)):
            raise DomainError(f"age must be >= 0, got {self.age!r}")

    @property
    def empirical_price(self) -> float:
        return self.premium / self.annual_income


@dataclass(frozen=True)
class MwrResult:
    model_price: float
    empirical_price: float
    mwr: float
    implied_fair_rate: float | None = None


@dataclass(frozen=True)
class MwrRow:
    line: int
    label: str
    quote: MarketQuote | None
    result: MwrResult | None
    error: str | None = None


def _model_price(ctx, quote, r, mortality):
    local = replace(ctx, law=mortality.law_for(quote.sex))
    result = price(local, ProductSpec(quote.kind, quote.age, r))
    if not result.viable:
        raise NonViableError(f"{quote.label}: no model price at r={r} ({result.reason})")
    return result.price


def moneys_worth(ctx: ValuationContext, quote: MarketQuote, r: float,
                 mortality: SexMortality = SexMortality()) -> MwrResult:
    """Unloaded model price of ``quote.kind`` at rate ``r`` over ``P / C``."""
    model = _model_price(ctx, quote, r, mortality)
    empirical = quote.empirical_price
    return MwrResult(model, empirical, model / empirical)


def implied_fair_rate(ctx: ValuationContext, quote: MarketQuote,
                      mortality: SexMortality = SexMortality(),
                      rate_range: tuple[float, float] = RATE_RANGE,
                      tolerance: float = 1e-10) -> float:
    """Rate at which the quote's money's worth ratio is exactly 1.

    The model price falls as ``r`` rises, so the ratio minus 1 changes sign
    once on ``rate_range`` when a fair rate exists.
    """
    lo, hi = rate_range
    empirical = quote.empirical_price

    def gap(r):
        return _model_price(ctx, quote, r, mortality) / empirical - 1.0

    g_lo, g_hi = gap(lo), gap(hi)
    if g_hi > 0:
        raise NoFairRate(f"{quote.label}: ratio exceeds 1 at every rate up to {hi:g}")
    if g_lo < 0:
        raise NoFairRate(f"{quote.label}: ratio is below 1 even at rate {lo:g}")
    res = bisect(gap, lo, hi, BisectionSettings(tolerance, ctx.bisection.max_iterations))
    return res.root


def sample_quotes_path() -> Path:
    """Bundled file of eight $100,000 quotes (ages 65 and 80, both sexes, LO and CR)."""
    return Path(str(resources.files("refund_annuity") / "data" / "sample_quotes.csv"))


def read_quotes(path) -> list[MwrRow]:
    """Parse a quote file into rows; malformed rows carry an error and no quote."""
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read quote file {path}: {exc}") from exc
    rows = []
    with handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            return rows
        header = tuple(name.strip() for name in reader.fieldnames)
        if header != QUOTE_COLUMNS:
            raise InputError(f"quote file header must be {','.join(QUOTE_COLUMNS)}, got {','.join(header)}")
        for record in reader:
            line = reader.line_num
            label = (record.get("label") or "").strip()
            try:
                if None in record or any(record[c] is None for c in QUOTE_COLUMNS):
                    raise InputError("wrong number of fields")
                quote = MarketQuote(
                    label=label,
                    age=float(record["age"]),
                    sex=record["sex"],
                    premium=float(record["premium"]),
                    annual_income=float(record["annual_income"]),
                    kind=record["kind"],
                )
            except (ValueError, AnnuityError) as exc:
                rows.append(MwrRow(line, label, None, None, str(exc)))
                continue
            rows.append(MwrRow(line, label, quote, None))
    return rows


def mwr_batch(ctx: ValuationContext, quotes_file, r: float = 0.02,
              mortality: SexMortality = SexMortality(),
              solve_rate: bool = False) -> list[MwrRow]:
    """Money's worth ratio for every quote in a file.

    With ``solve_rate`` each result also carries its implied fair rate. A row
    that fails to parse or price is reported with its error and the batch
    continues.
    """
    out = []
    for row in read_quotes(quotes_file):
        if row.quote is None:
            out.append(row)
            continue
        try:
            result = moneys_worth(ctx, row.quote, r, mortality)
            if solve_rate:
                result = replace(result, implied_fair_rate=implied_fair_rate(ctx, row.quote, mortality))
        except AnnuityError as exc:
            out.append(replace(row, error=str(exc)))
            continue
        out.append(replace(row, result=result))
    return out
