"""Pricing of life-only, instalment-refund and cash-refund income annuities.

Mortality follows a Gompertz or constant-hazard law; the discounted survival
integrals run through a compiled kernel when it is built, else pure Python
(see :data:`refund_annuity.kernels.BACKEND`).
"""
from .errors import (AnnuityError, BracketError, DomainError, DurationBlowUp, InputError,
                     NoFairRate, NonViableError, NumericalFailure)
from .kernels import BACKEND
from .mortality import ExponentialLaw, GompertzLaw, MortalityLaw
from .mwr import MarketQuote, MwrResult, SexMortality, implied_fair_rate, moneys_worth, mwr_batch
from .pricing import (PriceResult, ProductKind, ProductSpec, ValuationContext, cria_price,
                      iria_price, loia_price, loia_price_gompertz_closed_form, price,
                      verify_survival_convention)
from .quadrature import BisectionSettings, QuadratureSettings
from .sensitivity import (AsymptoticRangeWarning, Regime, SensitivityReport,
                          analytic_sensitivities, asymptotic_price_exponential,
                          macaulay_duration)
from .viability import FrontierPoint, frontier_sweep, max_viable_age, min_viable_rate

__version__ = "0.1.0"

verify_survival_convention()
