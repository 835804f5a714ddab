"""Exception hierarchy shared by every module."""


class AnnuityError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(AnnuityError, ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalFailure(AnnuityError, ArithmeticError):
    """A numerical routine did not converge.

    ``partial`` carries the best estimate available when the routine gave up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class BracketError(NumericalFailure):
    """The root finder was handed an interval without a sign change."""


class NonViableError(AnnuityError):
    """A product has no price solving its valuation equation."""


class DurationBlowUp(AnnuityError, ArithmeticError):
    """The implicit-function denominator vanished near the viability frontier."""


class InputError(AnnuityError, ValueError):
    """An input file or configuration could not be read or parsed."""


class NoFairRate(NumericalFailure):
    """No rate in the search range equates model and quoted prices."""
