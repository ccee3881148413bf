"""
Exception hierarchy shared by every qproduct module.

The CLI reports any ``QProductError`` as a JSON error payload with exit code 2.
"""

from __future__ import annotations


class QProductError(Exception):
    """Base class for all errors raised by qproduct."""


class DomainError(QProductError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ParseError(DomainError):
    """A numeric literal could not be parsed."""

    def __init__(self, token: str, detail: str = ""):
        self.token = token
        message = f"malformed complex literal {token!r}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class PrecisionLimitError(DomainError):
    """The planned working precision exceeds the configured cap."""


class DegenerateInputError(QProductError):
    """x = 0: there is no gamma; callers short-circuit to R = 1."""


class NonFiniteError(QProductError, ArithmeticError):
    """An infinity or NaN was produced where a finite value is required."""


class IterationBreakdownError(QProductError, ZeroDivisionError):
    """A recurrence hit a zero denominator."""

    def __init__(self, step: int, denominator: str):
        self.step = step
        self.denominator = denominator
        super().__init__(f"iteration breakdown at n={step}: {denominator} vanished")


class ReciprocalInstabilityError(QProductError, ArithmeticError):
    """A series that is inverted at the end came too close to zero."""


class PrecisionPlanningError(QProductError, RuntimeError):
    """The certified bound is unreachable at the planned precision."""


__all__ = [
    "QProductError",
    "DomainError",
    "ParseError",
    "PrecisionLimitError",
    "DegenerateInputError",
    "NonFiniteError",
    "IterationBreakdownError",
    "ReciprocalInstabilityError",
    "PrecisionPlanningError",
]
