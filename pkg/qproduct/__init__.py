"""
qproduct: certified arbitrary-precision evaluation of

    R(t, x) = prod_{n>=1} (1 - t x^n),   |x| < 1,

together with the bounds behind the certificate, Dedekind-eta quantities,
reference algorithms and an identity-based validation suite.
"""

from .engine import EvalCertificate, evaluate, evaluate_to_digits, log_R  # noqa: F401
from .errors import (  # noqa: F401
    DegenerateInputError,
    DomainError,
    IterationBreakdownError,
    NonFiniteError,
    ParseError,
    PrecisionLimitError,
    PrecisionPlanningError,
    QProductError,
    ReciprocalInstabilityError,
)
from .numeric import PrecisionContext, format_complex, parse_complex, plan_precision  # noqa: F401

__version__ = "0.1.0"
