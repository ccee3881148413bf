"""
Arbitrary-precision number surface shared by every qproduct module.

Each ``PrecisionContext`` owns a private ``mpmath.MPContext`` so that
evaluations at different precisions never touch a global ``mp.dps``. Values
(``ComplexValue``) are the context's ``mpc``/``mpf`` numbers; their precision
is that of the context that produced them.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Any, Optional, Union

import mpmath
from mpmath import MPContext

from .config_store import resolve_max_working_digits
from .errors import DegenerateInputError, DomainError, NonFiniteError, ParseError, PrecisionLimitError


LOGGER = logging.getLogger("qproduct.numeric")

MIN_GUARD_DIGITS = 10
# Digits lost to cancellation between the largest term and the result, per unit 1/gamma.
CANCELLATION_DIGITS_PER_GAMMA = 1.07
# Extra digits that make a decimal rendering re-parse to the same binary value.
ROUNDTRIP_EXTRA_DIGITS = 3

ComplexValue = Any  # an mpc (or mpf) bound to some PrecisionContext.mp
Number = Union[int, float, complex, str, Any]


@dataclass(frozen=True)
class PrecisionContext:
    requested_digits: int
    working_digits: int
    guard_digits: int = MIN_GUARD_DIGITS
    mp: MPContext = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.requested_digits < 1:
            raise DomainError("requested_digits must be >= 1")
        if self.guard_digits < MIN_GUARD_DIGITS:
            raise DomainError(f"guard_digits must be >= {MIN_GUARD_DIGITS}")
        if self.working_digits < self.requested_digits + self.guard_digits:
            raise DomainError("working_digits must cover requested_digits + guard_digits")
        ctx = MPContext()
        ctx.dps = self.working_digits
        object.__setattr__(self, "mp", ctx)

    @property
    def eps(self):
        return self.mp.eps

    def convert(self, value: Number):
        """Bring ``value`` (python number, decimal string or mpmath value) into this context."""
        if isinstance(value, str):
            return parse_complex(value, self)
        return self.mp.mpmathify(value)


@dataclass(frozen=True)
class GammaParam:
    gamma: Any

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise DomainError("gamma must be positive")

    def __float__(self) -> float:
        return float(self.gamma)


def context_for_digits(
    requested_digits: int,
    guard_digits: int = MIN_GUARD_DIGITS,
    max_working_digits: Optional[int] = None,
) -> PrecisionContext:
    """Context without a gamma-dependent cancellation allowance."""
    working = requested_digits + guard_digits
    _check_cap(working, max_working_digits)
    return PrecisionContext(requested_digits, working, guard_digits)


def default_context() -> PrecisionContext:
    return PrecisionContext(requested_digits=20, working_digits=30)


def _check_cap(working_digits: int, max_working_digits: Optional[int]) -> None:
    cap = resolve_max_working_digits(max_working_digits)
    if working_digits > cap:
        raise PrecisionLimitError(
            f"planned working precision {working_digits} digits exceeds the cap of {cap}"
        )


def certificate_k(digits: int) -> float:
    """K such that e^{-K} = 10^{-(digits+2)}."""
    return (digits + 2) * math.log(10)


def apriori_term_count(gamma: Any, K: float) -> int:
    """ceil(sqrt(2 pi^2/(3 gamma^2) + 2K/gamma)), the relative-error term count."""
    g = float(gamma)
    if math.isinf(g):
        return 1
    return max(1, math.ceil(math.sqrt(2.0 * math.pi ** 2 / (3.0 * g * g) + 2.0 * float(K) / g)))


def plan_precision(
    requested_digits: int,
    gamma: Union[GammaParam, Any],
    terms: Optional[int] = None,
    max_working_digits: Optional[int] = None,
) -> PrecisionContext:
    if requested_digits < 1:
        raise DomainError("requested_digits must be >= 1")
    g = float(gamma)
    if not g > 0:
        raise DomainError("gamma must be positive")
    if terms is None:
        terms = apriori_term_count(g, certificate_k(requested_digits))
    cancellation = math.ceil(CANCELLATION_DIGITS_PER_GAMMA / g)
    guard = MIN_GUARD_DIGITS + math.ceil(math.log10(max(terms, 1)))
    working = requested_digits + cancellation + guard
    _check_cap(working, max_working_digits)
    LOGGER.debug(
        "precision plan: requested=%s cancellation=%s guard=%s working=%s (gamma=%.6g, N=%s)",
        requested_digits,
        cancellation,
        guard,
        working,
        g,
        terms,
    )
    return PrecisionContext(requested_digits, working, guard)


# ---------------------------------------------------------------------------
# Parsing and formatting
# ---------------------------------------------------------------------------

_DECIMAL = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_PURE_IMAG = re.compile(rf"^(?P<im>[+-]?(?:{_DECIMAL})?)[ij]$")
_RECT = re.compile(rf"^(?P<re>[+-]?{_DECIMAL})(?:(?P<im>[+-](?:{_DECIMAL})?)[ij])?$")
_REAL = re.compile(rf"^[+-]?{_DECIMAL}$")


def _imag_coefficient(text: str) -> str:
    if text in ("", "+"):
        return "1"
    if text == "-":
        return "-1"
    return text


def parse_complex(s: str, ctx: Optional[PrecisionContext] = None):
    """
    Parse ``a+bi``, ``a-bi``, ``a``, ``bi`` or polar ``m@theta`` (radians).
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    if not isinstance(s, str):
        raise ParseError(repr(s), "expected a string")
    text = s.strip().replace(" ", "")
    if not text:
        raise ParseError(s, "empty literal")

    if "@" in text:
        modulus_text, _, angle_text = text.partition("@")
        for token in (modulus_text, angle_text):
            if not _REAL.match(token):
                raise ParseError(token, "polar form needs decimal modulus and angle")
        modulus = mp.mpf(modulus_text)
        if modulus < 0:
            raise ParseError(modulus_text, "modulus must be non-negative")
        theta = mp.mpf(angle_text)
        return mp.mpc(modulus * mp.cos(theta), modulus * mp.sin(theta))

    match = _PURE_IMAG.match(text)
    if match:
        return mp.mpc(0, mp.mpf(_imag_coefficient(match.group("im"))))
    match = _RECT.match(text)
    if match:
        real = mp.mpf(match.group("re"))
        imag_text = match.group("im")
        imag = mp.mpf(_imag_coefficient(imag_text)) if imag_text is not None else mp.mpf(0)
        return mp.mpc(real, imag)
    raise ParseError(text)


def _tidy(text: str) -> str:
    mantissa, sep, exponent = text.partition("e")
    if "." in mantissa:
        mantissa = mantissa.rstrip("0").rstrip(".")
    if mantissa in ("", "-", "-0"):
        mantissa = "0"
    if exponent.startswith("+"):
        exponent = exponent[1:]
    return mantissa + (sep + exponent if sep and mantissa != "0" else "")


def format_real(value: Any, digits: int) -> str:
    """Decimal string with ``digits`` significant digits (never a binary float)."""
    return _tidy(mpmath.nstr(value, max(1, digits)))


def format_complex(value: Any, digits: Optional[int] = None) -> str:
    """Render in the ``a+bi`` grammar accepted by ``parse_complex``."""
    if digits is None:
        prec = getattr(getattr(value, "context", None), "dps", 15)
        digits = int(prec) + ROUNDTRIP_EXTRA_DIGITS
    z = mpmath.mpmathify(value) if not hasattr(value, "_mpc_") and not hasattr(value, "_mpf_") else value
    real = getattr(z, "real", z)
    imag = getattr(z, "imag", 0)
    re_text = format_real(real, digits)
    if imag == 0:
        return re_text
    im_text = format_real(imag, digits)
    if not im_text.startswith("-"):
        im_text = "+" + im_text
    if re_text == "0":
        return im_text.lstrip("+") + "i"
    return f"{re_text}{im_text}i"


# ---------------------------------------------------------------------------
# Domain helpers
# ---------------------------------------------------------------------------

def ensure_finite(value: Any, what: str = "value") -> Any:
    real = getattr(value, "real", value)
    imag = getattr(value, "imag", 0)
    for component in (real, imag):
        if mpmath.isinf(component) or mpmath.isnan(component):
            raise NonFiniteError(f"{what} is not finite")
    return value


def gamma_of(x: Number, ctx: Optional[PrecisionContext] = None) -> GammaParam:
    """gamma = -log|x| for 0 < |x| < 1."""
    ctx = ctx or default_context()
    value = ctx.convert(x)
    ensure_finite(value, "x")
    if value == 0:
        raise DegenerateInputError("x = 0 has no gamma; R(t, 0) = 1")
    modulus = abs(value)
    if modulus >= 1:
        raise DomainError("x outside open unit disc")
    return GammaParam(-ctx.mp.log(modulus))


__all__ = [
    "ComplexValue",
    "PrecisionContext",
    "GammaParam",
    "MIN_GUARD_DIGITS",
    "CANCELLATION_DIGITS_PER_GAMMA",
    "context_for_digits",
    "default_context",
    "certificate_k",
    "apriori_term_count",
    "plan_precision",
    "parse_complex",
    "format_real",
    "format_complex",
    "ensure_finite",
    "gamma_of",
]
