"""
Dedekind-eta quantities on the imaginary axis.

With x = e^{-2 pi z}, the inversion law relates R(1, e^{-2 pi z}) and
R(1, e^{-2 pi / z}); ``f`` below is the symmetric remainder left after the
leading asymptotics are divided out, and ``g`` compares f at z*sqrt(2) and
z/sqrt(2). The Bernoulli expansion of log R(t, e^{-gamma}) is asymptotic only
and is provided as an uncertified diagnostic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from threading import Lock
from typing import Any, List, Optional, Tuple

from .bounds import lambert_sums
from .engine import evaluate
from .errors import DomainError
from .numeric import Number, PrecisionContext, default_context, plan_precision


LOGGER = logging.getLogger("qproduct.eta")

Z_STAR_BRACKET = (1.9, 2.1)
G_EXTREMUM_LOG_BRACKET = (0.5, 2.0)
FINITE_DIFFERENCE_STEP = "1e-4"
SEARCH_DIGITS = 50
_GOLDEN = "0.6180339887498948482045868343656381177203"
_ASYMPTOTIC_MAX_ORDER = 400


@dataclass(frozen=True)
class EtaPoint:
    z: Any
    value: Any

    def __post_init__(self) -> None:
        if not self.z > 0:
            raise DomainError("z must be positive")


class BernoulliCache:
    """
    Exact Bernoulli numbers B_0, B_1 = -1/2, B_2 = 1/6, ...

    Readers see an immutable tuple; extensions are computed under the lock and
    then published by replacing the tuple.
    """

    def __init__(self) -> None:
        self._values: Tuple[Fraction, ...] = (Fraction(1),)
        self._lock = Lock()

    @property
    def values(self) -> Tuple[Fraction, ...]:
        return self._values

    def get(self, m: int) -> Fraction:
        values = self._values
        if m < len(values):
            return values[m]
        with self._lock:
            extended: List[Fraction] = list(self._values)
            for n in range(len(extended), m + 1):
                acc = sum(comb(n + 1, j) * extended[j] for j in range(n))
                extended.append(-acc / (n + 1))
            self._values = tuple(extended)
        return self._values[m]


_BERNOULLI = BernoulliCache()


def bernoulli(m: int) -> Fraction:
    if m < 0:
        raise DomainError("Bernoulli index must be non-negative")
    return _BERNOULLI.get(m)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _unit_interval_real(x: Number, ctx: PrecisionContext) -> Any:
    value = ctx.convert(x)
    if getattr(value, "imag", 0) != 0:
        raise DomainError("x must be real")
    value = ctx.mp.mpf(getattr(value, "real", value))
    if not 0 < value < 1:
        raise DomainError("x must lie in (0, 1)")
    return value


def _positive_real(z: Number, ctx: PrecisionContext, name: str = "z") -> Any:
    value = ctx.convert(z)
    if getattr(value, "imag", 0) != 0:
        raise DomainError(f"{name} must be real")
    value = ctx.mp.mpf(getattr(value, "real", value))
    if not value > 0:
        raise DomainError(f"{name} must be positive")
    return value


def _evaluation_context(ctx: PrecisionContext, gamma: Any) -> PrecisionContext:
    return plan_precision(ctx.working_digits, float(gamma))


def R_at_gamma(t: Number, gamma: Number, ctx: Optional[PrecisionContext] = None) -> Any:
    """R(t, e^{-gamma}) for real t, evaluated at a precision planned for gamma."""
    ctx = ctx or default_context()
    inner = _evaluation_context(ctx, gamma)
    g = inner.mp.mpf(gamma)
    certificate = evaluate(t, inner.mp.exp(-g), inner)
    return ctx.mp.mpmathify(certificate.value.real)


def _log_R1_at_gamma(gamma: Any, ctx: PrecisionContext) -> Any:
    inner = _evaluation_context(ctx, gamma)
    g = inner.mp.mpf(gamma)
    certificate = evaluate(1, inner.mp.exp(-g), inner)
    return inner.mp.log(certificate.value.real)


# ---------------------------------------------------------------------------
# R0 approximations
# ---------------------------------------------------------------------------

def R0_plus(x: Number, ctx: Optional[PrecisionContext] = None) -> Any:
    """e^{pi^2/(6 log x)} (1 + 4 pi^2/log^2 x)^{1/4}."""
    ctx = ctx or default_context()
    mp = ctx.mp
    L = mp.log(_unit_interval_real(x, ctx))
    return mp.exp(mp.pi ** 2 / (6 * L)) * mp.root(1 + 4 * mp.pi ** 2 / L ** 2, 4)


def R0_minus(x: Number, ctx: Optional[PrecisionContext] = None) -> Any:
    ctx = ctx or default_context()
    mp = ctx.mp
    L = mp.log(_unit_interval_real(x, ctx))
    ratio = (1 + mp.pi ** 2 / L ** 2) / (1 + 4 * mp.pi ** 2 / L ** 2)
    return mp.exp(-mp.pi ** 2 / (12 * L)) * mp.root(ratio, 4)


# ---------------------------------------------------------------------------
# f, g and eta
# ---------------------------------------------------------------------------

def f_of(z: Number, ctx: Optional[PrecisionContext] = None, symmetric: bool = True) -> Any:
    """
    f(z) = log R(1, e^{-2 pi z}) + pi/(12 z) - log(1 + 1/z^2)/4.

    With ``symmetric`` (the default) the series is always summed at
    max(z, 1/z), using f(z) = f(1/z); otherwise the definition is applied at
    z itself.
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    z = _positive_real(z, ctx)
    w = max(z, 1 / z) if symmetric else z
    log_r = _log_R1_at_gamma(2 * mp.pi * w, ctx)
    inner = log_r.context
    w = inner.mpf(w)
    value = log_r + inner.pi / (12 * w) - inner.log(1 + 1 / w ** 2) / 4
    return mp.mpmathify(value)


def g_of(z: Number, ctx: Optional[PrecisionContext] = None) -> Any:
    """g(z) = f(sqrt(2) z) - f(z / sqrt(2))."""
    ctx = ctx or default_context()
    mp = ctx.mp
    z = _positive_real(z, ctx)
    root2 = mp.sqrt(2)
    return f_of(root2 * z, ctx) - f_of(z / root2, ctx)


def f_derivative(z: Number, ctx: Optional[PrecisionContext] = None) -> Any:
    """f'(z) from the Lambert sum S' evaluated at u = e^{-2 pi / z}."""
    ctx = ctx or default_context()
    mp = ctx.mp
    z = _positive_real(z, ctx)
    u = mp.exp(-2 * mp.pi / z)
    sums = lambert_sums(u, ctx)
    return -(2 * mp.pi / z ** 2) * u * sums.S1 + mp.pi / 12 - z / (2 * (1 + z ** 2))


def f_second_derivative(z: Number, ctx: Optional[PrecisionContext] = None) -> Any:
    ctx = ctx or default_context()
    mp = ctx.mp
    z = _positive_real(z, ctx)
    u = mp.exp(-2 * mp.pi / z)
    sums = lambert_sums(u, ctx)
    pi = mp.pi
    return (
        (-4 * pi ** 2 / z ** 4 + 4 * pi / z ** 3) * u * sums.S1
        - (4 * pi ** 2 / z ** 4) * u ** 2 * sums.S2
        - (1 - z ** 2) / (2 * (1 + z ** 2) ** 2)
    )


def eta_imag(y: Number, ctx: Optional[PrecisionContext] = None, invert: bool = True) -> Any:
    """
    eta(iy) = e^{-pi y/12} R(1, e^{-2 pi y}).

    For y < 1 the value is taken from eta(i/y)/sqrt(y) unless ``invert`` is off.
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    y = _positive_real(y, ctx, "y")
    if invert and y < 1:
        return eta_imag(1 / y, ctx) / mp.sqrt(y)
    R = R_at_gamma(1, 2 * mp.pi * y, ctx)
    return mp.exp(-mp.pi * y / 12) * R


def eta_constant_C(ctx: Optional[PrecisionContext] = None) -> Any:
    """C = e^{f(1)}, the sharp constant in R(1,x) <= C R0_plus(x)."""
    ctx = ctx or default_context()
    return ctx.mp.exp(f_of(1, ctx))


# ---------------------------------------------------------------------------
# Sharp asymptotics
# ---------------------------------------------------------------------------

def sharp_log_R1(gamma: Number, ctx: Optional[PrecisionContext] = None) -> Tuple[Any, Any]:
    """log R(1, e^{-gamma}) up to a remainder of order e^{-4 pi^2/gamma}."""
    ctx = ctx or default_context()
    mp = ctx.mp
    g = _positive_real(gamma, ctx, "gamma")
    value = -mp.pi ** 2 / (6 * g) - mp.log(g) / 2 + mp.log(2 * mp.pi) / 2 + g / 24
    return value, mp.exp(-4 * mp.pi ** 2 / g)


def sharp_log_Rminus1(gamma: Number, ctx: Optional[PrecisionContext] = None) -> Tuple[Any, Any]:
    """log R(-1, e^{-gamma}) up to a remainder of order e^{-pi^2/gamma}."""
    ctx = ctx or default_context()
    mp = ctx.mp
    g = _positive_real(gamma, ctx, "gamma")
    value = mp.pi ** 2 / (12 * g) - mp.log(2) / 2 + g / 24
    return value, mp.exp(-mp.pi ** 2 / g)


def asymptotic_log_R(
    t: Number,
    gamma: Number,
    M: Optional[int] = None,
    ctx: Optional[PrecisionContext] = None,
    eps: float = 1e-3,
) -> Tuple[Any, Any]:
    """
    Uncertified asymptotic expansion

        -log R(t, e^{-gamma}) ~ sum_m (B_m/m!) Li_{2-m}(t) gamma^{m-1},

    truncated at order ``M`` or just before the terms start to grow. Returns
    (log R estimate, magnitude of the last included term).
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    t_val = ctx.convert(t)
    if getattr(t_val, "imag", 0) != 0:
        raise DomainError("asymptotic_log_R needs real t")
    t_val = mp.mpf(getattr(t_val, "real", t_val))
    if abs(t_val) > 1 - eps:
        raise DomainError(f"|t| must not exceed 1 - {eps}")
    g = _positive_real(gamma, ctx, "gamma")
    if M is not None and M < 1:
        raise DomainError("M must be >= 1")
    max_order = _ASYMPTOTIC_MAX_ORDER if M is None else M

    total = mp.mpf(0)
    last = mp.mpf(0)
    previous = mp.inf
    for m in range(max_order + 1):
        b = bernoulli(m)
        if b == 0:
            continue
        coefficient = mp.mpf(b.numerator) / b.denominator / mp.factorial(m)
        term = coefficient * mp.polylog(2 - m, t_val) * g ** (m - 1)
        size = abs(term)
        if m >= 2 and size > previous:
            LOGGER.debug("asymptotic series: smallest term reached before m=%s", m)
            break
        total += term
        last = size
        if m >= 2:
            previous = size
    return -total, last


# ---------------------------------------------------------------------------
# Searches for z_* and the extremum of g
# ---------------------------------------------------------------------------

def _search_context(ctx: Optional[PrecisionContext]) -> PrecisionContext:
    if ctx is not None and ctx.working_digits >= SEARCH_DIGITS:
        return ctx
    return PrecisionContext(requested_digits=SEARCH_DIGITS - 10, working_digits=SEARCH_DIGITS)


def second_difference(z: Number, ctx: Optional[PrecisionContext] = None, h: Optional[Number] = None) -> Any:
    """Central second difference (f(z+h) - 2f(z) + f(z-h))/h^2."""
    ctx = ctx or default_context()
    mp = ctx.mp
    step = mp.mpf(FINITE_DIFFERENCE_STEP if h is None else h)
    z = _positive_real(z, ctx)
    return (f_of(z + step, ctx) - 2 * f_of(z, ctx) + f_of(z - step, ctx)) / step ** 2


def first_difference(z: Number, ctx: Optional[PrecisionContext] = None, h: Optional[Number] = None) -> Any:
    ctx = ctx or default_context()
    mp = ctx.mp
    step = mp.mpf(FINITE_DIFFERENCE_STEP if h is None else h)
    z = _positive_real(z, ctx)
    return (f_of(z + step, ctx) - f_of(z - step, ctx)) / (2 * step)


def locate_z_star(ctx: Optional[PrecisionContext] = None, tol: Number = "1e-7") -> EtaPoint:
    """Bisect the sign change of the finite-difference f'' inside (1.9, 2.1)."""
    ctx = _search_context(ctx)
    mp = ctx.mp
    lo, hi = mp.mpf(Z_STAR_BRACKET[0]), mp.mpf(Z_STAR_BRACKET[1])
    f_lo = second_difference(lo, ctx)
    f_hi = second_difference(hi, ctx)
    if f_lo * f_hi > 0:
        raise DomainError("f'' does not change sign on the search bracket")
    tol = mp.mpf(tol)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        f_mid = second_difference(mid, ctx)
        if f_mid * f_lo > 0:
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    z_star = (lo + hi) / 2
    LOGGER.debug("z_* located at %s", mp.nstr(z_star, 10))
    return EtaPoint(z=z_star, value=f_of(z_star, ctx))


def locate_g_extremum(ctx: Optional[PrecisionContext] = None, tol: Number = "1e-6") -> EtaPoint:
    """Golden-section maximisation of |g(e^s)| for s in (0.5, 2)."""
    ctx = _search_context(ctx)
    mp = ctx.mp
    ratio = mp.mpf(_GOLDEN)
    a, b = mp.mpf(G_EXTREMUM_LOG_BRACKET[0]), mp.mpf(G_EXTREMUM_LOG_BRACKET[1])

    def objective(s: Any) -> Any:
        return abs(g_of(mp.exp(s), ctx))

    c = b - ratio * (b - a)
    d = a + ratio * (b - a)
    fc, fd = objective(c), objective(d)
    tol = mp.mpf(tol)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = objective(d)
    s = (a + b) / 2
    z = mp.exp(s)
    LOGGER.debug("|g| extremum at log z = %s", mp.nstr(s, 10))
    return EtaPoint(z=z, value=g_of(z, ctx))


__all__ = [
    "EtaPoint",
    "BernoulliCache",
    "bernoulli",
    "R_at_gamma",
    "R0_plus",
    "R0_minus",
    "f_of",
    "g_of",
    "f_derivative",
    "f_second_derivative",
    "eta_imag",
    "eta_constant_C",
    "sharp_log_R1",
    "sharp_log_Rminus1",
    "asymptotic_log_R",
    "first_difference",
    "second_difference",
    "locate_z_star",
    "locate_g_extremum",
]
