"""
Quantitative bounds on R(t,x), on the Euler-series truncation error, and on
the real-axis Lambert sums.

Every bound that has hypotheses returns a ``BoundReport``; when the
hypotheses fail the report carries ``hypotheses_met=False`` and no value, so a
certificate can never be assembled from an out-of-range bound.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from .errors import DomainError, NonFiniteError
from .numeric import Number, PrecisionContext, default_context


LOGGER = logging.getLogger("qproduct.bounds")


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    value: Optional[Any]
    hypotheses_met: bool

    def __post_init__(self) -> None:
        if self.hypotheses_met:
            if self.value is None:
                raise NonFiniteError(f"{self.bound_id}: hypotheses met but no value")
            ctx = self.value.context
            if ctx.isinf(self.value) or ctx.isnan(self.value):
                raise NonFiniteError(f"{self.bound_id}: bound is not finite")


def _unmet(bound_id: str) -> BoundReport:
    return BoundReport(bound_id=bound_id, value=None, hypotheses_met=False)


def _moduli(t: Number, x: Number, ctx: PrecisionContext) -> Tuple[Any, Any]:
    return abs(ctx.convert(t)), abs(ctx.convert(x))


def _resolve_gamma(x_mod: Any, ctx: PrecisionContext, gamma: Optional[Number]) -> Optional[Any]:
    """gamma with |x| <= e^{-gamma}; None when no such gamma > 0 exists."""
    mp = ctx.mp
    if gamma is not None:
        g = mp.mpf(gamma)
        if g <= 0 or x_mod > mp.exp(-g) * (1 + 4 * mp.eps):
            return None
        return g
    if x_mod >= 1:
        return None
    if x_mod == 0:
        return mp.inf
    return -mp.log(x_mod)


# ---------------------------------------------------------------------------
# Crude bounds from the Lambert series
# ---------------------------------------------------------------------------

def crude_log_bound(t: Number, x: Number, ctx: Optional[PrecisionContext] = None) -> BoundReport:
    """|log R(t,x)| <= -log(1-|tx|)/(1-|x|) for |x| < 1, |tx| < 1."""
    ctx = ctx or default_context()
    mp = ctx.mp
    t_mod, x_mod = _moduli(t, x, ctx)
    if x_mod >= 1 or t_mod * x_mod >= 1:
        return _unmet("crude_log")
    value = -mp.log(1 - t_mod * x_mod) / (1 - x_mod)
    return BoundReport("crude_log", value, True)


def crude_modulus_bounds(
    t: Number, x: Number, ctx: Optional[PrecisionContext] = None
) -> Optional[Tuple[Any, Any]]:
    """(1-|tx|)^{1/(1-|x|)} <= |R(t,x)| <= (1-|tx|)^{-1/(1-|x|)}, or None out of range."""
    ctx = ctx or default_context()
    report = crude_log_bound(t, x, ctx)
    if not report.hypotheses_met:
        return None
    return ctx.mp.exp(-report.value), ctx.mp.exp(report.value)


@dataclass(frozen=True)
class LambertSums:
    x: Any
    S: Any
    S1: Any
    S2: Any
    terms: int

    def sandwich(self) -> Dict[str, Tuple[Any, Any]]:
        """Trivial two-sided bounds for S, S' and S'' at this x."""
        mp = self.x.context
        x = self.x
        one = mp.mpf(1)
        if x == 0:
            s_bounds = (mp.mpf(0), mp.mpf(0))
        else:
            s_bounds = (-mp.log(1 - x), -mp.log(1 - x) / (1 - x))
        s1_bounds = (one / (1 - x), one / (1 - x) ** 3)
        s2_lower = one / (1 - x) ** 2 + (2 - x ** 2) / (1 - x ** 2) ** 2
        s2_upper = one / (1 - x) ** 5 + (2 - x ** 2) / ((1 - x) ** 3 * (1 - x ** 2) ** 2)
        return {"S": s_bounds, "S1": s1_bounds, "S2": (s2_lower, s2_upper)}

    def outer_bounds(self) -> Dict[str, Tuple[Any, Any]]:
        """The looser closed forms: S <= x/(1-x)^2, S' >= 1, 3 <= S'' <= 3/(1-x)^5."""
        mp = self.x.context
        x = self.x
        return {
            "S": (mp.mpf(0), x / (1 - x) ** 2),
            "S1": (mp.mpf(1), mp.inf),
            "S2": (mp.mpf(3), 3 / (1 - x) ** 5),
        }

    def sandwich_holds(self, slack: Any = 0) -> bool:
        for name, (low, high) in self.sandwich().items():
            value = getattr(self, name)
            if value < low * (1 - slack) or value > high * (1 + slack):
                return False
        return True


def lambert_sums(x: Number, ctx: Optional[PrecisionContext] = None) -> LambertSums:
    """S(x) = -log R(1,x) and its first two derivatives, by direct summation."""
    ctx = ctx or default_context()
    mp = ctx.mp
    x = ctx.convert(x)
    if getattr(x, "imag", 0) != 0:
        raise DomainError("lambert_sums needs real x in [0, 1)")
    x = mp.mpf(getattr(x, "real", x))
    if x < 0 or x >= 1:
        raise DomainError("lambert_sums needs real x in [0, 1)")
    if x == 0:
        return LambertSums(x=x, S=mp.mpf(0), S1=mp.mpf(1), S2=mp.mpf(3), terms=1)

    threshold = mp.mpf(10) ** (-ctx.working_digits)
    tail_factor = 1 / (1 - x)
    S = S1 = S2 = mp.mpf(0)
    x_km1 = mp.mpf(1)  # x^{k-1}
    k = 0
    while True:
        k += 1
        x_k = x_km1 * x
        denom = 1 - x_k
        s_term = x_k / (k * denom)
        s1_term = x_km1 / denom ** 2
        s2_term = ((k - 1) * x_km1 / x + (k + 1) * x_km1 ** 2) / denom ** 3
        S += s_term
        S1 += s1_term
        S2 += s2_term
        if (
            s_term * tail_factor <= threshold * S
            and s1_term * tail_factor <= threshold * S1
            and s2_term * tail_factor * k <= threshold * S2
        ):
            break
        x_km1 = x_k
    LOGGER.debug("lambert_sums(x=%s) converged after %s terms", mp.nstr(x, 8), k)
    return LambertSums(x=x, S=S, S1=S1, S2=S2, terms=k)


# ---------------------------------------------------------------------------
# Truncation bounds for the Euler series
# ---------------------------------------------------------------------------

def geometric_tail_bound(
    t: Number, x: Number, N: int, ctx: Optional[PrecisionContext] = None
) -> BoundReport:
    """sum_{n>=N} |t^n x^{n(n+1)/2}| <= |t|^N |x|^{N(N+1)/2} / (1 - |t||x|^{N+1})."""
    ctx = ctx or default_context()
    t_mod, x_mod = _moduli(t, x, ctx)
    ratio = t_mod * x_mod ** (N + 1)
    if x_mod >= 1 or ratio >= 1:
        return _unmet("geometric_tail")
    value = t_mod ** N * x_mod ** (N * (N + 1) // 2) / (1 - ratio)
    return BoundReport("geometric_tail", value, True)


def partial_product_floor(gamma: Number, ctx: Optional[PrecisionContext] = None) -> Any:
    """e^{-pi^2/(6 gamma)}, a lower bound for |prod_{k<=n}(1-x^k)| whenever |x| <= e^{-gamma}."""
    ctx = ctx or default_context()
    mp = ctx.mp
    return mp.exp(-mp.pi ** 2 / (6 * mp.mpf(gamma)))


def apriori_abs(
    t: Number,
    x: Number,
    N: int,
    ctx: Optional[PrecisionContext] = None,
    gamma: Optional[Number] = None,
) -> BoundReport:
    """Bound on Delta_N = |sum_{n>=N} a_n| from |t|, gamma and N alone."""
    ctx = ctx or default_context()
    mp = ctx.mp
    t_mod, x_mod = _moduli(t, x, ctx)
    g = _resolve_gamma(x_mod, ctx, gamma)
    if g is None or N < 0:
        return _unmet("apriori_abs")
    if mp.isinf(g):
        return BoundReport("apriori_abs", mp.mpf(0) if N >= 1 else mp.mpf(1), True)
    if t_mod >= mp.exp((N + 1) * g):
        return _unmet("apriori_abs")
    numerator = t_mod ** N * mp.exp(mp.pi ** 2 / (6 * g) - mp.mpf(N * (N + 1)) * g / 2)
    value = numerator / (1 - t_mod * mp.exp(-(N + 1) * g))
    return BoundReport("apriori_abs", value, True)


def apriori_rel(
    t: Number,
    x: Number,
    N: int,
    ctx: Optional[PrecisionContext] = None,
    gamma: Optional[Number] = None,
) -> BoundReport:
    """
    Bound on delta_N = Delta_N/|R(t,x)|.

    Uses the |t| <= 1 form when it applies. For 1 < |t| < e^gamma the
    absolute bound is divided by |R| >= (1 - |t|e^{-gamma}) e^{-pi^2/(6 gamma)}.
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    t_mod, x_mod = _moduli(t, x, ctx)
    g = _resolve_gamma(x_mod, ctx, gamma)
    if g is None or N < 0:
        return _unmet("apriori_rel")
    if mp.isinf(g):
        return BoundReport("apriori_rel_unit_t", mp.mpf(0) if N >= 1 else mp.mpf(1), True)
    base = mp.exp(mp.pi ** 2 / (3 * g) - mp.mpf(N * (N + 1)) * g / 2) / (1 - mp.exp(-(N + 1) * g))
    if t_mod <= 1:
        return BoundReport("apriori_rel_unit_t", base, True)
    if t_mod < mp.exp(g):
        absolute = apriori_abs(t_mod, x_mod, N, ctx, g)
        value = absolute.value * mp.exp(mp.pi ** 2 / (6 * g)) / (1 - t_mod * mp.exp(-g))
        return BoundReport("apriori_rel_small_t", value, True)
    return _unmet("apriori_rel")


def aposteriori(
    t: Number,
    x: Number,
    N: int,
    a_prev: Number,
    S_N: Number,
    ctx: Optional[PrecisionContext] = None,
    gamma: Optional[Number] = None,
) -> Tuple[BoundReport, BoundReport]:
    """
    Tail bound from the last included term a_{N-1}; returns (absolute, modified relative).

    Valid once N > log(1+|t|)/gamma; the relative report divides by |S_N|.
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    t_mod, x_mod = _moduli(t, x, ctx)
    g = _resolve_gamma(x_mod, ctx, gamma)
    if g is None or N < 1:
        return _unmet("aposteriori_abs"), _unmet("aposteriori_rel")
    if mp.isinf(g):
        decay = mp.mpf(0)
    else:
        if N * g <= mp.log(1 + t_mod):
            return _unmet("aposteriori_abs"), _unmet("aposteriori_rel")
        decay = mp.exp(-N * g)
    denominator = 1 - (1 + t_mod) * decay
    if denominator <= 0:
        return _unmet("aposteriori_abs"), _unmet("aposteriori_rel")
    abs_value = abs(ctx.convert(a_prev)) * t_mod * decay / denominator
    abs_report = BoundReport("aposteriori_abs", abs_value, True)
    s_mod = abs(ctx.convert(S_N))
    if s_mod == 0:
        return abs_report, _unmet("aposteriori_rel")
    return abs_report, BoundReport("aposteriori_rel", abs_value / s_mod, True)


def modified_to_true_relative(delta_prime: Any) -> Optional[Any]:
    """A bound on |R_N/R| from a bound delta' on |R_N/S_N|: delta'/(1-delta'), if delta' < 1."""
    if delta_prime is None or delta_prime >= 1:
        return None
    return delta_prime / (1 - delta_prime)


# ---------------------------------------------------------------------------
# Dilogarithm and the largest-term constant
# ---------------------------------------------------------------------------

def _dilog_unit(u: Any, mp: Any) -> Any:
    return mp.polylog(2, u).real


def dilog_real(u: Number, ctx: Optional[PrecisionContext] = None) -> Any:
    """Li_2(u) for real u in [-1, 1]."""
    ctx = ctx or default_context()
    mp = ctx.mp
    u = mp.mpf(getattr(ctx.convert(u), "real", u))
    if u < -1 or u > 1:
        raise DomainError("dilog_real needs u in [-1, 1]")
    return _dilog_unit(u, mp)


def dilog(u: Number, ctx: Optional[PrecisionContext] = None) -> Any:
    """Li_2(u) = sum u^k/k^2 for real u in [0, 1]."""
    ctx = ctx or default_context()
    value = ctx.convert(u)
    if getattr(value, "imag", 0) != 0:
        raise DomainError("dilog is only defined here for real u in [0, 1]")
    u = ctx.mp.mpf(getattr(value, "real", value))
    if u < 0 or u > 1:
        raise DomainError("dilog needs u in [0, 1]")
    return _dilog_unit(u, ctx.mp)


def largest_term_exponent(t_mod: Number, ctx: Optional[PrecisionContext] = None) -> Any:
    """
    C(t) with max_n b_n = exp[C(t)/gamma + O(1)].

    gamma log b_n ~ u log t - u^2/2 + pi^2/6 - Li2(e^{-u}) with u = n gamma,
    maximal at u = log(1+t).
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    t = mp.mpf(t_mod)
    if t <= 0:
        raise DomainError("largest_term_exponent needs t > 0")
    u = mp.log(1 + t)
    return u * mp.log(t) - u ** 2 / 2 - _dilog_unit(1 / (1 + t), mp) + mp.pi ** 2 / 6


def largest_term_index(t_mod: Number, gamma: Number, ctx: Optional[PrecisionContext] = None) -> int:
    ctx = ctx or default_context()
    mp = ctx.mp
    return int(mp.floor(mp.log(1 + mp.mpf(t_mod)) / mp.mpf(gamma)))


def majorant_terms(
    t_mod: Number, x_mod: Number, n_max: int, ctx: Optional[PrecisionContext] = None
) -> List[Any]:
    """b_0..b_{n_max}, b_n = |t|^n |x|^{n(n+1)/2} / prod_{k<=n}(1-|x|^k), majorizing |a_n|."""
    ctx = ctx or default_context()
    mp = ctx.mp
    t = mp.mpf(t_mod)
    x = mp.mpf(x_mod)
    out = [mp.mpf(1)]
    x_n = mp.mpf(1)
    for n in range(1, n_max + 1):
        x_n *= x
        out.append(out[-1] * t * x_n / (1 - x_n))
    return out


# ---------------------------------------------------------------------------
# Real-axis bounds
# ---------------------------------------------------------------------------

class LogRInterval(NamedTuple):
    lower: Any
    upper: Any


def _check_real_t_gamma(t: Any, g: Any) -> None:
    if t < 0 or t > 1:
        raise DomainError("t must lie in [0, 1]")
    if g <= 0:
        raise DomainError("gamma must be positive")


def sandwich_logR_real(t: Number, gamma: Number, ctx: Optional[PrecisionContext] = None) -> LogRInterval:
    """
    Two-sided bound on log R(t, e^{-gamma}) for 0 <= t <= 1:
    -Li2(t e^{-gamma/2})/gamma <= log R <= -Li2(t e^{-gamma})/gamma + log(1 - t e^{-gamma})/2.
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    t = mp.mpf(t)
    g = mp.mpf(gamma)
    _check_real_t_gamma(t, g)
    if t == 0:
        return LogRInterval(mp.mpf(0), mp.mpf(0))
    upper_minus = _dilog_unit(t * mp.exp(-g / 2), mp) / g
    lower_minus = _dilog_unit(t * mp.exp(-g), mp) / g - mp.log(1 - t * mp.exp(-g)) / 2
    return LogRInterval(lower=-upper_minus, upper=-lower_minus)


def sandwich_logR_real_weak(
    t: Number, gamma: Number, ctx: Optional[PrecisionContext] = None
) -> LogRInterval:
    """The looser pair: -Li2(t)/gamma <= log R <= -Li2(t)/gamma - log(1-t)/2."""
    ctx = ctx or default_context()
    mp = ctx.mp
    t = mp.mpf(t)
    g = mp.mpf(gamma)
    _check_real_t_gamma(t, g)
    lead = -_dilog_unit(t, mp) / g
    if t == 1:
        return LogRInterval(lead, mp.inf)
    return LogRInterval(lead, lead - mp.log(1 - t) / 2)


class PartialProductBound(NamedTuple):
    general: Any
    small_n: Optional[Any]


def partial_product_lower(n: int, gamma: Number, ctx: Optional[PrecisionContext] = None) -> PartialProductBound:
    """
    Lower bound for prod_{k=1}^n (1 - e^{-k gamma}); ``small_n`` is the
    dilog-free form, available when n*gamma <= log 2.
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    g = mp.mpf(gamma)
    if n < 1:
        raise DomainError("n must be >= 1")
    if g <= 0:
        raise DomainError("gamma must be positive")
    tail = mp.exp(-n * g)
    root = mp.sqrt(1 - tail)
    general = mp.exp((_dilog_unit(tail, mp) - mp.pi ** 2 / 6) / g) * root
    small_n = None
    if n * g <= mp.log(2):
        small_n = mp.exp((-mp.log(2) ** 2 / 2 - mp.pi ** 2 / 12) / g) * root
    return PartialProductBound(general, small_n)


__all__ = [
    "BoundReport",
    "LambertSums",
    "LogRInterval",
    "PartialProductBound",
    "crude_log_bound",
    "crude_modulus_bounds",
    "lambert_sums",
    "geometric_tail_bound",
    "partial_product_floor",
    "apriori_abs",
    "apriori_rel",
    "aposteriori",
    "modified_to_true_relative",
    "dilog",
    "dilog_real",
    "largest_term_exponent",
    "largest_term_index",
    "majorant_terms",
    "sandwich_logR_real",
    "sandwich_logR_real_weak",
    "partial_product_lower",
]
