"""
Reference algorithms for R(t,x) used to cross-check the Euler engine and to
benchmark it: the truncated product and its first-order correction, the
Lambert-series logarithm, Gatteschi's two-sequence iteration (plus its
accelerated combination) and Slater's reciprocal series.

None of these emit certificates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Optional, Tuple

from .errors import DomainError, IterationBreakdownError, ReciprocalInstabilityError
from .numeric import Number, PrecisionContext, default_context


LOGGER = logging.getLogger("qproduct.baselines")

PRODUCT_METHODS = ("product", "corrected", "gatteschi")


@dataclass(frozen=True)
class BaselineResult:
    method: str
    value: Any
    terms: int
    min_denominator_modulus: Optional[Any] = None


@dataclass(frozen=True)
class GatteschiState:
    n: int
    alpha_n: Any
    beta_n: Any
    sigma: Any


def _values(ctx: Optional[PrecisionContext], *values: Number) -> Tuple[Any, ...]:
    """Exact Fractions when every input is rational, otherwise context numbers."""
    if all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values):
        return tuple(Fraction(v) for v in values)
    ctx = ctx or default_context()
    return tuple(ctx.convert(v) for v in values)


def _check_x(x: Any) -> None:
    if abs(x) >= 1:
        raise DomainError("x outside open unit disc")


# ---------------------------------------------------------------------------
# Products
# ---------------------------------------------------------------------------

def direct_product(t: Number, x: Number, N: int, ctx: Optional[PrecisionContext] = None) -> BaselineResult:
    """prod_{n=1}^N (1 - t x^n)."""
    if N < 0:
        raise DomainError("N must be non-negative")
    t_val, x_val = _values(ctx, t, x)
    _check_x(x_val)
    value = 1 if isinstance(x_val, Fraction) else (ctx or default_context()).mp.mpf(1)
    x_n = value
    for _ in range(N):
        x_n *= x_val
        value *= 1 - t_val * x_n
    return BaselineResult("product", value, N)


def corrected_product(t: Number, x: Number, N: int, ctx: Optional[PrecisionContext] = None) -> BaselineResult:
    """The truncated product times (1 - t x^{N+1}/(1-x)); error O(x^{2N})."""
    t_val, x_val = _values(ctx, t, x)
    product = direct_product(t_val, x_val, N, ctx).value
    value = product * (1 - t_val * x_val ** (N + 1) / (1 - x_val))
    return BaselineResult("corrected", value, N)


# ---------------------------------------------------------------------------
# Lambert-series logarithm
# ---------------------------------------------------------------------------

def lambert_log(t: Number, x: Number, ctx: Optional[PrecisionContext] = None, tol: Number = "1e-20") -> BaselineResult:
    """
    exp(-sum_{k<=K} (t^k/k) x^k/(1-x^k)) with K the first index whose
    geometric tail bound |tx|^{K+1}/((K+1)(1-|x|)(1-|tx|)) is below ``tol``.
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    t_val = ctx.convert(t)
    x_val = ctx.convert(x)
    _check_x(x_val)
    ratio = abs(t_val * x_val)
    if ratio >= 1:
        raise DomainError("|tx| >= 1: the Lambert-series logarithm does not converge")
    tol = mp.mpf(tol)
    if ratio == 0:
        return BaselineResult("log", mp.mpf(1), 0)
    x_mod = abs(x_val)
    total = mp.mpf(0)
    tx_k = mp.mpf(1)
    x_k = mp.mpf(1)
    ratio_k = mp.mpf(1)
    k = 0
    while True:
        k += 1
        tx_k *= t_val * x_val
        x_k *= x_val
        ratio_k *= ratio
        total += tx_k / (k * (1 - x_k))
        tail = ratio_k * ratio / ((k + 1) * (1 - x_mod) * (1 - ratio))
        if tail <= tol:
            break
    return BaselineResult("log", mp.exp(-total), k)


# ---------------------------------------------------------------------------
# Gatteschi iteration
# ---------------------------------------------------------------------------

def gatteschi_init(t: Number, x: Number, sigma: Number = 1, ctx: Optional[PrecisionContext] = None) -> GatteschiState:
    """alpha_0 = 1, beta_0 = sigma/(sigma - t x)."""
    t_val, x_val, s_val = _values(ctx, t, x, sigma)
    _check_x(x_val)
    if s_val == 0:
        raise DomainError("sigma must be non-zero")
    denominator = s_val - t_val * x_val
    if denominator == 0:
        raise IterationBreakdownError(0, "sigma - t*x")
    one = s_val / s_val
    return GatteschiState(n=0, alpha_n=one, beta_n=s_val / denominator, sigma=s_val)


def _like_state(state: GatteschiState, ctx: Optional[PrecisionContext], *values: Number) -> Tuple[Any, ...]:
    if isinstance(state.alpha_n, Fraction):
        return tuple(Fraction(v) for v in values)
    ctx = ctx or default_context()
    return tuple(ctx.convert(v) for v in values)


def gatteschi_step(state: GatteschiState, t: Number, x: Number, ctx: Optional[PrecisionContext] = None) -> GatteschiState:
    """
    alpha_{n+1} = alpha (sigma alpha + (1-sigma) beta) / beta
    beta_{n+1}  = alpha (sigma alpha + (1-sigma) beta) / (x alpha + (1-x) beta)
    """
    (x_val,) = _like_state(state, ctx, x)
    alpha, beta, sigma = state.alpha_n, state.beta_n, state.sigma
    if beta == 0:
        raise IterationBreakdownError(state.n, "beta_n")
    other = x_val * alpha + (1 - x_val) * beta
    if other == 0:
        raise IterationBreakdownError(state.n, "x*alpha_n + (1-x)*beta_n")
    numerator = alpha * (sigma * alpha + (1 - sigma) * beta)
    return GatteschiState(n=state.n + 1, alpha_n=numerator / beta, beta_n=numerator / other, sigma=sigma)


def gatteschi_states(
    t: Number, x: Number, sigma: Number = 1, ctx: Optional[PrecisionContext] = None
) -> Iterator[GatteschiState]:
    state = gatteschi_init(t, x, sigma, ctx)
    t_val, x_val = _like_state(state, ctx, t, x)
    while True:
        yield state
        state = gatteschi_step(state, t_val, x_val, ctx)


def gatteschi_accelerated(state: GatteschiState, t: Number, x: Number, ctx: Optional[PrecisionContext] = None) -> Any:
    """lambda alpha_n + (1 - lambda) beta_n with lambda = 1 + sigma/(1-x)."""
    t_val, x_val = _like_state(state, ctx, t, x)
    if state.sigma - t_val * x_val ** (state.n + 1) == 0:
        raise IterationBreakdownError(state.n, "sigma - t*x^(n+1)")
    lam = 1 + state.sigma / (1 - x_val)
    return lam * state.alpha_n + (1 - lam) * state.beta_n


def gatteschi_accelerated_closed_form(
    state: GatteschiState, t: Number, x: Number, ctx: Optional[PrecisionContext] = None
) -> Any:
    """[1 - sigma t x^{n+1}/((1-x)(sigma - t x^{n+1}))] alpha_n."""
    t_val, x_val = _like_state(state, ctx, t, x)
    q = t_val * x_val ** (state.n + 1)
    denominator = state.sigma - q
    if denominator == 0:
        raise IterationBreakdownError(state.n, "sigma - t*x^(n+1)")
    return (1 - state.sigma * q / ((1 - x_val) * denominator)) * state.alpha_n


def gatteschi(
    t: Number,
    x: Number,
    n: int,
    sigma: Number = 1,
    ctx: Optional[PrecisionContext] = None,
    accelerated: bool = True,
) -> BaselineResult:
    """Run ``n`` Gatteschi steps; the value is the accelerated combination unless disabled."""
    if n < 0:
        raise DomainError("n must be non-negative")
    states = gatteschi_states(t, x, sigma, ctx)
    state = next(states)
    for _ in range(n):
        state = next(states)
    value = gatteschi_accelerated(state, t, x, ctx) if accelerated else state.alpha_n
    return BaselineResult("gatteschi", value, n)


# ---------------------------------------------------------------------------
# Slater's reciprocal series
# ---------------------------------------------------------------------------

def slater_series(t: Number, x: Number, ctx: Optional[PrecisionContext] = None, tol: Number = "1e-20") -> BaselineResult:
    """
    R(t,x) = 1 / sum_{m>=0} (tx)^m / ((1-x)...(1-x^m)).

    Raises ``ReciprocalInstabilityError`` when cancellation in the sum eats
    the guard digits (or the sum vanishes); ``min_denominator_modulus`` is the
    smallest partial-sum modulus seen.
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    t_val = ctx.convert(t)
    x_val = ctx.convert(x)
    _check_x(x_val)
    tx = t_val * x_val
    if abs(tx) >= 1:
        raise DomainError("|tx| >= 1: Slater's series does not converge")
    tol = mp.mpf(tol)
    x_mod = abs(x_val)
    term = mp.mpf(1)
    total = mp.mpf(1)
    min_modulus = mp.mpf(1)
    max_term = mp.mpf(1)
    x_m = mp.mpf(1)
    x_mod_m = mp.mpf(1)
    m = 0
    while True:
        m += 1
        x_m *= x_val
        x_mod_m *= x_mod
        term = term * tx / (1 - x_m)
        total += term
        size = abs(term)
        max_term = max(max_term, size)
        min_modulus = min(min_modulus, abs(total))
        ratio = abs(tx) / (1 - x_mod_m * x_mod)
        if ratio < 1 and size * ratio / (1 - ratio) <= tol * abs(total):
            break
    cancellation = max_term / abs(total) if total != 0 else mp.inf
    if total == 0 or cancellation * mp.mpf(10) ** (-ctx.guard_digits) > 1:
        raise ReciprocalInstabilityError(
            f"Slater sum lost {mp.nstr(mp.log10(cancellation), 3) if total != 0 else 'all'} digits to cancellation"
        )
    return BaselineResult("slater", 1 / total, m + 1, min_denominator_modulus=min_modulus)


# ---------------------------------------------------------------------------
# Planning
# ---------------------------------------------------------------------------

def terms_for_tolerance(method: str, t: Number, x: Number, tol: float, sigma: Number = 1) -> int:
    """
    Heuristic term count for the product-type methods to reach relative error ``tol``.

    product: |t||x|^{N+1}/(1-|x|) <= tol/10; corrected and gatteschi:
    |t|^2 |x|^{2N+2}/(1-|x|)^2 (1 + 1/|sigma|) <= tol/10.
    """
    t_mod = abs(complex(t))
    x_mod = abs(complex(x))
    if x_mod >= 1:
        raise DomainError("x outside open unit disc")
    if method not in PRODUCT_METHODS:
        raise DomainError(f"{method!r} is tolerance-driven; no term count to plan")
    if t_mod == 0 or x_mod == 0:
        return 0
    log_x = math.log(x_mod)
    target = math.log(tol / 10.0)
    if method == "product":
        # (N+1) log|x| <= target - log|t| + log(1-|x|)
        needed = (target - math.log(t_mod) + math.log1p(-x_mod)) / log_x
    else:
        scale = 1.0 + 1.0 / abs(complex(sigma))
        needed = (target - 2 * math.log(t_mod) + 2 * math.log1p(-x_mod) - math.log(scale)) / (2 * log_x)
    return max(0, math.ceil(needed) - 1)


__all__ = [
    "BaselineResult",
    "GatteschiState",
    "PRODUCT_METHODS",
    "direct_product",
    "corrected_product",
    "lambert_log",
    "gatteschi_init",
    "gatteschi_step",
    "gatteschi_states",
    "gatteschi",
    "gatteschi_accelerated",
    "gatteschi_accelerated_closed_form",
    "slater_series",
    "terms_for_tolerance",
]
