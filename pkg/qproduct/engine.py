"""
Certified evaluation of R(t,x) = prod_{n>=1} (1 - t x^n) by Euler's series

    R(t,x) = sum_{n>=0} a_n,   a_0 = 1,   a_n = a_{n-1} * (-t x^n) / (1 - x^n).

|t| > 1 is first reduced with R(t,x) = (1 - tx) R(tx, x). Summation stops as
soon as the tail bound computed from the last term certifies the target, and
never later than the a priori term count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Iterator, Optional, Tuple

from .bounds import aposteriori, apriori_abs, apriori_rel, modified_to_true_relative
from .errors import DomainError, IterationBreakdownError, PrecisionPlanningError
from .numeric import (
    Number,
    PrecisionContext,
    apriori_term_count,
    certificate_k,
    context_for_digits,
    default_context,
    ensure_finite,
    gamma_of,
    plan_precision,
)


LOGGER = logging.getLogger("qproduct.engine")

# Rounding model: a few ulps per multiply-divide step, scaled by the absolute-term mass.
ROUNDING_ULPS_PER_STEP = 4


@dataclass(frozen=True)
class SeriesState:
    """Term ``a_n`` and the partial sum through it (``S_n`` holds n+1 terms)."""

    n: int
    a_n: Any
    S_n: Any
    max_abs_term: Any
    sum_abs: Any


@dataclass(frozen=True)
class TruncationPlan:
    n_apriori: int
    n_posteriori_min: int
    target_k: Any
    gamma: Any


@dataclass(frozen=True)
class EvalCertificate:
    value: Any
    rel_error_bound: Any
    abs_error_bound: Any
    terms_used: int
    max_abs_term: Any
    method: str = "euler"
    t_reduction_steps: int = 0
    truncation_rel_bound: Any = 0
    rounding_allowance: Any = 0
    authoritative: str = "relative"
    stop_rule: str = "exact"
    working_digits: int = 0
    target_k: Any = 0


def _check_unit_disc(x: Any) -> None:
    if abs(x) >= 1:
        raise DomainError("x outside open unit disc")


def plan_truncation(
    t: Number, x: Number, K: Number, ctx: Optional[PrecisionContext] = None
) -> TruncationPlan:
    """A priori term count for relative error e^{-K}, and the first N where the last-term bound applies."""
    ctx = ctx or default_context()
    mp = ctx.mp
    t_val = ctx.convert(t)
    x_val = ctx.convert(x)
    _check_unit_disc(x_val)
    K = mp.mpf(K)
    if K < 0:
        raise DomainError("K must be non-negative")
    gamma = gamma_of(x_val, ctx).gamma
    n_apriori = apriori_term_count(gamma, K)
    n_post = int(mp.ceil(mp.log(1 + 2 * abs(t_val)) / gamma))
    return TruncationPlan(n_apriori=n_apriori, n_posteriori_min=n_post, target_k=K, gamma=gamma)


def reduce_t(
    t: Number, x: Number, ctx: Optional[PrecisionContext] = None
) -> Tuple[Any, Any, int]:
    """Split off factors until |t x^k| <= 1; returns (prefix, t x^k, k)."""
    ctx = ctx or default_context()
    mp = ctx.mp
    t_val = ctx.convert(t)
    x_val = ctx.convert(x)
    _check_unit_disc(x_val)
    prefix = mp.mpf(1)
    current = t_val
    steps = 0
    while abs(current) > 1:
        current *= x_val
        prefix *= 1 - current
        steps += 1
    return prefix, current, steps


def term_ratio(t: Number, x: Number, n: int, ctx: Optional[PrecisionContext] = None) -> Any:
    """a_n / a_{n-1} = -t x^n / (1 - x^n)."""
    if n < 1:
        raise DomainError("term_ratio needs n >= 1")
    ctx = ctx or default_context()
    t_val = ctx.convert(t)
    x_n = ctx.convert(x) ** n
    denominator = 1 - x_n
    if denominator == 0:
        raise IterationBreakdownError(n, "1 - x^n")
    return -t_val * x_n / denominator


def iterate_series(t: Number, x: Number, ctx: Optional[PrecisionContext] = None) -> Iterator[SeriesState]:
    """Yield the Euler-series state after each term, starting with a_0 = 1."""
    ctx = ctx or default_context()
    mp = ctx.mp
    t_val = ctx.convert(t)
    x_val = ctx.convert(x)
    term = mp.mpf(1)
    total = term
    max_abs = mp.mpf(1)
    sum_abs = mp.mpf(1)
    x_n = mp.mpf(1)
    n = 0
    yield SeriesState(n, term, total, max_abs, sum_abs)
    while True:
        n += 1
        x_n *= x_val
        denominator = 1 - x_n
        if denominator == 0:
            raise IterationBreakdownError(n, "1 - x^n")
        term = term * (-t_val * x_n) / denominator
        total += term
        magnitude = abs(term)
        sum_abs += magnitude
        if magnitude > max_abs:
            max_abs = magnitude
        yield SeriesState(n, term, total, max_abs, sum_abs)


def _rounding_allowance(ctx: PrecisionContext, terms: int, steps: int, state: SeriesState) -> Any:
    s_mod = abs(state.S_n)
    if s_mod == 0:
        return ctx.mp.inf
    return ROUNDING_ULPS_PER_STEP * (terms + steps + 1) * ctx.eps * state.sum_abs / s_mod


def _exact(value: Any, ctx: PrecisionContext, K: Any, steps: int = 0, authoritative: str = "relative") -> EvalCertificate:
    zero = ctx.mp.mpf(0)
    return EvalCertificate(
        value=value,
        rel_error_bound=zero,
        abs_error_bound=zero,
        terms_used=1 if value != 0 else 0,
        max_abs_term=ctx.mp.mpf(1) if value != 0 else zero,
        t_reduction_steps=steps,
        authoritative=authoritative,
        stop_rule="exact",
        working_digits=ctx.working_digits,
        target_k=K,
    )


def evaluate(
    t: Number,
    x: Number,
    ctx: Optional[PrecisionContext] = None,
    K: Optional[Number] = None,
    terms: Optional[int] = None,
) -> EvalCertificate:
    """
    Evaluate R(t,x) with a certified relative-error bound.

    ``K`` defaults to (requested_digits + 2) ln 10. ``terms`` forces exactly
    that many series terms and skips the reachability check; otherwise a
    bound above e^{-K} raises ``PrecisionPlanningError``.
    """
    ctx = ctx or default_context()
    mp = ctx.mp
    t_val = ensure_finite(ctx.convert(t), "t")
    x_val = ensure_finite(ctx.convert(x), "x")
    _check_unit_disc(x_val)
    K = mp.mpf(certificate_k(ctx.requested_digits) if K is None else K)
    if K < 0:
        raise DomainError("K must be non-negative")
    if terms is not None and terms < 1:
        raise DomainError("terms must be >= 1")
    if t_val == 0 or x_val == 0:
        return _exact(mp.mpf(1), ctx, K)

    gamma = gamma_of(x_val, ctx).gamma
    prefix, t_red, steps = reduce_t(t_val, x_val, ctx)
    if prefix == 0:
        LOGGER.debug("t lies on the zero set after %s reduction steps", steps)
        return _exact(mp.mpf(0), ctx, K, steps=steps, authoritative="absolute")

    plan = plan_truncation(t_red, x_val, K, ctx)
    target = mp.exp(-K)
    first_posterior = max(plan.n_posteriori_min, 1)
    LOGGER.debug(
        "truncation plan: N_apriori=%s N_post_min=%s K=%s gamma=%s steps=%s",
        plan.n_apriori,
        plan.n_posteriori_min,
        mp.nstr(K, 8),
        mp.nstr(gamma, 8),
        steps,
    )

    stop_rule = "apriori"
    state = None
    for state in iterate_series(t_red, x_val, ctx):
        used = state.n + 1
        if terms is not None:
            if used >= terms:
                stop_rule = "forced"
                break
            continue
        if used >= first_posterior:
            _, rel_report = aposteriori(t_red, x_val, used, state.a_n, state.S_n, ctx, gamma)
            truncation = modified_to_true_relative(rel_report.value) if rel_report.hypotheses_met else None
            if truncation is not None and truncation + _rounding_allowance(ctx, used, steps, state) <= target:
                stop_rule = "aposteriori"
                break
        if used >= plan.n_apriori:
            break

    used = state.n + 1
    posterior_rel = None
    posterior_abs = None
    abs_report, rel_report = aposteriori(t_red, x_val, used, state.a_n, state.S_n, ctx, gamma)
    if rel_report.hypotheses_met:
        posterior_rel = modified_to_true_relative(rel_report.value)
        posterior_abs = abs_report.value if posterior_rel is not None else None

    rel_candidates = []
    abs_candidates = []
    prior_rel = apriori_rel(t_red, x_val, used, ctx, gamma)
    if prior_rel.hypotheses_met:
        rel_candidates.append(prior_rel.value)
    prior_abs = apriori_abs(t_red, x_val, used, ctx, gamma)
    if prior_abs.hypotheses_met:
        abs_candidates.append(prior_abs.value)
    if posterior_rel is not None:
        rel_candidates.append(posterior_rel)
        abs_candidates.append(posterior_abs)

    value = prefix * state.S_n
    rounding = _rounding_allowance(ctx, used, steps, state)
    truncation_rel = min(rel_candidates) if rel_candidates else mp.inf
    rel_bound = truncation_rel + rounding
    abs_bound = abs(prefix) * (min(abs_candidates) + rounding * abs(state.S_n)) if abs_candidates else rel_bound * abs(value)
    authoritative = "relative" if mp.isfinite(rel_bound) else "absolute"

    LOGGER.debug(
        "stopped by %s after %s terms: truncation=%s rounding=%s",
        stop_rule,
        used,
        mp.nstr(truncation_rel, 5),
        mp.nstr(rounding, 5),
    )
    if terms is None and not rel_bound <= target:
        raise PrecisionPlanningError(
            f"relative bound {mp.nstr(rel_bound, 5)} above e^-K={mp.nstr(target, 5)} after {used} terms "
            f"at {ctx.working_digits} working digits"
        )
    return EvalCertificate(
        value=value,
        rel_error_bound=rel_bound,
        abs_error_bound=abs_bound,
        terms_used=used,
        max_abs_term=state.max_abs_term,
        t_reduction_steps=steps,
        truncation_rel_bound=truncation_rel,
        rounding_allowance=rounding,
        authoritative=authoritative,
        stop_rule=stop_rule,
        working_digits=ctx.working_digits,
        target_k=K,
    )


def context_for_evaluation(
    x: Number, digits: int, max_working_digits: Optional[int] = None
) -> PrecisionContext:
    """Working precision for a ``digits``-digit evaluation at this x."""
    initial = context_for_digits(digits, max_working_digits=max_working_digits)
    x_val = initial.convert(x)
    _check_unit_disc(x_val)
    if x_val == 0:
        return initial
    return plan_precision(digits, gamma_of(x_val, initial), max_working_digits=max_working_digits)


def evaluate_to_digits(
    t: Number,
    x: Number,
    digits: int,
    K: Optional[Number] = None,
    terms: Optional[int] = None,
    max_working_digits: Optional[int] = None,
) -> EvalCertificate:
    """``evaluate`` in a context planned from ``digits`` and gamma(x)."""
    ctx = context_for_evaluation(x, digits, max_working_digits)
    return evaluate(t, x, ctx, K=K, terms=terms)


def log_R(t: Number, x: Number, ctx: Optional[PrecisionContext] = None, K: Optional[Number] = None) -> Any:
    """Principal logarithm of the certified value of R(t,x)."""
    ctx = ctx or default_context()
    certificate = evaluate(t, x, ctx, K=K)
    if certificate.value == 0:
        raise DomainError("R(t,x) = 0 has no logarithm")
    return ctx.mp.log(certificate.value)


__all__ = [
    "SeriesState",
    "TruncationPlan",
    "EvalCertificate",
    "plan_truncation",
    "reduce_t",
    "term_ratio",
    "iterate_series",
    "evaluate",
    "evaluate_to_digits",
    "context_for_evaluation",
    "log_R",
]
