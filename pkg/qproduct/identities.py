"""
Classical identities for R(t,x) checked numerically.

Each check computes its two sides through different code paths: the Euler
engine on one side and a theta-type sum, a residue-class product or a
rearranged engine call on the other. Theta exponents come from integer
recurrences; the term generators below are module-level so a harness can
substitute a corrupted one as a negative control.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Iterator, List, Optional, Tuple

import numpy as np

from .engine import context_for_evaluation, evaluate
from .errors import DomainError
from .numeric import (
    Number,
    PrecisionContext,
    context_for_digits,
    default_context,
    format_complex,
    format_real,
)


LOGGER = logging.getLogger("qproduct.identities")

TOLERANCE_MARGIN_DIGITS = 5
ROGERS_RAMANUJAN_RESIDUES = {"first": (1, 4), "second": (2, 3)}


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    lhs: Any
    rhs: Any
    abs_discrepancy: Any
    rel_discrepancy: Any
    tolerance: Any
    passed: bool

    def as_dict(self, digits: int = 12) -> dict:
        return {
            "identity_id": self.identity_id,
            "lhs": format_complex(self.lhs, digits),
            "rhs": format_complex(self.rhs, digits),
            "abs_discrepancy": format_real(self.abs_discrepancy, 5),
            "rel_discrepancy": format_real(self.rel_discrepancy, 5),
            "tolerance": format_real(self.tolerance, 5),
            "passed": self.passed,
        }


def default_tolerance(ctx: PrecisionContext) -> Any:
    return ctx.mp.mpf(10) ** (-(ctx.requested_digits - TOLERANCE_MARGIN_DIGITS))


def _compare(identity_id: str, lhs: Any, rhs: Any, tolerance: Any, mp: Any) -> IdentityReport:
    abs_disc = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    rel_disc = abs_disc / scale if scale != 0 else mp.mpf(0)
    passed = bool(rel_disc <= tolerance)
    LOGGER.debug("%s: rel=%s passed=%s", identity_id, mp.nstr(rel_disc, 3), passed)
    return IdentityReport(identity_id, lhs, rhs, abs_disc, rel_disc, tolerance, passed)


class _Check:
    """Shared setup: caller context, working context planned for x, tolerance."""

    def __init__(self, x: Number, ctx: Optional[PrecisionContext], tolerance: Optional[Number]):
        self.ctx = ctx or default_context()
        self.work = context_for_evaluation(x, self.ctx.requested_digits)
        self.mp = self.work.mp
        self.x = self.work.convert(x)
        self.tolerance = default_tolerance(self.ctx) if tolerance is None else self.mp.mpf(tolerance)

    def R(self, t: Any, x: Any) -> Any:
        return evaluate(t, x, self.work).value

    def compare(self, identity_id: str, lhs: Any, rhs: Any, tolerance: Optional[Any] = None) -> IdentityReport:
        return _compare(identity_id, lhs, rhs, self.tolerance if tolerance is None else tolerance, self.mp)

    @property
    def gamma(self) -> Any:
        return -self.mp.log(abs(self.x)) if self.x != 0 else self.mp.inf

    @property
    def cutoff(self) -> Any:
        """gamma * e beyond which |x|^e is below the working precision."""
        return self.work.working_digits * self.mp.log(10)

    @cached_property
    def wide(self) -> PrecisionContext:
        """
        Context for the series sides. A theta-type sum whose value is about
        e^{-c pi^2/gamma} cancels that many digits between terms of size up to
        ~1/gamma, so it is summed with pi^2/(gamma ln 10) extra digits.
        """
        if self.x == 0:
            return self.work
        mp = self.mp
        gamma = self.gamma
        extra = int(mp.ceil(mp.pi ** 2 / (gamma * mp.log(10)) + mp.log10(1 + 4 / gamma)))
        return context_for_digits(
            self.work.requested_digits,
            guard_digits=self.work.working_digits - self.work.requested_digits + extra,
        )

    @property
    def wide_cutoff(self) -> Any:
        return self.wide.working_digits * self.wide.mp.log(10)


# ---------------------------------------------------------------------------
# Theta-type term generators: (coefficient, exponent), exponents non-decreasing
# ---------------------------------------------------------------------------

def pentagonal_terms() -> Iterator[Tuple[int, int]]:
    """(-1)^m x^{m(3m-1)/2} and (-1)^m x^{m(3m+1)/2}, m >= 1, after the constant 1."""
    yield 1, 0
    m = 1
    low = 1  # m(3m-1)/2
    while True:
        sign = -1 if m % 2 else 1
        yield sign, low
        yield sign, low + m
        low += 3 * m + 1
        m += 1


def jacobi_cube_terms() -> Iterator[Tuple[int, int]]:
    """(-1)^m (2m+1) x^{m(m+1)/2}."""
    m = 0
    exponent = 0
    while True:
        yield (-1 if m % 2 else 1) * (2 * m + 1), exponent
        m += 1
        exponent += m


def triangular_terms() -> Iterator[Tuple[int, int]]:
    m = 0
    exponent = 0
    while True:
        yield 1, exponent
        m += 1
        exponent += m


def square_terms() -> Iterator[Tuple[int, int]]:
    """sum over all integers m of x^{m^2}."""
    yield 1, 0
    m = 1
    exponent = 1
    while True:
        yield 2, exponent
        exponent += 2 * m + 1
        m += 1


def alternating_square_terms() -> Iterator[Tuple[int, int]]:
    yield 1, 0
    m = 1
    exponent = 1
    while True:
        yield (-2 if m % 2 else 2), exponent
        exponent += 2 * m + 1
        m += 1


def theta_sum(check: _Check, terms: Callable[[], Iterator[Tuple[int, int]]]) -> Any:
    if check.x == 0:
        return check.mp.mpf(next(terms())[0])
    mp = check.wide.mp
    x = check.wide.convert(check.x)
    gamma = check.gamma
    cutoff = check.wide_cutoff
    total = mp.mpf(0)
    for coefficient, exponent in terms():
        if exponent * gamma > cutoff + mp.log(abs(coefficient)):
            break
        total += coefficient * x ** exponent
    return check.work.convert(total)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def check_pentagonal(x: Number, ctx: Optional[PrecisionContext] = None, tolerance: Optional[Number] = None) -> IdentityReport:
    """R(1,x) against the pentagonal-number sum."""
    check = _Check(x, ctx, tolerance)
    return check.compare("pentagonal", check.R(1, check.x), theta_sum(check, pentagonal_terms))


def check_theta_identities(
    x: Number, ctx: Optional[PrecisionContext] = None, tolerance: Optional[Number] = None
) -> List[IdentityReport]:
    check = _Check(x, ctx, tolerance)
    x = check.x
    r1 = check.R(1, x)
    r2 = check.R(1, x ** 2)
    r4 = check.R(1, x ** 4)
    return [
        check.compare("theta_jacobi_cube", r1 ** 3, theta_sum(check, jacobi_cube_terms)),
        check.compare("theta_triangular", r2 ** 2 / r1, theta_sum(check, triangular_terms)),
        check.compare("theta_squares", r2 ** 5 / (r1 ** 2 * r4 ** 2), theta_sum(check, square_terms)),
        check.compare("theta_alternating_squares", r1 ** 2 / r2, theta_sum(check, alternating_square_terms)),
    ]


def _rogers_ramanujan_sum(check: _Check, shift: int) -> Any:
    """sum_m x^{m^2 + shift*m} / ((1-x)...(1-x^m))."""
    if check.x == 0:
        return check.mp.mpf(1)
    mp = check.wide.mp
    x = check.wide.convert(check.x)
    gamma = check.gamma
    x_mod = abs(x)
    stop = check.wide_cutoff + mp.pi ** 2 / (6 * gamma)
    total = mp.mpf(1)
    pochhammer = mp.mpf(1)
    x_m = mp.mpf(1)
    m = 0
    while True:
        m += 1
        x_m *= x
        pochhammer *= 1 - x_m
        exponent = m * m + shift * m
        total += x ** exponent / pochhammer
        if exponent * gamma >= stop or x_mod ** exponent == 0:
            return check.work.convert(total)


def _rogers_ramanujan_product(check: _Check, residues: Tuple[int, int]) -> Tuple[Any, Any]:
    """
    Partial product of 1/(1 - x^n) over n = residues mod 5, n <= n_max, with
    n_max gamma >= working * ln 10; returns (value, relative tail allowance).
    """
    mp = check.mp
    x = check.x
    if x == 0:
        return mp.mpf(1), mp.mpf(0)
    gamma = check.gamma
    x_mod = abs(x)
    n_max = int(mp.ceil(check.cutoff / gamma))
    value = mp.mpf(1)
    x_n = mp.mpf(1)
    for n in range(1, n_max + 1):
        x_n *= x
        if n % 5 in residues:
            value /= 1 - x_n
    tail_log = x_mod ** (n_max + 1) / ((1 - x_mod) * (1 - x_mod ** (n_max + 1)))
    return value, mp.expm1(tail_log)


def check_rogers_ramanujan(
    x: Number, ctx: Optional[PrecisionContext] = None, tolerance: Optional[Number] = None
) -> Tuple[IdentityReport, IdentityReport]:
    check = _Check(x, ctx, tolerance)
    reports = []
    for name, shift in (("first", 0), ("second", 1)):
        product, tail = _rogers_ramanujan_product(check, ROGERS_RAMANUJAN_RESIDUES[name])
        series = _rogers_ramanujan_sum(check, shift)
        reports.append(check.compare(f"rogers_ramanujan_{name}", product, series, check.tolerance + tail))
    return reports[0], reports[1]


def check_minus1(x: Number, ctx: Optional[PrecisionContext] = None, tolerance: Optional[Number] = None) -> IdentityReport:
    """R(-1,x) against R(1,x^2)/R(1,x)."""
    check = _Check(x, ctx, tolerance)
    x = check.x
    return check.compare("minus1", check.R(-1, x), check.R(1, x ** 2) / check.R(1, x))


def check_root_of_unity(
    t: Number, x: Number, m: int, ctx: Optional[PrecisionContext] = None, tolerance: Optional[Number] = None
) -> IdentityReport:
    """prod_j R(omega^j t, x) against R(t^m, x^m), omega a primitive m-th root of unity."""
    if m < 2:
        raise DomainError("m must be >= 2")
    check = _Check(x, ctx, tolerance)
    mp = check.mp
    t = check.work.convert(t)
    x = check.x
    lhs = mp.mpf(1)
    for j in range(m):
        lhs *= check.R(t * mp.expjpi(mp.mpf(2 * j) / m), x)
    return check.compare(f"root_of_unity_m{m}", lhs, check.R(t ** m, x ** m))


def check_residue_split(
    t: Number, x: Number, m: int, ctx: Optional[PrecisionContext] = None, tolerance: Optional[Number] = None
) -> IdentityReport:
    """R(t,x) against prod_{j=1}^m R(t x^{j-m}, x^m)."""
    if m < 1:
        raise DomainError("m must be >= 1")
    check = _Check(x, ctx, tolerance)
    mp = check.mp
    t = check.work.convert(t)
    x = check.x
    if x == 0:
        return check.compare(f"residue_split_m{m}", check.R(t, x), check.R(t, x))
    rhs = mp.mpf(1)
    for j in range(1, m + 1):
        rhs *= check.R(t * x ** (j - m), x ** m)
    return check.compare(f"residue_split_m{m}", check.R(t, x), rhs)


def check_trivial_bounds(
    t: Number, x: Number, ctx: Optional[PrecisionContext] = None, tolerance: Optional[Number] = None
) -> IdentityReport:
    """
    |R(t,x)| <= R(-|t|,|x|), and |R(t,x)| >= R(|t|,|x|) when |t| <= 1/|x|.

    The discrepancy is the worst violation (zero when both hold), measured
    relative to the bound it crosses.
    """
    check = _Check(x, ctx, tolerance)
    mp = check.mp
    t = check.work.convert(t)
    x = check.x
    t_mod, x_mod = abs(t), abs(x)
    modulus = abs(check.R(t, x))
    upper = check.R(-t_mod, x_mod).real
    violation = max(mp.mpf(0), modulus - upper)
    rel = violation / upper
    if t_mod * x_mod <= 1:
        lower = check.R(t_mod, x_mod).real
        if lower - modulus > violation:
            violation = lower - modulus
        if lower > 0:
            rel = max(rel, (lower - modulus) / lower)
    passed = bool(rel <= check.tolerance)
    return IdentityReport("trivial_bounds", modulus, upper, violation, rel, check.tolerance, passed)


# ---------------------------------------------------------------------------
# Sample plan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplePoint:
    x: Any
    t: Any
    digits: int


def sample_points(
    seed: int = 0, count: int = 20, digits: int = 25, quick: bool = False, near_one_digits: int = 20
) -> List[SamplePoint]:
    """
    ``count`` pseudo-random complex x with |x| <= 0.9 (0.8 with ``quick``)
    paired with t, |t| <= 1.5, plus the real point x = 0.99 unless ``quick``.
    """
    rng = np.random.default_rng(seed)
    max_modulus = 0.8 if quick else 0.9
    moduli = rng.uniform(0.05, max_modulus, size=count)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=count)
    t_moduli = rng.uniform(0.0, 1.5, size=count)
    t_phases = rng.uniform(0.0, 2.0 * np.pi, size=count)
    points = []
    for r, phi, s, psi in zip(moduli, phases, t_moduli, t_phases):
        x = complex(r * np.cos(phi), r * np.sin(phi))
        t = complex(s * np.cos(psi), s * np.sin(psi))
        points.append(SamplePoint(x=x, t=t, digits=digits))
    if not quick:
        points.append(SamplePoint(x=0.99, t=0.5, digits=near_one_digits))
    return points


def checks_for_point(point: SamplePoint) -> List[Callable[[], List[IdentityReport]]]:
    """One zero-argument job per check family at this point."""
    ctx = PrecisionContext(point.digits, point.digits + 10)
    x, t = point.x, point.t
    return [
        lambda: [check_pentagonal(x, ctx)],
        lambda: check_theta_identities(x, ctx),
        lambda: list(check_rogers_ramanujan(x, ctx)),
        lambda: [check_minus1(x, ctx)],
        lambda: [check_root_of_unity(t, x, 2, ctx), check_root_of_unity(t, x, 3, ctx)],
        lambda: [check_residue_split(t, x, 2, ctx), check_residue_split(t, x, 3, ctx)],
        lambda: [check_trivial_bounds(t, x, ctx)],
    ]


__all__ = [
    "IdentityReport",
    "SamplePoint",
    "default_tolerance",
    "pentagonal_terms",
    "jacobi_cube_terms",
    "triangular_terms",
    "square_terms",
    "alternating_square_terms",
    "check_pentagonal",
    "check_theta_identities",
    "check_rogers_ramanujan",
    "check_minus1",
    "check_root_of_unity",
    "check_residue_split",
    "check_trivial_bounds",
    "sample_points",
    "checks_for_point",
]
