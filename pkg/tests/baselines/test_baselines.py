import math
from fractions import Fraction

import numpy as np
import pytest

from qproduct.baselines import (
    BaselineResult,
    corrected_product,
    direct_product,
    gatteschi,
    gatteschi_accelerated,
    gatteschi_accelerated_closed_form,
    gatteschi_init,
    gatteschi_states,
    lambert_log,
    slater_series,
    terms_for_tolerance,
)
from qproduct.engine import evaluate
from qproduct.errors import DomainError, IterationBreakdownError, ReciprocalInstabilityError
from qproduct.numeric import PrecisionContext


def reference(t, x, ctx):
    return evaluate(t, x, ctx).value


def test_direct_product_is_exact_on_rationals():
    result = direct_product(1, Fraction(1, 2), 3)
    assert result == BaselineResult("product", Fraction(21, 64), 3)
    assert isinstance(result.value, Fraction)


def test_corrected_product_on_rationals():
    result = corrected_product(1, Fraction(1, 2), 3)
    assert result.value == Fraction(147, 512)
    assert result.method == "corrected"


def test_corrected_product_beats_direct_product(ctx30):
    exact = reference("0.8", "0.5", ctx30)
    plain = abs(direct_product("0.8", "0.5", 10, ctx30).value - exact)
    corrected = abs(corrected_product("0.8", "0.5", 10, ctx30).value - exact)
    assert corrected < plain * ctx30.mp.mpf("0.01")


def test_direct_product_rejects_bad_input(ctx30):
    with pytest.raises(DomainError):
        direct_product(1, "0.5", -1, ctx30)
    with pytest.raises(DomainError):
        direct_product(1, 1, 3, ctx30)


def test_lambert_log_matches_engine(ctx30):
    mp = ctx30.mp
    result = lambert_log("0.5+0.5i", "0.4-0.3i", ctx30, tol="1e-40")
    exact = reference("0.5+0.5i", "0.4-0.3i", PrecisionContext(60, 80))
    assert abs(result.value - exact) / abs(exact) < mp.mpf(10) ** -38
    assert result.method == "log"


def test_lambert_log_term_count_near_one():
    ctx = PrecisionContext(30, 45)
    mp = ctx.mp
    result = lambert_log(1, mp.exp(mp.mpf("-0.01")), ctx, tol="1e-30")
    assert 6000 < result.terms < 8000


def test_lambert_log_domain(ctx30):
    with pytest.raises(DomainError):
        lambert_log(2, "0.5", ctx30)
    assert lambert_log(0, "0.5", ctx30).value == 1


def test_gatteschi_alpha_is_the_partial_product():
    result = gatteschi(1, Fraction(1, 2), 2, accelerated=False)
    assert result.value == Fraction(3, 8)
    state = next(gatteschi_states(Fraction(3, 2), Fraction(1, 3), sigma=Fraction(5, 2)))
    assert state.beta_n == Fraction(5, 2) / (Fraction(5, 2) - Fraction(1, 2))


@pytest.mark.parametrize("sigma", ["1", "2", "-0.5"])
def test_gatteschi_converges(ctx30, sigma):
    mp = ctx30.mp
    exact = reference("0.7+0.2i", "0.3", ctx30)
    result = gatteschi("0.7+0.2i", "0.3", 20, sigma=sigma, ctx=ctx30)
    assert abs(result.value - exact) / abs(exact) < mp.mpf(10) ** -18
    plain = gatteschi("0.7+0.2i", "0.3", 20, sigma=sigma, ctx=ctx30, accelerated=False)
    assert abs(result.value - exact) < abs(plain.value - exact)


def test_gatteschi_accelerated_forms_agree(ctx30):
    mp = ctx30.mp
    states = gatteschi_states("0.9", "0.6", sigma=2, ctx=ctx30)
    for _ in range(6):
        state = next(states)
        combined = gatteschi_accelerated(state, "0.9", "0.6", ctx30)
        closed = gatteschi_accelerated_closed_form(state, "0.9", "0.6", ctx30)
        assert abs(combined - closed) < mp.mpf(10) ** -40


def test_gatteschi_breakdowns():
    with pytest.raises(DomainError):
        gatteschi_init(1, Fraction(1, 2), sigma=0)
    with pytest.raises(IterationBreakdownError) as excinfo:
        gatteschi_init(1, Fraction(1, 2), sigma=Fraction(1, 2))
    assert excinfo.value.step == 0
    with pytest.raises(IterationBreakdownError) as excinfo:
        gatteschi(2, Fraction(1, 2), 3, sigma=2)
    assert excinfo.value.step == 1
    assert excinfo.value.denominator == "beta_n"


def test_slater_series_matches_engine(ctx30):
    mp = ctx30.mp
    result = slater_series("0.5", "0.5", ctx30, tol="1e-40")
    exact = reference("0.5", "0.5", ctx30)
    assert abs(result.value - exact) / abs(exact) < mp.mpf(10) ** -35
    assert 0 < result.min_denominator_modulus <= 1
    assert result.terms >= 2


def test_slater_series_flags_cancellation(ctx30):
    with pytest.raises(ReciprocalInstabilityError):
        slater_series("-1.04", "0.95", ctx30)


def test_slater_series_domain(ctx30):
    with pytest.raises(DomainError):
        slater_series(3, "0.5", ctx30)


def test_terms_for_tolerance(ctx30):
    mp = ctx30.mp
    assert terms_for_tolerance("product", 1, 0.5, 1e-20) == 70
    n = terms_for_tolerance("corrected", 1, 0.5, 1e-20)
    assert n < 40
    exact = reference(1, "0.5", ctx30)
    for method, builder in (("product", direct_product), ("corrected", corrected_product)):
        count = terms_for_tolerance(method, 1, 0.5, 1e-20)
        assert abs(builder(1, "0.5", count, ctx30).value - exact) / abs(exact) < mp.mpf("1e-20")
    assert terms_for_tolerance("product", 0, 0.5, 1e-20) == 0
    with pytest.raises(DomainError):
        terms_for_tolerance("slater", 1, 0.5, 1e-20)
    with pytest.raises(DomainError):
        terms_for_tolerance("product", 1, 1.0, 1e-20)


def test_gatteschi_states_are_exact_partial_products():
    t, x, sigma = Fraction(3, 4), Fraction(2, 5), Fraction(5, 3)
    states = gatteschi_states(t, x, sigma=sigma)
    product = Fraction(1)
    for n in range(9):
        state = next(states)
        assert state.n == n
        assert state.alpha_n == product
        assert state.beta_n == sigma * product / (sigma - t * x ** (n + 1))
        product *= 1 - t * x ** (n + 1)


def test_gatteschi_acceleration_error_decays_like_x_squared(ctx30):
    mp = ctx30.mp
    exact = reference(1, "0.8", ctx30)
    steps = list(range(15, 41))
    states = gatteschi_states(1, "0.8", ctx=ctx30)
    errors = {}
    for state in states:
        if state.n in steps:
            value = gatteschi_accelerated(state, 1, "0.8", ctx30)
            errors[state.n] = float(mp.log(abs(value - exact) / exact))
        if state.n == steps[-1]:
            break
    slope = np.polyfit(steps, [errors[n] for n in steps], 1)[0]
    assert slope == pytest.approx(2 * math.log(0.8), rel=0.15)


def test_exported_names_exist():
    import qproduct.baselines as baselines

    assert all(hasattr(baselines, name) for name in baselines.__all__)
    assert "TOLERANCE_METHODS" not in baselines.__all__
