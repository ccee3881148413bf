import math

import mpmath
import numpy as np
import pytest

from qproduct.errors import DegenerateInputError, DomainError, ParseError, PrecisionLimitError
from qproduct.numeric import (
    PrecisionContext,
    apriori_term_count,
    certificate_k,
    context_for_digits,
    format_complex,
    format_real,
    gamma_of,
    parse_complex,
    plan_precision,
)


@pytest.mark.parametrize(
    "literal, expected",
    [
        ("1+2i", ("1", "2")),
        ("-0.5-0.25i", ("-0.5", "-0.25")),
        ("3", ("3", "0")),
        ("2.5i", ("0", "2.5")),
        ("-i", ("0", "-1")),
        ("i", ("0", "1")),
        ("1e-3+1e2j", ("0.001", "100")),
        (" 1 + i ", ("1", "1")),
    ],
)
def test_parse_complex_rectangular(ctx30, literal, expected):
    value = parse_complex(literal, ctx30)
    assert value.real == ctx30.mp.mpf(expected[0])
    assert value.imag == ctx30.mp.mpf(expected[1])


def test_parse_complex_polar(ctx30):
    mp = ctx30.mp
    value = parse_complex("2@0.5", ctx30)
    assert abs(value - mp.mpc(2 * mp.cos(0.5), 2 * mp.sin(0.5))) < mp.mpf(10) ** -45


def test_parse_complex_keeps_decimal_precision(ctx30):
    value = parse_complex("0.1", ctx30)
    assert value.real == ctx30.mp.mpf("0.1")
    assert value.real != ctx30.mp.mpf(0.1)


@pytest.mark.parametrize("literal", ["", "abc", "1+", "1@x", "--1", "1i2", "-1@0.3"])
def test_parse_complex_rejects_malformed(ctx30, literal):
    with pytest.raises(ParseError):
        parse_complex(literal, ctx30)


def test_parse_error_is_a_value_error():
    with pytest.raises(ValueError):
        parse_complex("nope")


def test_format_complex_reparses(ctx30):
    mp = ctx30.mp
    z = mp.mpc(1, -2) / 3
    back = parse_complex(format_complex(z), ctx30)
    assert abs(back - z) <= 4 * mp.eps * abs(z)


def test_format_complex_shapes(ctx30):
    mp = ctx30.mp
    assert format_complex(mp.mpc(0.5, 0), 5) == "0.5"
    assert format_complex(mp.mpc(0, -0.25), 5) == "-0.25i"
    assert format_complex(mp.mpc(1, 2), 5) == "1+2i"


def test_format_real_significant_digits(ctx30):
    assert format_real(ctx30.mp.mpf(1) / 3, 5) == "0.33333"
    assert format_real(ctx30.mp.mpf(0), 5) == "0"


def test_certificate_k_matches_digits():
    assert certificate_k(8) == pytest.approx(10 * math.log(10))


@pytest.mark.parametrize("gamma, K, expected", [(0.1, 23.0259, 34), (0.01, certificate_k(30), 284)])
def test_apriori_term_count_examples(gamma, K, expected):
    assert apriori_term_count(gamma, K) == expected


def test_plan_precision_adds_cancellation_and_guard():
    ctx = plan_precision(30, 0.01)
    # 107 digits of cancellation, 10 + ceil(log10 284) guard digits
    assert ctx.working_digits == 30 + 107 + 13
    assert ctx.requested_digits == 30
    assert ctx.mp.dps == ctx.working_digits


def test_plan_precision_respects_cap():
    with pytest.raises(PrecisionLimitError):
        plan_precision(30, 0.01, max_working_digits=100)


def test_plan_precision_rejects_bad_input():
    with pytest.raises(DomainError):
        plan_precision(0, 0.5)
    with pytest.raises(DomainError):
        plan_precision(10, 0)


def test_context_for_digits_has_guard():
    ctx = context_for_digits(15)
    assert ctx.working_digits == 25


def test_precision_context_validates_guard():
    with pytest.raises(DomainError):
        PrecisionContext(requested_digits=20, working_digits=25)
    with pytest.raises(DomainError):
        PrecisionContext(requested_digits=0, working_digits=20)


def test_contexts_are_independent_of_global_precision():
    before = mpmath.mp.dps
    low = PrecisionContext(10, 20)
    high = PrecisionContext(50, 80)
    assert low.mp.dps == 20
    assert high.mp.dps == 80
    assert mpmath.mp.dps == before
    assert abs(high.mp.pi - high.convert(low.mp.pi)) > high.mp.mpf(10) ** -60


def test_gamma_of(ctx30):
    assert abs(gamma_of("0.5", ctx30).gamma - ctx30.mp.log(2)) < ctx30.mp.mpf(10) ** -45
    assert float(gamma_of("0.3+0.4i", ctx30)) == pytest.approx(math.log(2))


def test_gamma_of_rejects_degenerate_and_outside(ctx30):
    with pytest.raises(DegenerateInputError):
        gamma_of(0, ctx30)
    with pytest.raises(DomainError, match="unit disc"):
        gamma_of(1, ctx30)
    with pytest.raises(DomainError):
        gamma_of("0.8+0.8i", ctx30)


def test_gamma_of_on_random_points(ctx30):
    mp = ctx30.mp
    rng = np.random.default_rng(3)
    for _ in range(50):
        r, phi = rng.uniform(0.001, 0.999), rng.uniform(0.0, 2.0 * np.pi)
        x = ctx30.convert(complex(r * np.cos(phi), r * np.sin(phi)))
        gamma = gamma_of(x, ctx30).gamma
        assert gamma > 0
        assert abs(mp.exp(-gamma) - abs(x)) < mp.mpf(10) ** -45


def test_format_then_parse_keeps_value(ctx30):
    mp = ctx30.mp
    rng = np.random.default_rng(8)
    for _ in range(20):
        scale = 10.0 ** int(rng.integers(-6, 7))
        z = mp.mpc(rng.normal() * scale, rng.normal()) / 7
        back = parse_complex(format_complex(z), ctx30)
        assert abs(back - z) <= 4 * mp.eps * abs(z)


def test_plan_precision_is_monotone():
    gammas = [2.0, 1.0, 0.5, 0.1, 0.05, 0.01]
    for digits in (5, 20, 50):
        working = [plan_precision(digits, g).working_digits for g in gammas]
        assert working == sorted(working)
    for g in gammas:
        working = [plan_precision(d, g).working_digits for d in (5, 20, 50, 100)]
        assert working == sorted(working)


def test_exported_names_exist():
    import qproduct.numeric as numeric

    assert all(hasattr(numeric, name) for name in numeric.__all__)
    methods = {
        name
        for name, value in vars(PrecisionContext).items()
        if not name.startswith("_") and (callable(value) or isinstance(value, property))
    }
    assert methods == {"eps", "convert"}
