from dataclasses import replace

import pytest

import qproduct.identities as identities
from qproduct.errors import DomainError
from qproduct.identities import (
    check_minus1,
    check_pentagonal,
    check_residue_split,
    check_rogers_ramanujan,
    check_root_of_unity,
    check_theta_identities,
    check_trivial_bounds,
    checks_for_point,
    default_tolerance,
    pentagonal_terms,
    sample_points,
    square_terms,
    triangular_terms,
)
from qproduct.numeric import PrecisionContext


@pytest.fixture
def ctx25():
    return PrecisionContext(25, 35)


def take(generator, count):
    items = []
    for item in generator:
        items.append(item)
        if len(items) == count:
            return items


def test_term_generators():
    assert take(pentagonal_terms(), 7) == [(1, 0), (-1, 1), (-1, 2), (1, 5), (1, 7), (-1, 12), (-1, 15)]
    assert [e for _, e in take(triangular_terms(), 5)] == [0, 1, 3, 6, 10]
    assert take(square_terms(), 4) == [(1, 0), (2, 1), (2, 4), (2, 9)]


def test_default_tolerance(ctx25):
    assert default_tolerance(ctx25) == ctx25.mp.mpf(10) ** -20


def test_pentagonal_example(ctx25):
    report = check_pentagonal("0.1", ctx25)
    assert report.passed
    assert report.identity_id == "pentagonal"
    assert float(report.lhs.real) == pytest.approx(0.8900101, abs=1e-7)
    assert report.abs_discrepancy < ctx25.mp.mpf(10) ** -25


@pytest.mark.parametrize("x", ["0.3", "-0.6", "0.5+0.4i", "0.85"])
def test_theta_identities(ctx25, x):
    reports = check_theta_identities(x, ctx25)
    assert [r.identity_id for r in reports] == [
        "theta_jacobi_cube",
        "theta_triangular",
        "theta_squares",
        "theta_alternating_squares",
    ]
    assert all(r.passed for r in reports)


def test_theta_triangular_value(ctx25):
    triangular = check_theta_identities("0.3", ctx25)[1]
    assert float(triangular.rhs.real) == pytest.approx(1.3277349, abs=1e-7)


@pytest.mark.parametrize("x", ["0.2", "0.7", "-0.4+0.3i"])
def test_rogers_ramanujan(ctx25, x):
    first, second = check_rogers_ramanujan(x, ctx25)
    assert first.identity_id == "rogers_ramanujan_first"
    assert second.identity_id == "rogers_ramanujan_second"
    assert first.passed and second.passed


def test_rogers_ramanujan_value(ctx25):
    first, _ = check_rogers_ramanujan("0.2", ctx25)
    assert float(first.rhs.real) == pytest.approx(1.252084, abs=1e-6)


@pytest.mark.parametrize("x", ["0.5", "-0.3+0.7i"])
def test_rearrangement_identities(ctx25, x):
    t = "0.8-0.9i"
    assert check_minus1(x, ctx25).passed
    for m in (2, 3):
        root = check_root_of_unity(t, x, m, ctx25)
        split = check_residue_split(t, x, m, ctx25)
        assert root.identity_id == f"root_of_unity_m{m}"
        assert split.identity_id == f"residue_split_m{m}"
        assert root.passed and split.passed


def test_rearrangement_identity_arguments(ctx25):
    with pytest.raises(DomainError):
        check_root_of_unity(1, "0.5", 1, ctx25)
    with pytest.raises(DomainError):
        check_residue_split(1, "0.5", 0, ctx25)


@pytest.mark.parametrize("t, x", [("0.5", "0.5"), ("1.3+0.4i", "-0.5+0.2i"), ("4", "0.6")])
def test_trivial_bounds(ctx25, t, x):
    report = check_trivial_bounds(t, x, ctx25)
    assert report.passed
    assert report.abs_discrepancy < ctx25.mp.mpf(10) ** -30


def test_corrupted_generator_is_caught(ctx25, monkeypatch):
    def corrupted():
        for m, (coefficient, exponent) in enumerate(triangular_terms()):
            yield (-coefficient if m == 2 else coefficient), exponent

    monkeypatch.setattr(identities, "triangular_terms", corrupted)
    reports = {r.identity_id: r for r in check_theta_identities("0.3", ctx25)}
    assert not reports["theta_triangular"].passed
    assert reports["theta_jacobi_cube"].passed


def test_report_as_dict(ctx25):
    payload = check_pentagonal("0.1", ctx25).as_dict()
    assert set(payload) == {
        "identity_id",
        "lhs",
        "rhs",
        "abs_discrepancy",
        "rel_discrepancy",
        "tolerance",
        "passed",
    }
    assert payload["passed"] is True
    assert payload["lhs"].startswith("0.89001")


def test_sample_points_are_reproducible():
    first = sample_points(seed=7, count=6, digits=25)
    second = sample_points(seed=7, count=6, digits=25)
    assert first == second
    assert len(first) == 7
    assert first[-1].x == 0.99 and first[-1].digits == 20
    assert all(abs(p.x) <= 0.9 and abs(p.t) <= 1.5 for p in first[:-1])


def test_sample_points_quick():
    points = sample_points(seed=1, count=5, digits=25, quick=True)
    assert len(points) == 5
    assert all(abs(p.x) <= 0.8 for p in points)


def test_checks_for_point_runs_every_family():
    point = sample_points(seed=3, count=1, digits=20, quick=True)[0]
    jobs = checks_for_point(point)
    assert len(jobs) == 7
    reports = [report for job in jobs for report in job()]
    assert len(reports) == 13
    assert all(report.passed for report in reports)


@pytest.mark.slow
def test_near_one_point_passes():
    point = sample_points(seed=0, count=0, digits=25, near_one_digits=20)[0]
    reports = [report for job in checks_for_point(point) for report in job()]
    assert all(report.passed for report in reports)


def test_compare_needs_relative_agreement(ctx25):
    mp = ctx25.mp
    report = identities._compare("tiny", mp.mpf("8.96e-210"), mp.mpf("3.44e-140"), default_tolerance(ctx25), mp)
    assert report.abs_discrepancy < default_tolerance(ctx25)
    assert not report.passed
    assert report.rel_discrepancy > mp.mpf("0.99")


def test_theta_identities_near_one_agree_relatively():
    ctx = PrecisionContext(20, 30)
    reports = {r.identity_id: r for r in check_theta_identities(0.99, ctx)}
    jacobi = reports["theta_jacobi_cube"]
    assert abs(jacobi.lhs) < ctx.mp.mpf(10) ** -200
    assert jacobi.rel_discrepancy < ctx.mp.mpf(10) ** -15
    assert all(r.passed for r in reports.values())


def test_trivial_bounds_violation_is_relative(ctx25, monkeypatch):
    real_evaluate = identities.evaluate

    def shrunk(t, x, ctx):
        certificate = real_evaluate(t, x, ctx)
        factor = ctx.mp.mpf("1e-40")
        if getattr(t, "imag", 0) != 0:
            factor /= 10
        return replace(certificate, value=certificate.value * factor)

    monkeypatch.setattr(identities, "evaluate", shrunk)
    report = check_trivial_bounds("0.5i", "0.5", ctx25)
    assert report.abs_discrepancy < ctx25.mp.mpf(10) ** -35
    assert report.rel_discrepancy > ctx25.mp.mpf("0.4")
    assert not report.passed
