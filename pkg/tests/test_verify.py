import csv
import json
from fractions import Fraction

from mpmath import mp, mpf
from pytest import mark, raises

from double_taylor import catalog
from double_taylor.errors import DomainError, EvaluationError
from double_taylor.series_core import PiLaurent, to_mpf
from double_taylor.verify import (
    Curve,
    SampleGrid,
    Spacing,
    Verdict,
    VerifyReport,
    check_best_constants,
    check_chain,
    check_identity12,
    check_interpolation,
    check_nesting,
    check_steckin_example,
    default_grid,
    export_report,
    format_reports,
    format_suites,
    overall,
    run_suite,
    run_suites,
)

P = 256


def constant(name, c):
    return Curve(name, lambda x, p: mpf(c))


def identity(name="x"):
    return Curve(name, lambda x, p: +x)


def unit_grid(count=11):
    return SampleGrid(Fraction(1, 10), Fraction(9, 10), count, Spacing.UNIFORM)


def acceptance_grid():
    return SampleGrid(
        Fraction(1, 100),
        catalog.HALF_PI - Fraction(1, 100),
        101,
        Spacing.UNIFORM,
    )


@mark.parametrize("spacing", list(Spacing))
def test_grid_points(spacing):
    grid = SampleGrid(Fraction(0), Fraction(1), 5, spacing)
    pts = grid.points(P)
    assert len(pts) == 5
    assert pts[0] == 0 and pts[-1] == 1
    assert all(u < v for u, v in zip(pts, pts[1:]))


def test_grid_validation():
    with raises(DomainError):
        SampleGrid(Fraction(0), Fraction(1), 2)
    with raises(DomainError):
        SampleGrid(Fraction(1), Fraction(1), 5)


def test_default_grid(wilker):
    grid = default_grid(wilker.series)
    assert grid.count == 101
    assert grid.spacing is Spacing.CHEBYSHEV
    assert grid.lo == PiLaurent.monomial(Fraction(1, 400), 1)


def test_chain_pass():
    report = check_chain(
        [constant("zero", 0), identity(), constant("one", 1)], unit_grid()
    )
    assert report.verdict is Verdict.PASS
    assert report.empirical
    assert len(report.samples) == 11
    with mp.workprec(P):
        tenth = to_mpf(Fraction(1, 10))
        assert abs(report.min_margin - tenth) < mpf(2) ** -200


def test_identical_curves_are_inconclusive():
    report = check_chain([identity("a"), identity("b")], unit_grid())
    assert report.verdict is Verdict.INCONCLUSIVE


def test_swapped_pair_fails():
    report = check_chain([constant("one", 1), identity()], unit_grid())
    assert report.verdict is Verdict.FAIL


def test_equality_relation():
    curves = [constant("zero", 0), identity("a"), identity("b")]
    report = check_chain(curves, unit_grid(), relations=["<", "="])
    assert report.verdict is Verdict.PASS
    with raises(DomainError):
        check_chain(curves, unit_grid(), relations=["=", "="])


def test_evaluation_error_carries_x():
    def broken(x, p):
        if x > mpf("0.5"):
            raise DomainError("outside")
        return x

    with raises(EvaluationError) as e:
        check_chain([constant("zero", 0), Curve("b", broken)], unit_grid())
    assert e.value.x > mpf("0.5")


def test_h1_chain_on_acceptance_grid():
    report = check_nesting(
        catalog.lookup("h1"), [0, 2, 4, 6, 8], acceptance_grid(), P
    )
    assert report.verdict is Verdict.PASS
    assert report.curves[5] == "h1"


def test_wilker_chain_with_equal_neighbours(wilker):
    report = check_nesting(wilker, [0, 2, 4, 6, 8, 10], None, P)
    # T_0 and T_2 coincide for this series
    assert report.curves[:2] == ("T_0", "T_2")
    assert report.verdict is Verdict.PASS
    assert report.min_margin > mpf("1e-30")


def test_mirrored_steckin_chain():
    entry = catalog.lookup("steckin-g").mirrored()
    report = check_nesting(entry, [1, 3, 5, 7], None, P)
    assert report.verdict is Verdict.PASS
    assert report.curves[0] == "S_1"


@mark.parametrize("name", ["wilker", "h1"])
def test_identity12(name):
    f = catalog.lookup(name).series
    report = check_identity12(f, 8, 200, seed=7, precision_bits=P)
    assert report.verdict is Verdict.PASS
    assert len(report.samples) == 200
    assert report.details["max_residual"] < mpf(2) ** -220


def test_identity12_residual_scales_with_precision(wilker):
    low = check_identity12(wilker.series, 8, 50, 3, 256)
    high = check_identity12(wilker.series, 8, 50, 3, 512)
    assert high.details["max_residual"] <= (
        low.details["max_residual"] * mpf(2) ** -200
    )


def test_identity12_is_deterministic(h1):
    a = check_identity12(h1.series, 8, 20, 11, P)
    b = check_identity12(h1.series, 8, 20, 11, P)
    assert format_reports([a], "json") == format_reports([b], "json")


@mark.parametrize(
    "name, lower, upper",
    [
        ("h1", Fraction(1, 3), PiLaurent.monomial(4, -2)),
        ("h2", Fraction(2, 15), PiLaurent.monomial(16, -4)),
        ("wilker", Fraction(2), PiLaurent.monomial(Fraction(1, 4), 2)),
        ("steckin-g", PiLaurent.monomial(2, -1), Fraction(0)),
    ],
)
def test_best_constants(name, lower, upper):
    entry = catalog.lookup(name)
    report = check_best_constants(
        entry.series, entry.oracle, lower, upper, precision_bits=P
    )
    assert report.verdict is Verdict.PASS
    assert len(report.samples) == 6


def test_wrong_constant_fails(h1):
    report = check_best_constants(
        h1.series, h1.oracle, Fraction(1, 2), PiLaurent.monomial(4, -2)
    )
    assert report.verdict is Verdict.FAIL


def test_steckin_example():
    report = check_steckin_example(precision_bits=P)
    assert report.verdict is Verdict.PASS
    assert report.curves == ("Q_1", "S_1", "g(pi/2-x)", "T_1", "R_1")
    slope = report.details["improvement_slope"]
    assert slope == Fraction(1, 2) - PiLaurent.monomial(4, -2)
    assert abs(report.details["improvement_slope_decimal"] - 0.0947) < 1e-4
    assert report.details["improvement_residual"] < mpf(2) ** -200


def test_steckin_lines_meet_at_the_end():
    report = check_steckin_example(precision_bits=P)
    last = report.samples[-1]
    with mp.workprec(P):
        target = 2 / mp.pi
        assert all(abs(v - target) < mpf("0.01") for v in last.values)


@mark.parametrize("name", ["wilker", "h1", "cusa"])
def test_interpolation(name):
    f = catalog.lookup(name).series
    report = check_interpolation(f, range(9), P)
    assert report.verdict is Verdict.PASS
    for s in report.samples:
        value, end = s.values
        assert abs(value - end) <= mpf(2) ** -240 * abs(end)


def test_export_json(tmp_path, h1):
    report = check_identity12(h1.series, 4, 10, 0, P)
    path = tmp_path / "report.json"
    export_report(report, "json", str(path))
    data = json.loads(path.read_text())
    assert data["verdict"] == "PASS"
    for key in ("subject", "precision_bits", "guard", "min_margin"):
        assert key in data
    assert set(data["samples"][0]) == {"x", "values", "margin"}
    with mp.workprec(P):
        for raw, s in zip(data["samples"], report.samples):
            parsed = mpf(raw["margin"])
            assert abs(parsed - s.margin) <= mpf("1e-38") * abs(s.margin)


def test_export_csv_shape(tmp_path):
    curves = [
        constant("zero", 0),
        identity("a"),
        Curve("b", lambda x, p: x + 1),
        constant("three", 3),
    ]
    grid = SampleGrid(Fraction(0), Fraction(1), 101, Spacing.UNIFORM)
    report = check_chain(curves, grid)
    path = tmp_path / "chain.csv"
    export_report(report, "csv", str(path))
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["x", "zero", "a", "b", "three"]
    assert len(rows) == 102
    assert all(len(row) == 5 for row in rows)


def test_overall():
    def fake(verdict):
        return VerifyReport("s", (), (), mpf(0), mpf(0), verdict, P)

    assert overall([fake(Verdict.PASS)]) is Verdict.PASS
    assert (
        overall([fake(Verdict.PASS), fake(Verdict.INCONCLUSIVE)])
        is Verdict.INCONCLUSIVE
    )
    assert (
        overall([fake(Verdict.INCONCLUSIVE), fake(Verdict.FAIL)])
        is Verdict.FAIL
    )


def test_run_suite_wilker():
    reports = run_suite("wilker", P, 41)
    assert [r.verdict for r in reports] == [Verdict.PASS] * 4
    assert reports[0].subject == "wilker T_4 < f < S_4"


def test_run_suite_unknown():
    with raises(DomainError):
        run_suite("nope")


def test_identity12_matches_closed_form_for_degree_zero(quadratic):
    report = check_identity12(quadratic, 0, 5, 1, P)
    assert report.verdict is Verdict.PASS
    with mp.workprec(P):
        for s in report.samples:
            # S_0 - S_1 = (1 - x)(f(1-) - c_0) = 2(1 - x)
            assert abs(s.values[1] - 2 * (1 - s.x)) < mpf(2) ** -240
            assert to_mpf(s.x) < 1


@mark.parametrize("name", ["h1", "h2", "h3", "wilker", "cusa"])
def test_nonnegative_entries_nest_on_default_grid(name):
    entry = catalog.lookup(name)
    report = check_nesting(entry, [0, 2, 4, 6], None, P)
    assert report.verdict is Verdict.PASS
    assert report.curves[4] == name
    assert len(report.samples) == 101


def test_run_suite_chains_covers_cusa():
    reports = run_suite("chains", P, 41)
    assert [r.subject for r in reports] == [
        "chain h1 0,2,4,6,8",
        "chain wilker 0,2,4,6,8,10",
        "chain cusa 0,2,4,6",
        "chain steckin-g 1,3,5,7",
    ]
    assert overall(reports) is Verdict.PASS


def test_suites_are_grouped():
    results = run_suites(["steckin", "interpolation"], P, 21)
    assert [s.name for s in results] == ["steckin", "interpolation"]
    assert [len(s.reports) for s in results] == [1, 3]
    data = json.loads(format_suites(results, "json"))
    assert data["verdict"] == "PASS"
    assert [s["suite"] for s in data["suites"]] == [
        "steckin",
        "interpolation",
    ]
    assert data["suites"][1]["reports"][2]["subject"] == "interpolation cusa"
    text = format_suites(results, "text")
    assert text.startswith("[steckin] PASS\nsteckin: PASS")
