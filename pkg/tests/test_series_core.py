from fractions import Fraction
from math import comb

from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf
from pytest import mark, raises

from double_taylor.errors import (
    DomainError,
    EndpointError,
    InconsistencyError,
    IntervalMismatchError,
    TruncationError,
)
from double_taylor.series_core import (
    ALL_NONNEG,
    ALL_NONPOS_AFTER_CONST,
    PiLaurent,
    Poly,
    SeriesFn,
    SignKind,
    bernoulli,
    cauchy_product,
    check_precision,
    classify_signs,
    mirror,
    pi,
    poly_eval,
    polynomial_series,
    series_divide,
    series_mul,
    series_value,
    sign_of,
    to_mpf,
    verify_sign_pattern,
)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=50)
coeff_lists = st.lists(fractions, min_size=1, max_size=6)


@mark.parametrize(
    "k, expected",
    [
        (0, Fraction(1)),
        (1, Fraction(-1, 2)),
        (2, Fraction(1, 6)),
        (3, Fraction(0)),
        (4, Fraction(-1, 30)),
        (6, Fraction(1, 42)),
        (10, Fraction(5, 66)),
        (12, Fraction(-691, 2730)),
        (13, Fraction(0)),
    ],
)
def test_bernoulli_values(k, expected):
    assert bernoulli(k) == expected


def test_bernoulli_recurrence():
    for m in range(1, 41):
        assert sum(comb(m + 1, j) * bernoulli(j) for j in range(m + 1)) == 0


def test_bernoulli_negative_index():
    with raises(DomainError):
        bernoulli(-2)


def test_pi_laurent_simplifies_to_fraction():
    sq = PiLaurent.monomial(1, 2)
    inv = PiLaurent.monomial(1, -2)
    product = sq * inv
    assert isinstance(product, Fraction)
    assert product == 1
    assert isinstance(sq - sq, Fraction)


def test_pi_laurent_text():
    assert str(PiLaurent.monomial(Fraction(1, 3), 2) - 4) == "1/3·π^2 - 4"
    assert str(PiLaurent.monomial(2, -1)) == "2·π^-1"
    assert str(PiLaurent.monomial(Fraction(1, 2), 1)) == "1/2·π"


def test_pi_laurent_value():
    with mp.workprec(256):
        value = to_mpf(PiLaurent.monomial(Fraction(1, 4), 2))
        assert abs(value - mp.pi**2 / 4) < mpf(2) ** -250


def test_pi_laurent_inverse():
    half_pi = PiLaurent.monomial(Fraction(1, 2), 1)
    assert 1 / half_pi == PiLaurent.monomial(2, -1)
    with raises(DomainError):
        (PiLaurent.monomial(1, 2) - 4).inverse()


def test_sign_of_pi_laurent():
    assert sign_of(PiLaurent.monomial(1, 2) - 10) == -1
    assert sign_of(PiLaurent.monomial(1, 2) - 9) == 1
    assert sign_of(Fraction(0)) == 0


def test_pi_matches_mpmath():
    with mp.workprec(128):
        assert pi(128) == +mp.pi
    with raises(DomainError):
        pi(32)


def test_check_precision():
    assert check_precision(64) == 64
    with raises(DomainError):
        check_precision(63)


def test_poly_trims_trailing_zeros():
    p = Poly(Fraction(0), (Fraction(1), Fraction(2), Fraction(0)))
    assert p.degree == 1
    assert Poly(Fraction(0), ()).coeffs == (Fraction(0),)


def test_poly_anchor_mismatch():
    p = Poly(Fraction(0), (Fraction(1),))
    q = Poly(Fraction(1), (Fraction(1),))
    with raises(IntervalMismatchError):
        p + q


@given(coeff_lists, coeff_lists)
def test_poly_addition_is_coefficientwise(u, v):
    p = Poly(Fraction(0), tuple(u))
    q = Poly(Fraction(0), tuple(v))
    s = p + q
    for k in range(max(len(u), len(v))):
        assert s.coefficient(k) == p.coefficient(k) + q.coefficient(k)


@given(coeff_lists, fractions, fractions)
def test_reflection_is_an_involution(coeffs, anchor, about):
    p = Poly(anchor, tuple(coeffs))
    assert p.reflected(about).reflected(anchor) == p


@given(coeff_lists, st.fractions(min_value=0, max_value=1))
def test_reflection_values(coeffs, x):
    p = Poly(Fraction(0), tuple(coeffs))
    q = p.reflected(Fraction(1))
    with mp.workprec(256):
        lhs = poly_eval(q, x)
        rhs = poly_eval(p, 1 - x)
        assert abs(lhs - rhs) < mpf(2) ** -200 * (1 + abs(rhs))


def test_poly_eval_horner():
    p = Poly(Fraction(1), (Fraction(1), Fraction(2), Fraction(3)))
    # 1 + 2(x - 1) + 3(x - 1)^2 at x = 3
    assert poly_eval(p, Fraction(3)) == 17


def as_series(coeffs, name="p"):
    return polynomial_series(name, coeffs)


@given(coeff_lists, coeff_lists)
def test_series_mul_commutes(p, q):
    u, v = as_series(p, "u"), as_series(q, "v")
    left = series_mul(u, v, 8).coefficients(8)
    assert left == series_mul(v, u, 8).coefficients(8)


@given(coeff_lists, coeff_lists, coeff_lists)
@settings(max_examples=50)
def test_series_mul_associates(p, q, r):
    u, v, w = as_series(p, "u"), as_series(q, "v"), as_series(r, "w")
    left = series_mul(series_mul(u, v, 8), w, 8)
    right = series_mul(u, series_mul(v, w, 8), 8)
    assert left.coefficients(8) == right.coefficients(8)


def test_series_mul_by_hand():
    p = [Fraction(1), Fraction(-2), Fraction(1, 3)]
    q = [Fraction(2), Fraction(0), Fraction(5)]
    w = series_mul(as_series(p), as_series(q), 6)
    expected = [2, -4, Fraction(17, 3), -10, Fraction(5, 3), 0]
    assert w.coefficients(6) == expected


def test_series_mul_keeps_the_shorter_truncation():
    u = polynomial_series("u", [1, 1])
    v = polynomial_series("v", [1, 2])
    w = series_mul(series_mul(u, v, 3), u, 5)
    assert w.valid_terms == 3
    with raises(TruncationError):
        w.coefficient(3)


@given(coeff_lists, coeff_lists)
def test_series_divide_undoes_product(p, q):
    if q[0] == 0:
        q = [Fraction(1)] + q
    product = cauchy_product(p, q, 8)
    quotient = series_divide(product, q, 8)
    assert quotient == [p[k] if k < len(p) else 0 for k in range(8)]


def test_series_divide_needs_invertible_constant():
    with raises(DomainError):
        series_divide([Fraction(1)], [Fraction(0), Fraction(1)], 4)


def test_series_fn_interval_order():
    with raises(DomainError):
        SeriesFn("bad", Fraction(1), Fraction(1), lambda k: Fraction(0))


def test_end_limit_missing():
    f = polynomial_series("x", [0, 1])
    assert not f.has_endpoint
    with raises(EndpointError):
        f.end_limit()


def test_mirror_is_an_involution():
    f = polynomial_series("p", [1, 2, 3, 4], end_value=Fraction(10))
    g = mirror(f)
    assert g.reflected
    assert g.origin == Fraction(1)
    assert g.coefficients(4) == [1, -2, 3, -4]
    assert [g.distance_coefficient(k) for k in range(4)] == [1, 2, 3, 4]
    back = mirror(g)
    assert not back.reflected
    assert back.coefficients(6) == f.coefficients(6)


def test_series_mul_truncation_and_intervals():
    u = polynomial_series("u", [1, 1], end_value=Fraction(2))
    v = polynomial_series("v", [1, -1], end_value=Fraction(0))
    w = series_mul(u, v, 3)
    assert w.coefficients(3) == [1, 0, -1]
    assert w.end_value == 0
    with raises(TruncationError):
        w.coefficient(3)
    other = polynomial_series("o", [1], right_end=Fraction(2))
    with raises(IntervalMismatchError):
        series_mul(u, other, 3)


def test_series_mul_with_pi():
    u = polynomial_series(
        "pi^2-4x^2", [PiLaurent.monomial(1, 2), 0, -4], end_value=Fraction(0)
    )
    v = polynomial_series("1+x^2/3", [1, 0, Fraction(1, 3)])
    w = series_mul(u, v, 3)
    assert w.coefficient(0) == PiLaurent.monomial(1, 2)
    assert w.coefficient(2) == PiLaurent.monomial(Fraction(1, 3), 2) - 4
    # v has no endpoint, so neither does the product
    assert not w.has_endpoint


def test_series_value(quadratic):
    with mp.workprec(256):
        assert series_value(quadratic, Fraction(1, 2), 3) == mpf(7) / 4


@mark.parametrize(
    "coeffs, kind",
    [
        ([1, 2, 3], SignKind.ALL_NONNEG),
        ([2, -1, -1], SignKind.ALL_NONPOS_AFTER_CONST),
        ([1, -1, 1], SignKind.MIXED),
    ],
)
def test_classify_signs(coeffs, kind):
    f = polynomial_series("p", coeffs)
    assert classify_signs(f, 8).kind is kind


def test_classify_signs_reports_negative_indices(mixed):
    assert classify_signs(mixed, 8).negatives == (1,)


def test_verify_sign_pattern():
    good = polynomial_series("p", [1, 0, 2], sign_pattern=ALL_NONNEG)
    assert verify_sign_pattern(good, 8) is ALL_NONNEG
    bad = polynomial_series("q", [1, -1], sign_pattern=ALL_NONNEG)
    with raises(InconsistencyError):
        verify_sign_pattern(bad, 8)
    also_bad = polynomial_series(
        "r", [1, -1, 1], sign_pattern=ALL_NONPOS_AFTER_CONST
    )
    with raises(InconsistencyError):
        verify_sign_pattern(also_bad, 8)
