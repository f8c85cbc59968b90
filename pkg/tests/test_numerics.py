from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sectioncert.numerics import (
    DomainViolation,
    PerfectSquareD,
    PoleInEnclosure,
    PrecisionPolicy,
    QuadraticNumber,
    RigorousInterval,
    SurdError,
    ZeroQ,
    compare,
    interval_const_pi,
    interval_fn,
    interval_of_number,
    surd_normalize,
    to_decimal_str,
)
from sectioncert.numerics.quadratic import floor_of, sign_of, sign_of_two_radicals
from sectioncert.verdict import Verdict, less_equal, strictly_less

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)
radicands = st.integers(min_value=2, max_value=10**6).filter(lambda d: math.isqrt(d) ** 2 != d)


def _mp(a, b, D, dps=120):
    with mpmath.workdps(dps):
        return mpmath.mpf(a.numerator) / a.denominator + mpmath.mpf(b.numerator) / b.denominator * mpmath.sqrt(D)


# exact quadratic arithmetic


def test_surd_normalize_keeps_divisible_form():
    s = surd_normalize(4, 2, 14)
    assert (s.P, s.D, s.Q) == (4, 2, 14)
    assert abs(float(s) - (4 + math.sqrt(2)) / 14) < 1e-15


def test_surd_normalize_rescales_when_needed():
    s = surd_normalize(1, 2, 3)
    assert (s.P, s.D, s.Q) == (3, 18, 9)
    assert (s.D - s.P ** 2) % s.Q == 0
    assert compare(s, surd_normalize(3, 18, 9)) == 0


def test_surd_normalize_errors():
    with pytest.raises(ZeroQ):
        surd_normalize(1, 2, 0)
    with pytest.raises(PerfectSquareD) as exc:
        surd_normalize(1, 4, 2)
    assert exc.value.value == Fraction(3, 2)
    with pytest.raises(SurdError):
        surd_normalize(1, -3, 2)


def test_negative_denominator_is_allowed():
    s = surd_normalize(3, 5, -2)
    assert abs(float(s) - (3 + math.sqrt(5)) / -2) < 1e-15
    assert compare(s, 0) < 0


@given(fractions, fractions, radicands)
def test_sign_matches_high_precision(a, b, D):
    v = _mp(a, b, D)
    assume(abs(v) > mpmath.mpf(10) ** -60)
    assert sign_of(a, b, D) == (1 if v > 0 else -1)


@given(fractions, fractions, radicands)
def test_floor_matches_high_precision(a, b, D):
    v = _mp(a, b, D)
    f = int(mpmath.floor(v))
    assume(abs(v - f) > mpmath.mpf(10) ** -60 and abs(v - f - 1) > mpmath.mpf(10) ** -60)
    assert floor_of(a, b, D) == f


@given(fractions, fractions, radicands, fractions, radicands)
def test_two_radical_sign(a, b, D1, c, D2):
    with mpmath.workdps(150):
        v = _mp(a, b, D1, 150) + mpmath.mpf(c.numerator) / c.denominator * mpmath.sqrt(D2)
    assume(abs(v) > mpmath.mpf(10) ** -80)
    assert sign_of_two_radicals(a, b, D1, c, D2) == (1 if v > 0 else -1)


def test_sign_exact_zero():
    assert sign_of(3, -1, 9) == 0
    assert sign_of(Fraction(-2), Fraction(1), 4) == 0
    # 1 + sqrt(2) - sqrt(3 + 2 sqrt(2)) cannot be written here, but sqrt(8) = 2 sqrt(2)
    assert sign_of_two_radicals(0, 2, 2, -1, 8) == 0


@given(fractions, fractions, radicands, fractions, fractions)
def test_field_operations(a, b, D, c, d):
    x = QuadraticNumber(a, b, D)
    y = QuadraticNumber(c, d, D)
    with mpmath.workdps(80):
        xv, yv = _mp(a, b, D, 80), _mp(c, d, D, 80)
        assert abs(float(x * y) - float(xv * yv)) <= 1e-9 * (1 + abs(float(xv * yv)))
        assert compare(x + y - y, x) == 0
        if y.norm() != 0:
            assert compare((x / y) * y, x) == 0


def test_to_surd_negative_radical_coefficient():
    x = QuadraticNumber(Fraction(1, 3), Fraction(-1, 2), 7)
    s = x.to_surd()
    assert compare(s, x) == 0


# intervals


@settings(max_examples=60)
@given(st.fractions(min_value=-50, max_value=50, max_denominator=10**9), st.sampled_from([53, 128, 300]))
def test_interval_functions_enclose_reference(x, prec):
    box = RigorousInterval.point(x, prec)
    with mpmath.workdps(400):
        ref_x = mpmath.mpf(x.numerator) / x.denominator
        refs = {
            "sin": mpmath.sin(ref_x),
            "cos": mpmath.cos(ref_x),
            "arctan": mpmath.atan(ref_x),
        }
        if x >= 0:
            refs["sqrt"] = mpmath.sqrt(ref_x)
        if abs(mpmath.cos(ref_x)) > 1e-6:
            refs["tan"] = mpmath.tan(ref_x)
        # relative condition number of each function scales the allowed width
        cond = {"sin": 1 + abs(ref_x), "cos": 1 + abs(ref_x), "arctan": 1, "sqrt": 1}
        if "tan" in refs:
            cond["tan"] = (1 + abs(ref_x)) * (1 + refs["tan"] ** 2)
        for name, ref in refs.items():
            out = interval_fn(name, box)
            assert out.lo <= ref <= out.hi, name
            tol = (abs(ref) + 1) * cond[name] * mpmath.mpf(2) ** (-prec + 8)
            assert out.width() <= tol, name


def test_pi_enclosure():
    with mpmath.workdps(500):
        for prec in (64, 128, 1024):
            box = interval_const_pi(prec)
            assert box.lo < mpmath.pi < box.hi


def test_tan_pole_and_sqrt_domain():
    half_pi = interval_const_pi(128) / 2
    with pytest.raises(PoleInEnclosure):
        interval_fn("tan", half_pi)
    with pytest.raises(DomainViolation):
        interval_fn("sqrt", RigorousInterval.point(-1, 64))
    with pytest.raises(ValueError):
        interval_fn("exp", RigorousInterval.point(1, 64))


def test_division_by_zero_enclosure():
    with pytest.raises(ZeroDivisionError):
        RigorousInterval.point(1, 64) / RigorousInterval.from_bounds(-1, 1, 64)


@given(fractions, fractions, radicands, st.sampled_from([32, 128, 512]))
def test_interval_of_number_contains_exact_value(a, b, D, prec):
    x = QuadraticNumber(a, b, D)
    box = interval_of_number(x, prec)
    assert box.contains(x)
    assume(x.sign() != 0)
    with mpmath.workdps(prec):
        assert box.width() <= abs(_mp(a, b, D, prec)) * mpmath.mpf(2) ** (-prec + 2)


def test_interval_arithmetic_is_outward():
    third = RigorousInterval.point(Fraction(1, 3), 64)
    total = third + third + third
    assert total.contains(1)
    prod = third * 3
    assert prod.contains(1)
    assert (1 - third).contains(Fraction(2, 3))


def test_decimal_rendering_is_directed():
    box = RigorousInterval.point(Fraction(1, 3), 128)
    lo = Fraction(to_decimal_str(box.lo, 10, "down"))
    hi = Fraction(to_decimal_str(box.hi, 10, "up"))
    assert lo < Fraction(1, 3) < hi
    assert to_decimal_str(RigorousInterval.point(-2, 64).lo, 5, "down") == "-2"
    neg = RigorousInterval.point(Fraction(-1, 3), 64)
    assert Fraction(to_decimal_str(neg.lo, 6, "down")) <= Fraction(-1, 3)


# precision ladder and verdicts


def test_precision_ladder():
    assert list(PrecisionPolicy(128, 8192).ladder()) == [128, 256, 512, 1024, 2048, 4096, 8192]
    assert list(PrecisionPolicy(64, 64).ladder()) == [64]
    assert list(PrecisionPolicy(100, 300).ladder()) == [100, 200, 300]


def test_verdict_three_values():
    a = RigorousInterval.from_bounds(0, 1, 64)
    b = RigorousInterval.from_bounds(2, 3, 64)
    c = RigorousInterval.from_bounds(Fraction(1, 2), Fraction(5, 2), 64)
    assert strictly_less(a, b) is Verdict.TRUE
    assert strictly_less(b, a) is Verdict.FALSE
    assert strictly_less(a, c) is Verdict.UNKNOWN
    assert less_equal(RigorousInterval.point(1, 64), RigorousInterval.point(1, 64)) is Verdict.TRUE
    assert Verdict.all_of([Verdict.TRUE, Verdict.UNKNOWN]) is Verdict.UNKNOWN
    assert Verdict.all_of([Verdict.UNKNOWN, Verdict.FALSE]) is Verdict.FALSE
    with pytest.raises(TypeError):
        bool(Verdict.TRUE)
