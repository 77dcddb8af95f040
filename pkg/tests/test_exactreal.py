import math
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brjuno.errors import DomainError
from brjuno.exactreal import (
    MPFloat,
    QuadraticSurd,
    _sign_a_plus_b_sqrt,
    _squarefree,
    as_real,
    golden_mean,
    parse_real,
    to_mpf,
)


def test_canonical_form():
    s = QuadraticSurd(2, 2, 8, 4)  # (2 + 2*sqrt(8))/4 = (1 + 2*sqrt(2))/2
    assert (s.a, s.b, s.d, s.c) == (1, 2, 2, 2)
    assert QuadraticSurd(0, 1, 4, 1) == 2  # sqrt(4) folds
    assert QuadraticSurd(3, 0, 7, 6) == Fraction(1, 2)  # b=0 clears d
    t = QuadraticSurd(1, 1, 2, -3)  # negative denominator flips
    assert t.c == 3 and t.a == -1 and t.b == -1
    with pytest.raises(ZeroDivisionError):
        QuadraticSurd(1, 1, 2, 0)
    with pytest.raises(DomainError):
        QuadraticSurd(1, 1, -2, 1)


def test_squarefree():
    assert _squarefree(8) == (2, 2)
    assert _squarefree(45) == (3, 5)
    assert _squarefree(49) == (7, 1)
    assert _squarefree(30) == (1, 30)


def test_golden_is_quadratic_root():
    g = golden_mean()
    assert g * g + g - 1 == 0
    assert 1 / g == g + 1
    assert g.conjugate() * g == -1  # norm of (sqrt5-1)/2 times sign


def test_arithmetic_exact():
    r2 = QuadraticSurd(0, 1, 2, 1)
    assert (r2 - 1) * (r2 + 1) == 1
    assert (r2 / 2) * 2 == r2
    assert r2**2 == 2
    assert (1 + r2) ** 2 == 3 + 2 * r2
    assert abs(1 - r2) == r2 - 1
    assert QuadraticSurd(1, 1, 5, 2) + Fraction(1, 2) == QuadraticSurd(2, 1, 5, 2)


def test_mixed_fields_raise():
    r2 = QuadraticSurd(0, 1, 2, 1)
    r3 = QuadraticSurd(0, 1, 3, 1)
    with pytest.raises(DomainError):
        r2 + r3
    with pytest.raises(DomainError):
        r2 < r3


def test_floor():
    g = golden_mean()
    assert math.floor(g) == 0
    assert math.floor(-g) == -1
    assert math.floor(QuadraticSurd(5, 1, 2, 3)) == 2  # (5+sqrt2)/3 ~ 2.138
    assert math.floor(QuadraticSurd(0, 1, 2, 1) * 5) == 7  # 5 sqrt2 ~ 7.07
    assert math.floor(QuadraticSurd(7, 0, 0, 2)) == 3
    # exact integer hit
    assert math.floor(QuadraticSurd(0, 2, 9, 3)) == 2


def test_comparisons_and_hash():
    g = golden_mean()
    assert g < Fraction(2, 3)
    assert g > Fraction(3, 5)
    assert Fraction(1, 2) < g < 1
    half = QuadraticSurd(1, 0, 0, 2)
    assert half == Fraction(1, 2)
    assert hash(half) == hash(Fraction(1, 2))
    assert g == QuadraticSurd(-1, 1, 5, 2)
    assert hash(g) == hash(QuadraticSurd(-2, 2, 5, 4))


def test_reciprocal_and_pow():
    g = golden_mean()
    assert g.reciprocal() == g + 1
    assert g**-2 == (g + 1) ** 2
    assert g**0 == 1
    with pytest.raises(ZeroDivisionError):
        QuadraticSurd(0).reciprocal()


def test_str_parse_roundtrip():
    cases = [
        golden_mean(),
        QuadraticSurd(0, 1, 2, 1),
        QuadraticSurd(0, 3, 2, 4),
        QuadraticSurd(-2, -3, 7, 5),
        QuadraticSurd(4, 0, 0, 6),
    ]
    for s in cases:
        assert parse_real(str(s)) == s or parse_real(str(s)) == s.as_fraction()


def test_parse_real_forms():
    assert parse_real("7/10") == Fraction(7, 10)
    assert parse_real("-3") == Fraction(-3)
    assert parse_real("0.125") == Fraction(1, 8)
    assert parse_real("1.5e-3") == Fraction(3, 2000)
    assert parse_real("sqrt(2)-1") == QuadraticSurd(-1, 1, 2, 1)
    assert parse_real("(sqrt(5)-1)/2") == golden_mean()
    assert parse_real("(1+sqrt(5))/2") == golden_mean() + 1
    assert parse_real("3*sqrt(2)/4") == QuadraticSurd(0, 3, 2, 4)
    assert parse_real("−1/2") == Fraction(-1, 2)  # unicode minus
    with pytest.raises(DomainError):
        parse_real("sqrt(2)+sqrt(3)")
    with pytest.raises(DomainError):
        parse_real("banana")


def test_parse_real_mpfloat():
    x = parse_real("0.7@200")
    assert isinstance(x, MPFloat)
    assert x.bits == 200
    assert abs(float(x) - 0.7) < 1e-15
    assert x.err <= mp.mpf(2) ** -198
    y = parse_real("(sqrt(5)-1)/2@100")
    assert isinstance(y, MPFloat) and abs(float(y) - 0.6180339887498949) < 1e-15


def test_as_real_float_is_exact_binary():
    assert as_real(0.5) == Fraction(1, 2)
    assert as_real(0.1) == Fraction(3602879701896397, 36028797018963968)
    with pytest.raises(DomainError):
        as_real(float("nan"))
    with pytest.raises(DomainError):
        as_real(True)


def test_to_mpf_precision():
    g = golden_mean()
    v = to_mpf(g, 200)
    ref = (mp.mpf(5) ** mp.mpf("0.5") - 1) / 2
    with mp.workprec(210):
        ref = (mp.sqrt(5) - 1) / 2
        assert abs(v - ref) < mp.mpf(2) ** -195


@given(
    a=st.integers(-30, 30),
    b=st.integers(-12, 12),
    d=st.integers(0, 40),
    c=st.integers(1, 20),
)
@settings(max_examples=150, deadline=None)
def test_surd_float_consistency(a, b, d, c):
    s = QuadraticSurd(a, b, d, c)
    want = (a + b * math.sqrt(d)) / c
    assert abs(float(s) - want) < 1e-9 * max(1.0, abs(want))
    # canonical invariants
    assert s.c > 0
    assert _squarefree(s.d)[0] == 1
    assert (s.b == 0) == (s.d == 0)
    # floor agrees with float floor away from ties
    fl = math.floor(s)
    assert fl <= float(s) + 1e-9 and float(s) - 1 < fl + 1e-9


@given(
    a=st.integers(-40, 40), b=st.integers(-40, 40), d=st.sampled_from([0, 2, 3, 5, 7, 11])
)
@settings(max_examples=200, deadline=None)
def test_sign_helper(a, b, d):
    got = _sign_a_plus_b_sqrt(a, b, d)
    v = a + b * math.sqrt(d)
    if abs(v) > 1e-9:
        assert got == (1 if v > 0 else -1)
    else:
        assert got == 0 or abs(v) < 1e-9


@given(
    a1=st.integers(-10, 10),
    b1=st.integers(-6, 6),
    a2=st.integers(-10, 10),
    b2=st.integers(-6, 6),
    c1=st.integers(1, 8),
    c2=st.integers(1, 8),
)
@settings(max_examples=150, deadline=None)
def test_field_arithmetic_props(a1, b1, a2, b2, c1, c2):
    d = 5
    s = QuadraticSurd(a1, b1, d, c1)
    t = QuadraticSurd(a2, b2, d, c2)
    assert s + t == t + s
    assert s * t == t * s
    assert s + t - t == s
    if t != 0:
        assert (s / t) * t == s
    lhs = float(s * t)
    rhs = float(s) * float(t)
    assert abs(lhs - rhs) < 1e-7 * max(1.0, abs(rhs))
