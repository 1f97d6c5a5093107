from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holomellin.algebra import (
    Poly,
    RationalFunction,
    falling_factorial,
    nullspace,
    poly_arith,
    poly_gcd,
    poly_shift,
    rational_roots,
)
from holomellin.errors import HolomellinError, VariableMismatchError

x = Poly.gen("x")
n = Poly.gen("n")

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, var="x", max_degree=4):
    return Poly(draw(st.lists(small, max_size=max_degree + 1)), var)


def test_scalar_normal_form():
    assert Fraction(6, -4) == Fraction(-3, 2)
    p = Poly([Fraction(2, 4), 0, 0], "x")
    assert p.coeffs == (Fraction(1, 2),)
    assert Poly([], "x").is_zero() and Poly([0, 0], "x").degree == -1


def test_poly_arith_examples():
    assert poly_arith(x + 1, x - 1, "mul") == x * x - 1
    assert poly_arith(2 - x - x * x, x * x + x - 2, "add").is_zero()
    assert poly_arith(n + 1, n + 2, "mul") == Poly([2, 3, 1], "n")


def test_poly_arith_rejects_mixed_variables():
    with pytest.raises(VariableMismatchError):
        poly_arith(x, n, "add")


def test_poly_gcd_examples():
    assert poly_gcd(x * x - 1, x - 1) == x - 1
    assert poly_gcd(x, x + 1) == Poly([1], "x")
    assert poly_gcd(2 * x + 2, 4 * x + 4) == x + 1
    with pytest.raises(HolomellinError):
        poly_gcd(Poly([], "x"), Poly([], "x"))


def test_poly_shift_examples():
    assert poly_shift(n * n, 1) == n * n + 2 * n + 1
    assert poly_shift(n + 3, -3) == n
    assert poly_shift(Poly([5], "n"), 7) == Poly([5], "n")


def test_falling_factorial_examples():
    assert falling_factorial(3, 2) == n * n + 5 * n + 6
    assert falling_factorial(0, 0) == Poly([1], "n")
    assert falling_factorial(1, 3) == n**3 - n
    with pytest.raises(HolomellinError):
        falling_factorial(0, -1)


@pytest.mark.parametrize("m", range(-3, 7))
@pytest.mark.parametrize("p", range(0, 7))
def test_falling_factorial_matches_factorial_quotient(m, p):
    ff = falling_factorial(m, p)
    for k in range(max(p - m, 0), 21):
        assert ff(k) == factorial(k + m) // factorial(k + m - p)


def test_rational_roots_examples():
    assert rational_roots(x - x**3) == {Fraction(-1): 1, Fraction(0): 1, Fraction(1): 1}
    assert rational_roots(x * x + 1) == {}
    assert rational_roots((2 + x) ** 2) == {Fraction(-2): 2}
    assert rational_roots(6 * x * x - x - 1) == {Fraction(-1, 3): 1, Fraction(1, 2): 1}
    with pytest.raises(HolomellinError):
        rational_roots(Poly([], "x"))


def test_poly_str():
    assert str(x**3 - x) == "x^3 - x"
    assert str(Poly([0, 1, Fraction(1, 2)], "n")) == "1/2*n^2 + n"
    assert str(-(x * x) - 3) == "-x^2 - 3"
    assert str(Poly([], "x")) == "0"


def test_rational_function_normal_form():
    r = RationalFunction(2 * x + 2, 4 * x * x - 4)
    assert r.den == x - 1 and r.num == Poly([Fraction(1, 2)], "x")
    assert RationalFunction(x, -x - 1) == RationalFunction(-x, x + 1)
    with pytest.raises(ZeroDivisionError):
        RationalFunction(x, Poly([], "x"))


def test_rational_function_calculus():
    r = RationalFunction(Poly([1], "x"), x + 1)
    assert r.derivative() == RationalFunction(Poly([-1], "x"), (x + 1) ** 2)
    assert r.shift(1) == RationalFunction(Poly([1], "x"), x + 2)
    assert r * (x + 1) == RationalFunction(Poly([1], "x"))
    assert (r - r).is_zero()


def test_nullspace():
    basis = nullspace([[1, 1, 0], [0, 0, 1]], 3)
    assert basis == [[-1, 1, 0]]
    assert nullspace([[1, 0], [0, 1]], 2) == []


@given(polys(), polys())
def test_add_sub_roundtrip(a, b):
    assert poly_arith(poly_arith(a, b, "add"), b, "sub") == a


@given(polys(), polys(), polys())
@settings(max_examples=50)
def test_ring_laws(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(polys("n"), st.integers(-6, 6))
def test_shift_inverse(p, k):
    assert poly_shift(poly_shift(p, k), -k) == p


@given(polys("n"), st.integers(-4, 4), st.integers(-5, 5))
def test_shift_is_substitution(p, k, t):
    assert p.shift(k)(t) == p(t + k)


@given(polys(), polys())
@settings(max_examples=80)
def test_gcd_divides_both(a, b):
    if a.is_zero() and b.is_zero():
        return
    g = poly_gcd(a, b)
    assert g.lc == 1
    assert (a % g).is_zero() and (b % g).is_zero()


@given(polys(), polys())
def test_divmod_identity(a, b):
    if b.is_zero():
        return
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.degree < b.degree


@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=3), min_size=1, max_size=4))
def test_rational_roots_recovers_constructed_roots(roots):
    p = Poly([1], "x")
    for r in roots:
        p = p * Poly([-r, 1], "x")
    found = rational_roots(p)
    expected = {}
    for r in roots:
        expected[r] = expected.get(r, 0) + 1
    assert found == expected
