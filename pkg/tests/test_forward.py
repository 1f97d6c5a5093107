from fractions import Fraction
from math import factorial

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import (
    ODE_CONST,
    ODE_EXP,
    ODE_H,
    ODE_ONE_OVER_1PX,
    ODE_ONE_OVER_2PX,
    ODE_SQRT,
    REC_H,
    n,
    sqrt_integral,
    x,
)
from holomellin import (
    DerivAtOne,
    DiffOp,
    Poly,
    RecOp,
    apply_recop,
    expand,
    mellin_of_term,
    normalize_recop,
    numeric_boundary,
    numeric_mellin,
    ode_to_mellin_rec,
    quad_mellin,
)
from holomellin.algebra import falling_factorial
from holomellin.errors import HolomellinError


def P(cs):
    return Poly(cs, "n")


def test_mellin_of_term_examples():
    img = mellin_of_term(0, 0)
    assert img.shifts == {0: P([1])} and img.inhom == {}
    img = mellin_of_term(3, 1)
    assert img.shifts == {2: -(n + 3)} and img.inhom == {DerivAtOne(0): P([1])}
    img = mellin_of_term(1, 1)
    assert img.shifts == {0: -(n + 1)} and img.inhom == {DerivAtOne(0): P([1])}


def test_mellin_of_term_rejects_negative():
    with pytest.raises((HolomellinError, ValueError)):
        mellin_of_term(-1, 0)
    with pytest.raises((HolomellinError, ValueError)):
        mellin_of_term(0, -1)


@given(st.integers(0, 6), st.integers(0, 6))
def test_shift_support(m, p):
    img = mellin_of_term(m, p)
    ((k, c),) = img.shifts.items()
    assert k == m - p
    assert c.degree == p
    assert c == falling_factorial(m, p).scale((-1) ** p)


def _one_over_1px_deriv(p):
    return lambda t: (-1) ** p * factorial(p) / (1 + t) ** (p + 1)


def _image_value(img, n0, moment, boundary):
    total = mpmath.mpf(0)
    for k, c in img.shifts.items():
        total += c(n0) * moment(n0 + k)
    for sym, r in img.inhom.items():
        total += r(n0) * boundary[sym.index]
    return total


@pytest.mark.parametrize("m", range(4))
@pytest.mark.parametrize("p", range(4))
def test_term_identity_numeric(m, p):
    f = _one_over_1px_deriv(0)
    fp = _one_over_1px_deriv(p)
    boundary = {j: _one_over_1px_deriv(j)(1) for j in range(p)}
    moment = lambda k: quad_mellin(f, k).value
    img = mellin_of_term(m, p)
    for n0 in range(p, 11):
        lhs = quad_mellin(lambda t: t**m * fp(t), n0).value
        rhs = _image_value(img, n0, moment, boundary)
        assert abs(lhs - rhs) < 1e-6, (m, p, n0)


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 10))
@settings(max_examples=40, deadline=None)
def test_term_identity_series(m, p, n0):
    # independent of quadrature: integrate the differentiated Taylor series
    if n0 + m - p < 0:
        return
    s = expand(ODE_ONE_OVER_2PX, [Fraction(1, 2)], 400, exact=False)
    cs = [float(c) for c in s.coeffs]
    deriv = [cs[k] * float(falling_factorial(0, p)(k)) for k in range(len(cs))]
    lhs = sum(d / (n0 + m + k - p + 1) for k, d in enumerate(deriv) if k >= p)
    f = lambda t: 1 / (2 + t)
    boundary = {j: (-1) ** j * factorial(j) / 3.0 ** (j + 1) for j in range(p)}
    moment = lambda k: quad_mellin(f, k).value
    rhs = _image_value(mellin_of_term(m, p), n0, moment, boundary)
    assert abs(lhs - float(rhs)) < 1e-6


def test_forward_sqrt_operator():
    rec = ode_to_mellin_rec(ODE_SQRT)
    top = (n + 3) * (2 * n + 7)
    assert rec == RecOp(
        (-2 * (n + 1) * (n + 2), 3 * (n + 2), top), {DerivAtOne(0): P([-6])}
    )
    f1 = float(sqrt_integral(1))
    assert abs(f1 - float(-2 + 2 * mpmath.sqrt(2) * mpmath.atanh(1 / mpmath.sqrt(2)))) < 1e-12
    seq = [quad_mellin(sqrt_integral, k).value for k in range(23)]
    res = apply_recop(rec, seq, {DerivAtOne(0): f1})
    assert max(abs(r) for r in res) < 1e-6


def test_forward_h_operator():
    # converted as written; removing the content x(1-x) gives a lower-order image
    rec = ode_to_mellin_rec(ODE_H, normalize_input=False)
    assert rec.homogeneous_part() == normalize_recop(REC_H)
    s = expand(ODE_ONE_OVER_1PX, [1], 64)
    seq = [numeric_mellin(s, k).value for k in range(30)]
    bvals = {sym: numeric_boundary(s, sym.index).value for sym in rec.inhom}
    assert max(abs(r) for r in apply_recop(rec, seq, bvals)) < 1e-6


def test_forward_constant():
    rec = ode_to_mellin_rec(ODE_CONST)
    assert str(rec) == "(n + 1) - f(1)"
    seq = [1.0 / (k + 1) for k in range(8)]
    assert max(abs(r) for r in apply_recop(rec, seq, {DerivAtOne(0): 1.0})) < 1e-15


CORPUS = [
    (ODE_ONE_OVER_1PX, [1]),
    (ODE_ONE_OVER_2PX, ["1/2"]),
    (ODE_EXP, [1]),
    (ODE_CONST, [3]),
    (ODE_H, [1]),
    (DiffOp((2, x + 1)), [1]),
    (DiffOp((Poly([], "x"), 2 + x * x, Poly([1], "x"))), [1, 0]),
]


@pytest.mark.parametrize("ode,init", CORPUS, ids=lambda v: str(v))
def test_forward_soundness(ode, init):
    s = expand(ode, init, 128)
    rec = ode_to_mellin_rec(ode)
    seq = [numeric_mellin(s, k, tol=1e-10).value for k in range(21 + rec.order)]
    bvals = {sym: numeric_boundary(s, sym.index, tol=1e-9).value for sym in rec.inhom}
    res = apply_recop(rec, seq, bvals)
    assert max(abs(r) for r in res) < 1e-6
