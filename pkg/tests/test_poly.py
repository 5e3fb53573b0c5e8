"""Polynomial ring laws, gcd, and exact division."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bocher.scalars import Scalar, I
from bocher.symbols import TABLE
from bocher.poly import Poly, PONE, poly_gcd

X1 = Poly.var(TABLE["x1"])
X2 = Poly.var(TABLE["x2"])
X3 = Poly.var(TABLE["x3"])
Y = Poly.var(TABLE["y"])

coeffs = st.integers(min_value=-6, max_value=6).map(Scalar.of)


@st.composite
def polys(draw, vars=(X1, X2, X3), max_terms=4, max_exp=3):
    out = Poly()
    for _ in range(draw(st.integers(0, max_terms))):
        term = Poly.constant(draw(coeffs))
        for v in vars:
            term = term * v ** draw(st.integers(0, max_exp))
        out = out + term
    return out


@settings(max_examples=150, deadline=None)
@given(polys(), polys(), polys())
def test_ring_laws(p, q, r):
    assert p + q == q + p
    assert (p + q) + r == p + (q + r)
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


def test_leading_graded_lex():
    p = X1 * X2 + X3 ** 3
    m, c = p.leading()
    assert m == ((TABLE["x3"].index, 3),)
    p = X1 * X2 - X2 ** 2
    m, c = p.leading()  # x1 earlier than x2, same degree
    assert m == ((TABLE["x1"].index, 1), (TABLE["x2"].index, 1))


def test_derivative():
    p = X1 ** 3 * X2 + 2 * X2
    assert p.derivative(TABLE["x1"]) == 3 * X1 ** 2 * X2
    assert p.derivative(TABLE["x2"]) == X1 ** 3 + Poly.constant(2)


def test_exact_division():
    p = (X1 + X2) * (X1 - X2)
    assert p.div_exact(X1 + X2) == X1 - X2
    with pytest.raises(ValueError):
        (X1 ** 2 + X2).div_exact(X1 + X2)


def test_gcd_basic():
    assert poly_gcd(X1 ** 2 - X2 ** 2, X1 - X2) == X1 - X2
    assert poly_gcd(X1 * X2, X1 * X3) == X1
    assert poly_gcd(X1 + PONE, X2 + PONE) == PONE


def test_gcd_gaussian_factor():
    # x1^2 + x2^2 = (x1 + i x2)(x1 - i x2) over the Gaussian rationals
    s = X1 ** 2 + X2 ** 2
    f = X1 + I * X2
    assert poly_gcd(s, f) == f
    assert s.div_exact(f) == X1 - I * X2


@settings(max_examples=60, deadline=None)
@given(polys(max_terms=3, max_exp=2), polys(max_terms=3, max_exp=2), polys(max_terms=2, max_exp=2))
def test_gcd_divides(p, q, r):
    g = poly_gcd(p * r, q * r)
    if not (p * r).is_zero():
        (p * r).div_exact(g)
    if not (q * r).is_zero():
        (q * r).div_exact(g)
    if not r.is_zero() and not (p.is_zero() and q.is_zero()):
        g.div_exact(poly_gcd(g, r))  # r divides the gcd
