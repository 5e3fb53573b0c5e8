"""Null-cone and sphere quadric reduction."""

import pytest
from hypothesis import given, settings, strategies as st

from bocher.scalars import I
from bocher.symbols import TABLE
from bocher.poly import Poly
from bocher.rational import RatFun
from bocher.quadric import Quadric, reduce_mod_quadric, equal_mod_quadric

X1, X2, X3, X4 = (Poly.var(TABLE[n]) for n in ("x1", "x2", "x3", "x4"))
S1, S2, S3 = (Poly.var(TABLE[n]) for n in ("s1", "s2", "s3"))

CONE = Quadric(X1 ** 2 + X2 ** 2 + X3 ** 2 + X4 ** 2, TABLE["x4"])
SPHERE = Quadric(S1 ** 2 + S2 ** 2 + S3 ** 2 - 1, TABLE["s3"])


def test_defining_relation():
    assert reduce_mod_quadric(X4 ** 2, CONE) == -(X1 ** 2) - X2 ** 2 - X3 ** 2
    assert reduce_mod_quadric(X1 ** 2 + X2 ** 2 + X3 ** 2 + X4 ** 2, CONE).is_zero()


def test_product_reduction():
    # (x3 + i x4)(x3 - i x4) = x3^2 + x4^2 = -(x1^2 + x2^2) on the cone
    lhs = (X3 + I * X4) * (X3 - I * X4)
    rhs = -(X1 + I * X2) * (X1 - I * X2)
    assert reduce_mod_quadric(lhs - rhs, CONE).is_zero()


def test_idempotent():
    p = X4 ** 5 * X1 + X4 ** 2 - X3 * X4 ** 3
    r = reduce_mod_quadric(p, CONE)
    assert reduce_mod_quadric(r, CONE) == r
    assert r.degree(TABLE["x4"]) < 2


def test_equal_mod_quadric():
    f = RatFun(Poly.constant(1), X3 ** 2 + X4 ** 2)
    g = RatFun(Poly.constant(-1), X1 ** 2 + X2 ** 2)
    assert equal_mod_quadric(f, g, CONE)
    assert equal_mod_quadric(f, f, CONE)
    assert not equal_mod_quadric(f, -g, CONE)


def test_sphere_relation():
    f = RatFun(S1 ** 2 + S2 ** 2, Poly.constant(1))
    g = RatFun(1 - S3 ** 2, Poly.constant(1))
    assert equal_mod_quadric(f, g, SPHERE)


def test_denominator_in_ideal_rejected():
    bad = RatFun(Poly.constant(1), X1 ** 2 + X2 ** 2 + X3 ** 2 + X4 ** 2)
    with pytest.raises(ZeroDivisionError):
        equal_mod_quadric(bad, bad, CONE)


@st.composite
def cone_polys(draw):
    out = Poly()
    vars = (X1, X2, X3, X4)
    for _ in range(draw(st.integers(0, 3))):
        term = Poly.constant(draw(st.integers(-4, 4)))
        for v in vars:
            term = term * v ** draw(st.integers(0, 2))
        out = out + term
    return out


@settings(max_examples=60, deadline=None)
@given(cone_polys(), cone_polys())
def test_reduction_is_multiplicative(p, q):
    lhs = CONE.reduce(p * q)
    rhs = CONE.reduce(CONE.reduce(p) * CONE.reduce(q))
    assert lhs == rhs
