"""Field laws and radical canonicalisation for exact scalars."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bocher.scalars import Scalar, I, ZERO, ONE, adjoin_radical, squarefree_split

rationals = st.builds(
    Fraction,
    st.integers(min_value=-40, max_value=40),
    st.integers(min_value=1, max_value=12),
)


@st.composite
def scalars(draw):
    out = Scalar.of(draw(rationals))
    out = out + draw(rationals) * I
    out = out + draw(rationals) * Scalar.sqrt(2)
    out = out + draw(rationals) * Scalar.sqrt(3) * I
    return out


def test_defining_relations():
    assert Scalar.sqrt(2) * Scalar.sqrt(2) == Scalar.of(2)
    assert I * I == Scalar.of(-1)
    assert adjoin_radical(-1) == I


def test_squarefree_core_reuse():
    # sqrt(8) = 2*sqrt(2): same basis element as sqrt(2)
    assert adjoin_radical(8) == 2 * Scalar.sqrt(2)
    assert adjoin_radical(Fraction(9, 8)) == Fraction(3, 4) * Scalar.sqrt(2)
    assert adjoin_radical(12) == 2 * Scalar.sqrt(3)
    assert squarefree_split(72) == (6, 2)


def test_mixed_radical_products():
    # sqrt(2)*sqrt(6) = 2*sqrt(3)
    assert Scalar.sqrt(2) * Scalar.sqrt(6) == 2 * Scalar.sqrt(3)
    assert Scalar.sqrt(-2) * Scalar.sqrt(-2) == Scalar.of(-2)
    assert Scalar.sqrt(-2) == I * Scalar.sqrt(2)


def test_inverse_examples():
    z = 1 + I
    assert z * z.inverse() == ONE
    w = Scalar.sqrt(2) + Scalar.sqrt(3) * I + Fraction(1, 7)
    assert w * w.inverse() == ONE
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_conjugate():
    z = Fraction(2, 3) + 5 * I + Scalar.sqrt(2) * I
    assert z.conjugate().conjugate() == z
    assert (z * z.conjugate()).conjugate() == z * z.conjugate()


@settings(max_examples=200, deadline=None)
@given(scalars(), scalars(), scalars())
def test_field_laws(u, v, w):
    assert (u + v) + w == u + (v + w)
    assert u + v == v + u
    assert u * v == v * u
    assert (u * v) * w == u * (v * w)
    assert u * (v + w) == u * v + u * w
    assert u + ZERO == u
    assert u * ONE == u


@settings(max_examples=100, deadline=None)
@given(scalars())
def test_inverse_law(u):
    if not u.is_zero():
        assert u * u.inverse() == ONE
