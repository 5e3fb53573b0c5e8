"""Parser / printer round trips and error reporting."""

import pytest

from bocher.scalars import Scalar, I
from bocher.symbols import TABLE
from bocher.poly import Poly
from bocher.rational import RatFun
from bocher.exprio import (ParseError, parse_expr, print_expr,
                           parse_operator_terms, format_operator)

X1, X2 = Poly.var(TABLE["x1"]), Poly.var(TABLE["x2"])
X, Y = Poly.var(TABLE["x"]), Poly.var(TABLE["y"])
A1, A2 = Poly.var(TABLE["a1"]), Poly.var(TABLE["a2"])


def test_potential_fragment():
    f = parse_expr("a1/x1^2 + a2/x2^2")
    expect = RatFun(A1, X1 ** 2) + RatFun(A2, X2 ** 2)
    assert f == expect


def test_sqrt_auto_adjoined():
    f = parse_expr("sqrt(2)*x1")
    assert f == RatFun.of(Scalar.sqrt(2) * X1)
    assert parse_expr("sqrt(9/8)") == RatFun.of(Scalar.sqrt(2) * 3 / 4)


def test_imaginary_unit():
    assert parse_expr("I^2") == RatFun.of(-1)
    assert parse_expr("(x1+I*x2)*(x1-I*x2)") == RatFun.of(X1 ** 2 + X2 ** 2)


def test_negative_powers():
    assert parse_expr("x1^-2") == RatFun(Poly.constant(1), X1 ** 2)


def test_errors_carry_position():
    with pytest.raises(ParseError):
        parse_expr("x1 + ")
    with pytest.raises(ParseError):
        parse_expr("nosuch + 1")
    with pytest.raises(ParseError):
        parse_expr("x1 $ x2")


@pytest.mark.parametrize("text", [
    "a1/x1^2 + a2/x2^2",
    "(x1+I*x2)/(x1-I*x2)^3",
    "sqrt(2)*x1 - 1/2",
    "-4*a4/(x^2+y^2+1)^2",
    "x^2*y - y^2*x + 7/3",
    "1/(eps^2*(xp1+I*xp2))",
])
def test_round_trip(text):
    e = parse_expr(text)
    assert parse_expr(print_expr(e)) == e


def test_operator_round_trip():
    terms = parse_operator_terms("x1*d/dx2 - x2*d/dx1")
    assert len(terms) == 2
    text = format_operator(terms)
    assert parse_operator_terms(text) == terms


def test_operator_power_and_normal_order():
    terms = parse_operator_terms("d/dx^2 + a1/x^2")
    orders = {tuple(sorted(d.items())) for _c, d in terms}
    assert ((TABLE["x"].index, 2),) in orders
    with pytest.raises(ParseError):
        parse_operator_terms("d/dx * x")  # not normal ordered
