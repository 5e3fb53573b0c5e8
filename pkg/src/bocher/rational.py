"""Rational functions: quotients of sparse polynomials in canonical form.

Canonical form: gcd(num, den) is a unit and the denominator has leading
coefficient 1 under the graded-lex order, so equality is structural.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import Scalar, ONE as SONE
from .symbols import Symbol
from .poly import Poly, PONE, poly_gcd, mono_gcd, mono_div


class RatFun:
    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly, _normal: bool = False):
        if _normal:
            self.num, self.den = num, den
        else:
            self.num, self.den = _normalise(num, den)
        self._hash = None

    # -- constructors ----------------------------------------------------

    @staticmethod
    def of(value) -> "RatFun":
        if isinstance(value, RatFun):
            return value
        if isinstance(value, Poly):
            return RatFun(value, PONE, _normal=True)
        if isinstance(value, Symbol):
            return RatFun(Poly.var(value), PONE, _normal=True)
        return RatFun(Poly.constant(value), PONE, _normal=True)

    @staticmethod
    def var(sym: Symbol) -> "RatFun":
        return RatFun(Poly.var(sym), PONE, _normal=True)

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den == PONE

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Scalar:
        return self.num.constant_value() * self.den.constant_value().inverse()

    def variables(self) -> set[int]:
        return self.num.variables() | self.den.variables()

    # -- field operations ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, RatFun):
            other = RatFun.of(other)
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        g = poly_gcd(self.den, other.den)
        if g == PONE:
            return RatFun(self.num * other.den + other.num * self.den,
                          self.den * other.den)
        da = self.den.div_exact(g)
        db = other.den.div_exact(g)
        return RatFun(self.num * db + other.num * da, da * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, _normal=True)

    def __sub__(self, other):
        if not isinstance(other, RatFun):
            other = RatFun.of(other)
        return self + (-other)

    def __rsub__(self, other):
        return RatFun.of(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, RatFun):
            other = RatFun.of(other)
        if self.num.is_zero() or other.num.is_zero():
            return RZERO
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1 = self.num if g1 == PONE else self.num.div_exact(g1)
        d2 = other.den if g1 == PONE else other.den.div_exact(g1)
        n2 = other.num if g2 == PONE else other.num.div_exact(g2)
        d1 = self.den if g2 == PONE else self.den.div_exact(g2)
        return RatFun(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        return RatFun(self.den, self.num)

    def __truediv__(self, other):
        if not isinstance(other, RatFun):
            other = RatFun.of(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RatFun.of(other) * self.inverse()

    def __pow__(self, n: int):
        if n == 0:
            return RONE
        if n < 0:
            return self.inverse() ** (-n)
        return RatFun(self.num ** n, self.den ** n, _normal=True)

    # -- calculus -------------------------------------------------------------

    def derivative(self, sym: Symbol | int) -> "RatFun":
        dn = self.num.derivative(sym)
        if self.den == PONE:
            return RatFun(dn, PONE, _normal=True)
        dd = self.den.derivative(sym)
        if dd.is_zero():
            return RatFun(dn, self.den)
        return RatFun(dn * self.den - self.num * dd, self.den * self.den)

    def subst(self, assign: dict[int, "RatFun"]) -> "RatFun":
        """Simultaneous substitution symbol-index -> rational function."""
        return _poly_subst(self.num, assign) / _poly_subst(self.den, assign)

    def eval_scalars(self, assign: dict[int, Scalar]) -> "RatFun":
        return RatFun(self.num.eval_scalars(assign), self.den.eval_scalars(assign))

    # -- comparisons ------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar, Poly, Symbol)):
            other = RatFun.of(other)
        if not isinstance(other, RatFun):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        from .exprio import format_expr
        return format_expr(self)


def _normalise(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return Poly(), PONE
    # strip the common monomial factor cheaply before running the gcd
    mn, _ = num.term_content()
    md, _ = den.term_content()
    mono = mono_gcd(mn, md)
    if mono:
        num = Poly({mono_div(m, mono): c for m, c in num.terms.items()})
        den = Poly({mono_div(m, mono): c for m, c in den.terms.items()})
    if not den.is_constant():
        g = poly_gcd(num, den)
        if g != PONE:
            num = num.div_exact(g)
            den = den.div_exact(g)
    _m, lc = den.leading()
    if lc != SONE:
        inv = lc.inverse()
        num = num * inv
        den = den * inv
    return num, den


def rat_normalize(num: Poly, den: Poly) -> RatFun:
    """Public entry point for building a canonical rational function."""
    return RatFun(num, den)


def _poly_subst(p: Poly, assign: dict[int, RatFun]) -> RatFun:
    out = RZERO
    pow_cache: dict[tuple[int, int], RatFun] = {}
    for m, c in p.terms.items():
        term = RatFun.of(c)
        for i, e in m:
            v = assign.get(i)
            if v is None:
                term = term * RatFun(Poly({((i, e),): SONE}), PONE, _normal=True)
            else:
                key = (i, e)
                pe = pow_cache.get(key)
                if pe is None:
                    pe = v ** e
                    pow_cache[key] = pe
                term = term * pe
        out = out + term
    return out


RZERO = RatFun.of(0)
RONE = RatFun.of(1)
