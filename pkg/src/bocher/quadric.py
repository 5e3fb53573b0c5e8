"""Reduction modulo a distinguished quadric (null cone, unit sphere).

The quadric must be monic of degree 2 in its elimination variable v, so
reduction is the substitution v^2 -> v^2 - Q iterated to a remainder of
v-degree < 2.  The quadrics used here are irreducible, so the ideal is prime
and denominators outside the ideal stay invertible in the quotient.
"""

from __future__ import annotations

from .scalars import ONE as SONE
from .symbols import Symbol
from .poly import Poly, PONE
from .rational import RatFun


class Quadric:
    def __init__(self, poly: Poly, elim: Symbol):
        self.poly = poly
        self.elim = elim
        c2 = poly.collect(elim.index).get(2)
        if c2 is None or not c2.is_constant() or c2.constant_value() != SONE:
            raise ValueError("quadric must be monic of degree 2 in the elimination variable")
        # rest = v^2 - Q, the replacement for v^2
        self.rest = Poly.var(elim, 2) - poly

    def reduce(self, p: Poly) -> Poly:
        if p.is_zero():
            return p
        parts = p.collect(self.elim.index)
        if max(parts) < 2:
            return p
        out = Poly()
        rest_pows: dict[int, Poly] = {0: PONE, 1: self.rest}
        for d, coeff in parts.items():
            k, r = divmod(d, 2)
            rp = rest_pows.get(k)
            if rp is None:
                rp = self.rest ** k
                rest_pows[k] = rp
            term = coeff * rp
            if r:
                term = term * Poly.var(self.elim)
            out = out + term
        if out.degree(self.elim.index) >= 2:
            return self.reduce(out)
        return out

    def is_zero(self, p: Poly) -> bool:
        return self.reduce(p).is_zero()

    def reduce_rat(self, f: RatFun) -> RatFun:
        """Canonical-ish representative with cone-reduced numerator/denominator."""
        den = self.reduce(f.den)
        if den.is_zero():
            raise ZeroDivisionError("denominator lies in the quadric ideal")
        return RatFun(self.reduce(f.num), den)

    def rat_is_zero(self, f: RatFun) -> bool:
        return self.reduce(f.num).is_zero()

    def equal(self, f: RatFun, g: RatFun) -> bool:
        """Equality of rational functions on the quadric."""
        for d in (f.den, g.den):
            if self.is_zero(d):
                raise ZeroDivisionError("denominator lies in the quadric ideal")
        diff = self.reduce(f.num) * self.reduce(g.den) - self.reduce(g.num) * self.reduce(f.den)
        return self.reduce(diff).is_zero()


def reduce_mod_quadric(p: Poly, ideal: Quadric) -> Poly:
    return ideal.reduce(p)


def equal_mod_quadric(f, g, ideal: Quadric | None) -> bool:
    f = RatFun.of(f)
    g = RatFun.of(g)
    if ideal is None:
        return f == g
    return ideal.equal(f, g)
