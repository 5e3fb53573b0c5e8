"""Exact scalars: the field Q(i, sqrt(d1), sqrt(d2), ...).

A scalar is a Q-linear combination of basis elements ``sqrt(d) * i^e`` where
``d`` is a positive square-free integer and ``e`` is 0 or 1, stored as
integer numerators over one positive common denominator (big-integer
arithmetic throughout; no floating point anywhere).  Radicands are
canonicalised to their square-free core, so sqrt(8) is stored as 2*sqrt(2)
and sqrt(-1) collapses onto the pre-adjoined imaginary unit.  Products of
basis elements stay in the basis::

    sqrt(d1)*sqrt(d2) = gcd(d1,d2) * sqrt(d1*d2 / gcd(d1,d2)^2)

which keeps arithmetic closed without any registry lookup.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _gcd

_RAT_KEY = (1, 0)  # basis element 1
_I_KEY = (1, 1)    # basis element i


def squarefree_split(n: int) -> tuple[int, int]:
    """Return (m, d) with n = m^2 * d and d square-free.  Requires n > 0."""
    m, d = 1, 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            m *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
    return m, d * n


def _mul_keys(k1, k2):
    """Product of two basis keys -> (integer factor, key)."""
    d1, e1 = k1
    d2, e2 = k2
    g = _gcd(d1, d2)
    fac = g
    if e1 and e2:
        fac = -fac
    return fac, ((d1 // g) * (d2 // g), e1 ^ e2)


class Scalar:
    """Immutable element of Q(i, sqrt(d), ...): integer numerators over a
    positive common denominator, normalised so their overall gcd is 1."""

    __slots__ = ("den", "terms", "_hash")

    def __init__(self, den: int = 1, terms: dict | None = None, _normal: bool = False):
        if _normal:
            self.den = den
            self.terms = terms if terms is not None else {}
        else:
            terms = {k: v for k, v in (terms or {}).items() if v}
            if not terms:
                self.den = 1
                self.terms = {}
            else:
                if den < 0:
                    den = -den
                    terms = {k: -v for k, v in terms.items()}
                g = den
                for v in terms.values():
                    g = _gcd(g, v)
                    if g == 1:
                        break
                if g > 1:
                    den //= g
                    terms = {k: v // g for k, v in terms.items()}
                self.den = den
                self.terms = terms
        self._hash = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def of(value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, int):
            return Scalar(1, {_RAT_KEY: value} if value else {}, _normal=True)
        q = Fraction(value)
        if not q:
            return ZERO
        return Scalar(q.denominator, {_RAT_KEY: q.numerator}, _normal=True)

    @staticmethod
    def sqrt(value) -> "Scalar":
        """Exact square root of a nonzero rational (principal formal branch)."""
        q = Fraction(value)
        if q == 0:
            raise ValueError("sqrt(0) radical is not admissible")
        neg = q < 0
        if neg:
            q = -q
        m, d = squarefree_split(q.numerator * q.denominator)
        key = (d, 1 if neg else 0)
        return Scalar(q.denominator, {key: m})

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return not self.terms or self.terms.keys() == {_RAT_KEY}

    def to_fraction(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if self.terms.keys() != {_RAT_KEY}:
            raise ValueError(f"not rational: {self}")
        return Fraction(self.terms[_RAT_KEY], self.den)

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Scalar):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Scalar.of(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        d1, d2 = self.den, other.den
        if d1 == d2:
            terms = dict(self.terms)
            for k, v in other.terms.items():
                s = terms.get(k, 0) + v
                if s:
                    terms[k] = s
                else:
                    terms.pop(k, None)
            return Scalar(d1, terms)
        g = _gcd(d1, d2)
        m1, m2 = d2 // g, d1 // g
        terms = {k: v * m1 for k, v in self.terms.items()}
        for k, v in other.terms.items():
            s = terms.get(k, 0) + v * m2
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return Scalar(d1 * m1, terms)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.den, {k: -v for k, v in self.terms.items()}, _normal=True)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Scalar.of(other)
        return self + (-other)

    def __rsub__(self, other):
        return Scalar.of(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Scalar.of(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return ZERO
        if len(a) == 1 and len(b) == 1:
            (k1, v1), = a.items()
            (k2, v2), = b.items()
            fac, k = _mul_keys(k1, k2)
            return Scalar(self.den * other.den, {k: v1 * v2 * fac})
        terms: dict = {}
        for k1, v1 in a.items():
            for k2, v2 in b.items():
                fac, k = _mul_keys(k1, k2)
                v = v1 * v2 * fac
                s = terms.get(k, 0) + v
                if s:
                    terms[k] = s
                else:
                    terms.pop(k, None)
        return Scalar(self.den * other.den, terms)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self.terms:
            raise ZeroDivisionError("scalar inverse of zero")
        if self.is_rational():
            n = self.terms[_RAT_KEY]
            return Scalar(n, {_RAT_KEY: self.den}) if n > 0 else \
                Scalar(-n, {_RAT_KEY: -self.den})
        # Pick a prime p dividing some radicand (or fall back on i), split
        # z = u + g*v, and recurse on the norm u^2 - g^2 v^2.
        p = 0
        for (d, _e) in self.terms:
            if d > 1:
                q = 2
                while d % q:
                    q += 1 if q == 2 else 2
                p = q
                break
        u, v = {}, {}
        if p:
            for (d, e), c in self.terms.items():
                if d % p == 0:
                    v[(d // p, e)] = c
                else:
                    u[(d, e)] = c
            g2 = Scalar.of(p)
        else:
            for (d, e), c in self.terms.items():
                if e:
                    v[(d, 0)] = c
                else:
                    u[(d, 0)] = c
            g2 = Scalar.of(-1)
        us = Scalar(self.den, u)
        vs = Scalar(self.den, v)
        norm = us * us - g2 * (vs * vs)
        ninv = norm.inverse()
        conj = dict((us * ninv).terms)
        cden = (us * ninv).den
        other = (-vs) * ninv
        # merge other * g over a common denominator
        d1, d2 = cden, other.den
        g = _gcd(d1, d2)
        m1, m2 = d2 // g, d1 // g
        conj = {k: v * m1 for k, v in conj.items()}
        gkey = (p, 0) if p else _I_KEY
        for k, c in other.terms.items():
            fac, kk = _mul_keys(k, gkey)
            s = conj.get(kk, 0) + c * fac * m2
            if s:
                conj[kk] = s
            else:
                conj.pop(kk, None)
        return Scalar(d1 * m1, conj)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar.of(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.of(other) * self.inverse()

    def conjugate(self) -> "Scalar":
        """Complex conjugation: i -> -i, formal radicals fixed."""
        return Scalar(self.den, {k: (-v if k[1] else v) for k, v in self.terms.items()},
                      _normal=True)

    # -- comparisons / hashing -----------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.of(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.den == other.den and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.den, frozenset(self.terms.items())))
        return self._hash

    def sort_key(self):
        return (self.den, tuple(sorted(self.terms.items())))

    # -- printing -------------------------------------------------------

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (d, e), num in sorted(self.terms.items()):
            c = Fraction(num, self.den)
            sign = "-" if c < 0 else ""
            mag = abs(c)
            atoms = []
            if mag != 1 or (d == 1 and not e):
                atoms.append(str(mag) if mag.denominator == 1
                             else f"{mag.numerator}/{mag.denominator}")
            if e:
                atoms.append("I")
            if d > 1:
                atoms.append(f"sqrt({d})")
            parts.append(sign + "*".join(atoms))
        out = parts[0]
        for t in parts[1:]:
            out += "-" + t[1:] if t.startswith("-") else "+" + t
        return out


ZERO = Scalar(1, {}, _normal=True)
ONE = Scalar(1, {_RAT_KEY: 1}, _normal=True)
I = Scalar(1, {_I_KEY: 1}, _normal=True)


class RadicalTable:
    """Registry of adjoined radicals (bookkeeping for the parser and reports).

    Arithmetic does not need the table -- radicands canonicalise on the fly --
    but adjoining through it enforces the declared-square contract and lets
    callers discover that e.g. sqrt(8) reuses the sqrt(2) handle.
    """

    def __init__(self):
        self._cores: dict[int, Scalar] = {-1: I}

    def adjoin(self, square) -> Scalar:
        q = Fraction(square)
        if q == 0:
            raise ValueError("cannot adjoin a radical with square 0")
        s = Scalar.sqrt(q)
        for (d, e) in s.terms:
            if d > 1:
                self._cores.setdefault(d, Scalar(1, {(d, 0): 1}, _normal=True))
            if e:
                self._cores.setdefault(-1, I)
        return s

    def cores(self) -> list[int]:
        return sorted(self._cores)


RADICALS = RadicalTable()


def adjoin_radical(square) -> Scalar:
    """Adjoin sqrt(square) for rational ``square`` and return it as a Scalar.

    Radicands with the same square-free core share the same basis element,
    so repeated adjunction is idempotent and sqrt(-1) returns i itself.
    """
    return RADICALS.adjoin(square)
