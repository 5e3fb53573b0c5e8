"""Sparse multivariate polynomials over exact scalars.

A monomial is a tuple of (symbol_index, exponent) pairs, sorted by index,
with all exponents positive; the empty tuple is 1.  Polynomials map
monomials to nonzero ``Scalar`` coefficients.  The monomial order is graded
lexicographic in the declared symbol order (earlier symbols rank higher),
which fixes leading terms, printing, and the denominator normalisation used
by rational functions.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import Scalar, ZERO as SZERO, ONE as SONE
from .symbols import Symbol

Monomial = tuple  # of (index, exponent) pairs


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        a, b = m1[i], m2[j]
        if a[0] < b[0]:
            out.append(a)
            i += 1
        elif a[0] > b[0]:
            out.append(b)
            j += 1
        else:
            out.append((a[0], a[1] + b[1]))
            i += 1
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def mono_div(m1: Monomial, m2: Monomial) -> Monomial | None:
    """m1 / m2, or None if not divisible."""
    out = []
    d2 = dict(m2)
    for idx, e in m1:
        r = e - d2.pop(idx, 0)
        if r < 0:
            return None
        if r:
            out.append((idx, r))
    if d2:
        return None
    return tuple(out)


def mono_gcd(m1: Monomial, m2: Monomial) -> Monomial:
    d2 = dict(m2)
    out = []
    for idx, e in m1:
        if idx in d2:
            out.append((idx, min(e, d2[idx])))
    return tuple(out)


def mono_degree(m: Monomial) -> int:
    return sum(e for _i, e in m)


def mono_cmp_key(m: Monomial):
    """Graded lex key: compare by total degree, then exponents on the
    earliest symbols (earlier symbol with higher power ranks higher)."""
    return (mono_degree(m), tuple((-i, e) for i, e in m))


class Poly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: dict | None = None):
        self.terms = terms if terms is not None else {}
        self._hash = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def constant(c) -> "Poly":
        c = Scalar.of(c) if not isinstance(c, Scalar) else c
        return Poly({(): c}) if not c.is_zero() else Poly()

    @staticmethod
    def var(sym: Symbol, exp: int = 1) -> "Poly":
        if exp == 0:
            return Poly.constant(1)
        return Poly({((sym.index, exp),): SONE})

    # -- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> Scalar:
        if not self.terms:
            return SZERO
        if self.terms.keys() == {()}:
            return self.terms[()]
        raise ValueError("not a constant polynomial")

    def variables(self) -> set[int]:
        out: set[int] = set()
        for m in self.terms:
            for i, _e in m:
                out.add(i)
        return out

    def degree(self, sym: Symbol | int | None = None) -> int:
        """Total degree, or degree in one symbol; -1 for the zero poly."""
        if not self.terms:
            return -1
        if sym is None:
            return max(mono_degree(m) for m in self.terms)
        idx = sym if isinstance(sym, int) else sym.index
        best = 0
        for m in self.terms:
            for i, e in m:
                if i == idx and e > best:
                    best = e
        return best

    def leading(self) -> tuple[Monomial, Scalar]:
        """Leading term under graded lex."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=mono_cmp_key)
        return m, self.terms[m]

    def sorted_terms(self) -> list[tuple[Monomial, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: mono_cmp_key(kv[0]), reverse=True)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m)
            if s is None:
                terms[m] = c
            else:
                s = s + c
                if s.is_zero():
                    del terms[m]
                else:
                    terms[m] = s
        return Poly(terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.constant(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, Scalar):
            if other.is_zero():
                return Poly()
            return Poly({m: c * other for m, c in self.terms.items()})
        if isinstance(other, (int, Fraction)):
            return self * Scalar.of(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.terms or not other.terms:
            return Poly()
        if other.is_constant():
            return self * other.terms[()]
        if self.is_constant():
            return other * self.terms[()]
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                c = c1 * c2
                s = terms.get(m)
                if s is None:
                    terms[m] = c
                else:
                    s = s + c
                    if s.is_zero():
                        del terms[m]
                    else:
                        terms[m] = s
        return Poly(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    # -- calculus / structure -------------------------------------------

    def derivative(self, sym: Symbol | int) -> "Poly":
        idx = sym if isinstance(sym, int) else sym.index
        terms: dict = {}
        for m, c in self.terms.items():
            for k, (i, e) in enumerate(m):
                if i == idx:
                    nm = m[:k] + ((i, e - 1),) + m[k + 1:] if e > 1 else m[:k] + m[k + 1:]
                    nc = c * e
                    s = terms.get(nm)
                    terms[nm] = nc if s is None else s + nc
                    break
        return Poly({m: c for m, c in terms.items() if not c.is_zero()})

    def collect(self, sym: Symbol | int) -> dict[int, "Poly"]:
        """Split into {degree in sym: coefficient polynomial}."""
        idx = sym if isinstance(sym, int) else sym.index
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            d = 0
            rest = m
            for k, (i, e) in enumerate(m):
                if i == idx:
                    d = e
                    rest = m[:k] + m[k + 1:]
                    break
            out.setdefault(d, {})[rest] = c
        return {d: Poly(t) for d, t in out.items()}

    def eval_scalars(self, assign: dict[int, Scalar]) -> "Poly":
        """Substitute scalars for some symbols (partial evaluation)."""
        terms: dict = {}
        for m, c in self.terms.items():
            rest = []
            for i, e in m:
                if i in assign:
                    v = assign[i]
                    for _ in range(e):
                        c = c * v
                else:
                    rest.append((i, e))
            if c.is_zero():
                continue
            nm = tuple(rest)
            s = terms.get(nm)
            if s is None:
                terms[nm] = c
            else:
                s = s + c
                if s.is_zero():
                    del terms[nm]
                else:
                    terms[nm] = s
        return Poly(terms)

    # -- division -------------------------------------------------------

    def mul_term(self, m: Monomial, c: Scalar) -> "Poly":
        if c.is_zero():
            return Poly()
        return Poly({mono_mul(mm, m): cc * c for mm, cc in self.terms.items()})

    def div_exact(self, other: "Poly") -> "Poly":
        """Exact division; raises ValueError if not divisible."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_constant():
            return self * other.terms[()].inverse()
        rem = self
        quo: dict = {}
        lm, lc = other.leading()
        lcinv = lc.inverse()
        while not rem.is_zero():
            rm, rc = rem.leading()
            m = mono_div(rm, lm)
            if m is None:
                raise ValueError("inexact polynomial division")
            c = rc * lcinv
            quo[m] = c
            rem = rem - other.mul_term(m, c)
        return Poly(quo)

    def term_content(self) -> tuple[Monomial, Scalar]:
        """Common monomial factor and the leading coefficient (for primitives)."""
        if not self.terms:
            return (), SONE
        mono = None
        for m in self.terms:
            mono = m if mono is None else mono_gcd(mono, m)
            if not mono:
                break
        lm = max(self.terms, key=mono_cmp_key)
        return mono or (), self.terms[lm]

    # -- comparisons ------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = Poly.constant(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset((m, c) for m, c in self.terms.items()))
        return self._hash

    def __repr__(self):
        from .exprio import format_poly
        return format_poly(self)


PZERO = Poly()
PONE = Poly.constant(1)


# ---------------------------------------------------------------------------
# gcd: primitive pseudo-remainder sequence, with monomial content stripped
# first.  Coefficients live in a field, so the base case is trivial.
# ---------------------------------------------------------------------------


def _content_wrt(p: Poly, idx: int) -> Poly:
    cs = list(p.collect(idx).values())
    g = cs[0]
    for c in cs[1:]:
        g = poly_gcd(g, c)
        if g.is_constant():
            break
    return g


def _pseudo_rem(f: Poly, g: Poly, idx: int) -> Poly:
    """prem(f, g) = rem(lc(g)^(df-dg+1) * f, g) with respect to idx."""
    df, dg = f.degree(idx), g.degree(idx)
    glead = g.collect(idx)[dg]
    rem = f
    steps = 0
    while not rem.is_zero():
        dr = rem.degree(idx)
        if dr < dg:
            break
        rlead = rem.collect(idx)[dr]
        shift = Poly({((idx, dr - dg),): SONE}) if dr > dg else PONE
        rem = rem * glead - g * (rlead * shift)
        steps += 1
    # pad to the textbook lc-power so the subresultant divisions stay exact
    for _ in range(df - dg + 1 - steps):
        rem = rem * glead
    return rem


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """gcd up to a scalar unit, normalised to leading coefficient 1."""
    if f.is_zero():
        return _monic(g)
    if g.is_zero():
        return _monic(f)
    mf, _cf = f.term_content()
    mg, _cg = g.term_content()
    mono = mono_gcd(mf, mg)
    f = Poly({mono_div(m, mf): c for m, c in f.terms.items()})
    g = Poly({mono_div(m, mg): c for m, c in g.terms.items()})
    if f == g:
        core = f
    elif f.is_constant() or g.is_constant():
        core = PONE
    else:
        core = _divisibility_shortcut(f, g)
        if core is None:
            core = _gcd_by_known_factors(f, g)
        if core is None:
            if _certified_coprime(f, g):
                core = PONE
            else:
                core = _gcd_core(f, g)
    if mono:
        core = core.mul_term(mono, SONE)
    return _monic(core)


# Curated irreducible factors of the denominators this engine produces
# (chart sections, catalogued potentials).  Used as a complete-factorisation
# fast path: when one argument splits entirely over this list, the gcd is
# the product of the shared prime powers.
_HINTS: list[Poly] | None = None


def _hint_list() -> list[Poly]:
    global _HINTS
    if _HINTS is None:
        from .symbols import TABLE
        from .scalars import I as SI
        def v(n):
            return Poly.var(TABLE[n])
        hints = []
        x, y = v("x"), v("y")
        hints.append(x + SI * y)
        hints.append(x - SI * y)
        r2 = x * x + y * y
        hints.append(r2 - PONE)
        hints.append(r2 + PONE)
        for a in ("x1", "x2", "x3", "x4"):
            for b in ("x1", "x2", "x3", "x4"):
                if a != b:
                    hints.append(v(a) + SI * v(b))
        zc, zbc = v("z"), v("zb")
        hints.append(zc * zbc - PONE)
        hints.append(zc * zbc + PONE)
        for n in ("z", "zb", "p", "q"):
            hints.append(v(n) + PONE)
            hints.append(v(n) - PONE)
        _HINTS = hints
    return _HINTS


def register_irreducible(p: Poly):
    """Extend the gcd fast-path registry (entries must be irreducible)."""
    _hint_list().append(p)


def _full_factorization(p: Poly):
    """Factor p over the hint list; None if a non-constant residue remains.
    Monomial content is assumed already stripped by the caller."""
    out = []
    rest = p
    for h in _hint_list():
        mult = 0
        while not rest.is_constant():
            try:
                rest = rest.div_exact(h)
                mult += 1
            except ValueError:
                break
        if mult:
            out.append((h, mult))
        if rest.is_constant():
            break
    if not rest.is_constant():
        return None
    return out


def _gcd_by_known_factors(f: Poly, g: Poly) -> Poly | None:
    small, big = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
    fac = _full_factorization(small)
    if fac is None:
        return None
    out = PONE
    for h, mult in fac:
        rest = big
        shared = 0
        while shared < mult:
            try:
                rest = rest.div_exact(h)
                shared += 1
            except ValueError:
                break
        if shared:
            out = out * h ** shared
    return out


def _divisibility_shortcut(f: Poly, g: Poly) -> Poly | None:
    """gcd when one argument divides the other (the common case for the
    stacked denominator powers this engine produces)."""
    small, big = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
    try:
        big.div_exact(small)
        return small
    except ValueError:
        return None


# Deterministic evaluation points for the coprimality certificate.
_EVAL_SEEDS = ((3, 5, 7, 11, 13, 17, 19, 23, 29, 31),
               (4, 9, 25, 49, 2, 27, 8, 121, 16, 125),
               (6, 10, 14, 15, 21, 22, 26, 33, 34, 35))


def _certified_coprime(f: Poly, g: Poly) -> bool:
    """True only if gcd(f, g) is provably a unit.

    For each common variable x, evaluate the other variables at integer
    points; the gcd of the two univariate images is a multiple of the image
    of the true gcd, so a constant image certifies that x does not occur in
    the gcd.  Sound but not complete: failures fall back to the PRS.
    """
    common = sorted(f.variables() & g.variables())
    if not common:
        return True
    for x in common:
        ok = False
        for seed in _EVAL_SEEDS:
            assign_f = {}
            k = 0
            for v in sorted((f.variables() | g.variables()) - {x}):
                assign_f[v] = Scalar.of(seed[k % len(seed)] + k // len(seed))
                k += 1
            fe = f.eval_scalars(assign_f)
            ge = g.eval_scalars(assign_f)
            if fe.degree(x) != f.degree(x) or ge.degree(x) != g.degree(x):
                continue  # leading coefficient vanished; try other points
            if _univariate_gcd_degree(fe, ge, x) == 0:
                ok = True
                break
        if not ok:
            return False
    return True


def _univariate_gcd_degree(f: Poly, g: Poly, x: int) -> int:
    """Degree of gcd of univariate polynomials via monic Euclid."""
    fc = {d: c.constant_value() for d, c in f.collect(x).items()}
    gc = {d: c.constant_value() for d, c in g.collect(x).items()}

    def norm(h: dict) -> dict:
        return {d: c for d, c in h.items() if not c.is_zero()}

    fc, gc = norm(fc), norm(gc)
    while gc:
        dg = max(gc)
        lcinv = gc[dg].inverse()
        rem = dict(fc)
        while rem and max(rem) >= dg:
            dr = max(rem)
            factor = rem[dr] * lcinv
            for d, c in gc.items():
                key = d + dr - dg
                s = rem.get(key, None)
                val = factor * c
                if s is None:
                    rem[key] = -val
                else:
                    s = s - val
                    if s.is_zero():
                        del rem[key]
                    else:
                        rem[key] = s
            rem.pop(dr, None)
        fc, gc = gc, norm(rem)
    return max(fc) if fc else 0


def _monic(p: Poly) -> Poly:
    if p.is_zero():
        return p
    _m, c = p.leading()
    if c == SONE:
        return p
    return p * c.inverse()


def _gcd_core(f: Poly, g: Poly) -> Poly:
    if f.is_constant() or g.is_constant():
        return PONE
    common = f.variables() & g.variables()
    if not common:
        return PONE
    # main variable: smallest combined degree keeps the PRS short
    idx = min(common, key=lambda i: f.degree(i) + g.degree(i))
    cf = _content_wrt(f, idx)
    cg = _content_wrt(g, idx)
    f = f.div_exact(cf)
    g = g.div_exact(cg)
    cont = poly_gcd(cf, cg)
    last = _subresultant_last(f, g, idx)
    if last.is_zero() or last.degree(idx) == 0:
        return cont  # coprime in the main variable
    return cont * last.div_exact(_content_wrt(last, idx))


def _subresultant_last(f: Poly, g: Poly, idx: int) -> Poly:
    """Last nonzero member of the subresultant PRS of f, g in idx.

    Brown's algorithm: exact ground divisions keep coefficient growth
    polynomial without any per-step content computation.
    """
    if f.degree(idx) < g.degree(idx):
        f, g = g, f
    n, m = f.degree(idx), g.degree(idx)
    d = n - m
    b = Poly.constant(Scalar.of((-1) ** (d + 1)))
    h = _pseudo_rem(f, g, idx) * b
    lc = g.collect(idx)[m]
    c = -(lc ** d) if d else Poly.constant(Scalar.of(-1))
    while not h.is_zero():
        k = h.degree(idx)
        if k == 0:
            return h
        f, g, m, d = g, h, k, m - k
        b = -lc * (c ** d) if d else -lc
        prev = g
        h = _pseudo_rem(f, g, idx).div_exact(b)
        lc = g.collect(idx)[k]
        if d > 1:
            c = ((-lc) ** d).div_exact(c ** (d - 1))
        else:
            c = -lc
        if h.is_zero():
            return prev
    return g
