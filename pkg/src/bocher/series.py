"""Laurent series in the contraction parameter eps.

Coefficients are eps-free rational functions; an optional quadric ideal is
threaded through so that coefficients on a constrained chart are reduced
(and recognised as zero) modulo the chart quadric.  Truncation order is
tracked explicitly: a series knows its coefficients exactly up to and
including eps^prec.
"""

from __future__ import annotations

from .symbols import EPSILON
from .poly import Poly, PONE
from .rational import RatFun, RZERO
from .quadric import Quadric

DEFAULT_ORDER = 12


class ZeroSeriesError(ArithmeticError):
    """No nonzero coefficient was found within the truncation order."""


class EpsSeries:
    __slots__ = ("n0", "coeffs", "prec", "ideal")

    def __init__(self, n0: int, coeffs: list[RatFun], prec: int,
                 ideal: Quadric | None = None, _trim: bool = True):
        if _trim:
            while coeffs and coeffs[0].is_zero():
                coeffs = coeffs[1:]
                n0 += 1
            if len(coeffs) > prec - n0 + 1:
                coeffs = coeffs[:prec - n0 + 1]
        if not coeffs:
            n0 = prec + 1
        self.n0 = n0
        self.coeffs = coeffs
        self.prec = prec
        self.ideal = ideal

    @staticmethod
    def constant(f, prec: int = DEFAULT_ORDER, ideal: Quadric | None = None) -> "EpsSeries":
        f = RatFun.of(f)
        return EpsSeries(0, [f], prec, ideal)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int) -> RatFun:
        if k > self.prec:
            raise ValueError(f"coefficient {k} beyond truncation {self.prec}")
        if k < self.n0 or k - self.n0 >= len(self.coeffs):
            return RZERO
        return self.coeffs[k - self.n0]

    def leading(self) -> tuple[int, RatFun]:
        if not self.coeffs:
            raise ZeroSeriesError("series has no nonzero term within truncation")
        return self.n0, self.coeffs[0]

    # -- arithmetic -------------------------------------------------------

    def _reduced(self, f: RatFun) -> RatFun:
        return self.ideal.reduce_rat(f) if self.ideal is not None else f

    def __add__(self, other: "EpsSeries") -> "EpsSeries":
        prec = min(self.prec, other.prec)
        if self.is_zero():
            return EpsSeries(other.n0, list(other.coeffs), prec, other.ideal or self.ideal)
        if other.is_zero():
            return EpsSeries(self.n0, list(self.coeffs), prec, self.ideal or other.ideal)
        n0 = min(self.n0, other.n0)
        out = []
        for k in range(n0, prec + 1):
            out.append(self.coefficient(k) + other.coefficient(k))
        return EpsSeries(n0, out, prec, self.ideal or other.ideal)

    def __neg__(self) -> "EpsSeries":
        return EpsSeries(self.n0, [-c for c in self.coeffs], self.prec, self.ideal, _trim=False)

    def __sub__(self, other: "EpsSeries") -> "EpsSeries":
        return self + (-other)

    def __mul__(self, other) -> "EpsSeries":
        if isinstance(other, (int, RatFun)):
            other = RatFun.of(other)
            return EpsSeries(self.n0, [c * other for c in self.coeffs], self.prec, self.ideal)
        if self.is_zero() or other.is_zero():
            return EpsSeries(0, [], min(self.prec, other.prec), self.ideal or other.ideal)
        n0 = self.n0 + other.n0
        # relative precisions limit the reliable absolute order of the product
        prec = min(self.prec + other.n0, other.prec + self.n0)
        ideal = self.ideal or other.ideal
        la, lb = len(self.coeffs), len(other.coeffs)
        nterms = prec - n0 + 1
        out = []
        for k in range(nterms):
            acc = RZERO
            for i in range(max(0, k - lb + 1), min(k + 1, la)):
                a = self.coeffs[i]
                b = other.coeffs[k - i]
                if a.is_zero() or b.is_zero():
                    continue
                acc = acc + a * b
            if ideal is not None:
                acc = ideal.reduce_rat(acc)
            out.append(acc)
        return EpsSeries(n0, out, prec, ideal)

    __rmul__ = __mul__

    def shift(self, k: int) -> "EpsSeries":
        """Multiply by eps^k."""
        return EpsSeries(self.n0 + k, list(self.coeffs), self.prec + k, self.ideal, _trim=False)

    def truncate(self, prec: int) -> "EpsSeries":
        return EpsSeries(self.n0, list(self.coeffs), min(prec, self.prec), self.ideal)

    def inverse(self) -> "EpsSeries":
        if self.is_zero():
            raise ZeroDivisionError("inverse of a zero series")
        c0 = self.coeffs[0]
        rel = self.prec - self.n0
        c0i = c0.inverse()
        if self.ideal is not None:
            c0i = self.ideal.reduce_rat(c0i)
        inv = [c0i]
        for k in range(1, rel + 1):
            acc = RZERO
            for j in range(1, min(k, len(self.coeffs) - 1) + 1):
                cj = self.coeffs[j]
                if cj.is_zero():
                    continue
                acc = acc + cj * inv[k - j]
            term = -c0i * acc
            if self.ideal is not None:
                term = self.ideal.reduce_rat(term)
            inv.append(term)
        return EpsSeries(-self.n0, inv, rel - self.n0, self.ideal)

    def __truediv__(self, other: "EpsSeries") -> "EpsSeries":
        return self * other.inverse()

    def limit(self) -> RatFun:
        """Value at eps -> 0; requires no pole and exactness at order 0."""
        if self.is_zero():
            if self.prec < 0:
                raise ZeroSeriesError("series truncated before order 0")
            return RZERO
        if self.n0 < 0:
            raise ArithmeticError(f"divergent as eps -> 0 (leading order {self.n0})")
        if self.prec < 0:
            raise ZeroSeriesError("series truncated before order 0")
        return self.coefficient(0)

    def __repr__(self):
        if self.is_zero():
            return f"EpsSeries(0; O(eps^{self.prec + 1}))"
        parts = [f"eps^{self.n0 + i}*({c!r})" for i, c in enumerate(self.coeffs) if not c.is_zero()]
        return " + ".join(parts) + f" + O(eps^{self.prec + 1})"


def eps_expand(f: RatFun, order: int = DEFAULT_ORDER, ideal: Quadric | None = None) -> EpsSeries:
    """Laurent-expand a rational function in eps to absolute order ``order``."""
    return eps_expand_pair(f.num, f.den, order, ideal)


def eps_expand_pair(num: Poly, den: Poly, order: int = DEFAULT_ORDER,
                    ideal: Quadric | None = None) -> EpsSeries:
    """Expansion from an unreduced numerator/denominator pair.

    The pair is collected by eps-degree and reduced modulo the chart quadric
    first, because reduction may change the leading order.
    """
    num_parts = {d: c for d, c in num.collect(EPSILON.index).items()}
    den_parts = {d: c for d, c in den.collect(EPSILON.index).items()}
    if ideal is not None:
        num_parts = {d: ideal.reduce(c) for d, c in num_parts.items()}
        den_parts = {d: ideal.reduce(c) for d, c in den_parts.items()}
    num_parts = {d: c for d, c in num_parts.items() if not c.is_zero()}
    den_parts = {d: c for d, c in den_parts.items() if not c.is_zero()}
    if not den_parts:
        raise ZeroDivisionError("denominator is zero (mod the chart quadric)")
    if not num_parts:
        return EpsSeries(0, [], order, ideal)
    vn = min(num_parts)
    vd = min(den_parts)
    shift = vn - vd
    rel = order - shift
    if rel < 0:
        return EpsSeries(0, [], order, ideal)
    nmax = max(num_parts)
    dmax = max(den_parts)
    nser = EpsSeries(0, [RatFun.of(num_parts.get(vn + j, Poly())) for j in range(min(rel, nmax - vn) + 1)],
                     rel, ideal, _trim=False)
    dser = EpsSeries(0, [RatFun.of(den_parts.get(vd + j, Poly())) for j in range(min(rel, dmax - vd) + 1)],
                     rel, ideal, _trim=False)
    res = nser * dser.inverse()
    return EpsSeries(res.n0 + shift, res.coeffs, order, ideal)


def leading_order(s: EpsSeries) -> tuple[int, RatFun]:
    """Lowest order with nonzero coefficient and that exact coefficient."""
    return s.leading()


# ---------------------------------------------------------------------------
# gcd-free Laurent series: polynomial numerators over powers of one base
# ---------------------------------------------------------------------------


class PolySeries:
    """Laurent series whose k-th coefficient is N_k / base^p_k with N_k a
    polynomial.  All arithmetic stays in the polynomial ring (the expensive
    rational-function normalisation never runs), which is what makes the
    contraction pipeline fast.  Zero detection reduces numerators modulo the
    chart quadric, against which the base must be invertible.
    """

    __slots__ = ("base", "n0", "coeffs", "prec", "ideal")

    def __init__(self, base: Poly, n0: int, coeffs: list[tuple[Poly, int]],
                 prec: int, ideal: Quadric | None = None, _trim: bool = True):
        if _trim:
            while coeffs and coeffs[0][0].is_zero():
                coeffs = coeffs[1:]
                n0 += 1
            if len(coeffs) > prec - n0 + 1:
                coeffs = coeffs[:prec - n0 + 1]
        if not coeffs:
            n0 = prec + 1
        self.base = base
        self.n0 = n0
        self.coeffs = coeffs
        self.prec = prec
        self.ideal = ideal

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int) -> tuple[Poly, int]:
        if k > self.prec:
            raise ValueError(f"coefficient {k} beyond truncation {self.prec}")
        if k < self.n0 or k - self.n0 >= len(self.coeffs):
            return Poly(), 0
        return self.coeffs[k - self.n0]

    def leading(self) -> tuple[int, RatFun]:
        if not self.coeffs:
            raise ZeroSeriesError("series has no nonzero term within truncation")
        n, p = self.coeffs[0]
        return self.n0, _as_ratfun(n, self.base, p)

    def leading_raw(self) -> tuple[int, Poly, int]:
        if not self.coeffs:
            raise ZeroSeriesError("series has no nonzero term within truncation")
        n, p = self.coeffs[0]
        return self.n0, n, p

    def limit(self) -> RatFun:
        if self.is_zero():
            if self.prec < 0:
                raise ZeroSeriesError("series truncated before order 0")
            return RZERO
        if self.n0 < 0:
            raise ArithmeticError(f"divergent as eps -> 0 (leading order {self.n0})")
        if self.prec < 0:
            raise ZeroSeriesError("series truncated before order 0")
        n, p = self.coefficient(0)
        return _as_ratfun(n, self.base, p)

    # -- arithmetic (same base only) ---------------------------------------

    def rebase(self, newbase: Poly, cofactor: Poly) -> "PolySeries":
        """Rewrite over newbase = base * cofactor."""
        out = []
        for n, p in self.coeffs:
            out.append((self._red(n * cofactor ** p), p))
        return PolySeries(newbase, self.n0, out, self.prec, self.ideal, _trim=True)

    def _red(self, p: Poly) -> Poly:
        return self.ideal.reduce(p) if self.ideal is not None else p

    def scale(self, num: Poly, pow_: int = 0) -> "PolySeries":
        out = [(self._red(n * num), p + pow_) for n, p in self.coeffs]
        return PolySeries(self.base, self.n0, out, self.prec, self.ideal)

    def scale_scalar(self, c) -> "PolySeries":
        cp = Poly.constant(c)
        return PolySeries(self.base, self.n0,
                          [(n * cp, p) for n, p in self.coeffs],
                          self.prec, self.ideal, _trim=True)

    def shift(self, k: int) -> "PolySeries":
        return PolySeries(self.base, self.n0 + k, list(self.coeffs),
                          self.prec + k, self.ideal, _trim=False)

    def __add__(self, other: "PolySeries") -> "PolySeries":
        if self.base != other.base:
            raise ValueError("series bases differ; rebase first")
        prec = min(self.prec, other.prec)
        if self.is_zero():
            return PolySeries(other.base, other.n0, list(other.coeffs), prec, other.ideal)
        if other.is_zero():
            return PolySeries(self.base, self.n0, list(self.coeffs), prec, self.ideal)
        n0 = min(self.n0, other.n0)
        out = []
        for k in range(n0, prec + 1):
            na, pa = self.coefficient(k)
            nb, pb = other.coefficient(k)
            p = max(pa, pb)
            acc = na * self.base ** (p - pa) + nb * self.base ** (p - pb)
            out.append((self._red(acc), p))
        return PolySeries(self.base, n0, out, prec, self.ideal or other.ideal)

    def __neg__(self) -> "PolySeries":
        return PolySeries(self.base, self.n0, [(-n, p) for n, p in self.coeffs],
                          self.prec, self.ideal, _trim=False)

    def __sub__(self, other: "PolySeries") -> "PolySeries":
        return self + (-other)

    def __mul__(self, other: "PolySeries") -> "PolySeries":
        if self.base != other.base:
            raise ValueError("series bases differ; rebase first")
        if self.is_zero() or other.is_zero():
            return PolySeries(self.base, 0, [], min(self.prec, other.prec), self.ideal)
        n0 = self.n0 + other.n0
        prec = min(self.prec + other.n0, other.prec + self.n0)
        out = []
        for k in range(prec - n0 + 1):
            parts = []
            pmax = 0
            for i in range(max(0, k - len(other.coeffs) + 1), min(k + 1, len(self.coeffs))):
                na, pa = self.coeffs[i]
                nb, pb = other.coeffs[k - i]
                if na.is_zero() or nb.is_zero():
                    continue
                parts.append((na * nb, pa + pb))
                pmax = max(pmax, pa + pb)
            acc = Poly()
            for n, p in parts:
                acc = acc + n * self.base ** (pmax - p)
            out.append((self._red(acc), pmax))
        return PolySeries(self.base, n0, out, prec, self.ideal)


def _as_ratfun(num: Poly, base: Poly, pow_: int) -> RatFun:
    """Unnormalised rational wrapper (mathematically exact; not canonical)."""
    if num.is_zero():
        return RZERO
    if pow_ == 0:
        return RatFun(num, PONE, _normal=True)
    return RatFun(num, base ** pow_, _normal=True)


class FactorSeries:
    """Laurent series whose coefficients are polynomials over a product of
    catalogued factors: coefficient_k = N_k / prod factors[i]^powers_k[i].

    All arithmetic is polynomial plus exact trial division by the stored
    factors (which are tiny, typically binomials in one of the null
    variables), so no gcd ever runs.  Exact but not canonical; zero tests
    are structural on the numerators.
    """

    __slots__ = ("factors", "n0", "coeffs", "prec")

    def __init__(self, factors: tuple, n0: int, coeffs: list, prec: int,
                 _trim: bool = True):
        if _trim:
            while coeffs and coeffs[0][0].is_zero():
                coeffs = coeffs[1:]
                n0 += 1
            if len(coeffs) > prec - n0 + 1:
                coeffs = coeffs[:prec - n0 + 1]
        if not coeffs:
            n0 = prec + 1
        self.factors = factors
        self.n0 = n0
        self.coeffs = coeffs
        self.prec = prec

    # -- helpers -----------------------------------------------------------

    @staticmethod
    def from_poly_parts(parts: dict[int, Poly], prec: int) -> "FactorSeries":
        if not parts:
            return FactorSeries((), 0, [], prec)
        n0 = min(parts)
        top = max(parts)
        coeffs = [(parts.get(k, PZERO_), ()) for k in range(n0, top + 1)]
        return FactorSeries((), n0, coeffs, max(prec, top))

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int):
        if k > self.prec:
            raise ValueError(f"coefficient {k} beyond truncation {self.prec}")
        if k < self.n0 or k - self.n0 >= len(self.coeffs):
            return PZERO_, (0,) * len(self.factors)
        n, pw = self.coeffs[k - self.n0]
        if len(pw) < len(self.factors):
            pw = tuple(pw) + (0,) * (len(self.factors) - len(pw))
        return n, pw

    def _reduce_coeff(self, n: Poly, pw: tuple):
        """Trial-divide the numerator by the factors to keep sizes down."""
        if n.is_zero():
            return n, (0,) * len(pw)
        pw = list(pw)
        for i, f in enumerate(self.factors):
            while pw[i] > 0:
                try:
                    n = n.div_exact(f)
                    pw[i] -= 1
                except ValueError:
                    break
        return n, tuple(pw)

    def leading(self) -> tuple[int, Poly, tuple]:
        if not self.coeffs:
            raise ZeroSeriesError("series has no nonzero term within truncation")
        n, pw = self.coefficient(self.n0)
        return self.n0, n, pw

    def leading_ratfun(self) -> tuple[int, RatFun]:
        v, n, pw = self.leading()
        den = PONE
        for f, p in zip(self.factors, pw):
            if p:
                den = den * f ** p
        return v, RatFun(n, den, _normal=True)

    def shift(self, k: int) -> "FactorSeries":
        return FactorSeries(self.factors, self.n0 + k, list(self.coeffs),
                            self.prec + k, _trim=False)

    def scale_scalar(self, c) -> "FactorSeries":
        cp = Poly.constant(c)
        return FactorSeries(self.factors, self.n0,
                            [(n * cp, pw) for n, pw in self.coeffs], self.prec)

    def _aligned(self, other: "FactorSeries"):
        """Common factor tuple and power-padding maps."""
        factors = list(self.factors)
        for f in other.factors:
            if all(f != g for g in factors):
                factors.append(f)
        idx_a = [factors.index(f) for f in self.factors]
        idx_b = [factors.index(f) for f in other.factors]
        return tuple(factors), idx_a, idx_b

    @staticmethod
    def _lift(n: Poly, pw, idx, factors, target_pw):
        """Rewrite n / prod f^pw over prod f^target_pw (target >= pw)."""
        out = n
        have = [0] * len(factors)
        for i, p in zip(idx, pw):
            have[i] = p
        for i, f in enumerate(factors):
            d = target_pw[i] - have[i]
            if d:
                out = out * f ** d
        return out

    def __add__(self, other: "FactorSeries") -> "FactorSeries":
        prec = min(self.prec, other.prec)
        if self.is_zero():
            return FactorSeries(other.factors, other.n0, list(other.coeffs), prec)
        if other.is_zero():
            return FactorSeries(self.factors, self.n0, list(self.coeffs), prec)
        factors, idx_a, idx_b = self._aligned(other)
        n0 = min(self.n0, other.n0)
        out = []
        for k in range(n0, prec + 1):
            na, pa = self.coefficient(k)
            nb, pb = other.coefficient(k)
            target = [0] * len(factors)
            for i, p in zip(idx_a, pa):
                target[i] = max(target[i], p)
            for i, p in zip(idx_b, pb):
                target[i] = max(target[i], p)
            target = tuple(target)
            acc = PZERO_
            if not na.is_zero():
                acc = acc + FactorSeries._lift(na, pa, idx_a, factors, target)
            if not nb.is_zero():
                acc = acc + FactorSeries._lift(nb, pb, idx_b, factors, target)
            out.append((acc, target))
        res = FactorSeries(factors, n0, out, prec)
        res.coeffs = [res._reduce_coeff(n, pw) for n, pw in res.coeffs]
        return res

    def __neg__(self) -> "FactorSeries":
        return FactorSeries(self.factors, self.n0,
                            [(-n, pw) for n, pw in self.coeffs], self.prec, _trim=False)

    def __sub__(self, other: "FactorSeries") -> "FactorSeries":
        return self + (-other)

    def __mul__(self, other: "FactorSeries") -> "FactorSeries":
        if self.is_zero() or other.is_zero():
            return FactorSeries((), 0, [], min(self.prec, other.prec))
        factors, idx_a, idx_b = self._aligned(other)
        n0 = self.n0 + other.n0
        prec = min(self.prec + other.n0, other.prec + self.n0)
        la, lb = len(self.coeffs), len(other.coeffs)
        out = []
        for k in range(prec - n0 + 1):
            target = [0] * len(factors)
            parts = []
            for i in range(max(0, k - lb + 1), min(k + 1, la)):
                na, pa = self.coeffs[i]
                nb, pb = other.coeffs[k - i]
                if na.is_zero() or nb.is_zero():
                    continue
                pw = [0] * len(factors)
                for j, p in zip(idx_a, pa):
                    pw[j] += p
                for j, p in zip(idx_b, pb):
                    pw[j] += p
                parts.append((na * nb, pw))
                for j in range(len(factors)):
                    target[j] = max(target[j], pw[j])
            acc = PZERO_
            for n, pw in parts:
                for j, f in enumerate(factors):
                    d = target[j] - pw[j]
                    if d:
                        n = n * f ** d
                acc = acc + n
            out.append(self._reduce_coeff_with(factors, acc, tuple(target)))
        return FactorSeries(factors, n0, out, prec)

    @staticmethod
    def _reduce_coeff_with(factors, n: Poly, pw: tuple):
        if n.is_zero():
            return n, (0,) * len(pw)
        pw = list(pw)
        for i, f in enumerate(factors):
            while pw[i] > 0:
                try:
                    n = n.div_exact(f)
                    pw[i] -= 1
                except ValueError:
                    break
        return n, tuple(pw)


PZERO_ = Poly()


def expand_pair(num: Poly, den: Poly, order: int | None = DEFAULT_ORDER,
                ideal: Quadric | None = None, rel: int | None = None) -> PolySeries:
    """gcd-free Laurent expansion of num/den in eps.

    The base of the resulting series is the leading eps-coefficient of the
    (quadric-reduced) denominator; the inverse-series recurrence
    N_k = -sum_j D_j N_{k-j} base^(j-1) stays polynomial throughout.
    ``rel`` requests depth relative to the leading order instead of an
    absolute truncation.
    """
    num_parts = {d: c for d, c in num.collect(EPSILON.index).items()}
    den_parts = {d: c for d, c in den.collect(EPSILON.index).items()}
    if ideal is not None:
        num_parts = {d: ideal.reduce(c) for d, c in num_parts.items()}
        den_parts = {d: ideal.reduce(c) for d, c in den_parts.items()}
    num_parts = {d: c for d, c in num_parts.items() if not c.is_zero()}
    den_parts = {d: c for d, c in den_parts.items() if not c.is_zero()}
    if not den_parts:
        raise ZeroDivisionError("denominator is zero (mod the chart quadric)")
    if not num_parts:
        return PolySeries(PONE, 0, [], order if order is not None else 0, ideal)
    vn, vd = min(num_parts), min(den_parts)
    shift = vn - vd
    if rel is not None:
        order = shift + rel
    rel = order - shift
    if rel < 0:
        return PolySeries(PONE, 0, [], order, ideal)
    base = den_parts[vd]
    red = ideal.reduce if ideal is not None else (lambda p: p)
    # inverse of the shifted denominator: inv_k = N_k / base^(k+1)
    dmax = max(den_parts)
    inv = [PONE]
    base_pows = {0: PONE, 1: base}

    def bpow(k: int) -> Poly:
        got = base_pows.get(k)
        if got is None:
            got = bpow(k - 1) * base
            base_pows[k] = got
        return got

    for k in range(1, rel + 1):
        acc = Poly()
        for j in range(1, min(k, dmax - vd) + 1):
            dj = den_parts.get(vd + j)
            if dj is None:
                continue
            acc = acc + dj * inv[k - j] * bpow(j - 1)
        inv.append(red(-acc))
    # multiply by the numerator parts
    out = []
    nmax = max(num_parts)
    for m in range(rel + 1):
        acc = Poly()
        for a in range(max(0, m - rel), min(m, nmax - vn) + 1):
            na = num_parts.get(vn + a)
            if na is None:
                continue
            acc = acc + na * inv[m - a] * bpow(a)
        out.append((red(acc), m + 1))
    return PolySeries(base, shift, out, order, ideal)
