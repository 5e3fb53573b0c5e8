"""Normal-ordered differential operators on a chart.

An operator is a sum of terms ``coefficient * d^alpha`` with the
coefficient (a rational function of the chart coordinates and parameters)
to the left of all derivatives.  Composition uses the Leibniz rule and
renormal-orders; reduction modulo right multiples of a Hamiltonian rewrites
the highest derivative in the designated reduction variable first, which
terminates and is deterministic.

Operators on constrained charts (cone, sphere) are manipulated in the free
coordinate algebra; identities between them are checked either modulo the
chart quadric at the function level or, canonically, after restriction to
the flat chart through a section of the constraint surface.
"""

from __future__ import annotations

from math import comb

from .symbols import Symbol
from .rational import RatFun, RZERO, RONE
from .linalg import mat_inv
from . import charts
from .charts import Chart


class ChartMismatch(ValueError):
    pass


class DiffOp:
    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: dict[tuple, RatFun] | None = None):
        self.chart = chart
        self.terms = {a: c for a, c in (terms or {}).items() if not c.is_zero()}

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(chart: Chart) -> "DiffOp":
        return DiffOp(chart)

    @staticmethod
    def identity(chart: Chart) -> "DiffOp":
        return DiffOp(chart, {(0,) * len(chart.coords): RONE})

    @staticmethod
    def multiplier(chart: Chart, f) -> "DiffOp":
        return DiffOp(chart, {(0,) * len(chart.coords): RatFun.of(f)})

    @staticmethod
    def partial(chart: Chart, sym: Symbol, order: int = 1) -> "DiffOp":
        a = [0] * len(chart.coords)
        a[chart.index_of(sym)] = order
        return DiffOp(chart, {tuple(a): RONE})

    @staticmethod
    def vector(chart: Chart, coeffs: dict[Symbol, RatFun]) -> "DiffOp":
        terms = {}
        for sym, c in coeffs.items():
            a = [0] * len(chart.coords)
            a[chart.index_of(sym)] = 1
            terms[tuple(a)] = RatFun.of(c)
        return DiffOp(chart, terms)

    # -- structure -----------------------------------------------------------

    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def coefficient(self, alpha: tuple) -> RatFun:
        return self.terms.get(alpha, RZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def function_part(self) -> RatFun:
        return self.terms.get((0,) * len(self.chart.coords), RZERO)

    def map_coefficients(self, fn) -> "DiffOp":
        return DiffOp(self.chart, {a: fn(c) for a, c in self.terms.items()})

    def _check(self, other: "DiffOp"):
        if self.chart is not other.chart and self.chart.name != other.chart.name:
            raise ChartMismatch(f"{self.chart.name} vs {other.chart.name}")

    # -- linear arithmetic -----------------------------------------------------

    def __add__(self, other: "DiffOp") -> "DiffOp":
        self._check(other)
        terms = dict(self.terms)
        for a, c in other.terms.items():
            s = terms.get(a)
            terms[a] = c if s is None else s + c
        return DiffOp(self.chart, terms)

    def __neg__(self) -> "DiffOp":
        return DiffOp(self.chart, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def __mul__(self, f) -> "DiffOp":
        f = RatFun.of(f)
        return DiffOp(self.chart, {a: c * f for a, c in self.terms.items()})

    __rmul__ = __mul__

    # -- composition --------------------------------------------------------------

    def compose(self, other: "DiffOp") -> "DiffOp":
        """Normal-ordered product self o other (Leibniz rule)."""
        self._check(other)
        n = len(self.chart.coords)
        syms = self.chart.coords
        out: dict[tuple, RatFun] = {}
        # derivative cache per coefficient of `other`
        for beta, b in other.terms.items():
            dcache: dict[tuple, RatFun] = {(0,) * n: b}

            def deriv(delta: tuple) -> RatFun:
                got = dcache.get(delta)
                if got is not None:
                    return got
                for i in range(n):
                    if delta[i]:
                        prev = list(delta)
                        prev[i] -= 1
                        base = deriv(tuple(prev))
                        val = base.derivative(syms[i])
                        dcache[delta] = val
                        return val
                raise AssertionError

            for alpha, a in self.terms.items():
                # enumerate gamma <= alpha
                gammas = [()]
                for i in range(n):
                    gammas = [g + (k,) for g in gammas for k in range(alpha[i] + 1)]
                for gamma in gammas:
                    delta = tuple(al - ga for al, ga in zip(alpha, gamma))
                    db = deriv(delta)
                    if db.is_zero():
                        continue
                    mult = 1
                    for i in range(n):
                        mult *= comb(alpha[i], gamma[i])
                    coeff = a * db * mult
                    idx = tuple(ga + be for ga, be in zip(gamma, beta))
                    s = out.get(idx)
                    out[idx] = coeff if s is None else s + coeff
        return DiffOp(self.chart, out)

    def commutator(self, other: "DiffOp") -> "DiffOp":
        return self.compose(other) - other.compose(self)

    def anticommutator(self, other: "DiffOp") -> "DiffOp":
        return self.compose(other) + other.compose(self)

    def apply(self, f) -> RatFun:
        """Apply to a function of the chart coordinates."""
        f = RatFun.of(f)
        out = RZERO
        for alpha, c in self.terms.items():
            g = f
            for i, k in enumerate(alpha):
                for _ in range(k):
                    g = g.derivative(self.chart.coords[i])
            if not g.is_zero():
                out = out + c * g
        return out

    # -- comparisons ------------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.chart.name == other.chart.name and self.terms == other.terms

    def equal_mod_quadric(self, other: "DiffOp") -> bool:
        """Coefficient-wise equality modulo the chart quadric."""
        self._check(other)
        ideal = self.chart.quadric
        for a in set(self.terms) | set(other.terms):
            d = self.coefficient(a) - other.coefficient(a)
            if ideal is None:
                if not d.is_zero():
                    return False
            elif not ideal.rat_is_zero(ideal.reduce_rat(d)):
                return False
        return True

    def __repr__(self):
        from .exprio import format_operator
        idx = {s.index: s for s in self.chart.coords}
        terms = []
        for a, c in self.terms.items():
            d = {self.chart.coords[i].index: k for i, k in enumerate(a) if k}
            terms.append((c, d))
        return f"DiffOp[{self.chart.name}]({format_operator(terms)})"


def compose(a: DiffOp, b: DiffOp) -> DiffOp:
    return a.compose(b)


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    return a.commutator(b)


def anticommutator(a: DiffOp, b: DiffOp) -> DiffOp:
    return a.anticommutator(b)


# ---------------------------------------------------------------------------
# reduction modulo right multiples of a Hamiltonian
# ---------------------------------------------------------------------------


class ModHRemainder:
    """A = quotient o H + remainder, exactly."""

    __slots__ = ("quotient", "remainder")

    def __init__(self, quotient: DiffOp, remainder: DiffOp):
        self.quotient = quotient
        self.remainder = remainder


def reduce_mod_H(A: DiffOp, H: DiffOp, var: Symbol) -> ModHRemainder:
    """Divide on the right by H = d_var^2 + (lower order in var).

    Requires the d_var^2 coefficient of H to be exactly 1 and all other
    terms of H to have var-degree < 2.  Each rewrite strictly lowers the
    var-degree, so the loop terminates; the reconstruction A = Q o H + R is
    asserted on every invocation.
    """
    chart = A.chart
    vi = chart.index_of(var)
    lead = [0] * len(chart.coords)
    lead[vi] = 2
    lead = tuple(lead)
    if H.coefficient(lead) != RONE:
        raise ValueError("H is not monic in the second derivative of the reduction variable")
    for a in H.terms:
        if a != lead and a[vi] >= 2:
            raise ValueError("H has extra terms of degree >= 2 in the reduction variable")
    Q = DiffOp.zero(chart)
    R = DiffOp(chart, dict(A.terms))
    while True:
        cand = [a for a in R.terms if a[vi] >= 2]
        if not cand:
            break
        alpha = max(cand, key=lambda a: (a[vi], a))
        c = R.terms[alpha]
        aq = list(alpha)
        aq[vi] -= 2
        qterm = DiffOp(chart, {tuple(aq): c})
        Q = Q + qterm
        R = R - qterm.compose(H)
    assert (Q.compose(H) + R - A).is_zero(), "mod-H reconstruction failed"
    return ModHRemainder(Q, R)


# ---------------------------------------------------------------------------
# restriction of constrained-chart operators to the flat chart
# ---------------------------------------------------------------------------


def _restrict(A: DiffOp, uv: tuple[RatFun, RatFun], section: dict[int, RatFun]) -> DiffOp:
    """Restrict an intrinsic operator through a section of the constraint.

    ``uv`` gives the flat coordinates as functions on the source chart;
    ``section`` sends source coordinates to functions of (x, y) with
    u o section = x, v o section = y.  Sound for operators tangent to the
    constraint surface (all catalogued generators are).
    """
    n = len(A.chart.coords)
    syms = A.chart.coords
    grads = []
    for w in uv:
        grads.append([w.derivative(s) for s in syms])
    out: dict[tuple, RatFun] = {}
    for alpha, c in A.terms.items():
        semi: dict[tuple, RatFun] = {(0, 0): RONE}
        for i in range(n):
            for _ in range(alpha[i]):
                new: dict[tuple, RatFun] = {}

                def bump(key, val):
                    if val.is_zero():
                        return
                    s = new.get(key)
                    new[key] = val if s is None else s + val
                for beta, g in semi.items():
                    bump(beta, g.derivative(syms[i]))
                    bump((beta[0] + 1, beta[1]), g * grads[0][i])
                    bump((beta[0], beta[1] + 1), g * grads[1][i])
                semi = new
        for beta, g in semi.items():
            val = c * g
            s = out.get(beta)
            out[beta] = val if s is None else s + val
    flat_terms = {}
    for beta, g in out.items():
        v = g.subst(section)
        if not v.is_zero():
            flat_terms[beta] = v
    return DiffOp(charts.FLAT, flat_terms)


def cone_to_flat(A: DiffOp) -> DiffOp:
    """Flat restriction of a cone-tangent operator (tetraspherical chart)."""
    u = charts.FLAT_ON_CONE[charts.TABLE["x"].index]
    v = charts.FLAT_ON_CONE[charts.TABLE["y"].index]
    return _restrict(A, (u, v), charts.TETRA_SECTION)


def sphere_to_flat(A: DiffOp) -> DiffOp:
    """Flat restriction of a sphere-tangent operator (stereographic section)."""
    u = charts.FLAT_TO_SPHERE[charts.TABLE["x"].index]
    v = charts.FLAT_TO_SPHERE[charts.TABLE["y"].index]
    return _restrict(A, (u, v), charts.SPHERE_TO_FLAT)


def pushforward_linear(A: DiffOp, M: list[list[RatFun]], target: Chart) -> DiffOp:
    """Transform A through the linear substitution x = M x' (entries may
    involve eps and free constants, but not coordinates)."""
    n = len(A.chart.coords)
    if len(M) != n:
        raise ValueError("matrix size does not match the chart dimension")
    W = mat_inv(M)  # dx_j = sum_c W[c][j] dx'_c
    tsyms = target.coords
    # coordinate substitution x_j -> sum_k M[j][k] x'_k
    sub = {}
    for j, s in enumerate(A.chart.coords):
        acc = RZERO
        for k in range(n):
            acc = acc + M[j][k] * RatFun.var(tsyms[k])
        sub[s.index] = acc
    out: dict[tuple, RatFun] = {}
    for alpha, c in A.terms.items():
        # expand the derivative part: prod_j (sum_c W[c][j] d_c)^alpha_j
        parts: dict[tuple, RatFun] = {(0,) * n: RONE}
        for j in range(n):
            for _ in range(alpha[j]):
                new: dict[tuple, RatFun] = {}
                for idx, w in parts.items():
                    for cc in range(n):
                        if W[cc][j].is_zero():
                            continue
                        nidx = list(idx)
                        nidx[cc] += 1
                        key = tuple(nidx)
                        val = w * W[cc][j]
                        s = new.get(key)
                        new[key] = val if s is None else s + val
                parts = new
        csub = c.subst(sub)
        for idx, w in parts.items():
            val = csub * w
            s = out.get(idx)
            out[idx] = val if s is None else s + val
    return DiffOp(target, out)


def parse_op(text: str, chart: Chart) -> DiffOp:
    """Parse an operator in the expression grammar with d/d tokens."""
    from .exprio import parse_operator_terms
    coord_idx = {s.index: i for i, s in enumerate(chart.coords)}
    terms: dict[tuple, RatFun] = {}
    for c, d in parse_operator_terms(text):
        a = [0] * len(chart.coords)
        for idx, e in d.items():
            if idx not in coord_idx:
                raise ValueError(f"derivative in non-chart symbol index {idx}")
            a[coord_idx[idx]] = e
        key = tuple(a)
        s = terms.get(key)
        terms[key] = c if s is None else s + c
    return DiffOp(chart, terms)


def format_op(A: DiffOp) -> str:
    from .exprio import format_operator
    terms = []
    for a, c in A.terms.items():
        d = {A.chart.coords[i].index: k for i, k in enumerate(a) if k}
        terms.append((c, d))
    return format_operator(terms)


# ---------------------------------------------------------------------------
# operator expressions: the scalar grammar extended with named operator
# atoms (L12, J1, ...), d/d tokens, and comm/acomm calls
# ---------------------------------------------------------------------------


class _OpEval:
    """Evaluator over DiffOp/RatFun values; products compose left to right."""

    def __init__(self, text: str, chart: Chart, atoms: dict[str, "DiffOp"]):
        from .exprio import _tokenize
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0
        self.chart = chart
        self.atoms = atoms

    def peek(self):
        return self.tokens[self.k][0]

    def next(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, want):
        tok, pos = self.next()
        if tok != want:
            raise ValueError(f"expected {want!r} at {pos} in {self.text!r}")

    def parse(self):
        v = self.expr()
        if self.peek() != "":
            raise ValueError(f"trailing input in {self.text!r}")
        return self._as_op(v)

    def _as_op(self, v):
        if isinstance(v, DiffOp):
            return v
        return DiffOp.multiplier(self.chart, v)

    def expr(self):
        v = self.term()
        while self.peek() in ("+", "-"):
            op, _ = self.next()
            w = self.term()
            a, b = v, w
            if isinstance(a, DiffOp) or isinstance(b, DiffOp):
                a, b = self._as_op(a), self._as_op(b)
                v = a + b if op == "+" else a - b
            else:
                v = a + b if op == "+" else a - b
        return v

    def term(self):
        v = self.factor()
        while self.peek() in ("*", "/"):
            op, pos = self.next()
            w = self.factor()
            if op == "*":
                if isinstance(v, DiffOp) and isinstance(w, DiffOp):
                    v = v.compose(w)
                elif isinstance(v, DiffOp):
                    v = v.compose(DiffOp.multiplier(self.chart, w))
                elif isinstance(w, DiffOp):
                    v = w * v  # scalar from the left
                else:
                    v = v * w
            else:
                if isinstance(w, DiffOp):
                    raise ValueError(f"division by an operator at {pos}")
                if isinstance(v, DiffOp):
                    v = v * RatFun.of(w).inverse()
                else:
                    v = v / w
        return v

    def factor(self):
        sign = 1
        while self.peek() in ("+", "-"):
            tok, _ = self.next()
            if tok == "-":
                sign = -sign
        v = self.power()
        if sign < 0:
            v = -v if isinstance(v, DiffOp) else -v
        return v

    def power(self):
        v = self.atom()
        if self.peek() == "^":
            self.next()
            neg = False
            if self.peek() == "-":
                self.next()
                neg = True
            tok, pos = self.next()
            if not tok.isdigit():
                raise ValueError(f"integer exponent expected at {pos}")
            n = int(tok)
            if isinstance(v, DiffOp):
                if neg:
                    raise ValueError("negative power of an operator")
                out = DiffOp.identity(self.chart)
                for _ in range(n):
                    out = out.compose(v)
                v = out
            else:
                v = v ** (-n if neg else n)
        return v

    def atom(self):
        from .exprio import ParseError
        from .scalars import Scalar, I as SI, adjoin_radical
        from .symbols import TABLE
        tok, pos = self.next()
        if tok == "(":
            v = self.expr()
            self.expect(")")
            return v
        if tok.isdigit():
            return RatFun.of(int(tok))
        if tok == "I":
            return RatFun.of(SI)
        if tok in ("comm", "acomm"):
            self.expect("(")
            a = self._as_op(self.expr())
            # argument separator: a bare '/' would be ambiguous, use ','
            tok2, pos2 = self.next()
            if tok2 != ",":
                raise ValueError(f"expected ',' in {tok} at {pos2}")
            b = self._as_op(self.expr())
            self.expect(")")
            return a.commutator(b) if tok == "comm" else a.anticommutator(b)
        if tok == "sqrt":
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return RatFun.of(adjoin_radical(RatFun.of(arg).constant_value().to_fraction()))
        if tok.startswith("d/d"):
            return DiffOp.partial(self.chart, TABLE[tok[3:]])
        if tok in self.atoms:
            return self.atoms[tok]
        if tok in TABLE:
            return RatFun.var(TABLE[tok])
        raise ValueError(f"unknown name {tok!r} at {pos} in operator expression")


def op_eval(text: str, chart: Chart, atoms: dict[str, DiffOp] | None = None) -> DiffOp:
    """Evaluate an operator expression (L-atoms, derivatives, functions)."""
    return _OpEval(text, chart, atoms or {}).parse()
