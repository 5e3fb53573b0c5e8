"""Exact linear algebra over the scalar and rational-function fields.

Everything is small and dense: Gaussian elimination with deterministic
pivoting (first nonzero entry in column order).  Span arithmetic for
potential families works modulo an optional chart quadric by clearing
denominators through an lcm and matching monomial coefficients exactly.
"""

from __future__ import annotations

from .scalars import Scalar
from .poly import Poly, PONE, poly_gcd
from .rational import RatFun, RZERO, RONE
from .quadric import Quadric


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum((A[i][t] * B[t][j] for t in range(k)), RZERO) for j in range(m)]
            for i in range(n)]


def mat_inv(M: list[list[RatFun]]) -> list[list[RatFun]]:
    n = len(M)
    aug = [[M[i][j] for j in range(n)] + [RONE if i == j else RZERO for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not aug[r][col].is_zero()), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [e * inv for e in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [er - f * ec for er, ec in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def bareiss_solve(rows: list[list[RatFun]], rhs: list[RatFun]) -> list[RatFun] | None:
    """Solve a square system by fraction-free (Bareiss) elimination.

    Rows are cleared to polynomial entries first; all intermediate growth is
    polynomial with exact divisions, which beats rational-function
    elimination when entries carry several parameters."""
    n = len(rows)
    if n == 0:
        return []
    A: list[list[Poly]] = []
    for row, b in zip(rows, rhs):
        den = PONE
        for e in list(row) + [b]:
            den = _lcm(den, e.den)
        A.append([e.num * den.div_exact(e.den) for e in list(row) + [b]])
    prev = PONE
    for k in range(n):
        piv = next((r for r in range(k, n) if not A[r][k].is_zero()), None)
        if piv is None:
            return None  # singular (caller falls back)
        A[k], A[piv] = A[piv], A[k]
        for r in range(k + 1, n):
            for c in range(k + 1, n + 1):
                A[r][c] = (A[k][k] * A[r][c] - A[r][k] * A[k][c]).div_exact(prev)
            A[r][k] = Poly()
        prev = A[k][k]
    xs: list[RatFun] = [RZERO] * n
    for k in range(n - 1, -1, -1):
        acc = RatFun(A[k][n], PONE, _normal=True)
        for c in range(k + 1, n):
            acc = acc - RatFun(A[k][c], PONE, _normal=True) * xs[c]
        xs[k] = acc / RatFun(A[k][k], PONE, _normal=True)
    return xs


def solve_system(rows: list[list[RatFun]], rhs: list[RatFun]) -> list[RatFun] | None:
    """One solution of rows * x = rhs (free unknowns set to zero), or None."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots: list[tuple[int, int]] = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if not A[r][col].is_zero()), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = A[row][col].inverse()
        A[row] = [e * inv for e in A[row]]
        for r in range(m):
            if r != row and not A[r][col].is_zero():
                f = A[r][col]
                A[r] = [er - f * ec for er, ec in zip(A[r], A[row])]
        pivots.append((row, col))
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if not A[r][n].is_zero():
            return None
    x = [RZERO] * n
    for r, c in pivots:
        x[c] = A[r][n]
    return x


# ---------------------------------------------------------------------------
# spans of rational functions modulo a quadric
# ---------------------------------------------------------------------------


def _lcm(a: Poly, b: Poly) -> Poly:
    g = poly_gcd(a, b)
    return a.div_exact(g) * b


def _cleared(funcs: list[RatFun], ideal: Quadric | None):
    """Common denominator and cleared numerators, quadric-reduced."""
    den = PONE
    for f in funcs:
        den = _lcm(den, f.den)
    nums = []
    for f in funcs:
        n = f.num * den.div_exact(f.den)
        nums.append(ideal.reduce(n) if ideal else n)
    return nums


def _monomial_rows(polys: list[Poly]):
    monos = sorted({m for p in polys for m in p.terms},
                   key=lambda m: tuple(sorted(m)))
    rows = []
    for m in monos:
        rows.append([RatFun.of(p.terms.get(m, Scalar.of(0))) for p in polys])
    return rows


def in_span(f: RatFun, basis: list[RatFun], ideal: Quadric | None = None) -> list[Scalar] | None:
    """Coordinates of f in span(basis) over scalars (mod ideal), or None."""
    cleared = _cleared(list(basis) + [f], ideal)
    bnums, fnum = cleared[:-1], cleared[-1]
    rows_all = _monomial_rows(bnums + [fnum])
    rows = [r[:-1] for r in rows_all]
    rhs = [r[-1] for r in rows_all]
    sol = solve_system(rows, rhs)
    if sol is None:
        return None
    return [s.constant_value() for s in sol]


def span_dim(funcs: list[RatFun], ideal: Quadric | None = None) -> int:
    nums = _cleared(funcs, ideal)
    rows = _monomial_rows(nums)
    # column rank by elimination
    m, n = len(rows), len(nums)
    A = [list(r) for r in rows]
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, m) if not A[r][col].is_zero()), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = A[rank][col].inverse()
        A[rank] = [e * inv for e in A[rank]]
        for r in range(m):
            if r != rank and not A[r][col].is_zero():
                f = A[r][col]
                A[r] = [er - f * ec for er, ec in zip(A[r], A[rank])]
        rank += 1
    return rank


def span_contains(big: list[RatFun], small: list[RatFun], ideal: Quadric | None = None) -> bool:
    return all(in_span(f, big, ideal) is not None for f in small)


def span_equal(a: list[RatFun], b: list[RatFun], ideal: Quadric | None = None) -> bool:
    return span_contains(a, b, ideal) and span_contains(b, a, ideal)
