"""Quadratic symmetry algebras: closure extraction and contraction.

The commutator R = [L1, L2] of a nondegenerate system satisfies
[Lj, R] = quadratic polynomial in (L1, L2, H) and R^2 = cubic polynomial,
in the fixed monomial basis below.  The engine solves for the coefficient
tables exactly (sampled linear solve + exact reconstruction check); for
Laplace systems the identities hold modulo right multiples of H.

Tables live in a small formal word algebra, so the basis rescalings a
contraction prescribes act on them symbolically and the eps -> 0 limits of
the rescaled tables can be compared against the target system's tables.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .symbols import TABLE, params
from .scalars import Scalar
from .poly import Poly
from .rational import RatFun, RZERO, RONE
from .linalg import solve_system
from .charts import FLAT
from .diffop import DiffOp, reduce_mod_H, op_eval
from .series import eps_expand

# words in (L1, L2, H) spanning the closure right-hand sides; degree <= 3
COMM_WORDS = ["L1L1", "L2L2", "HH", "L1L2s", "HL1", "HL2", "L1", "L2", "H", "1"]
SQ_WORDS = ["L1L1L1", "L2L2L2", "HHH", "L1L1L2s", "L1L2L2s", "L1L2L1", "L2L1L2",
            "HL1L2s", "HL1L1", "HL2L2", "HHL1", "HHL2",
            "L1L1", "L2L2", "L1L2s", "HL1", "HL2", "HH", "L1", "L2", "H", "1"]


def realize_word(word: str, L1: DiffOp, L2: DiffOp, H: DiffOp) -> DiffOp:
    chart = L1.chart
    syms = {"L1": L1, "L2": L2, "H": H}
    out = DiffOp.zero(chart)
    for seq in _word_sequences(word):
        term = DiffOp.identity(chart)
        for l in seq:
            term = term.compose(syms[l])
        out = out + term
    return out


def _letters(word: str) -> list[str]:
    out = []
    i = 0
    while i < len(word):
        if word[i] == "H":
            out.append("H")
            i += 1
        else:
            out.append(word[i:i + 2])
            i += 2
    return out


@dataclass
class QuadraticAlgebra:
    """Coefficient tables over the fixed monomial basis; entries are
    rational in the potential parameters."""
    comm1: dict[str, RatFun]      # [L1, R]
    comm2: dict[str, RatFun]      # [L2, R]
    square: dict[str, RatFun]     # R^2
    mod_h: bool = False


class ClosureFailure(ArithmeticError):
    pass


def _reduce(op: DiffOp, H: DiffOp, mod_h: bool) -> DiffOp:
    if not mod_h:
        return op
    return reduce_mod_H(op, H, TABLE["y"]).remainder


def _solve_table(target: DiffOp, words: list[str], basis_ops: dict[str, DiffOp],
                 param_syms: list) -> dict[str, RatFun]:
    """Solve target = sum c_w * word_w with parameter-rational constants.

    Rows come from sampling the chart coordinates per derivative index; a
    full-rank square subsystem is selected with the parameters evaluated
    (cheap scalar rank test), then solved exactly with symbolic parameters.
    The caller's reconstruction check certifies the result."""
    seeds = [(2, 3), (3, 5), (5, 2), (7, 3), (4, 9), (9, 4), (11, 6), (6, 11),
             (13, 2), (2, 13), (8, 15), (15, 8), (10, 3), (3, 17), (17, 10),
             (5, 12), (12, 7), (7, 16), (16, 5), (14, 11), (9, 8), (4, 7),
             (19, 3), (3, 19), (12, 13), (13, 12), (21, 2), (2, 21), (23, 5), (5, 23)]
    alphas = sorted({a for op in [target] + list(basis_ops.values()) for a in op.terms})
    xi, yi = TABLE["x"].index, TABLE["y"].index
    pvals = {TABLE[f"{stem}{j}"].index: Scalar.of(v)
             for stem, vals in (("a", (2, 3, 5, 7)), ("b", (3, 2, 7, 5)))
             for j, v in zip(range(1, 5), vals)}
    rows, rhs = [], []
    picked: list[list[Scalar]] = []   # numeric copies for the rank test
    n = len(words)
    for (sx, sy) in seeds:
        if len(rows) == n:
            break
        assign = {xi: Scalar.of(Fraction(sx, 7)), yi: Scalar.of(Fraction(sy, 9))}
        for alpha in alphas:
            if len(rows) == n:
                break
            vals, bad = [], False
            for w in words:
                cf = basis_ops[w].coefficient(alpha)
                v = _eval_param_rat(cf, assign)
                if v is None:
                    bad = True
                    break
                vals.append(v)
            if bad:
                continue
            tv = _eval_param_rat(target.coefficient(alpha), assign)
            if tv is None:
                continue
            numeric = [v.eval_scalars(pvals) for v in vals]
            if any(not nv.is_constant() for nv in numeric):
                continue
            numeric = [nv.constant_value() for nv in numeric]
            if not _increases_rank(picked, numeric):
                continue
            rows.append(vals)
            rhs.append(tv)
    from .linalg import bareiss_solve
    sol = bareiss_solve(rows, rhs) if len(rows) == n else None
    if sol is None:
        sol = solve_system(rows, rhs)
    if sol is None:
        raise ClosureFailure("no solution in the prescribed monomial basis")
    return {w: c for w, c in zip(words, sol) if not c.is_zero()}


def _increases_rank(picked: list[list[Scalar]], row: list[Scalar]) -> bool:
    """Greedy scalar rank test; ``picked`` holds reduced rows in place."""
    work = list(row)
    for red in picked:
        lead = next((j for j, v in enumerate(red) if not v.is_zero()), None)
        if lead is not None and not work[lead].is_zero():
            f = work[lead] * red[lead].inverse()
            work = [w - f * r for w, r in zip(work, red)]
    if all(v.is_zero() for v in work):
        return False
    picked.append(work)
    return True


def _eval_param_rat(cf: RatFun, assign: dict) -> RatFun | None:
    if cf.is_zero():
        return RZERO
    n = cf.num.eval_scalars(assign)
    d = cf.den.eval_scalars(assign)
    if d.is_zero():
        return None
    return RatFun(n, d)


def extract_quadratic_algebra(L1: DiffOp, L2: DiffOp, H: DiffOp,
                              mod_h: bool = False) -> QuadraticAlgebra:
    """Closure tables for generators (L1, L2, H); exact reconstruction is
    verified (mod H for conformal systems) before returning."""
    R = L1.commutator(L2)
    if R.is_zero():
        zero = {}
        return QuadraticAlgebra(zero, dict(zero), dict(zero), mod_h)
    comm_ops = {w: _reduce(realize_word(w, L1, L2, H), H, mod_h) for w in COMM_WORDS}
    sq_ops = {w: _reduce(realize_word(w, L1, L2, H), H, mod_h) for w in SQ_WORDS}
    out = []
    for target_op in (L1.commutator(R), L2.commutator(R)):
        tgt = _reduce(target_op, H, mod_h)
        table = _solve_table(tgt, COMM_WORDS, comm_ops, [])
        recon = _combine(table, comm_ops, L1.chart)
        if not (tgt - recon).is_zero():
            raise ClosureFailure("commutator table reconstruction failed")
        out.append(table)
    tgt = _reduce(R.compose(R), H, mod_h)
    sq = _solve_table(tgt, SQ_WORDS, sq_ops, [])
    recon = _combine(sq, sq_ops, L1.chart)
    if not (tgt - recon).is_zero():
        raise ClosureFailure("R^2 table reconstruction failed")
    return QuadraticAlgebra(out[0], out[1], sq, mod_h)


def _combine(table: dict[str, RatFun], ops: dict[str, DiffOp], chart) -> DiffOp:
    acc = DiffOp.zero(chart)
    for w, c in table.items():
        acc = acc + ops[w] * c
    return acc


# ---------------------------------------------------------------------------
# formal contraction of the tables
# ---------------------------------------------------------------------------
#
# Under L1' = u*(L1 + s), L2' = v*(L2 + t), H' = w*H (u, v, w, s, t scalars
# in eps), R' = u*v*R and the closure tables transform inside the same word
# basis: affine-scalar substitutions preserve letter order, so expanding a
# basis word noncommutatively stays inside the basis (the symmetrised words
# expand symmetrically).  The eps -> 0 limits of the transformed tables are
# compared with the target system's tables.


def _word_sequences(word: str) -> list[tuple[str, ...]]:
    """The letter sequences a basis word sums over (symmetrised pairs)."""
    if word == "1":
        return [()]
    if not word.endswith("s"):
        return [tuple(_letters(word))]
    letters = _letters(word[:-1])
    if len(letters) == 2:
        return [tuple(letters), tuple(reversed(letters))]
    if letters[0] == "H":
        # H {A, B}
        h, a, b = letters
        return [(h, a, b), (h, b, a)]
    if letters[0] == letters[1]:
        # {A^2, B}
        a, b = letters[0], letters[2]
        return [(a, a, b), (b, a, a)]
    # {A, B^2}
    a, b = letters[0], letters[1]
    return [(a, b, b), (b, b, a)]


_SEQ_WORD = {}
for _w in SQ_WORDS + COMM_WORDS:
    for _seq in _word_sequences(_w):
        _SEQ_WORD.setdefault(_seq, _w)


def _expand_word(word: str, subs: dict[str, tuple[RatFun, RatFun]]) -> dict[str, RatFun]:
    """Expand a word under letter -> scale*letter' + shift, noncommutatively.

    subs maps each letter to (scale, shift); the result is a table over the
    word basis.  Symmetrised source words expand symmetrically, so every
    arising letter sequence matches a basis word."""
    acc: dict[tuple, RatFun] = {}
    for seq in _word_sequences(word):
        _expand_seq(seq, subs, acc)
    out: dict[str, RatFun] = {}
    seen = set()
    for seq, c in acc.items():
        if c.is_zero() or seq in seen:
            continue
        target = _SEQ_WORD.get(seq)
        if target is None:
            raise ClosureFailure(f"sequence {seq} outside the word basis")
        group = _word_sequences(target)
        for other in group:
            if other != seq:
                oc = acc.get(other, RZERO)
                if oc != c:
                    raise ClosureFailure(f"asymmetric expansion at {seq}")
        seen.update(group)
        cur = out.get(target, RZERO)
        out[target] = cur + c
    return {w: c for w, c in out.items() if not c.is_zero()}


def _expand_seq(seq: tuple[str, ...], subs, acc):
    n = len(seq)
    for mask in range(1 << n):
        kept = []
        coeff = RONE
        for i in range(n):
            scale, shift = subs[seq[i]]
            if mask & (1 << i):
                kept.append(seq[i])
                coeff = coeff * scale
            else:
                if shift.is_zero():
                    coeff = RZERO
                    break
                coeff = coeff * shift
        if coeff.is_zero():
            continue
        key = tuple(kept)
        cur = acc.get(key, RZERO)
        acc[key] = cur + coeff


def contract_tables(alg: QuadraticAlgebra,
                    param_sub: dict[int, RatFun],
                    u: RatFun, s: RatFun, v: RatFun, t: RatFun,
                    w: RatFun) -> QuadraticAlgebra:
    """Transform the tables under the primed basis L1' = u*(L1 + s),
    L2' = v*(L2 + t), H' = w*H with parameter flows substituted, and take
    the eps -> 0 limit of every coefficient.

    Old generators in terms of new: L1 = L1'/u - s, L2 = L2'/v - t,
    H = H'/w; R' = u v R."""
    subs = {
        "L1": (u.inverse(), -s),
        "L2": (v.inverse(), -t),
        "H": (w.inverse(), RZERO),
    }

    def transform(table: dict[str, RatFun], scale: RatFun) -> dict[str, RatFun]:
        acc: dict[str, RatFun] = {}
        for word, c in table.items():
            cc = c.subst(param_sub) * scale
            for tw, tc in _expand_word(word, subs).items():
                cur = acc.get(tw, RZERO)
                acc[tw] = cur + cc * tc
        out = {}
        for wname, c in acc.items():
            lim = eps_expand(c, 0).limit()
            if not lim.is_zero():
                out[wname] = lim
        return out

    uv = u * v
    comm1 = transform(alg.comm1, u * uv)
    comm2 = transform(alg.comm2, v * uv)
    square = transform(alg.square, uv * uv)
    return QuadraticAlgebra(comm1, comm2, square, alg.mod_h)


def tables_equal(a: dict[str, RatFun], b: dict[str, RatFun]) -> bool:
    keys = set(a) | set(b)
    return all(a.get(k, RZERO) == b.get(k, RZERO) for k in keys)
