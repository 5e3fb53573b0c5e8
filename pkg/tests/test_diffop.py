"""Operator algebra: Leibniz composition, commutators, mod-H reduction,
and the rotation algebra on the cone."""

import random

import pytest

from bocher.scalars import Scalar, I
from bocher.symbols import TABLE
from bocher.poly import Poly
from bocher.rational import RatFun, RONE
from bocher.charts import TETRA, FLAT, SPHERE
from bocher.diffop import (DiffOp, reduce_mod_H, cone_to_flat, sphere_to_flat,
                           op_eval, parse_op, format_op)
from bocher.catalog import L, tetra_atoms, flat_atoms, sphere_atoms, ELEVEN_DIM_BASIS
from bocher.contraction import so4_bracket, _PAIRS
from bocher.exprio import parse_expr

DX = DiffOp.partial(FLAT, TABLE["x"])
DY = DiffOp.partial(FLAT, TABLE["y"])
X = RatFun.var(TABLE["x"])
Y = RatFun.var(TABLE["y"])


def test_leibniz():
    xop = DiffOp.multiplier(FLAT, X)
    prod = DX.compose(xop)
    # d/dx o x = x d/dx + 1
    assert prod == DiffOp.vector(FLAT, {TABLE["x"]: X}) + DiffOp.identity(FLAT)


def test_compose_identity():
    A = op_eval("x*d/dx^2 + y*d/dy + 1/x", FLAT, {})
    assert A.compose(DiffOp.identity(FLAT)) == A
    assert DiffOp.identity(FLAT).compose(A) == A


def test_commutator_dx_x():
    xop = DiffOp.multiplier(FLAT, X)
    assert DX.commutator(xop) == DiffOp.identity(FLAT)
    assert DX.commutator(DX).is_zero()


def test_so4_commutator_table():
    atoms = tetra_atoms(TETRA)
    for (a, b) in _PAIRS:
        for (c, d) in _PAIRS:
            got = atoms[f"L{a}{b}"].commutator(atoms[f"L{c}{d}"])
            want = DiffOp.zero(TETRA)
            for (m, n), s in so4_bracket((a, b), (c, d)).items():
                want = want + L(m, n) * RatFun.of(s)
            assert (got - want).is_zero(), f"[L{a}{b}, L{c}{d}]"


def test_so4_relation_spec_example():
    atoms = tetra_atoms(TETRA)
    got = atoms["L12"].commutator(atoms["L13"])
    assert (got + atoms["L23"]).is_zero()


def test_jk_realisation():
    at = flat_atoms()
    eps = {(1, 2): "3", (2, 3): "1", (1, 3): "-2"}
    # [J_i, J_j] = eps_ijk J_k and same for K; [J_i, K_j] = 0
    names = ["J1", "J2", "J3"]
    knames = ["Kj1", "Kj2", "Kj3"]
    for i in range(3):
        for j in range(3):
            cj = at[names[i]].commutator(at[names[j]])
            ck = at[knames[i]].commutator(at[knames[j]])
            if i == j:
                assert cj.is_zero() and ck.is_zero()
            else:
                k = 3 - i - j
                sign = 1 if (i, j) in ((0, 1), (1, 2), (2, 0)) else -1
                assert (cj - at[names[k]] * RatFun.of(sign)).is_zero()
                assert (ck - at[knames[k]] * RatFun.of(sign)).is_zero()
            assert at[names[i]].commutator(at[knames[j]]).is_zero()


def test_jk_null_squares():
    at = flat_atoms()
    J2 = at["J1"].compose(at["J1"]) + at["J2"].compose(at["J2"]) + at["J3"].compose(at["J3"])
    K2 = at["Kj1"].compose(at["Kj1"]) + at["Kj2"].compose(at["Kj2"]) + at["Kj3"].compose(at["Kj3"])
    assert J2.is_zero()
    assert K2.is_zero()


def test_jacobi_identity():
    rng = random.Random(7)
    at = flat_atoms()
    pool = list(at.values())
    for _ in range(4):
        A, B, C = rng.sample(pool, 3)
        j = (A.commutator(B)).commutator(C) + (B.commutator(C)).commutator(A) \
            + (C.commutator(A)).commutator(B)
        assert j.is_zero()


def test_reduce_mod_H_basic():
    H = op_eval("d/dx^2 + d/dy^2", FLAT, {})
    A = op_eval("d/dy^2", FLAT, {})
    r = reduce_mod_H(A, H, TABLE["y"])
    assert r.quotient == DiffOp.identity(FLAT)
    assert r.remainder == -op_eval("d/dx^2", FLAT, {})
    r2 = reduce_mod_H(H, H, TABLE["y"])
    assert r2.quotient == DiffOp.identity(FLAT)
    assert r2.remainder.is_zero()


def test_reduce_mod_H_reconstruction():
    V = parse_expr("a1/x^2 + a2/y^2")
    H = op_eval("d/dx^2 + d/dy^2", FLAT, {}) + DiffOp.multiplier(FLAT, V)
    A = op_eval("x*d/dx*d/dy^3 + y^2*d/dy^2 + d/dx*d/dy", FLAT, {})
    r = reduce_mod_H(A, H, TABLE["y"])
    assert (r.quotient.compose(H) + r.remainder - A).is_zero()
    for alpha in r.remainder.terms:
        assert alpha[FLAT.index_of(TABLE["y"])] < 2


def test_reduce_mod_H_requires_monic():
    H = op_eval("x*d/dy^2 + d/dx^2", FLAT, {})
    with pytest.raises(ValueError):
        reduce_mod_H(DX, H, TABLE["y"])


def test_flat_correspondences():
    at = flat_atoms()
    pairs = [
        ("L13 + I*L14", at["P1"]),
        ("L23 + I*L24", at["P2"]),
        ("I*L34", at["D"]),
        ("L12", at["J"]),
        ("L13 - I*L14", at["K1"]),
        ("L23 - I*L24", at["K2"]),
    ]
    for text, want in pairs:
        got = cone_to_flat(op_eval(text, TETRA, tetra_atoms(TETRA)))
        assert (got - want).is_zero(), text


def test_restriction_is_multiplicative():
    atoms = tetra_atoms(TETRA)
    A = op_eval("L12", TETRA, atoms)
    B = op_eval("L13 + I*L14", TETRA, atoms)
    lhs = cone_to_flat(A.compose(B))
    rhs = cone_to_flat(A).compose(cone_to_flat(B))
    assert (lhs - rhs).is_zero()


def test_sphere_restriction():
    at = sphere_atoms()
    flat = flat_atoms()
    got = sphere_to_flat(at["J12"])
    assert (got - flat["J"]).is_zero()


def test_eleven_dim_space_is_conformal_laplacian():
    atoms = tetra_atoms(TETRA)
    lap = op_eval("d/dx^2 + d/dy^2", FLAT, {})
    for text in ELEVEN_DIM_BASIS:
        op = cone_to_flat(op_eval(text, TETRA, atoms))
        terms = dict(op.terms)
        gxx = terms.pop((2, 0), RatFun.of(0))
        gyy = terms.pop((0, 2), RatFun.of(0))
        # g*(dxx + dyy) for some g; the Pfaffian combination restricts to 0
        assert gxx == gyy, text
        assert all(c.is_zero() for c in terms.values()), f"{text}: extra terms"


def test_apply():
    L12f = L(1, 2)
    f = parse_expr("x1^2 + x2^2")
    assert L12f.apply(f).is_zero()
    assert DX.apply(parse_expr("x^2")) == parse_expr("2*x")


def test_operator_parse_format_roundtrip():
    A = op_eval("x1*d/dx2^2 - (1/x1)*d/dx3 + a1*x2", TETRA, {})
    text = format_op(A)
    B = parse_op(text, TETRA)
    assert (A - B).is_zero()
