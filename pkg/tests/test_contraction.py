"""Contraction engine: residuals, substitution limits, spans, Lie maps."""

import pytest

from bocher.catalog import CATALOG
from bocher import contraction as con
from bocher.exprio import parse_expr
from bocher.linalg import span_equal
from bocher.rational import RatFun
from bocher.symbols import params


@pytest.fixture(scope="module")
def cat():
    return CATALOG.load()


def test_null_cone_residual_exact(cat):
    c = cat.get_contraction("1111-211")
    assert con.null_cone_residual(c) == parse_expr("eps^2/2*(xp1-I*xp2)^2")
    assert con.null_cone_ok(c)


def test_null_cone_all(cat):
    for name in cat.contractions:
        assert con.null_cone_ok(cat.get_contraction(name)), name


def test_substitution_spec_example(cat):
    c = cat.get_contraction("1111-211")
    lead, coeff = con.limit_pair(c, parse_expr("1/x1^2"))
    assert lead == 2
    assert con.equal_on_cone(coeff, parse_expr("-2/(xp1+I*xp2)^2"))
    # x4 passes through unchanged
    lead, coeff = con.limit_pair(c, parse_expr("x4"))
    assert lead == 0 and con.equal_on_cone(coeff, parse_expr("xp4"))
    # constants stay constants
    lead, coeff = con.limit_pair(c, parse_expr("5"))
    assert lead == 0 and coeff == parse_expr("5")


def test_diagonal_checks_match(cat):
    for name in sorted(cat.checks):
        r = con.run_check(cat, cat.get_check(name))
        assert r["status"] == "match", name


def test_contract_zero_potential(cat):
    c = cat.get_contraction("1111-22")
    got = con.contract_potential(c, RatFun.of(0), {})
    assert got.is_zero()


def test_limit_family_span_matches_explicit_map(cat):
    """Basis-free span limit equals the span of the explicit map's target."""
    check = cat.get_check("V1111-to-V211")
    c = cat.get_contraction(check.contraction)
    src = cat.get_system("[1,1,1,1]").family.basis
    span = con.limit_family_span(c, src)
    tgt = []
    for p in params("b"):
        assign = {q.index: (1 if q is p else 0) for q in params("b")}
        member = check.target.eval_scalars(
            {i: RatFun.of(v).constant_value() for i, v in assign.items()})
        tgt.append(con.flat_from_primed_pair(member))
    assert span_equal(span, tgt)


def test_span_basis_choice_invariance(cat):
    """A mixed (unimodular integer) source basis gives the same span."""
    c = cat.get_contraction("1111-22")
    src = cat.get_system("[1,1,1,1]").family.basis
    mixed = [src[0] + src[1], src[1], src[2] + src[3] + src[0], src[3]]
    s1 = con.limit_family_span(c, src)
    s2 = con.limit_family_span(c, mixed)
    assert span_equal(s1, s2)


def test_constant_family_span(cat):
    c = cat.get_contraction("1111-211")
    with pytest.raises(con.DegenerateSpan):
        con.limit_family_span(c, [parse_expr("1/x1^2")] * 4)


def test_lie_maps(cat):
    for name in cat.contractions:
        rep = con.verify_lie_map(cat.get_contraction(name))
        assert rep.ok, f"{name}: {rep.structure_detail}"
        assert rep.basis_invertible
        assert rep.corrected_structure_ok


def test_lie_map_identity_statuses(cat):
    rep = con.verify_lie_map(cat.get_contraction("1111-211"))
    statuses = {ident.split("==")[0].strip(): st for ident, st, _ in rep.identity_results}
    assert statuses["Lp12"] == "exact"
    assert statuses["Lp34"] == "exact"
