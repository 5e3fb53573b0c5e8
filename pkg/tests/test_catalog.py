"""Catalog fixtures: potentials, flat/sphere conversions, generators."""

import pytest

from bocher.catalog import CATALOG, get_system
from bocher.charts import (to_flat, to_sphere, sphere_to_flat_fn, FLAT,
                           SPHERE_Q, TETRA)
from bocher.exprio import parse_expr
from bocher.quadric import equal_mod_quadric
from bocher.linalg import span_dim, span_equal


@pytest.fixture(scope="module")
def cat():
    return CATALOG.load()


def test_get_system_potentials(cat):
    s = cat.get_system("[1,1,1,1]")
    assert s.family.basis[0] == parse_expr("1/x1^2")
    assert s.family.basis[3] == parse_expr("1/x4^2")
    with pytest.raises(KeyError):
        cat.get_system("nonexistent")


def test_to_flat_spec_examples():
    assert to_flat(parse_expr("1/x4^2")) == parse_expr("-4/(x^2+y^2+1)^2")
    assert to_flat(parse_expr("1/x1^2")) == parse_expr("1/x^2")
    assert to_flat(parse_expr("0")).is_zero()


def test_flat_families_match(cat):
    """to_flat of each tetraspherical basis equals the stored flat basis."""
    for s in cat.laplace_systems():
        if s.chart.name != "tetraspherical":
            continue
        for j, (v, vf) in enumerate(zip(s.family.basis, s.flat_family.basis)):
            assert to_flat(v) == vf, f"{s.name} member {j + 1}"


def test_to_sphere():
    # 1/x1^2 restricted through the x4 = 1 section
    got = to_sphere(parse_expr("1/x1^2"))
    assert equal_mod_quadric(got, parse_expr("-1/s1^2"), SPHERE_Q)
    assert to_sphere(parse_expr("7")) == parse_expr("7")


def test_sphere_flat_route_commutes(cat):
    """to_flat factors through the sphere and the stereographic projection."""
    import bocher.charts as charts
    for v in cat.get_system("[1,1,1,1]").family.basis:
        direct = to_flat(v)
        via_sphere = sphere_to_flat_fn(to_sphere(v))
        weight = parse_expr("-(1+(1-x^2-y^2)/(x^2+y^2+1))^2")
        assert direct == weight * via_sphere


def test_family_bases_independent(cat):
    for s in cat.laplace_systems():
        fam = s.flat_family or s.family
        assert span_dim(fam.basis) == 4, s.name


def test_koenigs_flat_form(cat):
    s = cat.get_system("[2,1,1]")
    assert s.flat_family.basis[2] == parse_expr("-(x^2+y^2)")
    assert s.flat_family.basis[3] == parse_expr("1")
