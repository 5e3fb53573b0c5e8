"""Charts and the maps between them.

Constrained charts (tetraspherical, sphere) carry their quadric; function
identities on them hold modulo that ideal.  The flat chart is the
2-variable Cartesian chart all operator-level checks run on.  Null charts
pair light-cone coordinates (p, q) with the operator form m(p,q) d_p d_q
and are used by the Stackel identification machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .symbols import TABLE, Symbol
from .poly import Poly
from .rational import RatFun
from .quadric import Quadric
from .exprio import parse_expr


@dataclass(frozen=True)
class Chart:
    name: str
    coords: tuple[Symbol, ...]
    quadric: Quadric | None = None
    metric_factor: RatFun | None = None

    def index_of(self, sym: Symbol) -> int:
        return self.coords.index(sym)


def _q(expr: str, elim: str) -> Quadric:
    return Quadric(parse_expr(expr).num, TABLE[elim])


CONE = _q("x1^2+x2^2+x3^2+x4^2", "x4")
CONE_P = _q("xp1^2+xp2^2+xp3^2+xp4^2", "xp4")
SPHERE_Q = _q("s1^2+s2^2+s3^2-1", "s3")

TETRA = Chart("tetraspherical", tuple(TABLE[n] for n in ("x1", "x2", "x3", "x4")), CONE)
TETRA_P = Chart("tetraspherical-primed", tuple(TABLE[n] for n in ("xp1", "xp2", "xp3", "xp4")), CONE_P)
FLAT = Chart("flat", (TABLE["x"], TABLE["y"]), None, RatFun.of(1))
SPHERE = Chart("sphere", (TABLE["s1"], TABLE["s2"], TABLE["s3"]), SPHERE_Q)
NULLCHART = Chart("null", (TABLE["p"], TABLE["q"]))

_CHARTS = {c.name: c for c in (TETRA, TETRA_P, FLAT, SPHERE, NULLCHART)}


def chart(name: str) -> Chart:
    return _CHARTS[name]


# -- substitutions between the standard charts ------------------------------

def _sub(pairs: dict[str, str]) -> dict[int, RatFun]:
    return {TABLE[k].index: parse_expr(v) for k, v in pairs.items()}


# A section of the null cone over the flat chart: ratios of tetraspherical
# coordinates restrict to functions of (x, y) along it.
TETRA_SECTION = _sub({
    "x1": "2*x", "x2": "2*y", "x3": "x^2+y^2-1", "x4": "I*(x^2+y^2+1)",
})

# flat coordinates as degree-0 functions on the cone
FLAT_ON_CONE = _sub({"x": "-x1/(x3+I*x4)", "y": "-x2/(x3+I*x4)"})

# sphere coordinates as degree-0 functions on the cone
SPHERE_ON_CONE = _sub({"s1": "I*x1/x4", "s2": "I*x2/x4", "s3": "-I*x3/x4"})

# a section of the cone over the sphere chart (x4 = 1)
SPHERE_SECTION = _sub({"x1": "-I*s1", "x2": "-I*s2", "x3": "I*s3", "x4": "1"})

# stereographic projection and its inverse
SPHERE_TO_FLAT = _sub({
    "s1": "2*x/(x^2+y^2+1)", "s2": "2*y/(x^2+y^2+1)", "s3": "(1-x^2-y^2)/(x^2+y^2+1)",
})
FLAT_TO_SPHERE = _sub({"x": "s1/(1+s3)", "y": "s2/(1+s3)"})

# flat null coordinates
NULL_ON_FLAT = _sub({"z": "x+I*y", "zb": "x-I*y"})
FLAT_ON_NULL = _sub({"x": "(z+zb)/2", "y": "-I*(z-zb)/2"})


def to_flat(v: RatFun) -> RatFun:
    """Flat form of a cone potential: (x3+i x4)^2 V restricted to the section."""
    w = parse_expr("(x3+I*x4)^2")
    return (w * v).subst(TETRA_SECTION)


def to_sphere(v: RatFun) -> RatFun:
    """Sphere form of a cone potential: V restricted to the x4 = 1 section."""
    return v.subst(SPHERE_SECTION)


def sphere_to_flat_fn(v: RatFun) -> RatFun:
    return v.subst(SPHERE_TO_FLAT)


def flat_from_primed(v: RatFun) -> RatFun:
    """Flat form of a potential on the primed cone (same section, primed names)."""
    w = parse_expr("(xp3+I*xp4)^2")
    section = _sub({
        "xp1": "2*x", "xp2": "2*y", "xp3": "x^2+y^2-1", "xp4": "I*(x^2+y^2+1)",
    })
    return (w * v).subst(section)


def unprime(v: RatFun) -> RatFun:
    """Rename primed tetraspherical coordinates to unprimed ones."""
    ren = _sub({"xp1": "x1", "xp2": "x2", "xp3": "x3", "xp4": "x4"})
    return v.subst(ren)


def prime(v: RatFun) -> RatFun:
    ren = _sub({"x1": "xp1", "x2": "xp2", "x3": "xp3", "x4": "xp4"})
    return v.subst(ren)
