"""Conformal Stackel transforms and witnessed identification.

Transforming a flat-chart Laplace system by a member U of its potential
family produces a Helmholtz system with metric factor U and potential
family V_j / U; the catalogued conformal symmetries become true symmetries
after the eigenvalue correction S - (sum A_j dW/da_j) * H-tilde, which the
engine verifies exactly.

Identification runs in null coordinates: every catalogued Helmholtz target
carries a rational null-chart presentation H = m(p, q) d_p d_q + V(p, q)
(transcendental charts are rationalised through exponential/half-angle
substitutions recorded with the fixture), and a witness map z = Z(p),
zb = Zb(q).  Matching the metric exactly (up to one reported scale) and
solving the 4x4 parameter correspondence exactly is the identification.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .symbols import TABLE, Symbol, params
from .scalars import Scalar
from .poly import Poly
from .rational import RatFun, RZERO, RONE
from .linalg import in_span, solve_system
from .charts import FLAT, NULLCHART
from .diffop import DiffOp, op_eval
from .catalog import Catalog, CATALOG, System, PotentialFamily
from .exprio import parse_expr, format_expr


@dataclass
class StackelSystem:
    """A Helmholtz system presented as (metric multiplier, family) on the
    flat chart, with exact true symmetries."""
    source: System
    u_params: tuple
    metric: RatFun                    # flat metric factor = U
    family: list[RatFun]              # Helmholtz potentials V_j / U
    hamiltonian: DiffOp               # (1/U) Laplacian + sum a_j V_j / U
    generators: dict[str, DiffOp] = field(default_factory=dict)


def conformal_stackel(system: System, u_params, cat: Catalog | None = None) -> StackelSystem:
    """Transform a catalogued Laplace system by the family member with
    parameter tuple ``u_params``."""
    from .verify import flat_generator
    fam = system.flat_family or system.family
    U = fam.combine([RatFun.of(u) for u in u_params])
    if U.is_zero():
        raise ValueError("multiplier must be a nonzero family member")
    Uinv = U.inverse()
    lap = op_eval("d/dx^2 + d/dy^2", FLAT, {})
    V = fam.symbolic()
    Ht = lap * Uinv + DiffOp.multiplier(FLAT, V * Uinv)
    out = StackelSystem(system, tuple(u_params), U,
                        [vj * Uinv for vj in fam.basis], Ht)
    for gname in system.generator_order:
        S = flat_generator(system, gname)
        W = S.function_part()
        G = RZERO
        for coeff, sym in zip(u_params, fam.param_syms):
            if RatFun.of(coeff).is_zero():
                continue
            G = G + RatFun.of(coeff) * _param_coefficient(W, sym)
        out.generators[gname] = S - DiffOp.multiplier(FLAT, G).compose(Ht)
    return out


def _param_coefficient(f: RatFun, sym: Symbol) -> RatFun:
    """Coefficient of a parameter symbol in a parameter-linear function."""
    return f.derivative(sym)


def true_symmetry_defects(ts: StackelSystem) -> dict[str, DiffOp]:
    """[S-tilde, H-tilde] for each transformed generator (zero = pass)."""
    return {name: S.commutator(ts.hamiltonian) for name, S in ts.generators.items()}


# ---------------------------------------------------------------------------
# identification against null-chart targets
# ---------------------------------------------------------------------------


@dataclass
class NullTarget:
    """A Helmholtz system in rationalised null coordinates (p, q)."""
    name: str
    metric: RatFun                    # H = metric * d_p d_q + potential
    basis: list[RatFun]               # potential family on (p, q)
    notes: dict[str, str] = field(default_factory=dict)


@dataclass
class Witness:
    target: str
    zp: RatFun                        # z = Z(p)
    zbq: RatFun                       # zb = Zb(q)
    notes: dict[str, str] = field(default_factory=dict)


@dataclass
class Identification:
    target: str
    scale: Scalar                     # H_target = scale * (H-tilde o witness)
    correspondence: list[list[Scalar]]  # candidate family over target basis


class IdentificationFailure(Exception):
    pass


_ZI = None


def _null_subst(w: Witness) -> dict[int, RatFun]:
    return {TABLE["z"].index: w.zp, TABLE["zb"].index: w.zbq}


def _flat_to_null(f: RatFun) -> RatFun:
    """Rewrite a flat-chart function in null coordinates z, zb."""
    return f.subst({TABLE["x"].index: parse_expr("(z+zb)/2"),
                    TABLE["y"].index: parse_expr("-I*(z-zb)/2")})


def identify(candidate: StackelSystem, witness: Witness,
             target: NullTarget) -> Identification:
    """Pull the candidate through the witness map and match the target.

    The candidate (1/U)(dx^2+dy^2) + V/U becomes, in null coordinates,
    (4/U) dz dzb + V/U; under z = Z(p), zb = Zb(q) the kinetic part is
    (4/(U Z' Zb')) dp dq.  The metric must match the target's exactly up to
    one scalar (reported), and each candidate potential must be an exact
    scalar combination of the target basis scaled the same way.
    """
    sub = _null_subst(witness)
    Zp = witness.zp.derivative(TABLE["p"])
    Zbq = witness.zbq.derivative(TABLE["q"])
    Unull = _flat_to_null(candidate.metric).subst(sub)
    m_cand = RatFun.of(4) / (Unull * Zp * Zbq)
    ratio = m_cand / target.metric
    if not ratio.is_constant():
        raise IdentificationFailure(
            f"metric mismatch: candidate/target = {format_expr(ratio)[:120]}")
    scale = ratio.constant_value()
    if scale.is_zero():
        raise IdentificationFailure("degenerate metric scale")
    rows = []
    sinv = RatFun.of(scale.inverse())
    for vj in candidate.family:
        cand = _flat_to_null(vj).subst(sub) * sinv
        coords = in_span(cand, target.basis)
        if coords is None:
            raise IdentificationFailure(
                f"potential member is outside the target family span")
        rows.append(coords)
    return Identification(target.name, scale, rows)


def equivalence_class(name: str, cat: Catalog | None = None) -> list[str]:
    cat = (cat or CATALOG).load()
    if name not in cat.equivalence_classes:
        raise KeyError(f"unknown equivalence class {name!r}")
    return list(cat.equivalence_classes[name])
