"""Catalog of charts, Lie generators, and superintegrable systems.

System data (potentials, generators, class membership, multiplier tables)
lives in fixture files under ``bocher/fixtures``; this module loads them
and provides the generator atoms (rotations L_jk on the cone, the flat-space
conformal fields, the left/right so(3) factors J_i, K_i) that fixture
operator expressions may reference.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources

from .scalars import Scalar, I as SI
from .symbols import TABLE, Symbol, params
from .poly import Poly
from .rational import RatFun, RZERO
from .exprio import parse_expr
from . import charts
from .charts import Chart, TETRA, TETRA_P, FLAT, SPHERE
from .diffop import DiffOp, op_eval, cone_to_flat, sphere_to_flat


# ---------------------------------------------------------------------------
# generator atoms
# ---------------------------------------------------------------------------

def L(j: int, k: int, chart: Chart = TETRA) -> DiffOp:
    """Rotation generator x_j d_k - x_k d_j in the free 4-variable algebra."""
    if j == k:
        raise ValueError("L_jj is zero")
    if j > k:
        return -L(k, j, chart)
    sj, sk = chart.coords[j - 1], chart.coords[k - 1]
    return DiffOp.vector(chart, {sk: RatFun.var(sj), sj: -RatFun.var(sk)})


def _dz() -> DiffOp:
    half = RatFun.of(Scalar.of(1) / 2)
    mi = RatFun.of(-SI * Scalar.of(1) / 2)
    return DiffOp.vector(FLAT, {TABLE["x"]: half, TABLE["y"]: mi})


def _dzb() -> DiffOp:
    half = RatFun.of(Scalar.of(1) / 2)
    pi_ = RatFun.of(SI * Scalar.of(1) / 2)
    return DiffOp.vector(FLAT, {TABLE["x"]: half, TABLE["y"]: pi_})


def flat_atoms() -> dict[str, DiffOp]:
    """Conformal fields on the flat chart, including the J/K realisation."""
    x, y = RatFun.var(TABLE["x"]), RatFun.var(TABLE["y"])
    i = RatFun.of(SI)
    z = x + i * y
    zb = x - i * y
    dz, dzb = _dz(), _dzb()
    P1 = DiffOp.partial(FLAT, TABLE["x"])
    P2 = DiffOp.partial(FLAT, TABLE["y"])
    D = DiffOp.vector(FLAT, {TABLE["x"]: x, TABLE["y"]: y})
    J = DiffOp.vector(FLAT, {TABLE["y"]: x, TABLE["x"]: -y})
    K1 = DiffOp.vector(FLAT, {TABLE["x"]: x * x - y * y, TABLE["y"]: 2 * x * y})
    K2 = DiffOp.vector(FLAT, {TABLE["y"]: y * y - x * x, TABLE["x"]: 2 * x * y})
    half = RatFun.of(Scalar.of(1) / 2)
    atoms = {
        "P1": P1, "P2": P2, "D": D, "J": J, "K1": K1, "K2": K2,
        "dz": dz, "dzb": dzb,
        # left so(3): functions of z only
        "J1": (dz * (i * (1 - z * z))) * half,
        "J2": (dz * (1 + z * z)) * half,
        "J3": dz * (i * z),
        # right so(3): functions of zb only
        "Kj1": (dzb * (-i * (1 - zb * zb))) * half,
        "Kj2": (dzb * (1 + zb * zb)) * half,
        "Kj3": dzb * (-i * zb),
    }
    return atoms


def tetra_atoms(chart: Chart = TETRA) -> dict[str, DiffOp]:
    atoms = {}
    for j in range(1, 5):
        for k in range(j + 1, 5):
            atoms[f"L{j}{k}"] = L(j, k, chart)
    return atoms


def sphere_atoms() -> dict[str, DiffOp]:
    out = {}
    for (j, k) in ((1, 2), (1, 3), (2, 3)):
        sj, sk = TABLE[f"s{j}"], TABLE[f"s{k}"]
        out[f"J{j}{k}"] = DiffOp.vector(SPHERE, {sk: RatFun.var(sj), sj: -RatFun.var(sk)})
    # the cyclic J_i of the sphere systems: J_1 = J23, J_2 = J31, J_3 = J12
    out["J1"] = out["J23"]
    out["J2"] = -out["J13"]
    out["J3"] = out["J12"]
    return out


def atoms_for(chart: Chart) -> dict[str, DiffOp]:
    if chart.name == "tetraspherical":
        return tetra_atoms(TETRA)
    if chart.name == "tetraspherical-primed":
        return tetra_atoms(TETRA_P)
    if chart.name == "flat":
        return flat_atoms()
    if chart.name == "sphere":
        return sphere_atoms()
    return {}


# the 11-dimensional space of 2nd-order conformal symmetries equivalent to H
ELEVEN_DIM_BASIS = [
    "L12^2-L34^2",
    "L13^2-L24^2",
    "L23^2-L14^2",
    "L12^2+L13^2+L23^2",
    "L12*L34+L23*L14-L13*L24",
    "acomm(L13,L14)+acomm(L23,L24)",
    "acomm(L13,L23)+acomm(L14,L24)",
    "acomm(L12,L13)+acomm(L34,L24)",
    "acomm(L12,L14)-acomm(L34,L23)",
    "acomm(L12,L23)-acomm(L34,L14)",
    "acomm(L12,L24)+acomm(L34,L13)",
]


# ---------------------------------------------------------------------------
# fixture records
# ---------------------------------------------------------------------------


@dataclass
class PotentialFamily:
    chart: Chart
    basis: list[RatFun]
    param_syms: tuple[Symbol, ...]

    def combine(self, coeffs) -> RatFun:
        out = RZERO
        for c, v in zip(coeffs, self.basis):
            out = out + RatFun.of(c) * v
        return out

    def symbolic(self) -> RatFun:
        return self.combine([RatFun.var(s) for s in self.param_syms])


@dataclass
class System:
    name: str
    kind: str                      # laplace | helmholtz
    chart: Chart
    family: PotentialFamily
    klass: str                     # Stackel / contraction class label
    flat_family: PotentialFamily | None = None
    generators: dict[str, DiffOp] = field(default_factory=dict)
    generator_order: list[str] = field(default_factory=list)
    notes: dict[str, str] = field(default_factory=dict)

    def potential(self, coeffs=None) -> RatFun:
        if coeffs is None:
            return self.family.symbolic()
        return self.family.combine(coeffs)


@dataclass
class Contraction:
    name: str
    coord_map: list[RatFun]            # x_j as functions of (xp, eps)
    lie_identities: list[tuple[str, str]]
    notes: dict[str, str] = field(default_factory=dict)
    matrix: list[list[RatFun]] | None = None

    def coefficient_matrix(self) -> list[list[RatFun]]:
        """M with x = M xp, extracted from the (linear) coordinate map."""
        if self.matrix is None:
            M = []
            for f in self.coord_map:
                row = [f.derivative(sym) for sym in TETRA_P.coords]
                for sym in TETRA_P.coords:
                    if any(not r.derivative(sym).is_zero() for r in row):
                        raise ValueError(f"coordinate map of {self.name} is not linear")
                M.append(row)
            self.matrix = M
        return self.matrix


@dataclass
class ContractionCheck:
    """A printed diagonal potential map: source family member, parameter
    flow in eps, and the stated limit, plus optional contracted-basis
    operator identities."""

    name: str
    contraction: str
    source: RatFun                      # symbolic source potential (unprimed)
    param_map: dict[Symbol, RatFun]     # source params -> eps-flows in target params
    target: RatFun                      # stated limit (primed chart)
    system: str | None = None           # catalog system providing generator atoms
    generators: dict[str, str] = field(default_factory=dict)
    basis_identities: list[tuple[str, str]] = field(default_factory=list)
    notes: dict[str, str] = field(default_factory=dict)
    paper_param_map: dict[Symbol, RatFun] = field(default_factory=dict)

    def as_written_map(self) -> dict[Symbol, RatFun]:
        """The paper's flow where it differs from the verified one."""
        out = dict(self.param_map)
        out.update(self.paper_param_map)
        return out


# ---------------------------------------------------------------------------
# fixture parsing
# ---------------------------------------------------------------------------


def fixture_dir() -> str | None:
    return os.environ.get("BOCHER_FIXTURES")


def _fixture_text(name: str) -> str:
    override = fixture_dir()
    if override:
        with open(os.path.join(override, name), encoding="utf-8") as fh:
            return fh.read()
    return resources.files("bocher.fixtures").joinpath(name).read_text(encoding="utf-8")


def _fixture_names() -> list[str]:
    override = fixture_dir()
    if override:
        return sorted(n for n in os.listdir(override) if n.endswith(".fix"))
    return sorted(
        r.name for r in resources.files("bocher.fixtures").iterdir()
        if r.name.endswith(".fix")
    )


def parse_fixture(text: str) -> list[dict]:
    """Parse the line-oriented fixture schema into raw section dicts.

    Sections start with ``[kind]``; each line is ``key = value``.  Repeated
    keys accumulate into lists.  ``#`` starts a comment.
    """
    sections: list[dict] = []
    cur: dict | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            cur = {"_kind": line[1:-1]}
            sections.append(cur)
            continue
        if cur is None or "=" not in line:
            raise ValueError(f"bad fixture line {lineno}: {raw!r}")
        key, val = line.split("=", 1)
        key, val = key.strip(), val.strip()
        if key in cur:
            prev = cur[key]
            if isinstance(prev, list):
                prev.append(val)
            else:
                cur[key] = [prev, val]
        else:
            cur[key] = val
    return sections


_CHART_BY_NAME = {
    "tetraspherical": TETRA,
    "tetraspherical-primed": TETRA_P,
    "flat": FLAT,
    "sphere": SPHERE,
}


def _as_list(v) -> list:
    if v is None:
        return []
    return v if isinstance(v, list) else [v]


class Catalog:
    def __init__(self):
        self.systems: dict[str, System] = {}
        self.contractions: dict[str, Contraction] = {}
        self.checks: dict[str, ContractionCheck] = {}
        self.free_constants: dict[str, str] = {}
        self.equivalence_classes: dict[str, list[str]] = {}
        self.multipliers: dict[str, dict] = {}
        self.tables: dict[str, dict] = {}
        self._loaded = False

    def load(self, free_overrides: dict[str, str] | None = None):
        if self._loaded:
            return self
        sections = []
        for name in _fixture_names():
            sections.extend(parse_fixture(_fixture_text(name)))
        for sec in sections:
            if sec["_kind"] == "constants":
                for k, v in sec.items():
                    if k != "_kind":
                        self.free_constants[k] = v
        if free_overrides:
            self.free_constants.update(free_overrides)
        for sec in sections:
            kind = sec.pop("_kind")
            if kind == "system":
                self._load_system(sec)
            elif kind == "contraction":
                self._load_contraction(sec)
            elif kind == "contraction_check":
                self._load_check(sec)
            elif kind == "classes":
                for k, v in sec.items():
                    self.equivalence_classes[k] = [m.strip() for m in v.split(",")]
            elif kind == "multipliers":
                self._load_multipliers(sec)
            elif kind == "table":
                self.tables[sec["name"]] = sec
            elif kind == "constants":
                pass
            else:
                raise ValueError(f"unknown fixture section {kind!r}")
        self._loaded = True
        return self

    def instantiate(self, text: str) -> str:
        """Replace free-constant tokens by their declared rational values so
        that radicands become rationals before parsing."""
        from .exprio import _tokenize
        toks = _tokenize(text)
        out = []
        for tok, _pos in toks:
            if tok in self.free_constants:
                out.append(f"({self.free_constants[tok]})")
            else:
                out.append(tok)
        return " ".join(out)

    def _expr(self, text: str) -> RatFun:
        return parse_expr(self.instantiate(text))

    def _op(self, text: str, chart: Chart, atoms: dict[str, DiffOp]) -> DiffOp:
        return op_eval(self.instantiate(text), chart, atoms)

    def _load_system(self, sec: dict):
        chart = _CHART_BY_NAME[sec["chart"]]
        param_syms = tuple(TABLE[p] for p in sec["params"].split())
        basis = [self._expr(sec[f"V.{j}"]) for j in range(1, 5)]
        family = PotentialFamily(chart, basis, param_syms)
        flat_family = None
        if "flat.1" in sec:
            flat_basis = [self._expr(sec[f"flat.{j}"]) for j in range(1, 5)]
            flat_family = PotentialFamily(FLAT, flat_basis, param_syms)
        system = System(
            name=sec["name"], kind=sec["kind"], chart=chart, family=family,
            klass=sec.get("class", sec["name"]), flat_family=flat_family,
        )
        atoms = atoms_for(chart)
        for key, val in sec.items():
            if key.startswith("gen."):
                gname = key[4:]
                system.generators[gname] = self._op(val, chart, atoms)
                system.generator_order.append(gname)
            elif key.startswith("note."):
                system.notes[key[5:]] = val
        self.systems[system.name] = system

    def _load_contraction(self, sec: dict):
        coord_map = [self._expr(sec[f"x{j}"]) for j in range(1, 5)]
        lie = []
        for item in _as_list(sec.get("lie")):
            lhs, rhs = item.split("==")
            lie.append((self.instantiate(lhs.strip()), self.instantiate(rhs.strip())))
        notes = {k[5:]: v for k, v in sec.items() if k.startswith("note.")}
        self.contractions[sec["name"]] = Contraction(
            name=sec["name"], coord_map=coord_map, lie_identities=lie, notes=notes,
        )

    def _load_check(self, sec: dict):
        param_map = {}
        paper_map = {}
        for key, val in sec.items():
            if key.startswith("param."):
                param_map[TABLE[key[6:]]] = self._expr(val)
            elif key.startswith("paper."):
                paper_map[TABLE[key[6:]]] = self._expr(val)
        basis = []
        for item in _as_list(sec.get("basis")):
            lhs, rhs = item.split("==")
            basis.append((self.instantiate(lhs.strip()), self.instantiate(rhs.strip())))
        gens = {k[4:]: v for k, v in sec.items() if k.startswith("gen.")}
        notes = {k[5:]: v for k, v in sec.items() if k.startswith("note.")}
        self.checks[sec["name"]] = ContractionCheck(
            name=sec["name"], contraction=sec["contraction"],
            source=self._expr(sec["source"]), param_map=param_map,
            target=self._expr(sec["target"]), system=sec.get("system"),
            generators=gens, basis_identities=basis, notes=notes,
            paper_param_map=paper_map,
        )

    def _load_multipliers(self, sec: dict):
        klass = sec["class"]
        entries = {}
        for key, val in sec.items():
            if key in ("_kind", "class"):
                continue
            entries[key] = val
        self.multipliers[klass] = entries

    # -- API ----------------------------------------------------------------

    def get_system(self, name: str) -> System:
        self.load()
        if name not in self.systems:
            raise KeyError(f"unknown system {name!r}")
        return self.systems[name]

    def get_contraction(self, name: str) -> Contraction:
        self.load()
        if name not in self.contractions:
            raise KeyError(f"unknown contraction {name!r}")
        return self.contractions[name]

    def get_check(self, name: str) -> ContractionCheck:
        self.load()
        return self.checks[name]

    def laplace_systems(self) -> list[System]:
        self.load()
        return [s for s in self.systems.values() if s.kind == "laplace"]


CATALOG = Catalog()


def get_system(name: str) -> System:
    return CATALOG.get_system(name)


def get_contraction(name: str) -> Contraction:
    return CATALOG.get_contraction(name)
