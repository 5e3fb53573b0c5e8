"""Session symbol table.

One table is built per session and is read-only afterwards.  Symbols carry a
kind (coordinate, parameter, contraction parameter, free constant, aux) and a
fixed position that induces the monomial order used everywhere.  ``eps`` is
the only symbol Laurent expansion is taken in.
"""

from __future__ import annotations

from dataclasses import dataclass

COORD = "coordinate"
PARAM = "parameter"
EPS = "contraction-parameter"
FREE = "free-constant"
AUX = "aux"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str
    index: int

    def __repr__(self):
        return self.name


class SymbolTable:
    def __init__(self):
        self._by_name: dict[str, Symbol] = {}
        self._list: list[Symbol] = []

    def add(self, name: str, kind: str) -> Symbol:
        if name in self._by_name:
            raise ValueError(f"duplicate symbol {name!r}")
        sym = Symbol(name, kind, len(self._list))
        self._by_name[name] = sym
        self._list.append(sym)
        return sym

    def __getitem__(self, name: str) -> Symbol:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown symbol {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def by_index(self, index: int) -> Symbol:
        return self._list[index]

    def all(self) -> list[Symbol]:
        return list(self._list)

    def names(self) -> list[str]:
        return [s.name for s in self._list]


def _build_default() -> SymbolTable:
    t = SymbolTable()
    # charts
    for n in ("x1", "x2", "x3", "x4"):            # tetraspherical
        t.add(n, COORD)
    for n in ("xp1", "xp2", "xp3", "xp4"):        # tetraspherical, primed
        t.add(n, COORD)
    for n in ("x", "y"):                          # flat Cartesian
        t.add(n, COORD)
    for n in ("z", "zb"):                         # flat null
        t.add(n, COORD)
    for n in ("s1", "s2", "s3"):                  # 2-sphere
        t.add(n, COORD)
    for n in ("p", "q"):                          # target null charts
        t.add(n, COORD)
    # potential parameters
    for stem in ("a", "b", "c", "d", "e", "k", "A"):
        for j in range(1, 5):
            t.add(f"{stem}{j}", PARAM)
    t.add("eps", EPS)
    # free constants of the contraction maps (instantiated at run time)
    for n in ("A", "B", "a", "bb"):
        t.add(n, FREE)
    # scratch unknowns for exact linear solves
    for j in range(1, 31):
        t.add(f"t{j}", AUX)
    return t


TABLE = _build_default()

X1, X2, X3, X4 = (TABLE[n] for n in ("x1", "x2", "x3", "x4"))
XP = tuple(TABLE[f"xp{j}"] for j in range(1, 5))
FX, FY = TABLE["x"], TABLE["y"]
Z, ZB = TABLE["z"], TABLE["zb"]
S1, S2, S3 = TABLE["s1"], TABLE["s2"], TABLE["s3"]
NP, NQ = TABLE["p"], TABLE["q"]
EPSILON = TABLE["eps"]

TETRA = (X1, X2, X3, X4)
FLAT = (FX, FY)
SPHERE = (S1, S2, S3)
NULL = (NP, NQ)


def params(stem: str) -> tuple[Symbol, ...]:
    return tuple(TABLE[f"{stem}{j}"] for j in range(1, 5))


def aux(n: int) -> list[Symbol]:
    if n > 30:
        raise ValueError("aux symbol pool exhausted")
    return [TABLE[f"t{j}"] for j in range(1, n + 1)]
