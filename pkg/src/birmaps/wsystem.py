"""Parameterised polynomial systems whose solutions encode bounded-degree maps.

The systems live in the affine chart ``x0 = 1, y0 = 1`` of P^n x P^n.  Two
kinds of unknowns appear:

* point variables ``x1..xn, y1..yn``, the chart variables ``t_*``, the
  Rabinowitsch variable ``a`` and the auxiliary ``w``;
* parameters (``c_*`` coefficients of monoids, certificate cofactors and the
  map, plus ``s_*`` non-vanishing multipliers).

Equations come in three kinds:

``point``     defines the point set (must have a common zero);
``identity``  must vanish identically in the point variables, i.e. every
              coefficient, a polynomial in the parameters, must be zero;
``param``     involves parameters only.

Because a system mentions thousands of parameters, equations use
:class:`SPoly`, a fully sparse polynomial over a growing variable table, and
are converted to :class:`~birmaps.polyring.Polynomial` only after
instantiation.

Every equation carries a stage tag:

``step4``        X in the x chart
``step5:j=k``    one-vertex monoid stage adding ``y_k``
``step6``        the two-vertex monoid through the graph
``step7:j=k``    one-vertex monoid stage projecting ``x_k`` away
``step8``        the map components and Y
``wplus:*``      the extra chain certifying birationality (W+ only)
``dominance:*``  the hypersurface systems E and E'
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .groebner import (
    Budget,
    BudgetExceeded,
    DEFAULT_BUDGET,
    Ideal,
    elimination_ideal,
    is_inconsistent,
    radical_membership,
    reduced_groebner_basis,
)
from .linalg import rank, solve
from .monoids import Monoid, MonoidFitFailed, TwoVertexMonoid, fit_monoid, q_sequence
from .nullcert import CertificateQuery, find_certificate, solve_identity
from .polyring import GREVLEX, QQ, Field, Polynomial, Ring, monomials_up_to, parse
from .varieties import RationalMap, Variety, image_closure, restricted_graph

__all__ = [
    "WCaps",
    "SPoly",
    "VarTable",
    "Block",
    "Equation",
    "ParamSystem",
    "WitnessAssignment",
    "WitnessCheck",
    "SolveResult",
    "WitnessFailed",
    "build_system",
    "build_birational_plus_system",
    "build_dominance_system",
    "construct_witness",
    "construct_dominance_witness",
    "instantiate",
    "verify_witness",
    "toy_solve",
    "audit_structure",
    "system_from_json",
]


class WitnessFailed(RuntimeError):
    """A witness could not be built within the caps.  Not a disproof."""


@dataclass(frozen=True)
class WCaps:
    """Degree caps standing in for the theoretical constants.

    ``monoid_degree`` is C2; ``tau_degree`` bounds every certificate
    cofactor block; ``z_degree`` fixes the hypersurface degree in the
    dominance system (``None``: the degree bound for the image, clipped at
    ``z_degree_cap``).
    """

    monoid_degree: int = 3
    tau_degree: int = 2
    z_degree: int | None = None
    z_degree_cap: int = 4

    def __post_init__(self):
        if self.monoid_degree < 1:
            raise ValueError("monoid_degree must be >= 1")
        if self.tau_degree < 0:
            raise ValueError("tau_degree must be >= 0")

    def as_dict(self) -> dict:
        return {
            "monoid_degree": self.monoid_degree,
            "tau_degree": self.tau_degree,
            "z_degree": self.z_degree,
            "z_degree_cap": self.z_degree_cap,
        }


# ---------------------------------------------------------------------------
# sparse polynomials over a variable table


class VarTable:
    def __init__(self):
        self.names: list[str] = []
        self.kinds: list[str] = []
        self._index: dict[str, int] = {}

    def add(self, name: str, kind: str) -> int:
        if name in self._index:
            i = self._index[name]
            if self.kinds[i] != kind:
                raise ValueError(f"{name} declared as both {self.kinds[i]} and {kind}")
            return i
        self._index[name] = len(self.names)
        self.names.append(name)
        self.kinds.append(kind)
        return self._index[name]

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name):
        return name in self._index

    def __len__(self):
        return len(self.names)

    def copy(self) -> "VarTable":
        t = VarTable()
        t.names = list(self.names)
        t.kinds = list(self.kinds)
        t._index = dict(self._index)
        return t


def _mmul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for i, p in b:
        d[i] = d.get(i, 0) + p
    return tuple(sorted(d.items()))


class SPoly:
    """Sparse polynomial: ``{((var_index, power), ...): coefficient}``."""

    __slots__ = ("terms", "field")

    def __init__(self, terms: dict | None = None, field: Field = QQ):
        self.terms = terms if terms is not None else {}
        self.field = field

    @classmethod
    def const(cls, c, field: Field = QQ) -> "SPoly":
        c = field.convert(c)
        return cls({(): c} if c != 0 else {}, field)

    @classmethod
    def var(cls, i: int, field: Field = QQ) -> "SPoly":
        return cls({((i, 1),): field.convert(1)}, field)

    def _lift(self, o) -> "SPoly":
        return o if isinstance(o, SPoly) else SPoly.const(o, self.field)

    def __add__(self, o) -> "SPoly":
        o = self._lift(o)
        t = dict(self.terms)
        for m, c in o.terms.items():
            v = t.get(m)
            if v is None:
                t[m] = c
            else:
                s = v + c
                if s == 0:
                    del t[m]
                else:
                    t[m] = s
        return SPoly(t, self.field)

    __radd__ = __add__

    def __neg__(self) -> "SPoly":
        return SPoly({m: -c for m, c in self.terms.items()}, self.field)

    def __sub__(self, o) -> "SPoly":
        return self + (-self._lift(o))

    def __rsub__(self, o) -> "SPoly":
        return self._lift(o) - self

    def __mul__(self, o) -> "SPoly":
        if not isinstance(o, SPoly):
            c0 = self.field.convert(o)
            if c0 == 0:
                return SPoly({}, self.field)
            return SPoly({m: c * c0 for m, c in self.terms.items()}, self.field)
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mmul(m1, m2)
                t[m] = t.get(m, 0) + c1 * c2
        return SPoly({m: c for m, c in t.items() if c != 0}, self.field)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, SPoly) and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def variables(self) -> set[int]:
        return {i for m in self.terms for i, _ in m}

    def __len__(self):
        return len(self.terms)

    def evaluate(self, values: dict[int, object]) -> "SPoly":
        """Substitute the variables in ``values``; others stay symbolic."""
        t: dict = {}
        for m, c in self.terms.items():
            rest = []
            for i, p in m:
                v = values.get(i)
                if v is None:
                    rest.append((i, p))
                else:
                    c = c * v**p
                    if c == 0:
                        break
            if c == 0:
                continue
            k = tuple(rest)
            t[k] = t.get(k, 0) + c
        return SPoly({m: c for m, c in t.items() if c != 0}, self.field)

    def split(self, keep: set[int]) -> dict[tuple, "SPoly"]:
        """Group terms by their part in the ``keep`` variables."""
        out: dict[tuple, dict] = {}
        for m, c in self.terms.items():
            a = tuple(x for x in m if x[0] in keep)
            b = tuple(x for x in m if x[0] not in keep)
            out.setdefault(a, {})[b] = c
        return {k: SPoly(v, self.field) for k, v in out.items()}

    def to_polynomial(self, ring: Ring, table: VarTable) -> Polynomial:
        pos = {}
        terms = {}
        for m, c in self.terms.items():
            e = [0] * ring.ngens
            for i, p in m:
                j = pos.get(i)
                if j is None:
                    j = pos[i] = ring.index(table.names[i])
                e[j] = p
            terms[tuple(e)] = c
        return Polynomial(ring, terms)

    @classmethod
    def from_polynomial(cls, p: Polynomial, table: VarTable) -> "SPoly":
        idx = [table.index(n) for n in p.ring.names]
        terms = {}
        for e, c in p.terms.items():
            terms[tuple(sorted((idx[k], a) for k, a in enumerate(e) if a))] = c
        return cls(terms, p.ring.field)

    @classmethod
    def parse_flat(cls, text: str, table: VarTable, field: Field = QQ) -> "SPoly":
        """Read the sum-of-monomials form written by :meth:`format`.

        Raises ``ValueError`` on anything else (callers fall back to the
        general parser).
        """
        terms: dict = {}
        text = text.strip()
        if text == "0":
            return cls({}, field)
        pos = 0
        for m in _FLAT_TERM.finditer(text):
            if m.start() != pos:
                raise ValueError("not in flat form")
            pos = m.end()
            sign, body = m.group(1), m.group(2)
            coeff = Fraction(1)
            mono: dict[int, int] = {}
            for f in body.split("*"):
                if f[0].isdigit():
                    coeff *= Fraction(f)
                    continue
                name, _, power = f.partition("^")
                if name not in table:
                    raise ValueError(f"unknown variable {name!r}")
                i = table.index(name)
                mono[i] = mono.get(i, 0) + (int(power) if power else 1)
            if sign == "-":
                coeff = -coeff
            key = tuple(sorted(mono.items()))
            c = field.convert(coeff) + terms.get(key, 0)
            if c == 0:
                terms.pop(key, None)
            else:
                terms[key] = c
        if pos != len(text):
            raise ValueError("not in flat form")
        return cls(terms, field)

    def format(self, table: VarTable) -> str:
        if not self.terms:
            return "0"
        names = table.names
        fmt = self.field.format
        items = sorted(self.terms.items(), key=lambda mc: (-sum([p for _, p in mc[0]]), mc[0]))
        parts = []
        for m, c in items:
            mono = "*".join([names[i] if p == 1 else f"{names[i]}^{p}" for i, p in m])
            cs = str(c) if type(c) is int else fmt(c)
            neg = cs[0] == "-"
            if neg:
                cs = cs[1:]
            body = (mono if cs == "1" else f"{cs}*{mono}") if mono else cs
            parts.append((" - " if neg else " + ") + body)
        first = parts[0]
        parts[0] = ("-" if first[1] == "-" else "") + first[3:]
        return "".join(parts)


# ---------------------------------------------------------------------------
# systems


@dataclass
class Block:
    """A general polynomial: one parameter per monomial of degree <= ``degree``."""

    name: str
    variables: list[str]
    degree: int
    params: list[str]
    monomials: list[tuple]

    def assign(self, values: dict, poly: Polynomial) -> None:
        lookup = {m: k for k, m in enumerate(self.monomials)}
        pos = {n: k for k, n in enumerate(self.variables)}
        for p in self.params:
            values[p] = 0
        for e, c in poly.terms.items():
            me = [0] * len(self.variables)
            for name, a in zip(poly.ring.names, e):
                if a:
                    if name not in pos:
                        raise WitnessFailed(f"{self.name}: variable {name} not allowed")
                    me[pos[name]] = a
            k = lookup.get(tuple(me))
            if k is None:
                raise WitnessFailed(f"{self.name}: degree {sum(me)} exceeds the cap {self.degree}")
            values[self.params[k]] = c


@dataclass
class IdentitySpec:
    hypotheses: list[SPoly]
    target: SPoly
    taus: list[str]
    tau_vars: list[str]


@dataclass
class Equation:
    poly: SPoly
    kind: str
    tag: str
    identity: IdentitySpec | None = None


@dataclass
class ParamSystem:
    """A parameterised system with per-equation provenance tags."""

    kind: str
    n: int
    d: int
    table: VarTable
    equations: list[Equation]
    blocks: dict[str, Block] = field(default_factory=dict)
    monoids: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    field: Field = QQ

    @property
    def point_vars(self) -> list[str]:
        return [n for n, k in zip(self.table.names, self.table.kinds) if k == "point"]

    @property
    def param_vars(self) -> list[str]:
        return [n for n, k in zip(self.table.names, self.table.kinds) if k == "param"]

    @property
    def provenance(self) -> list[str]:
        return [e.tag for e in self.equations]

    def counts_by_tag(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for e in self.equations:
            out[e.tag] = out.get(e.tag, 0) + 1
        return out

    def with_equation(self, poly: SPoly | int, kind: str = "point", tag: str = "extra") -> "ParamSystem":
        """A copy with one more equation (for example the constant 1)."""
        if not isinstance(poly, SPoly):
            poly = SPoly.const(poly, self.field)
        return ParamSystem(
            self.kind, self.n, self.d, self.table, self.equations + [Equation(poly, kind, tag)],
            self.blocks, self.monoids, dict(self.metadata), self.field,
        )

    def balanced_equations(self) -> list[tuple[str, SPoly]]:
        """Identities expanded into their parameter-only coefficient equations."""
        point = {i for i, k in enumerate(self.table.kinds) if k == "point"}
        out = []
        for e in self.equations:
            if e.kind == "identity":
                for _, coeff in sorted(e.poly.split(point).items()):
                    out.append((e.tag, coeff))
            elif e.kind == "param":
                out.append((e.tag, e.poly))
        return out

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "kind": self.kind,
            "n": self.n,
            "d": self.d,
            "field": self.field.name,
            "metadata": self.metadata,
            "variables": [{"name": n, "kind": k} for n, k in zip(self.table.names, self.table.kinds)],
            "blocks": {
                b.name: {"variables": b.variables, "degree": b.degree, "size": len(b.params)}
                for b in self.blocks.values()
            },
            "equations": [{"tag": e.tag, "kind": e.kind, "poly": e.poly.format(self.table)} for e in self.equations],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_FLAT_TERM = re.compile(r"\s*([+-]?)\s*([0-9A-Za-z_][0-9A-Za-z_/*^]*)")


def system_from_json(doc: dict, field: Field = QQ) -> ParamSystem:
    """Reload an emitted system (equations and variables only)."""
    if doc.get("schema") != 1:
        raise ValueError("unsupported system schema")
    table = VarTable()
    for v in doc["variables"]:
        table.add(v["name"], v["kind"])
    eqs = []
    for e in doc["equations"]:
        try:
            eqs.append(Equation(SPoly.parse_flat(e["poly"], table, field), e["kind"], e["tag"]))
            continue
        except ValueError:
            pass
        names = sorted(set(_NAME.findall(e["poly"])), key=table.index)
        R = Ring(names or ["_"], field)
        p = parse(e["poly"], R)
        if not names:
            sp = SPoly.const(p.terms.get((0,), 0), field)
        else:
            sp = SPoly.from_polynomial(p, table)
        eqs.append(Equation(sp, e["kind"], e["tag"]))
    return ParamSystem(doc["kind"], doc["n"], doc["d"], table, eqs, metadata=doc.get("metadata", {}), field=field)


@dataclass
class WitnessAssignment:
    values: dict
    info: dict = field(default_factory=dict)

    def complete_for(self, S: ParamSystem) -> list[str]:
        return [p for p in S.param_vars if p not in self.values]

    def to_json(self, field: Field = QQ) -> dict:
        return {"schema": 1, "values": {k: field.format(field.convert(v)) for k, v in self.values.items()}, "info": self.info}

    @classmethod
    def from_json(cls, doc: dict, field: Field = QQ) -> "WitnessAssignment":
        return cls({k: field.convert(Fraction(v) if field is QQ else int(v)) for k, v in doc["values"].items()}, doc.get("info", {}))

    def perturbed(self, name: str, delta=1) -> "WitnessAssignment":
        vals = dict(self.values)
        vals[name] = vals.get(name, 0) + delta
        return WitnessAssignment(vals, dict(self.info))


@dataclass
class WitnessCheck:
    ok: bool
    violated: list[dict]
    residual: Ideal | None = None

    def __bool__(self):
        return self.ok


@dataclass
class SolveResult:
    status: str  # "sat" | "unsat" | "inconclusive"
    evidence: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return {"sat": 0, "unsat": 1, "inconclusive": 2}[self.status]


# ---------------------------------------------------------------------------
# input preparation: coordinates x0..xn / y0..yn and the linear change


@dataclass
class _Prepared:
    n: int
    dim: int
    RX: Ring
    RY: Ring
    M: list[list]  # x = M x'
    N: list[list]  # y = N y'
    gX: list[Polynomial]  # homogeneous, in RX, after the change
    gY: list[Polynomial]
    src_ring: Ring
    tgt_ring: Ring

    @property
    def xs(self) -> list[str]:
        return [f"x{i}" for i in range(1, self.n + 1)]

    @property
    def ys(self) -> list[str]:
        return [f"y{i}" for i in range(1, self.n + 1)]

    def affine(self, p: Polynomial, side: str) -> Polynomial:
        R = Ring(self.xs if side == "x" else self.ys, p.ring.field)
        return p.dehomogenize(f"{side}0").to_ring(R)

    def map_components(self, F: RationalMap) -> list[Polynomial]:
        """Components of N^-1 F(M x') in RX."""
        comps = [_rename(c, self.RX) for c in F.components]
        comps = [_linear_pullback(c, self.M) for c in comps]
        Ninv = _inverse(self.N, self.RX.field)
        out = []
        for i in range(self.n + 1):
            acc = self.RX.zero
            for k in range(self.n + 1):
                if Ninv[i][k] != 0:
                    acc = acc + comps[k].scale(Ninv[i][k])
            out.append(acc)
        return out


def _rename(p: Polynomial, ring: Ring) -> Polynomial:
    return Polynomial(ring, dict(p.terms))


def _linear_pullback(p: Polynomial, M: list[list]) -> Polynomial:
    R = p.ring
    images = []
    for i in range(R.ngens):
        acc = R.zero
        for j in range(R.ngens):
            if M[i][j] != 0:
                acc = acc + R.var(R.names[j]).scale(M[i][j])
        images.append(acc)
    return p.subs(dict(zip(R.names, images)), R)


def _inverse(M: list[list], fld: Field) -> list[list]:
    n = len(M)
    rows = [{j: fld.convert(M[i][j]) for j in range(n) if M[i][j] != 0} for i in range(n)]
    cols = []
    for k in range(n):
        sol = solve(rows, [int(i == k) for i in range(n)], n, fld)
        if sol is None:
            raise ValueError("singular coordinate change")
        cols.append([sol.get(j, 0) for j in range(n)])
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _choose_change(gens: list[Polynomial], R: Ring, seed: int = 0, tries: int = 60) -> list[list]:
    n = R.ngens
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    rng = random.Random(seed)
    cand = ident
    for _ in range(tries):
        pulled = [_linear_pullback(g, cand) for g in gens]
        I = Ideal(pulled, R)
        if not any(radical_membership(R.var(v), I) for v in R.names):
            return cand
        while True:
            cand = [[int(i == j) + rng.randint(-1, 1) * (i != j) for j in range(n)] for i in range(n)]
            rows = [{j: cand[i][j] for j in range(n) if cand[i][j]} for i in range(n)]
            if rank(rows, R.field) == n:
                break
    raise ValueError("could not move the variety off the coordinate hyperplanes")


def _prepare(X: Variety, Y: Variety, n: int | None) -> _Prepared:
    if X.mode != "projective" or Y.mode != "projective":
        raise ValueError("W-systems take projective varieties")
    nX, nY = X.ring.ngens - 1, Y.ring.ngens - 1
    if n is None:
        n = nX
    if nX != n or nY != n:
        raise ValueError(f"ambient dimensions {nX}, {nY} do not match n = {n}")
    if n < 2:
        raise ValueError("n must be at least 2")
    dX, dY = X.dimension(), Y.dimension()
    if dX != dY:
        raise ValueError(f"dimension mismatch: dim X = {dX}, dim Y = {dY}")
    if dX < 0:
        raise ValueError("empty variety")
    if dX >= n:
        raise ValueError("X is the whole projective space; nothing to parameterise")
    fld = X.ring.field
    RX = Ring([f"x{i}" for i in range(n + 1)], fld)
    RY = Ring([f"y{i}" for i in range(n + 1)], fld)
    gX = [_rename(g, RX) for g in X.generators]
    gY = [_rename(g, RY) for g in Y.generators]
    M = _choose_change(gX, RX)
    N = _choose_change(gY, RY)
    gX = [_linear_pullback(g, M) for g in gX]
    gY = [_linear_pullback(g, N) for g in gY]
    return _Prepared(n, dX, RX, RY, M, N, gX, gY, X.ring, Y.ring)


# ---------------------------------------------------------------------------
# assembly


class _Builder:
    def __init__(self, prep: _Prepared, caps: WCaps, d: int, kind: str):
        self.prep = prep
        self.caps = caps
        self.d = d
        self.kind = kind
        self.field = prep.RX.field
        self.table = VarTable()
        self.eqs: list[Equation] = []
        self.blocks: dict[str, Block] = {}
        self.monoids: list[dict] = []
        for v in prep.xs + prep.ys:
            self.table.add(v, "point")

    def pv(self, name: str) -> SPoly:
        return SPoly.var(self.table.add(name, "point"), self.field)

    def general(self, name: str, variables: Sequence[str], degree: int) -> SPoly:
        variables = list(variables)
        if degree < 0:
            self.blocks[name] = Block(name, variables, degree, [], [])
            return SPoly({}, self.field)
        mons = monomials_up_to(len(variables), degree)
        vidx = [self.table.add(v, "point") for v in variables]
        params = []
        terms = {}
        one = self.field.convert(1)
        for k, m in enumerate(mons):
            p = f"{name}_{k}"
            pi = self.table.add(p, "param")
            params.append(p)
            terms[_mmul(((pi, 1),), tuple(sorted((vidx[j], a) for j, a in enumerate(m) if a)))] = one
        self.blocks[name] = Block(name, variables, degree, params, mons)
        return SPoly(terms, self.field)

    def lift(self, p: Polynomial) -> SPoly:
        for n in p.ring.names:
            self.table.add(n, "point")
        return SPoly.from_polynomial(p, self.table)

    def point_eq(self, poly: SPoly, tag: str):
        self.eqs.append(Equation(poly, "point", tag))

    def param_eq(self, poly: SPoly, tag: str):
        self.eqs.append(Equation(poly, "param", tag))

    def point_hyps(self) -> list[SPoly]:
        return [e.poly for e in self.eqs if e.kind == "point"]

    def identity(self, hyps: list[SPoly], target: SPoly, tag: str, label: str):
        a = self.pv("a")
        ai = self.table.index("a")
        used = set()
        for h in hyps + [target]:
            used |= {i for i in h.variables() if self.table.kinds[i] == "point" and i != ai}
        tau_vars = [self.table.names[i] for i in sorted(used)] + ["a"]
        taus = []
        polys = []
        for k in range(len(hyps) + 1):
            name = f"c_T_{label}_{k}"
            polys.append(self.general(name, tau_vars, self.caps.tau_degree))
            taus.append(name)
        poly = SPoly.const(-1, self.field) + polys[0] * (1 - a * target)
        for tau, h in zip(polys[1:], hyps):
            poly = poly + tau * h
        self.eqs.append(Equation(poly, "identity", tag, IdentitySpec(list(hyps), target, taus, tau_vars)))

    def system(self, kind: str | None = None, metadata: dict | None = None) -> ParamSystem:
        md = {
            "caps": self.caps.as_dict(),
            "coordinate_change": {
                "source": [[str(c) for c in row] for row in self.prep.M],
                "target": [[str(c) for c in row] for row in self.prep.N],
            },
            "source_names": list(self.prep.src_ring.names),
            "target_names": list(self.prep.tgt_ring.names),
        }
        md.update(metadata or {})
        S = ParamSystem(
            kind or self.kind, self.prep.n, self.d, self.table.copy(), list(self.eqs),
            dict(self.blocks), [dict(m) for m in self.monoids], md, self.field,
        )
        S._prep = self.prep  # used by witness construction
        return S


def _constants_metadata(prep: _Prepared, d: int, caps: WCaps, n_y: int) -> dict:
    from .varieties import bezout_degree_bound

    degs = [g.degree() for g in prep.gX if g.degree() > 0]
    base = bezout_degree_bound(degs, prep.n - prep.dim).value if degs else 1
    C1 = base * (d + 1) ** prep.n
    codim = 2 * prep.n - prep.dim
    return {
        "C1": C1,
        "C1_derivation": "Bezout product of X times (d+1)^n, C=1",
        "C2": caps.monoid_degree,
        "C2_theoretical_bound": C1 * q_sequence(codim, C1) if C1 <= 12 else None,
        "tau_cap": caps.tau_degree,
    }


def _step4_to_8(b: _Builder) -> None:
    prep, caps = b.prep, b.caps
    n, C2 = prep.n, caps.monoid_degree
    xs, ys = prep.xs, prep.ys
    X = [b.pv(v) for v in xs]
    Yv = [b.pv(v) for v in ys]
    # step 4
    for g in prep.gX:
        ga = prep.affine(g, "x")
        if not ga.is_zero():
            b.point_eq(b.lift(ga), "step4")
    # step 5: S_{0,n-j} adds y_j
    for j in range(1, n):
        k = n - j
        cv = xs + ys[: j - 1]
        f1 = b.general(f"c_M_0_{k}_1", cv, C2 - 1)
        f2 = b.general(f"c_M_0_{k}_2", cv, C2)
        t = b.pv(f"t_0_{k}")
        tag = f"step5:j={j}"
        b.point_eq(f1 * Yv[j - 1] + f2, tag)
        b.point_eq(1 - t * f1 * f2, tag)
        b.monoids.append({
            "tag": tag, "kind": "one", "graph": "source", "keep": xs + ys[:j], "vertex": ys[j - 1],
            "blocks": {"top": f"c_M_0_{k}_1", "bot": f"c_M_0_{k}_2"}, "coefficient_vars": cv,
        })
    # step 6: the two-vertex monoid
    cv = xs[:-1] + ys[:-1]
    f1 = b.general("c_M_0_0_f1", cv, C2)
    g = b.general("c_M_0_0_g", cv, C2 - 1)
    h = b.general("c_M_0_0_h", cv, C2 - 1)
    f2 = b.general("c_M_0_0_f2", cv, C2 - 2)
    xn, yn = X[-1], Yv[-1]
    t1, t2 = b.pv("t_0_0_1"), b.pv("t_0_0_2")
    b.point_eq(f1 + xn * g + yn * h + xn * yn * f2, "step6")
    b.point_eq(1 - t1 * (f1 + xn * g) * (h + xn * f2), "step6")
    b.point_eq(1 - t2 * (f1 + yn * h) * (g + yn * f2), "step6")
    b.monoids.append({
        "tag": "step6", "kind": "two", "graph": "source", "keep": xs + ys, "vertex": [xs[-1], ys[-1]],
        "blocks": {"f": "c_M_0_0_f1", "g": "c_M_0_0_g", "h": "c_M_0_0_h", "f2": "c_M_0_0_f2"},
        "coefficient_vars": cv,
    })
    # step 7: S_{j,0}, projecting away x_j
    for j in range(1, n + 1):
        cv = xs[j:] + ys
        tag = f"step7:j={j}"
        f1 = b.general(f"c_M_{j}_0_1", cv, C2 - 1)
        f2 = b.general(f"c_M_{j}_0_2", cv, C2)
        b.identity(b.point_hyps(), f1 * X[j - 1] + f2, tag, f"7_{j}")
        t = b.pv(f"t_{j}_0")
        b.point_eq(1 - t * f1 * f2, tag)
        b.monoids.append({
            "tag": tag, "kind": "one", "graph": "source", "keep": xs[j - 1:] + ys, "vertex": xs[j - 1],
            "blocks": {"top": f"c_M_{j}_0_1", "bot": f"c_M_{j}_0_2"}, "coefficient_vars": cv,
        })
    # step 8: coupling to F and to Y
    Fs = [b.general(f"c_F_{i}", xs, b.d) for i in range(n + 1)]
    b.Fs = Fs
    tF = b.pv("t_F")
    b.point_eq(1 - tF * Fs[0], "step8")
    hyps = b.point_hyps()
    for i in range(1, n + 1):
        b.identity(hyps, Yv[i - 1] * Fs[0] - Fs[i], "step8", f"8_F{i}")
    for l, gy in enumerate(prep.gY, 1):
        ga = prep.affine(gy, "y")
        if not ga.is_zero():
            b.identity(hyps, b.lift(ga), "step8", f"8_Y{l}")


def build_system(X: Variety, Y: Variety, n: int | None = None, d: int = 1, caps: WCaps | None = None) -> ParamSystem:
    """The system S (steps 4 to 8) for maps X -> Y of degree <= d."""
    caps = caps or WCaps()
    if d < 1:
        raise ValueError("d must be >= 1")
    prep = _prepare(X, Y, n)
    b = _Builder(prep, caps, d, "W")
    _step4_to_8(b)
    return b.system(metadata=_constants_metadata(prep, d, caps, len(prep.gY)))


def _wplus_block(b: _Builder) -> None:
    prep, caps = b.prep, b.caps
    n, C2 = prep.n, caps.monoid_degree
    xs, ys = prep.xs, prep.ys
    X = [b.pv(v) for v in xs]
    graph_eqs = [e.poly for e in b.eqs if e.tag == "step8" and e.kind == "point"]
    Fs = b.Fs
    Yv = [b.pv(v) for v in ys]
    hyps = graph_eqs + [Yv[i - 1] * Fs[0] - Fs[i] for i in range(1, n + 1)]
    for k in range(1, n):
        cv = xs[k:] + ys
        tag = f"wplus:k={k}"
        f1 = b.general(f"c_P_{k}_1", cv, C2 - 1)
        f2 = b.general(f"c_P_{k}_2", cv, C2)
        b.identity(hyps, f1 * X[k - 1] + f2, tag, f"P{k}")
        t = b.pv(f"t_P_{k}")
        good = 1 - t * f1 * f2
        b.point_eq(good, tag)
        hyps = hyps + [good]
        b.monoids.append({
            "tag": tag, "kind": "one", "graph": "plus", "keep": xs[k - 1:] + ys, "vertex": xs[k - 1],
            "blocks": {"top": f"c_P_{k}_1", "bot": f"c_P_{k}_2"}, "coefficient_vars": cv,
        })
    w = b.pv("w")
    cv = ys + ["w"]
    tag = "wplus:w"
    f1 = b.general("c_P_w_1", cv, C2 - 1)
    f2 = b.general("c_P_w_2", cv, C2)
    hyps_w = hyps + [w]
    b.identity(hyps_w, f1 * X[-1] + f2, tag, "Pw")
    b.point_eq(w, tag)
    t = b.pv("t_P_w")
    good = 1 - t * f1 * f2
    b.point_eq(good, tag)
    b.identity(hyps_w + [good], w, tag, "Pimg")
    b.monoids.append({
        "tag": tag, "kind": "one", "graph": "plus_w", "keep": [xs[-1]] + ys, "vertex": xs[-1],
        "blocks": {"top": "c_P_w_1", "bot": "c_P_w_2"}, "coefficient_vars": cv,
    })


def build_birational_plus_system(X: Variety, Y: Variety, n: int | None = None, d: int = 1, caps: WCaps | None = None) -> ParamSystem:
    """S together with the one-vertex monoid chain certifying that F is birational."""
    caps = caps or WCaps()
    prep = _prepare(X, Y, n)
    b = _Builder(prep, caps, d, "W+")
    _step4_to_8(b)
    _wplus_block(b)
    return b.system(metadata=_constants_metadata(prep, d, caps, len(prep.gY)))


def _z_degree(prep: _Prepared, d: int, caps: WCaps) -> tuple[int, int]:
    from .varieties import bezout_degree_bound

    degs = [g.degree() for g in prep.gX if g.degree() > 0]
    base = bezout_degree_bound(degs, prep.n - prep.dim).value if degs else 1
    bound = base * d**prep.dim
    if caps.z_degree is not None:
        return caps.z_degree, bound
    return max(1, min(bound, caps.z_degree_cap)), bound


def build_dominance_system(X: Variety, Y: Variety, n: int | None = None, d: int = 1, caps: WCaps | None = None) -> tuple[ParamSystem, ParamSystem]:
    """(E, E'): a hypersurface Z through the image of F, and additionally Y in Z.

    F is not dominant onto Y exactly when E has a solution that E' does not.
    """
    caps = caps or WCaps()
    prep = _prepare(X, Y, n)
    b = _Builder(prep, caps, d, "E")
    xs, ys = prep.xs, prep.ys
    Yv = [b.pv(v) for v in ys]
    for g in prep.gX:
        ga = prep.affine(g, "x")
        if not ga.is_zero():
            b.point_eq(b.lift(ga), "dominance:source")
    Fs = [b.general(f"c_F_{i}", xs, d) for i in range(prep.n + 1)]
    tF = b.pv("t_F")
    b.point_eq(1 - tF * Fs[0], "dominance:graph")
    for i in range(1, prep.n + 1):
        b.point_eq(Yv[i - 1] * Fs[0] - Fs[i], "dominance:graph")
    zdeg, bound = _z_degree(prep, d, caps)
    Z = b.general("c_Z", ys, zdeg)
    nz = SPoly.const(1, b.field)
    for p in b.blocks["c_Z"].params:
        s = SPoly.var(b.table.add("s_" + p[2:], "param"), b.field)
        nz = nz - s * SPoly.var(b.table.index(p), b.field)
    b.param_eq(nz, "dominance:nonzero")
    hyps = b.point_hyps()
    for l, gy in enumerate(prep.gY, 1):
        ga = prep.affine(gy, "y")
        if not ga.is_zero():
            b.identity(hyps, b.lift(ga), "dominance:image-in-Y", f"EY{l}")
    b.identity(hyps, Z, "dominance:image-in-Z", "EZ")
    md = {"z_degree": zdeg, "image_degree_bound": bound}
    E = b.system("E", md)
    y_hyps = [b.lift(prep.affine(g, "y")) for g in prep.gY if not prep.affine(g, "y").is_zero()]
    b.identity(y_hyps, Z, "dominance:Y-in-Z", "EpZ")
    return E, b.system("E'", md)


# ---------------------------------------------------------------------------
# instantiation and verification


def _param_values(S: ParamSystem, w: WitnessAssignment) -> dict[int, object]:
    missing = w.complete_for(S)
    if missing:
        raise ValueError(f"incomplete assignment: {len(missing)} parameters missing, e.g. {missing[:3]}")
    f = S.field
    return {S.table.index(p): f.convert(w.values[p]) for p in S.param_vars}


def _point_ring(S: ParamSystem) -> Ring:
    return Ring(S.point_vars, S.field)


def instantiate(S: ParamSystem, w: WitnessAssignment) -> Ideal:
    """The point equations with the parameters substituted."""
    vals = _param_values(S, w)
    R = _point_ring(S)
    return Ideal([e.poly.evaluate(vals).to_polynomial(R, S.table) for e in S.equations if e.kind == "point"], R)


def verify_witness(S: ParamSystem, w: WitnessAssignment, budget: Budget | None = None) -> WitnessCheck:
    """True iff every identity and parameter equation vanishes and the point system is consistent."""
    vals = _param_values(S, w)
    R = _point_ring(S)
    violated = []
    points = []
    for k, e in enumerate(S.equations):
        r = e.poly.evaluate(vals)
        if e.kind == "point":
            points.append(r.to_polynomial(R, S.table))
        elif not r.is_zero():
            txt = r.format(S.table)
            violated.append({"index": k, "tag": e.tag, "kind": e.kind, "residue": txt if len(txt) < 240 else txt[:240] + " ..."})
    if violated:
        return WitnessCheck(False, violated)
    I = Ideal(points, R)
    if is_inconsistent(I, budget):
        return WitnessCheck(False, [{"tag": "point-system", "kind": "point", "residue": "1 lies in the instantiated point ideal"}], I)
    return WitnessCheck(True, [], I)


def toy_solve(S: ParamSystem | Ideal, budget: Budget | None = None, max_vars: int = 40) -> SolveResult:
    """Groebner consistency test for small systems.

    The full symbolic system has far too many unknowns for this; beyond
    ``max_vars`` unknowns, or when the budget runs out, the answer is
    "inconclusive".
    """
    budget = budget or DEFAULT_BUDGET
    if isinstance(S, Ideal):
        gens = list(S.generators)
        for g in gens:
            if g.is_constant():
                return SolveResult("unsat", {"reason": "a nonzero constant equation", "equation": str(g)})
        R = S.ring
        nvars = len({n for g in gens for n in g.variables()})
        if nvars > max_vars:
            return SolveResult("inconclusive", {"reason": f"{nvars} unknowns exceed the toy cap {max_vars}"})
        try:
            gb = reduced_groebner_basis(Ideal(gens, R), GREVLEX, budget)
        except BudgetExceeded as e:
            return SolveResult("inconclusive", {"reason": e.reason, "spent": e.spent})
        return SolveResult("unsat" if gb.is_unit else "sat", {"basis_size": len(gb.basis)})
    for e in S.equations:
        if e.kind != "identity" and e.poly.is_constant() and not e.poly.is_zero():
            return SolveResult("unsat", {"reason": "a nonzero constant equation", "tag": e.tag})
    unknowns = {i for e in S.equations if e.kind != "identity" for i in e.poly.variables()}
    if len(unknowns) > max_vars:
        return SolveResult("inconclusive", {"reason": f"{len(unknowns)} unknowns exceed the toy cap {max_vars}", "equations": len(S.equations)})
    eqs = [(e.tag, e.poly) for e in S.equations if e.kind == "point"] + S.balanced_equations()
    for tag, p in eqs:
        if p.is_constant() and not p.is_zero():
            return SolveResult("unsat", {"reason": "a nonzero constant equation", "tag": tag})
    used = sorted({i for _, p in eqs for i in p.variables()})
    if len(used) > max_vars:
        return SolveResult("inconclusive", {"reason": f"{len(used)} unknowns exceed the toy cap {max_vars}", "equations": len(eqs)})
    R = Ring([S.table.names[i] for i in used] or ["_"], S.field)
    I = Ideal([p.to_polynomial(R, S.table) for _, p in eqs], R)
    return toy_solve(I, budget, max_vars)


def audit_structure(S: ParamSystem) -> list[str]:
    """Compare per-step equation counts with the construction; [] when all match."""
    n = S.n
    c = S.counts_by_tag()
    problems = []
    if any(not e.tag for e in S.equations):
        problems.append("untagged equation")
    if S.kind not in ("W", "W+"):
        return problems
    for j in range(1, n):
        if c.get(f"step5:j={j}") != 2:
            problems.append(f"step5:j={j} has {c.get(f'step5:j={j}')} equations, expected 2")
    if c.get("step6") != 3:
        problems.append(f"step6 has {c.get('step6')} equations, expected 3")
    for j in range(1, n + 1):
        if c.get(f"step7:j={j}") != 2:
            problems.append(f"step7:j={j} has {c.get(f'step7:j={j}')} equations, expected 2")
    ny = sum(1 for e in S.equations if e.tag == "step8" and e.identity and e.identity.taus[0].startswith("c_T_8_Y"))
    if c.get("step8") != n + 1 + ny:
        problems.append(f"step8 has {c.get('step8')} equations, expected {n + 1 + ny}")
    known = {"step4", "step6", "step8", "wplus:w"} | {f"step5:j={j}" for j in range(1, n)}
    known |= {f"step7:j={j}" for j in range(1, n + 1)} | {f"wplus:k={k}" for k in range(1, n)}
    for t in c:
        if t not in known and not t.startswith("extra"):
            problems.append(f"unexpected tag {t}")
    return problems


# ---------------------------------------------------------------------------
# witnesses


def _certify(hyps: list[Polynomial], target: Polynomial, tau_vars: list[str], cap: int):
    """Cofactors for 1 = tau0 (1 - a*target) + sum tau_i hyps_i of degree <= cap."""
    R = Ring([v for v in tau_vars if v != "a"], target.ring.field)
    Ra = R.extend(["a"])
    hs = [h.to_ring(R) for h in hyps]
    m = target.to_ring(R)
    a = Ra.var("a")
    if hs:
        for D in range(cap):
            c = solve_identity(hs, m, D)
            if c is not None:
                return Ra.one, [a * ci.to_ring(Ra) for ci in c]
    cert = find_certificate(CertificateQuery(hs, m, d_max=cap, a="a"))
    if cert is None:
        raise WitnessFailed(f"no certificate with cofactor degree <= {cap}")
    return cert.tau, cert.cofactors


def _closure_in(E: Ideal, hvar: str = "h0") -> Ideal:
    gb = reduced_groebner_basis(E, GREVLEX)
    Rh = Ring([hvar] + list(E.ring.names), E.ring.field)
    return Ideal([g.to_ring(Rh).homogenize(hvar) for g in gb.basis], Rh)


def _affine_graph(F: RationalMap, X: Variety, prep: _Prepared) -> Ideal:
    G = restricted_graph(F, X)
    R = Ring(prep.xs + prep.ys, prep.RX.field)
    gens = [g.dehomogenize("x0").dehomogenize("y0").to_ring(R) for g in G.generators]
    return Ideal([g for g in gens if not g.is_zero()], R)


def _fit_stage(spec: dict, graphs: dict, caps: WCaps, check: Ideal) -> tuple[dict, str]:
    """Fit the monoid of one stage; returns its dehomogenised blocks."""
    src = graphs["plus"] if spec["graph"] in ("plus", "plus_w") else graphs["source"]
    keep = spec["keep"]
    E = src if list(src.ring.names) == keep else elimination_ideal(src, keep)
    if spec["graph"] == "plus_w":
        Rw = Ring(list(E.ring.names) + ["w"], E.ring.field)
        E = Ideal([g.to_ring(Rw) for g in E.generators] + [Rw.var("w")], Rw)
    gamma = _closure_in(E)
    Raff = E.ring
    CR = Ring(spec["coefficient_vars"], Raff.field)
    chk_ring = check.ring

    def deh(p: Polynomial) -> Polynomial:
        return p.dehomogenize("h0").to_ring(Raff)

    def meets(p: Polynomial) -> bool:
        # the good locus must meet the graph of the map itself
        if "w" in p.ring.names:
            p = p.subs({"w": 0})
        return not radical_membership(p.to_ring(chk_ring), check)

    def ok(M) -> bool:
        if isinstance(M, TwoVertexMonoid):
            xa, xb = (Raff.var(v) for v in spec["vertex"])
            f, g, h, f2 = (deh(p) for p in (M.f_d, M.g, M.h, M.f_dm2))
            return meets((f + xa * g) * (h + xa * f2)) and meets((f + xb * h) * (g + xb * f2))
        return meets(deh(M.f_top) * deh(M.f_bot))

    verts = spec["vertex"] if isinstance(spec["vertex"], list) else [spec["vertex"]]
    try:
        M = fit_monoid(gamma, verts, start_degree=1, cap=caps.monoid_degree, extra_check=ok)
    except (MonoidFitFailed, ValueError) as e:
        raise WitnessFailed(f"{spec['tag']}: {e}") from None
    if isinstance(M, TwoVertexMonoid):
        parts = {"f": M.f_d, "g": M.g, "h": M.h, "f2": M.f_dm2}
    else:
        parts = {"top": M.f_top, "bot": M.f_bot}
    return {k: deh(p).to_ring(CR) for k, p in parts.items()}, str(deh(M.equation))


def _fill_certificates(S: ParamSystem, values: dict, info: dict) -> None:
    f = S.field
    for e in S.equations:
        if e.identity is None:
            continue
        spec = e.identity
        vals = {S.table.index(p): f.convert(values[p]) for b in S.blocks.values() if not b.name.startswith("c_T_") for p in b.params if p in values}
        R = Ring([v for v in spec.tau_vars if v != "a"], f)
        hyps = [h.evaluate(vals).to_polynomial(R, S.table) for h in spec.hypotheses]
        target = spec.target.evaluate(vals).to_polynomial(R, S.table)
        try:
            tau0, taus = _certify(hyps, target, spec.tau_vars, S.metadata["caps"]["tau_degree"])
        except WitnessFailed as exc:
            raise WitnessFailed(f"{e.tag}: {exc}") from None
        Ra = tau0.ring
        for name, poly in zip(spec.taus, [tau0] + taus):
            S.blocks[name].assign(values, poly.to_ring(Ra))
        info.setdefault("certificates", []).append({"tag": e.tag, "degree": max([tau0.degree()] + [t.degree() for t in taus])})


def _complete(S: ParamSystem, values: dict) -> dict:
    return {p: values.get(p, 0) for p in S.param_vars}


def construct_witness(
    F: RationalMap,
    X: Variety,
    Y: Variety,
    d: int = 1,
    caps: WCaps | None = None,
    plus: bool = False,
    system: ParamSystem | None = None,
) -> WitnessAssignment:
    """Parameter values for an explicit birational map ``F`` (the forward direction).

    Raises ``ValueError`` if F violates the preconditions and
    :class:`WitnessFailed` if a fit or certificate exceeds the caps.
    """
    from .checks import check_birational

    caps = caps or WCaps()
    if F.mode != "projective":
        raise ValueError("witnesses need a projective map")
    if F.degree > d:
        raise ValueError(f"deg F = {F.degree} exceeds d = {d}")
    v = check_birational(F, X, Y)
    if v.no:
        raise ValueError(f"F is not a birational map onto Y: {v.evidence.get('reason')}")
    if v.inconclusive:
        raise WitnessFailed("birationality of F is undecided within budget")
    if system is None:
        system = (build_birational_plus_system if plus else build_system)(X, Y, None, d, caps)
    S = system
    prep = _prepare(X, Y, S.n)
    comps = prep.map_components(F)
    Fp = RationalMap(comps, "projective", target_names=list(prep.RY.names))
    Xp = Variety(prep.gX, "projective", ring=prep.RX)
    graphs = {"source": _affine_graph(Fp, Xp, prep)}
    if any(m["graph"] != "source" for m in S.monoids):
        graphs["plus"] = _affine_graph(Fp, Variety([], "projective", ring=prep.RX), prep)
    values: dict = {}
    info: dict = {"monoids": {}}
    for spec in S.monoids:
        parts, eq = _fit_stage(spec, graphs, caps, graphs["source"])
        for key, poly in parts.items():
            S.blocks[spec["blocks"][key]].assign(values, poly)
        info["monoids"][spec["tag"]] = eq
    Rx = Ring(prep.xs, prep.RX.field)
    for i, c in enumerate(comps):
        S.blocks[f"c_F_{i}"].assign(values, c.dehomogenize("x0").to_ring(Rx))
    _fill_certificates(S, values, info)
    return WitnessAssignment(_complete(S, values), info)


def construct_dominance_witness(
    F: RationalMap, X: Variety, Y: Variety, d: int = 1, caps: WCaps | None = None, system: ParamSystem | None = None
) -> WitnessAssignment:
    """Values solving E for a map whose image lies in a hypersurface not containing Y."""
    from .checks import check_rational_into

    caps = caps or WCaps()
    if F.degree > d:
        raise ValueError(f"deg F = {F.degree} exceeds d = {d}")
    v = check_rational_into(F, X, Y)
    if not v.yes:
        raise ValueError("F does not map X into Y")
    E = system or build_dominance_system(X, Y, None, d, caps)[0]
    prep = _prepare(X, Y, E.n)
    comps = prep.map_components(F)
    Fp = RationalMap(comps, "projective", target_names=list(prep.RY.names))
    Xp = Variety(prep.gX, "projective", ring=prep.RX)
    G = restricted_graph(Fp, Xp)
    Z = image_closure(G, list(prep.RY.names))
    Yid = Ideal(prep.gY, prep.RY)
    zdeg = E.metadata["z_degree"]
    Ry = Ring(prep.ys, prep.RY.field)
    pick = None
    for z in sorted(Z.generators, key=lambda p: (p.degree(), len(p))):
        if z.degree() <= zdeg and not radical_membership(z, Yid):
            pick = z
            break
    if pick is None:
        raise ValueError("no hypersurface of the capped degree separates the image from Y")
    values: dict = {}
    za = pick.dehomogenize("y0").to_ring(Ry)
    E.blocks["c_Z"].assign(values, za)
    k = next(p for p in E.blocks["c_Z"].params if values[p] != 0)
    for p in E.blocks["c_Z"].params:
        values["s_" + p[2:]] = 0
    values["s_" + k[2:]] = E.field.div(E.field.convert(1), E.field.convert(values[k]))
    Rx = Ring(prep.xs, prep.RX.field)
    for i, c in enumerate(comps):
        E.blocks[f"c_F_{i}"].assign(values, c.dehomogenize("x0").to_ring(Rx))
    info: dict = {"hypersurface": str(za)}
    _fill_certificates(E, values, info)
    return WitnessAssignment(_complete(E, values), info)
