"""Monoid hypersurfaces with one or two vertices.

A one-vertex monoid of degree d with vertex at the coordinate point of
``x_v`` has the form ``f_top * x_v + f_bot`` with ``f_top`` of degree d-1 and
``f_bot`` of degree d in the other coordinates.  The two-vertex form with
vertices at ``x_a`` and ``x_b`` is::

    f_d + x_a * g + x_b * h + x_a * x_b * f_{d-2}

Irreducibility is replaced by a dimension test: ``f_top`` and ``f_bot`` have
no common factor iff their common zero set in the affine cone has
codimension 2.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .groebner import (
    GREVLEX,
    Budget,
    BudgetExceeded,
    Ideal,
    dimension,
    elimination_ideal,
    normal_form,
    radical_membership,
    reduced_groebner_basis,
)
from .linalg import nullspace
from .polyring import Polynomial, Ring, monomials_up_to, _monomials_of_degree
from .varieties import IndeterminateError, RationalMap, Variety

__all__ = [
    "Monoid",
    "TwoVertexMonoid",
    "LinearChange",
    "MonoidFitFailed",
    "ChartEmptyError",
    "validate_monoid",
    "project_from_vertex",
    "inverse_section",
    "strict_transform_chart",
    "fit_monoid",
    "q_sequence",
    "monoid_h0_bound",
]


class MonoidFitFailed(RuntimeError):
    """No acceptable monoid up to the degree cap (inconclusive, not a disproof)."""


class ChartEmptyError(ValueError):
    """The variety lies inside V(f_top * f_bot)."""


# ---------------------------------------------------------------------------
# coordinate changes


@dataclass(frozen=True)
class LinearChange:
    """``x_i = sum_j A[i][j] * x'_j``; columns of ``vertex_cols`` carry the vertices."""

    ring: Ring
    matrix: tuple[tuple, ...]

    @classmethod
    def identity(cls, ring: Ring) -> "LinearChange":
        n = ring.ngens
        return cls(ring, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def is_identity(self) -> bool:
        return all(self.matrix[i][j] == (i == j) for i in range(len(self.matrix)) for j in range(len(self.matrix)))

    def apply(self, p: Polynomial) -> Polynomial:
        """Pull back ``p`` to the new coordinates."""
        if self.is_identity():
            return p
        R = self.ring
        images = {}
        for i, n in enumerate(R.names):
            images[n] = sum((R.var(m).scale(self.matrix[i][j]) for j, m in enumerate(R.names) if self.matrix[i][j] != 0), R.zero)
        return p.subs(images)

    def point_to_new(self, point: Sequence) -> list:
        """Coordinates x' of the point x (solves A x' = x)."""
        from .linalg import solve

        n = len(self.matrix)
        rows = [{j: self.matrix[i][j] for j in range(n) if self.matrix[i][j] != 0} for i in range(n)]
        sol = solve(rows, list(point), n, self.ring.field)
        return [sol.get(j, 0) for j in range(n)]

    def point_to_old(self, point: Sequence) -> list:
        n = len(self.matrix)
        return [sum(self.matrix[i][j] * point[j] for j in range(n)) for i in range(n)]


def normalize_vertices(ring: Ring, vertices: Sequence[Sequence]) -> tuple[LinearChange, list[str]]:
    """Linear change sending coordinate points to the given vertices.

    Returns the change and the names of the coordinates that now carry the
    vertices.  Coordinate-point vertices give the identity.
    """
    n = ring.ngens
    cols: dict[int, list] = {}
    used: list[int] = []
    reduced = []
    for v in vertices:
        v = [Fraction(c) for c in v]
        if len(v) != n:
            raise ValueError("vertex has the wrong number of coordinates")
        w = list(v)
        for k, r in zip(used, reduced):
            f = w[k] / r[k]
            w = [a - f * b for a, b in zip(w, r)]
        piv = next((i for i in range(n) if w[i] != 0), None)
        if piv is None:
            raise ValueError("vertices must be linearly independent")
        used.append(piv)
        reduced.append(w)
        cols[piv] = v
    matrix = []
    for i in range(n):
        row = []
        for j in range(n):
            if j in cols:
                c = cols[j][i]
                row.append(c.numerator if c.denominator == 1 else c)
            else:
                row.append(int(i == j))
        matrix.append(tuple(row))
    return LinearChange(ring, tuple(matrix)), [ring.names[k] for k in used]


def _vertex_var(ring: Ring, vertex) -> tuple[LinearChange, str]:
    if isinstance(vertex, str):
        ring.index(vertex)
        return LinearChange.identity(ring), vertex
    change, names = normalize_vertices(ring, [vertex])
    return change, names[0]


# ---------------------------------------------------------------------------
# monoid types


@dataclass
class Monoid:
    """One-vertex monoid ``f_top * x_v + f_bot`` (in coordinates after ``change``)."""

    equation: Polynomial
    vertex_var: str
    change: LinearChange | None = None

    def __post_init__(self):
        if self.change is None:
            self.change = LinearChange.identity(self.equation.ring)
        parts = self.equation.coefficients_in(self.vertex_var)
        R = self.equation.ring
        self.f_top = parts.get(1, R.zero)
        self.f_bot = parts.get(0, R.zero)
        self.extra = {k: v for k, v in parts.items() if k > 1}

    @property
    def ring(self) -> Ring:
        return self.equation.ring

    @property
    def degree(self) -> int:
        return self.equation.degree()

    @property
    def r(self) -> int:
        return self.ring.ngens - 1

    @property
    def other_vars(self) -> list[str]:
        return [n for n in self.ring.names if n != self.vertex_var]

    @property
    def vertex(self) -> list:
        R = self.ring
        e = [int(n == self.vertex_var) for n in R.names]
        return self.change.point_to_old(e)

    @classmethod
    def from_parts(cls, f_top: Polynomial, f_bot: Polynomial, vertex_var: str) -> "Monoid":
        R = f_top.ring
        return cls(f_top * R.var(vertex_var) + f_bot, vertex_var)

    @classmethod
    def from_equation(cls, F: Polynomial, vertex) -> "Monoid":
        change, v = _vertex_var(F.ring, vertex)
        return cls(change.apply(F), v, change)


@dataclass
class TwoVertexMonoid:
    """``f_d + x_a*g + x_b*h + x_a*x_b*f_{d-2}`` with vertices at ``x_a`` and ``x_b``."""

    equation: Polynomial
    vertex_vars: tuple[str, str]
    change: LinearChange | None = None

    def __post_init__(self):
        R = self.equation.ring
        if self.change is None:
            self.change = LinearChange.identity(R)
        a, b = self.vertex_vars
        ia, ib = R.index(a), R.index(b)
        parts: dict[tuple[int, int], dict] = {}
        for e, c in self.equation.terms.items():
            key = (e[ia], e[ib])
            rest = list(e)
            rest[ia] = rest[ib] = 0
            parts.setdefault(key, {})[tuple(rest)] = c
        P = {k: Polynomial(R, v, _trusted=True) for k, v in parts.items()}
        self.f_d = P.pop((0, 0), R.zero)
        self.g = P.pop((1, 0), R.zero)
        self.h = P.pop((0, 1), R.zero)
        self.f_dm2 = P.pop((1, 1), R.zero)
        self.extra = P

    @property
    def ring(self) -> Ring:
        return self.equation.ring

    @property
    def degree(self) -> int:
        return self.equation.degree()

    @property
    def r(self) -> int:
        return self.ring.ngens - 1

    def reading(self, which: int) -> Monoid:
        """The one-vertex reading with respect to vertex ``which`` (0 or 1)."""
        return Monoid(self.equation, self.vertex_vars[which], self.change)

    @classmethod
    def from_parts(cls, f_d, g, h, f_dm2, vertex_vars: tuple[str, str]) -> "TwoVertexMonoid":
        R = f_d.ring
        a, b = (R.var(v) for v in vertex_vars)
        return cls(f_d + a * g + b * h + a * b * f_dm2, tuple(vertex_vars))


# ---------------------------------------------------------------------------
# validation


@dataclass
class MonoidDiagnostics:
    valid: bool
    degree: int
    multiplicity: int | list[int]
    coprime_dimension: int | list[int]
    reasons: list[str] = field(default_factory=list)


def _multiplicity(F: Polynomial, var: str) -> int:
    """Order of vanishing at the coordinate point of ``var``."""
    g = F.dehomogenize(var)
    if g.is_zero():
        return F.degree() + 1
    return min(sum(e) for e in g.terms)


def _coprime_dim(M: Monoid, budget) -> int:
    """Affine dimension of V(all coefficients in x_v) inside the other r coordinates."""
    parts = M.equation.coefficients_in(M.vertex_var)
    sub = Ring(M.other_vars, M.ring.field)
    gens = [p.to_ring(sub) for p in parts.values() if not p.is_zero()]
    return dimension(Ideal(gens, sub), budget)


def _validate_one(M: Monoid, budget) -> MonoidDiagnostics:
    F = M.equation
    d = F.degree()
    reasons = []
    if not F.is_homogeneous():
        reasons.append("equation is not homogeneous")
    mult = _multiplicity(F, M.vertex_var)
    if d == 1:
        ok_mult = mult == 0 and not M.f_top.is_zero()
        cdim = -1
        if not ok_mult:
            reasons.append("a degree-1 monoid needs a nonzero coefficient on the vertex coordinate")
        return MonoidDiagnostics(not reasons, d, mult, cdim, reasons)
    if mult != d - 1:
        reasons.append(f"vertex multiplicity {mult}, expected {d - 1}")
    r = M.r
    cdim = _coprime_dim(M, budget)
    if cdim > r - 2:
        reasons.append(f"coefficients share a common factor (common zero set of dimension {cdim} > {r - 2})")
    return MonoidDiagnostics(not reasons, d, mult, cdim, reasons)


def validate_monoid(M: Monoid | TwoVertexMonoid, budget: Budget | None = None) -> MonoidDiagnostics:
    """Check vertex multiplicity exactly d-1 and the coprimality surrogate."""
    if isinstance(M, Monoid):
        return _validate_one(M, budget)
    d1 = _validate_one(M.reading(0), budget)
    d2 = _validate_one(M.reading(1), budget)
    reasons = [f"vertex {M.vertex_vars[0]}: {r}" for r in d1.reasons] + [
        f"vertex {M.vertex_vars[1]}: {r}" for r in d2.reasons
    ]
    if M.extra:
        reasons.append("equation is not in two-vertex normal form")
    return MonoidDiagnostics(
        not reasons, M.degree, [d1.multiplicity, d2.multiplicity], [d1.coprime_dimension, d2.coprime_dimension], reasons
    )


# ---------------------------------------------------------------------------
# projection and inverse


def project_from_vertex(M: Monoid, target):
    """Drop the vertex coordinate of a point, or eliminate it from an ideal."""
    if isinstance(target, Ideal):
        return elimination_ideal(target, M.other_vars)
    point = M.change.point_to_new(list(target))
    R = M.ring
    iv = R.index(M.vertex_var)
    rest = [c for i, c in enumerate(point) if i != iv]
    if all(c == 0 for c in rest):
        raise IndeterminateError("the vertex is the indeterminacy point of the projection")
    return rest


def inverse_section(M: Monoid, source_names: Sequence[str] | None = None) -> RationalMap:
    """``[x] -> [f_top * x : -f_bot]`` with the vertex slot carrying ``-f_bot``.

    The source ring has one coordinate per non-vertex variable; target
    names are the monoid's own variables (in the normalized coordinates).
    """
    others = M.other_vars
    names = list(source_names) if source_names is not None else [f"u{i}" for i in range(len(others))]
    if len(names) != len(others):
        raise ValueError("need one source name per non-vertex coordinate")
    S = Ring(names, M.ring.field)
    rename_ring = Ring(others, M.ring.field)
    mapping = {o: S.var(n) for o, n in zip(others, names)}
    ft = M.f_top.to_ring(rename_ring).subs(mapping, S)
    fb = M.f_bot.to_ring(rename_ring).subs(mapping, S)
    comps = []
    for v in M.ring.names:
        if v == M.vertex_var:
            comps.append(-fb)
        else:
            comps.append(ft * mapping[v])
    tnames = list(M.ring.names)
    if set(tnames) & set(names):
        tnames = [f"{n}_" for n in tnames]
    return RationalMap(comps, "projective", target_names=tnames)


def strict_transform_chart(X: Variety | Ideal, M: Monoid, t: str = "t", budget: Budget | None = None) -> Ideal:
    """``I(X) + (monoid equation) + (1 - t*f_top*f_bot)`` in the monoid ring plus ``t``.

    X lives in (a subring of) the non-vertex coordinates.
    """
    I = X.ideal if isinstance(X, Variety) else X
    R = M.ring
    base = Ring(M.other_vars, R.field)
    IX = I.to_ring(base)
    prod = (M.f_top * M.f_bot).to_ring(base)
    if radical_membership(prod, IX, budget):
        raise ChartEmptyError("chart empty: X lies in V(f_top * f_bot)")
    T = R.extend([t])
    tv = T.var(t)
    gens = [g.to_ring(T) for g in IX.generators]
    gens.append(M.equation.to_ring(T))
    gens.append(T.one - tv * (M.f_top * M.f_bot).to_ring(T))
    return Ideal(gens, T)


# ---------------------------------------------------------------------------
# fitting


def _template(ring: Ring, vertex_vars: Sequence[str], D: int) -> list[Polynomial]:
    """Monomials allowed in a degree-D monoid with the given coordinate vertices."""
    names = ring.names
    vi = [ring.index(v) for v in vertex_vars]
    others = [i for i in range(len(names)) if i not in vi]
    out = []

    def lift(sub_e, extra):
        e = [0] * len(names)
        for i, a in zip(others, sub_e):
            e[i] = a
        for i, a in extra.items():
            e[i] = a
        return ring.monomial(e)

    if len(vertex_vars) == 1:
        (v,) = vi
        if D >= 1:
            out += [lift(m, {v: 1}) for m in _monomials_of_degree(len(others), D - 1)]
        out += [lift(m, {}) for m in _monomials_of_degree(len(others), D)]
    else:
        a, b = vi
        out += [lift(m, {}) for m in _monomials_of_degree(len(others), D)]
        if D >= 1:
            out += [lift(m, {a: 1}) for m in _monomials_of_degree(len(others), D - 1)]
            out += [lift(m, {b: 1}) for m in _monomials_of_degree(len(others), D - 1)]
        if D >= 2:
            out += [lift(m, {a: 1, b: 1}) for m in _monomials_of_degree(len(others), D - 2)]
    return out


def _cone_ideal(G: Ideal, vertex_var: str, budget) -> Ideal:
    keep = [n for n in G.ring.names if n != vertex_var]
    elim = elimination_ideal(G, keep, budget)
    return Ideal([g.to_ring(G.ring) for g in elim.generators], G.ring)


def fit_monoid(
    gamma: Ideal,
    vertices: Sequence,
    start_degree: int = 1,
    cap: int = 4,
    seed: int = 0,
    tries: int = 24,
    extra_check: Callable[[object], bool] | None = None,
    budget: Budget | None = None,
) -> Monoid | TwoVertexMonoid:
    """Smallest-degree monoid through V(gamma) with the given vertices.

    ``vertices`` holds one or two entries, each a coordinate name or a point.
    Containment is linear in the coefficients: the normal form of the monoid
    equation modulo the Groebner basis of gamma must vanish.  Candidates from
    the kernel are checked with :func:`validate_monoid`, for not containing
    the cone over V(gamma) from each vertex, and with ``extra_check``.
    """
    if len(vertices) not in (1, 2):
        raise ValueError("one or two vertices are supported")
    R = gamma.ring
    if all(isinstance(v, str) for v in vertices):
        change = LinearChange.identity(R)
        vnames = list(vertices)
        for v in vnames:
            R.index(v)
        if len(set(vnames)) != len(vnames):
            raise ValueError("vertices must be distinct")
    else:
        pts = []
        for v in vertices:
            if isinstance(v, str):
                pts.append([int(n == v) for n in R.names])
            else:
                pts.append(list(v))
        change, vnames = normalize_vertices(R, pts)
    G = Ideal([change.apply(g) for g in gamma.generators], R)
    k = dimension(G, budget)
    limit = R.ngens - 1 - len(vertices)  # affine cone dimension allowed
    if k > limit:
        raise ValueError(
            f"V(gamma) has cone dimension {k}; at most {limit} is allowed for {len(vertices)} vertex(es)"
        )
    gb = reduced_groebner_basis(G, GREVLEX, budget)
    cones = [_cone_ideal(G, v, budget) for v in vnames]
    rng = random.Random(seed)
    field = R.field
    for D in range(max(start_degree, 1), cap + 1):
        mons = _template(R, vnames, D)
        if not mons:
            continue
        nfs = [normal_form(m, gb) for m in mons]
        rows_by_mono: dict[tuple, dict] = {}
        for j, nf in enumerate(nfs):
            for e, c in nf.terms.items():
                rows_by_mono.setdefault(e, {})[j] = c
        kernel = nullspace(list(rows_by_mono.values()), len(mons), field)
        if not kernel:
            continue
        candidates = list(kernel)
        for _ in range(tries):
            combo: dict[int, object] = {}
            for vec in kernel:
                w = rng.randint(-3, 3)
                if w == 0:
                    continue
                for j, c in vec.items():
                    combo[j] = combo.get(j, 0) + w * c
            if combo:
                candidates.append(combo)
        for vec in candidates:
            F = R.zero
            for j, c in vec.items():
                if c != 0:
                    F = F + mons[j].scale(c)
            if F.is_zero():
                continue
            F = F.monic()
            M = Monoid(F, vnames[0], change) if len(vnames) == 1 else TwoVertexMonoid(F, tuple(vnames), change)
            if not validate_monoid(M, budget).valid:
                continue
            if any(radical_membership(F, cone, budget) for cone in cones):
                continue
            if extra_check is not None and not extra_check(M):
                continue
            return M
    raise MonoidFitFailed(f"no acceptable monoid of degree <= {cap}")


# ---------------------------------------------------------------------------
# degree bookkeeping


@lru_cache(maxsize=None)
def q_sequence(m: int, d: int) -> int:
    """``q_0 = 1`` and ``q_m(d) = sum_{j<=d} q_{m-1}(j)``; equals C(d+m, m)."""
    if m < 0 or d < 0:
        raise ValueError("m and d must be non-negative")
    if m == 0:
        return 1
    return sum(q_sequence(m - 1, j) for j in range(d + 1))


def monoid_h0_bound(delta: int, s: int, d: int) -> int:
    return delta * q_sequence(s, d)
