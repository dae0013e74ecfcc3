"""Varieties, rational maps, graphs, images, and degree bookkeeping."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Iterable, Sequence

from .groebner import (
    GREVLEX,
    LEX,
    Budget,
    Ideal,
    dimension,
    elimination_ideal,
    ideal_membership,
    is_inconsistent,
    radical_membership,
    reduced_groebner_basis,
)
from .polyring import Polynomial, Ring, fresh_name

__all__ = [
    "Variety",
    "RationalMap",
    "DegreeBound",
    "MapUndefinedError",
    "IndeterminateError",
    "graph_ring",
    "graph_ideal",
    "restricted_graph",
    "image_closure",
    "bezout_degree_bound",
    "graph_degree_bound",
    "smoothness_check",
    "singular_locus_charts",
    "jacobian",
    "minors",
    "affine_chart",
    "measured_degree",
    "find_point",
    "lex_normalize",
]


class MapUndefinedError(ValueError):
    """The map vanishes identically on the source variety."""


class IndeterminateError(ValueError):
    """A point lies in the indeterminacy locus of a representative."""


def lex_normalize(p: Polynomial) -> Polynomial:
    """Scale so the lex-leading coefficient is 1."""
    return p.monic(LEX) if p.terms else p


# ---------------------------------------------------------------------------
# varieties and maps


class Variety:
    """Zero set of an ideal in affine space or (via homogeneous generators) projective space.

    In projective mode the ring variables are the homogeneous coordinates, so
    ``ambient_dim == ngens - 1``.
    """

    def __init__(self, ideal: Ideal | Sequence[Polynomial], mode: str = "projective", ring: Ring | None = None):
        if not isinstance(ideal, Ideal):
            ideal = Ideal(list(ideal), ring)
        if mode not in ("affine", "projective"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "projective":
            for g in ideal.generators:
                if not g.is_homogeneous():
                    raise ValueError(f"generator {g} of a projective variety is not homogeneous")
        self.ideal = ideal
        self.mode = mode
        self._dim: int | None = None

    @property
    def ring(self) -> Ring:
        return self.ideal.ring

    @property
    def ambient_dim(self) -> int:
        n = self.ring.ngens
        return n - 1 if self.mode == "projective" else n

    @property
    def generators(self) -> tuple[Polynomial, ...]:
        return self.ideal.generators

    def dimension(self, budget: Budget | None = None) -> int:
        if self._dim is None:
            d = dimension(self.ideal, budget)
            if self.mode == "projective" and d >= 0:
                d -= 1
            self._dim = d
        return self._dim

    def is_empty(self, budget: Budget | None = None) -> bool:
        return self.dimension(budget) < 0

    def degree_bound(self) -> "DegreeBound":
        return bezout_degree_bound([g.degree() for g in self.generators if g.degree() > 0])

    def contains_point(self, point) -> bool:
        return all(g.evaluate(point) == 0 for g in self.generators)

    def __repr__(self):
        return f"Variety({self.mode}, {list(map(str, self.generators))})"


class RationalMap:
    """A rational map given by explicit components.

    Projective: ``components`` are ``F_0..F_m`` (homogeneous, equal degree) and
    target coordinates default to ``y0..ym``.  Affine: ``components`` are the
    numerators ``g_1..g_m`` over the common ``denominator`` h (default 1) and
    the targets default to ``y1..ym``.
    """

    def __init__(
        self,
        components: Sequence[Polynomial],
        mode: str = "projective",
        denominator: Polynomial | None = None,
        target_names: Sequence[str] | None = None,
    ):
        comps = list(components)
        if not comps:
            raise ValueError("a map needs at least one component")
        ring = comps[0].ring
        if any(c.ring != ring for c in comps):
            raise ValueError("components live in different rings")
        if mode not in ("affine", "projective"):
            raise ValueError(f"unknown mode {mode!r}")
        self.source = ring
        self.mode = mode
        self.components = tuple(comps)
        if mode == "projective":
            if all(c.is_zero() for c in comps):
                raise ValueError("all components of the map are zero")
            degs = {c.degree() for c in comps if not c.is_zero()}
            if len(degs) != 1 or any(not c.is_homogeneous() for c in comps):
                raise ValueError("projective components must be homogeneous of one common degree")
            self.denominator = None
            default = [f"y{i}" for i in range(len(comps))]
        else:
            h = denominator if denominator is not None else ring.one
            if h.ring != ring:
                raise ValueError("denominator lives in a different ring")
            if h.is_zero():
                raise ValueError("zero denominator")
            self.denominator = h
            default = [f"y{i + 1}" for i in range(len(comps))]
        names = list(target_names) if target_names is not None else default
        if len(names) != len(comps):
            raise ValueError("one target name per component is required")
        clash = set(names) & set(ring.names)
        if clash:
            raise ValueError(f"target names {sorted(clash)} clash with source variables")
        self.target_names = tuple(names)

    @property
    def degree(self) -> int:
        degs = [c.degree() for c in self.components]
        if self.denominator is not None:
            degs.append(self.denominator.degree())
        return max(degs)

    @property
    def target_ring(self) -> Ring:
        return Ring(self.target_names, self.source.field)

    def evaluate(self, point) -> list:
        vals = [c.evaluate(point) for c in self.components]
        if self.mode == "projective":
            if all(v == 0 for v in vals):
                raise IndeterminateError("every component vanishes at the point")
            return vals
        h = self.denominator.evaluate(point)
        if h == 0:
            raise IndeterminateError("the denominator vanishes at the point")
        f = self.source.field
        return [f.div(v, h) for v in vals]

    def __repr__(self):
        body = ", ".join(map(str, self.components))
        if self.mode == "projective":
            return f"RationalMap[{body}]"
        return f"RationalMap(({body}) / {self.denominator})"


def graph_ring(F: RationalMap) -> Ring:
    return F.source.extend(F.target_names)


def graph_ideal(F: RationalMap) -> Ideal:
    """Equations cutting out a set containing the graph of ``F``."""
    R = graph_ring(F)
    ys = [R.var(n) for n in F.target_names]
    comps = [c.to_ring(R) for c in F.components]
    gens = []
    if F.mode == "projective":
        for i, j in combinations(range(len(comps)), 2):
            if comps[i].is_zero() and comps[j].is_zero():
                continue
            gens.append(lex_normalize(ys[i] * comps[j] - ys[j] * comps[i]))
    else:
        h = F.denominator.to_ring(R)
        for y, g in zip(ys, comps):
            gens.append(lex_normalize(y * h - g))
    return Ideal(gens, R)


def _chart_function(F: RationalMap, X: Variety, budget) -> Polynomial:
    if F.mode == "affine":
        if radical_membership(F.denominator, X.ideal.to_ring(F.source), budget):
            raise MapUndefinedError("map undefined on X: the denominator vanishes on X")
        return F.denominator
    for c in F.components:
        if not c.is_zero() and not radical_membership(c, X.ideal.to_ring(F.source), budget):
            return c
    raise MapUndefinedError("map undefined on X: every component vanishes on X")


def restricted_graph(F: RationalMap, X: Variety, budget: Budget | None = None) -> Ideal:
    """Ideal of the closure of the graph of ``F`` restricted to ``X``.

    Computed by saturating ``I(X) + graph_ideal(F)`` with respect to one
    component (or the denominator) that does not vanish on X, using the
    ``1 - t*h`` chart and eliminating ``t``.  The result lists the inputs
    first, then any new generators needed.
    """
    if X.ring != F.source:
        raise ValueError("the variety and the map live in different rings")
    h = _chart_function(F, X, budget)
    G = graph_ideal(F)
    R = G.ring
    base = [g.to_ring(R) for g in X.generators] + list(G.generators)
    t = fresh_name(R, "t")
    T = Ring([t] + list(R.names), R.field)
    tv = T.var(t)
    sat = Ideal([g.to_ring(T) for g in base] + [T.one - tv * h.to_ring(T)], T)
    elim = elimination_ideal(sat, R.names, budget)
    out = list(base)
    current = Ideal(out, R)
    extra = sorted((g.to_ring(R) for g in elim.generators), key=lambda p: (p.degree(), len(p), str(p)))
    for g in extra:
        if not ideal_membership(g, current, GREVLEX, budget):
            out.append(lex_normalize(g))
            current = Ideal(out, R)
    return current


def image_closure(G: Ideal, target_vars: Sequence[str], mode: str = "projective", budget: Budget | None = None) -> Variety:
    """Zariski closure of the projection of V(G) to the target coordinates."""
    return Variety(elimination_ideal(G, target_vars, budget), mode)


# ---------------------------------------------------------------------------
# degree bounds


@dataclass(frozen=True)
class DegreeBound:
    value: int
    derivation: str
    note: str = ""


def bezout_degree_bound(degrees: Iterable[int], N: int | None = None) -> DegreeBound:
    """Product of generator degrees (constant C = 1).  With ``N`` only the ``N`` largest count."""
    degs = sorted((int(d) for d in degrees), reverse=True)
    if any(d < 1 for d in degs):
        raise ValueError("degrees must be positive")
    if N is not None:
        degs = degs[:N]
    value = reduce(lambda a, b: a * b, degs, 1)
    return DegreeBound(value, "bezout-product", "C=1")


def graph_degree_bound(F: RationalMap, X: Variety, d: int | None = None) -> DegreeBound:
    """Bound for the degree of the graph: deg-bound(X) times (d+1)^m.

    The graph is a component of X x P^m cut by the hypersurfaces
    ``y_i F_j - y_j F_i`` of degree d + 1; m of them are needed.
    """
    d = F.degree if d is None else d
    if d < F.degree:
        raise ValueError("d is smaller than the degree of the map")
    m = len(F.components) - 1 if F.mode == "projective" else len(F.components)
    base = X.degree_bound().value if X.generators else 1
    return DegreeBound(base * (d + 1) ** m, "graph", f"deg(X) bound {base}, hypersurfaces of degree {d + 1}")


def measured_degree(
    ideal: Ideal,
    cut_vars: Sequence[str],
    charts: Sequence[tuple[Sequence[str], str]] = (),
    seed: int = 0,
    budget: Budget | None = None,
) -> int:
    """Degree measured by generic linear sections.

    ``charts`` is a list of (variable group, chart variable): each group is
    restricted to a generic affine chart ``sum c_i v_i = 1``.  Then generic
    affine hyperplanes in ``cut_vars`` are added until the ideal is
    zero-dimensional and the number of standard monomials is returned.
    Intended for tests on small examples.
    """
    R = ideal.ring
    rng = random.Random(seed)
    gens = list(ideal.generators)
    for group, _ in charts:
        gens.append(sum((R.var(v).scale(rng.randint(1, 9)) for v in group), R.zero) - R.one)
    work = Ideal(gens, R)
    k = dimension(work, budget)
    if k < 0:
        return 0
    for _ in range(k):
        lin = sum((R.var(v).scale(rng.randint(-9, 9) or 1) for v in cut_vars), R.zero) + R.const(rng.randint(-9, 9))
        gens.append(lin)
    work = Ideal(gens, R)
    rep = reduced_groebner_basis(work, GREVLEX, budget)
    if rep.is_unit:
        return 0
    return _count_standard_monomials(rep.leading_monomials(), R.ngens)


def _count_standard_monomials(lms: Sequence[tuple], n: int) -> int:
    # zero-dimensional: every variable has a pure power among the leading monomials
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if m[i] and all(a == 0 for j, a in enumerate(m) if j != i)]
        if not pure:
            raise ValueError("ideal is not zero-dimensional")
        bounds.append(min(pure))
    count = 0

    def rec(i, e):
        nonlocal count
        if i == n:
            if not any(all(a >= b for a, b in zip(e, m)) for m in lms):
                count += 1
            return
        for a in range(bounds[i]):
            rec(i + 1, e + (a,))

    rec(0, ())
    return count


# ---------------------------------------------------------------------------
# Jacobians and smoothness


def jacobian(gens: Sequence[Polynomial], variables: Sequence[str]) -> list[list[Polynomial]]:
    return [[g.diff(v) for v in variables] for g in gens]


def minors(matrix: Sequence[Sequence[Polynomial]], k: int, limit: int | None = None) -> list[Polynomial]:
    """All nonzero k x k minors (cofactor expansion with memoized sub-minors)."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    if k == 0:
        return [matrix[0][0].ring.one] if rows else []
    if k > rows or k > cols:
        return []
    memo: dict = {}

    def det(rs: tuple, cs: tuple) -> Polynomial:
        if len(rs) == 1:
            return matrix[rs[0]][cs[0]]
        key = (rs, cs)
        if key in memo:
            return memo[key]
        r0 = rs[0]
        rest = rs[1:]
        total = None
        for idx, c in enumerate(cs):
            entry = matrix[r0][c]
            if entry.is_zero():
                continue
            sub = det(rest, cs[:idx] + cs[idx + 1 :])
            if sub.is_zero():
                continue
            term = entry * sub
            if idx % 2:
                term = -term
            total = term if total is None else total + term
        if total is None:
            total = matrix[r0][cs[0]].ring.zero
        memo[key] = total
        return total

    out = []
    seen = set()
    for rs in combinations(range(rows), k):
        for cs in combinations(range(cols), k):
            m = det(rs, cs)
            if not m.is_zero() and m not in seen:
                seen.add(m)
                out.append(m)
                if limit is not None and len(out) >= limit:
                    return out
    return out


def affine_chart(gens: Sequence[Polynomial], var: str) -> tuple[Ring, list[Polynomial]]:
    """Dehomogenize at ``var = 1`` and drop ``var`` from the ring."""
    R = gens[0].ring
    sub = R.drop([var])
    return sub, [g.dehomogenize(var).to_ring(sub) for g in gens]


def _chart_singular_ideal(ring: Ring, gens: list[Polynomial], budget) -> Ideal | None:
    I = Ideal(gens, ring)
    k = dimension(I, budget)
    if k < 0:
        return None
    c = ring.ngens - k
    if c == 0:
        return None
    J = jacobian(gens, ring.names)
    ms = minors(J, c)
    return Ideal(list(gens) + ms, ring)


def singular_locus_charts(X: Variety, budget: Budget | None = None) -> list[tuple[str | None, Ideal]]:
    """Per chart: the ideal of X plus all codimension-sized Jacobian minors."""
    out = []
    if X.mode == "affine":
        S = _chart_singular_ideal(X.ring, list(X.generators), budget)
        if S is not None:
            out.append((None, S))
        return out
    if not X.generators:
        return out
    for v in X.ring.names:
        ring, gens = affine_chart(list(X.generators), v)
        S = _chart_singular_ideal(ring, [g for g in gens], budget)
        if S is not None:
            out.append((v, S))
    return out


def smoothness_check(X: Variety, budget: Budget | None = None) -> bool:
    """True iff the Jacobian criterion holds at every point, chart by chart.

    Assumes the given generators define X with its reduced structure and X
    is equidimensional.
    """
    if not X.generators:
        return True
    return all(is_inconsistent(S, budget) for _, S in singular_locus_charts(X, budget))


# ---------------------------------------------------------------------------
# rational points (evidence only)


def _univariate_roots(p: Polynomial, var: str) -> list:
    """Roots of a univariate polynomial in the coefficient field."""
    R = p.ring
    field = R.field
    i = R.index(var)
    coeffs: dict[int, object] = {e[i]: c for e, c in p.terms.items()}
    deg = max(coeffs)
    if field.characteristic:
        q = field.characteristic
        ints = {k: c.v for k, c in coeffs.items()}
        if q <= 20000:
            return [v for v in range(q) if sum(c * pow(v, k, q) for k, c in ints.items()) % q == 0]
        import sympy

        x = sympy.Symbol("x")
        poly = sympy.Poly([ints.get(k, 0) for k in range(deg, -1, -1)], x, modulus=q)
        return sorted(int(r) % q for r in poly.ground_roots())
    import sympy

    x = sympy.Symbol("x")
    fr = [Fraction(coeffs.get(k, 0)) for k in range(deg, -1, -1)]
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in fr], x, domain="QQ")
    roots = poly.ground_roots()
    return sorted((Fraction(int(r.p), int(r.q)) for r in roots), key=lambda f: (abs(f), f))


def find_point(ideal: Ideal, seed: int = 0, tries: int = 12, avoid: Sequence[Polynomial] = (), budget: Budget | None = None):
    """A point of V(I) with coordinates in the coefficient field, or ``None``.

    Free coordinates are fixed to small seeded values; the remaining
    zero-dimensional system is solved through lexicographic bases and
    univariate root finding.  ``avoid`` lists polynomials that must not
    vanish at the returned point.
    """
    R = ideal.ring
    rng = random.Random(seed)
    for attempt in range(tries):
        spread = 1 + attempt
        sol = _solve(list(ideal.generators), R, {}, rng, spread, budget, depth=0)
        if sol is None:
            continue
        if all(a.evaluate(sol) != 0 for a in avoid):
            return {n: sol[n] for n in R.names}
    return None


def _solve(gens, R: Ring, assigned: dict, rng, spread, budget, depth):
    if depth > 3 * R.ngens + 5:
        return None
    gens = [g for g in gens if not g.is_zero()]
    if any(g.is_constant() for g in gens):
        return None
    free = [n for n in R.names if n not in assigned]
    if not gens:
        out = dict(assigned)
        for n in free:
            out[n] = R.field.convert(rng.randint(-spread, spread))
        return out
    rep = reduced_groebner_basis(Ideal(gens, R), LEX, budget)
    if rep.is_unit:
        return None
    basis = rep.basis
    # a univariate element in some unassigned variable
    for g in reversed(basis):
        vs = g.variables()
        if len(vs) == 1:
            v = vs[0]
            for r in _univariate_roots(g, v):
                val = R.field.convert(r)
                sub = [b.subs({v: val}) for b in basis]
                res = _solve(sub, R, {**assigned, v: val}, rng, spread, budget, depth + 1)
                if res is not None:
                    return res
            return None
    # positive dimension: fix a variable free modulo the leading terms
    lms = rep.leading_monomials()
    candidates = [n for i, n in enumerate(R.names) if n not in assigned and not any(
        all(a == 0 for j, a in enumerate(m) if j != i) and m[i] for m in lms
    )]
    if not candidates:
        candidates = [n for n in free]
    if not candidates:
        return None
    v = candidates[-1]
    for _ in range(3):
        val = R.field.convert(rng.randint(-spread, spread))
        sub = [b.subs({v: val}) for b in basis]
        res = _solve(sub, R, {**assigned, v: val}, rng, spread, budget, depth + 1)
        if res is not None:
            return res
    return None
