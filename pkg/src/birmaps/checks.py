"""Decision procedures for explicit maps.

Every procedure returns a :class:`~birmaps.verdict.Verdict`.  A "yes" or
"no" carries evidence that can be re-checked independently (a graph ideal,
a separating generator, an inverse map, a point); running out of budget
gives "inconclusive".

Projective computations run on the affine charts ``x_k = 1, y_l = 1`` of the
graph; affine computations use the graph itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import wraps
from typing import Iterator, Sequence

from .groebner import (
    Budget,
    BudgetExceeded,
    Ideal,
    elimination_ideal,
    ideal_membership,
    is_inconsistent,
    radical_membership,
    reduced_groebner_basis,
)
from .polyring import GREVLEX, Polynomial, Ring, block_order
from .varieties import (
    MapUndefinedError,
    RationalMap,
    Variety,
    find_point,
    image_closure,
    jacobian,
    minors,
    restricted_graph,
    smoothness_check,
)
from .verdict import Answer, Verdict, inconclusive, no, yes

__all__ = [
    "Verdict",
    "Answer",
    "RelativeJacobian",
    "check_rational_into",
    "check_dominant",
    "check_birational",
    "check_regular",
    "check_regular_embedding",
    "check_isomorphism_onto",
    "check_regular_affine",
    "check_surjective_regular_affine",
    "check_closed_embedding_affine",
    "graph_charts",
]


def _budgeted(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BudgetExceeded as e:
            return inconclusive(e.reason, e.spent)

    return wrapper


def _pt(point: dict | None) -> dict | None:
    if point is None:
        return None
    return {k: str(v) for k, v in point.items()}


def _target_check(F: RationalMap, Y: Variety):
    if tuple(Y.ring.names) != tuple(F.target_names):
        raise ValueError(f"target variety lives in {Y.ring.names}, map targets are {F.target_names}")


# ---------------------------------------------------------------------------
# charts and relative Jacobians


@dataclass
class GraphChart:
    source_chart: str | None
    target_chart: str | None
    ring: Ring
    generators: list[Polynomial]
    source_vars: list[str]
    target_vars: list[str]

    @property
    def ideal(self) -> Ideal:
        return Ideal(self.generators, self.ring)

    def lift(self, point: dict) -> dict:
        out = dict(point)
        if self.source_chart is not None:
            out[self.source_chart] = 1
        if self.target_chart is not None:
            out[self.target_chart] = 1
        return out


def graph_charts(F: RationalMap, G: Ideal) -> Iterator[GraphChart]:
    """Charts ``x_k = 1, y_l = 1`` of a graph ideal (the whole graph in affine mode)."""
    src = list(F.source.names)
    tgt = list(F.target_names)
    if F.mode == "affine":
        yield GraphChart(None, None, G.ring, list(G.generators), src, tgt)
        return
    for xk in src:
        for yl in tgt:
            ring = G.ring.drop([xk, yl])
            gens = [g.dehomogenize(xk).dehomogenize(yl).to_ring(ring) for g in G.generators]
            gens = [g for g in gens if not g.is_zero()]
            yield GraphChart(xk, yl, ring, gens, [v for v in src if v != xk], [v for v in tgt if v != yl])


@dataclass
class RelativeJacobian:
    """Jacobian of the graph generators with respect to one block of variables."""

    generators: list[Polynomial]
    columns: list[str]
    matrix: list[list[Polynomial]] = field(init=False)
    _minors: list[Polynomial] | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.matrix = jacobian(self.generators, self.columns)

    @property
    def minors(self) -> list[Polynomial]:
        """All nonzero maximal (size = number of columns) minors."""
        if self._minors is None:
            self._minors = minors(self.matrix, len(self.columns)) if self.columns else []
        return self._minors

    def column(self, name: str) -> list[Polynomial]:
        j = self.columns.index(name)
        return [row[j] for row in self.matrix]


def _relative_tangent_test(F, G, block: str, budget, seed=0) -> Verdict:
    """Zero relative tangent spaces on every chart of the graph.

    ``block`` is ``"target"`` (projection to the source) or ``"source"``
    (projection to the target).
    """
    checked = []
    for ch in graph_charts(F, G):
        if not ch.generators:
            continue
        I = ch.ideal
        if is_inconsistent(I, budget):
            continue
        cols = ch.target_vars if block == "target" else ch.source_vars
        if not cols:
            checked.append(ch.source_chart or "affine")
            continue
        J = RelativeJacobian(list(ch.generators), cols)
        S = Ideal(list(ch.generators) + J.minors, ch.ring)
        if not is_inconsistent(S, budget):
            pt = find_point(S, seed=seed, budget=budget)
            return no(
                reason=f"relative tangent space is positive-dimensional somewhere on the graph ({block} directions)",
                chart={"source": ch.source_chart, "target": ch.target_chart},
                minors=[str(m) for m in J.minors],
                point=_pt(ch.lift(pt)) if pt is not None else None,
            )
        checked.append({"source": ch.source_chart, "target": ch.target_chart, "minors": len(J.minors)})
    return yes(charts=checked)


# ---------------------------------------------------------------------------
# rational maps into Y, dominance


@_budgeted
def check_rational_into(F: RationalMap, X: Variety, Y: Variety, budget: Budget | None = None) -> Verdict:
    """Is F defined somewhere on X with image inside Y?"""
    _target_check(F, Y)
    try:
        G = restricted_graph(F, X, budget)
    except MapUndefinedError as e:
        return no(reason=str(e), components=[str(c) for c in F.components])
    R = G.ring
    for g in Y.generators:
        gg = g.to_ring(R)
        if not radical_membership(gg, G, budget):
            pt = find_point(G, avoid=[gg], budget=budget)
            return no(reason="the image leaves Y", generator=str(g), point=_pt(pt))
    return yes(graph=[str(g) for g in G.generators])


@_budgeted
def check_dominant(F: RationalMap, X: Variety, Y: Variety, budget: Budget | None = None) -> Verdict:
    """Is the closure of F(X) equal to Y?"""
    v = check_rational_into(F, X, Y, budget)
    if not v.yes:
        return v
    G = restricted_graph(F, X, budget)
    Z = image_closure(G, F.target_names, F.mode, budget)
    for z in Z.generators:
        if not radical_membership(z, Y.ideal, budget):
            pt = find_point(Y.ideal, avoid=[z], budget=budget)
            return no(
                reason="a hypersurface contains the image but not Y",
                separating_generator=str(z),
                image=[str(g) for g in Z.generators],
                point_of_Y_off_image=_pt(pt),
            )
    return yes(image=[str(g) for g in Z.generators])


# ---------------------------------------------------------------------------
# birationality


def _pick_chart(F: RationalMap, X: Variety, budget) -> tuple[str | None, str | None]:
    if F.mode == "affine":
        return None, None
    IX = X.ideal
    xk = next((v for v in F.source.names if not radical_membership(F.source.var(v), IX, budget)), None)
    yl = next(
        (n for n, c in zip(F.target_names, F.components) if not c.is_zero() and not radical_membership(c, IX, budget)),
        None,
    )
    if xk is None or yl is None:
        raise MapUndefinedError("no chart meets X")
    return xk, yl


def _coefficient_split(g: Polynomial, var: str) -> tuple[int, Polynomial, Polynomial]:
    parts = g.coefficients_in(var)
    deg = max(parts)
    return deg, parts[deg], parts.get(0, g.ring.zero)


def _extract_inverse(F: RationalMap, X: Variety, G: Ideal, budget):
    """Express every source coordinate as a rational function on the image.

    Returns ``("ok", {x_i: (numerator, denominator)}, chart)`` with the
    fractions in the chart ring, or ``("no", info)`` / ``("fail", info)``.
    """
    xk, yl = _pick_chart(F, X, budget)
    chart = next(c for c in graph_charts(F, G) if c.source_chart == xk and c.target_chart == yl)
    P = chart.ideal
    fractions = {}
    for xi in chart.source_vars:
        E = elimination_ideal(P, [xi] + chart.target_vars, budget)
        R2 = Ring([xi] + [n for n in chart.ring.names if n in chart.target_vars], chart.ring.field)
        gb = reduced_groebner_basis(E.to_ring(R2), block_order(1), budget)
        best = None
        mindeg = None
        for g in gb.basis:
            deg, lc, _ = _coefficient_split(g, xi)
            if deg == 0:
                continue
            if radical_membership(lc.to_ring(chart.ring), P, budget):
                continue
            if mindeg is None or deg < mindeg:
                mindeg = deg
            if deg == 1:
                key = (g.degree(), len(g), str(g))
                if best is None or key < best[0]:
                    best = (key, g)
        if best is None:
            if mindeg is None:
                return "no", {"variable": xi, "reason": "transcendental over the function field of the image"}
            return "no", {"variable": xi, "reason": f"algebraic of degree {mindeg} over the function field of the image"}
        g = best[1]
        _, A, B = _coefficient_split(g, xi)
        fractions[xi] = ((-B).to_ring(chart.ring), A.to_ring(chart.ring))
    return "ok", fractions, chart


def _common_denominator(dens: list[Polynomial]) -> Polynomial:
    L = None
    for d in dens:
        if L is None:
            L = d
        elif L.exact_div(d) is not None:
            continue
        elif d.exact_div(L) is not None:
            L = d
        else:
            L = L * d
    return L


def _strip_monomial(polys: list[Polynomial]) -> list[Polynomial]:
    nz = [p for p in polys if not p.is_zero()]
    if not nz:
        return polys
    g = nz[0].monomial_content()
    for p in nz[1:]:
        g = tuple(min(a, b) for a, b in zip(g, p.monomial_content()))
    if not any(g):
        return polys
    R = nz[0].ring
    m = R.monomial(g)
    return [p.exact_div(m) if not p.is_zero() else p for p in polys]


def _build_inverse(F: RationalMap, X: Variety, fractions: dict, chart: GraphChart) -> RationalMap:
    T = F.target_ring
    src = list(F.source.names)
    if F.mode == "projective":
        yl = chart.target_chart
        homog = {}
        for xi, (num, den) in fractions.items():
            n_t, d_t = num.to_ring(T), den.to_ring(T)
            e = max(n_t.degree(), d_t.degree(), 0)
            nh = n_t.homogenize(yl) * T.var(yl) ** (e - n_t.degree()) if not n_t.is_zero() else n_t
            dh = d_t.homogenize(yl) * T.var(yl) ** (e - d_t.degree())
            homog[xi] = (nh, dh)
        L = _common_denominator([d for _, d in homog.values()]) if homog else T.one
        comps = []
        for v in src:
            if v == chart.source_chart:
                comps.append(L)
            else:
                nh, dh = homog[v]
                comps.append(nh * L.exact_div(dh))
        comps = _strip_monomial(comps)
        return RationalMap(comps, "projective", target_names=src)
    nums = {xi: (num.to_ring(T), den.to_ring(T)) for xi, (num, den) in fractions.items()}
    L = _common_denominator([d for _, d in nums.values()]) if nums else T.one
    comps = [nums[v][0] * L.exact_div(nums[v][1]) for v in src]
    stripped = _strip_monomial(comps + [L])
    return RationalMap(stripped[:-1], "affine", denominator=stripped[-1], target_names=src)


def compose(G: RationalMap, F: RationalMap) -> tuple[list[Polynomial], Polynomial | None]:
    """Components of G after F, as polynomials on F's source.

    Projective: the list ``G_i(F)``.  Affine: numerators and a denominator
    after clearing powers of F's denominator.
    """
    S = F.source
    if F.mode == "projective":
        mapping = dict(zip(F.target_names, F.components))
        return [c.subs(mapping, S) for c in G.components], None
    h = F.denominator
    e = max([c.degree() for c in G.components] + [G.denominator.degree()])

    def lift(P: Polynomial) -> Polynomial:
        total = S.zero
        for exps, c in P.terms.items():
            t = S.const(c) * h ** (e - sum(exps))
            for gj, a in zip(F.components, exps):
                if a:
                    t = t * gj**a
            total = total + t
        return total

    return [lift(c) for c in G.components], lift(G.denominator)


def _left_inverse_holds(F: RationalMap, Ginv: RationalMap, X: Variety, budget) -> tuple[bool, list[str]]:
    """G o F = identity on X: all 2x2 minors of (x | G(F(x))) vanish on X."""
    IX = X.ideal
    comps, den = compose(Ginv, F)
    S = F.source
    xs = [S.var(v) for v in S.names]
    residues = []
    if F.mode == "projective":
        if all(radical_membership(c, IX, budget) for c in comps):
            return False, ["composition vanishes identically on X"]
        ok = True
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                m = xs[i] * comps[j] - xs[j] * comps[i]
                if not ideal_membership(m, IX, GREVLEX, budget) and not radical_membership(m, IX, budget):
                    ok = False
                    residues.append(str(m))
        return ok, residues
    if radical_membership(den, IX, budget):
        return False, ["composition has a denominator vanishing on X"]
    ok = True
    for x, c in zip(xs, comps):
        m = x * den - c
        if not ideal_membership(m, IX, GREVLEX, budget) and not radical_membership(m, IX, budget):
            ok = False
            residues.append(str(m))
    return ok, residues


@_budgeted
def check_birational(F: RationalMap, X: Variety, Y: Variety, budget: Budget | None = None) -> Verdict:
    """Is F a birational map from X onto Y?  A "yes" carries the inverse."""
    v = check_dominant(F, X, Y, budget)
    if not v.yes:
        return v
    G = restricted_graph(F, X, budget)
    res = _extract_inverse(F, X, G, budget)
    if res[0] == "no":
        detail = dict(res[1])
        detail["reason"] = "not birational: " + str(detail.get("reason", "no inverse on any chart"))
        return no(**detail)
    _, fractions, chart = res
    Ginv = _build_inverse(F, X, fractions, chart)
    ok, residues = _left_inverse_holds(F, Ginv, X, budget)
    if not ok:  # pragma: no cover - guards against an extraction bug
        return inconclusive("extracted inverse failed verification", residues=residues)
    ev = {
        "inverse": [str(c) for c in Ginv.components],
        "inverse_source": list(Ginv.source.names),
        "chart": {"source": chart.source_chart, "target": chart.target_chart},
    }
    if Ginv.mode == "affine":
        ev["inverse_denominator"] = str(Ginv.denominator)
    out = yes(**ev)
    out.evidence["inverse_map"] = Ginv
    return out


# ---------------------------------------------------------------------------
# regularity and embeddings


@_budgeted
def check_regular(F: RationalMap, X: Variety, budget: Budget | None = None) -> Verdict:
    """Is F a morphism on the smooth variety X?

    The graph is projected to X; the answer is yes iff the maximal minors of
    the Jacobian in the target directions have no common zero on the graph.
    """
    if not smoothness_check(X, budget):
        raise ValueError("X is singular; the regularity test needs a smooth source")
    try:
        G = restricted_graph(F, X, budget)
    except MapUndefinedError as e:
        return no(reason=str(e))
    v = _relative_tangent_test(F, G, "target", budget)
    if v.yes:
        v.evidence["graph"] = [str(g) for g in G.generators]
    return v


@_budgeted
def check_regular_embedding(F: RationalMap, X: Variety, Y: Variety, budget: Budget | None = None) -> Verdict:
    """Is F an isomorphism of X onto a closed smooth subvariety of Y?"""
    v = check_regular(F, X, budget)
    if not v.yes:
        return v
    v = check_rational_into(F, X, Y, budget)
    if not v.yes:
        return v
    G = restricted_graph(F, X, budget)
    v = _relative_tangent_test(F, G, "source", budget)
    if not v.yes:
        return v
    Z = image_closure(G, F.target_names, F.mode, budget)
    if Z.generators:
        Z = Variety(Z.ideal, F.mode)
    b = check_birational(F, X, Variety(Z.ideal, F.mode), budget)
    if not b.yes:
        if b.no:
            return no(reason="not birational onto the image", detail=b.evidence)
        return b
    if not smoothness_check(Z, budget):
        return no(reason="the image is singular", image=[str(g) for g in Z.generators])
    return yes(image=[str(g) for g in Z.generators], inverse=b.evidence.get("inverse"))


@_budgeted
def check_isomorphism_onto(F: RationalMap, X: Variety, Y: Variety, budget: Budget | None = None) -> Verdict:
    """Is F an isomorphism of X onto Y?"""
    v = check_regular_embedding(F, X, Y, budget)
    if not v.yes:
        return v
    d = check_dominant(F, X, Y, budget)
    if not d.yes:
        return d
    v.evidence["onto"] = True
    return v


# ---------------------------------------------------------------------------
# affine variants


def _x_leading_coefficient(g: Polynomial, nx: int, order) -> Polynomial:
    """Coefficient (a polynomial in the y block) of the leading x-monomial."""
    lm = g.leading_monomial(order)
    alpha = lm[:nx]
    R = g.ring
    terms = {}
    for e, c in g.terms.items():
        if e[:nx] == alpha:
            terms[(0,) * nx + e[nx:]] = c
    return Polynomial(R, terms)


def _fibers_nonempty(gamma: Ideal, xs: list[str], ys: list[str], y_eqs: list[Polynomial], budget, depth=0, seed=0) -> Verdict:
    """Does every point of V(y_eqs) have a nonempty fiber in V(gamma)?

    Uses stability of Groebner bases under specialization for an elimination
    order (x block first): where no x-leading coefficient vanishes the
    specialized basis is a basis of the fiber ideal.  The locus where some
    leading coefficient vanishes is treated recursively.
    """
    if depth > 4 * len(ys) + 4:
        return inconclusive("stratification depth cap reached")
    R = Ring(xs + ys, gamma.ring.field)
    Ry = Ring(ys, gamma.ring.field)
    Yid = Ideal([p.to_ring(Ry) for p in y_eqs], Ry)
    if is_inconsistent(Yid, budget):
        return yes(stratum=[str(p) for p in y_eqs], note="empty stratum")
    order = block_order(len(xs))
    J = Ideal([g.to_ring(R) for g in gamma.generators] + [p.to_ring(R) for p in y_eqs], R)
    gb = reduced_groebner_basis(J, order, budget)
    if gb.is_unit:
        pt = find_point(Yid, seed=seed, budget=budget)
        return no(reason="no point of this stratum has a preimage", stratum=[str(p) for p in y_eqs], point=_pt(pt))
    nx = len(xs)
    lcs = []
    for g in gb.basis:
        if all(not any(e[:nx]) for e in g.terms):
            e_y = g.to_ring(Ry)
            if not radical_membership(e_y, Yid, budget):
                pt = find_point(Yid, avoid=[e_y], seed=seed, budget=budget)
                return no(reason="points of Y outside the image", generator=str(e_y), point=_pt(pt))
            continue
        lc = _x_leading_coefficient(g, nx, order).to_ring(Ry)
        if not lc.is_constant() and lc not in lcs:
            lcs.append(lc)
    for lc in lcs:
        if radical_membership(lc, Yid, budget):
            return inconclusive("a leading coefficient vanishes on the whole stratum", stratum=[str(p) for p in y_eqs])
        sub = _fibers_nonempty(gamma, xs, ys, list(y_eqs) + [lc], budget, depth + 1, seed)
        if not sub.yes:
            return sub
    return yes(stratum=[str(p) for p in y_eqs])


def _affine_regular(F: RationalMap, X: Variety, budget) -> Verdict:
    if F.mode != "affine" or X.mode != "affine":
        raise ValueError("affine variants need affine inputs")
    I = X.ideal + [F.denominator]
    if not is_inconsistent(I, budget):
        pt = find_point(I, budget=budget)
        return no(reason="the denominator vanishes at a point of X", point=_pt(pt))
    return yes()


@_budgeted
def check_regular_affine(F: RationalMap, X: Variety, budget: Budget | None = None) -> Verdict:
    """Is the affine map F = g/h regular on X, i.e. h has no zero on X?"""
    return _affine_regular(F, X, budget)


@_budgeted
def check_surjective_regular_affine(F: RationalMap, X: Variety, Y: Variety, budget: Budget | None = None) -> Verdict:
    """Is F a regular map of X onto Y (every point of Y is hit)?"""
    v = _affine_regular(F, X, budget)
    if not v.yes:
        return v
    v = check_rational_into(F, X, Y, budget)
    if not v.yes:
        return v
    G = restricted_graph(F, X, budget)
    return _fibers_nonempty(G, list(F.source.names), list(F.target_names), list(Y.generators), budget)


@_budgeted
def check_closed_embedding_affine(F: RationalMap, X: Variety, Y: Variety, budget: Budget | None = None) -> Verdict:
    """Is F an isomorphism of X onto a smooth closed subvariety of Y?"""
    v = _affine_regular(F, X, budget)
    if not v.yes:
        return v
    v = check_rational_into(F, X, Y, budget)
    if not v.yes:
        return v
    G = restricted_graph(F, X, budget)
    v = _relative_tangent_test(F, G, "source", budget)
    if not v.yes:
        return v
    Z = image_closure(G, F.target_names, "affine", budget)
    b = check_birational(F, X, Z, budget)
    if not b.yes:
        return no(reason="not birational onto the image", detail=b.evidence) if b.no else b
    s = _fibers_nonempty(G, list(F.source.names), list(F.target_names), list(Z.generators), budget)
    if not s.yes:
        return s
    if not smoothness_check(Z, budget):
        return no(reason="the image closure is singular", image=[str(g) for g in Z.generators])
    return yes(image=[str(g) for g in Z.generators], inverse=b.evidence.get("inverse"))
