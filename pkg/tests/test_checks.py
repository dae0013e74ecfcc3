from fractions import Fraction

import pytest

from birmaps.checks import (
    RelativeJacobian,
    check_birational,
    check_closed_embedding_affine,
    check_dominant,
    check_isomorphism_onto,
    check_rational_into,
    check_regular,
    check_regular_affine,
    check_regular_embedding,
    check_surjective_regular_affine,
    compose,
    graph_charts,
)
from birmaps.groebner import Budget, Ideal, normal_form
from birmaps.polyring import GF, Ring, parse
from birmaps.varieties import RationalMap, Variety, restricted_graph


def proj(names, eqs, field=None):
    R = Ring(names) if field is None else Ring(names, field)
    return Variety([parse(e, R) for e in eqs], "projective", ring=R)


def aff(names, eqs):
    R = Ring(names)
    return Variety([parse(e, R) for e in eqs], "affine", ring=R)


def pmap(X, comps, targets):
    return RationalMap([parse(c, X.ring) for c in comps], X.mode, target_names=targets)


CONIC = (["x0", "x1", "x2"], ["x0*x2 - x1^2"])
LINE = (["u", "v"], [])


def test_conic_projection_is_regular():
    X = proj(*CONIC)
    v = check_regular(pmap(X, ["x0", "x1"], ["u", "v"]), X)
    assert v.yes


def test_chart_jacobian_column():
    X = proj(["x", "y", "z"], ["x*z - y^2"])
    F = pmap(X, ["x", "y"], ["u", "v"])
    G = restricted_graph(F, X)
    (ch,) = [c for c in graph_charts(F, G) if (c.source_chart, c.target_chart) == ("z", "v")]
    J = RelativeJacobian(ch.generators, ch.target_vars)
    y = ch.ring.var("y")
    assert J.column("u") == [ch.ring.zero, -y, -ch.ring.one]


def test_quadric_projection_not_regular():
    X = proj(["x", "y", "z", "w"], ["x*w - y*z"])
    v = check_regular(pmap(X, ["x", "y", "z"], ["a", "b", "c"]), X)
    assert v.no
    pt = v.evidence["point"]
    assert all(Fraction(pt[k]) == 0 for k in "xyz") and Fraction(pt["w"]) != 0


def test_regular_needs_smooth_source():
    X = proj(["x", "y", "z"], ["y^2*z - x^3"])
    with pytest.raises(ValueError):
        check_regular(pmap(X, ["x", "y"], ["u", "v"]), X)


def test_birational_both_directions_and_inverse_composes_to_identity():
    X, Y = proj(*CONIC), proj(*LINE)
    F = pmap(X, ["x0", "x1"], ["u", "v"])
    v = check_birational(F, X, Y)
    assert v.yes
    assert v.evidence["inverse"] == ["u^2", "u*v", "v^2"]
    comps, _ = compose(v.evidence["inverse_map"], F)
    xs = X.ring.gens()
    for i in range(3):
        for j in range(i + 1, 3):
            assert normal_form(xs[i] * comps[j] - xs[j] * comps[i], X.ideal).is_zero()
    back = pmap(Y, ["u^2", "u*v", "v^2"], ["x0", "x1", "x2"])
    assert check_birational(back, Y, X).yes


def test_degree_two_cover_is_not_birational():
    X, Y = proj(*LINE), proj(["s", "t"], [])
    assert check_birational(pmap(X, ["u^2", "v^2"], ["s", "t"]), X, Y).no


def test_dominance():
    X = proj(["x", "y", "z"], ["z"])
    F = pmap(X, ["x^2", "x*y", "y^2"], ["u", "v", "w"])
    assert check_dominant(F, X, proj(["u", "v", "w"], ["u*w - v^2"])).yes
    v = check_dominant(F, X, proj(["u", "v", "w"], []))
    assert v.no
    assert v.evidence["separating_generator"] == "v^2 - u*w"


def test_image_outside_target():
    X = proj(*LINE)
    F = pmap(X, ["u", "v", "u"], ["a", "b", "c"])
    assert check_rational_into(F, X, proj(["a", "b", "c"], ["a*c - b^2"])).no


def test_embedding_and_isomorphism():
    X, Y = proj(*LINE), proj(*CONIC)
    F = pmap(X, ["u^2", "u*v", "v^2"], ["x0", "x1", "x2"])
    assert check_regular_embedding(F, X, Y).yes
    assert check_isomorphism_onto(F, X, Y).yes
    P2 = proj(["x0", "x1", "x2"], [])
    assert check_regular_embedding(F, X, P2).yes
    assert check_isomorphism_onto(F, X, P2).no


def test_prime_field_check():
    X = proj(["x0", "x1", "x2"], ["x0*x2 - x1^2"], GF(101))
    F = RationalMap([X.ring.var("x0"), X.ring.var("x1")], target_names=["u", "v"])
    assert check_birational(F, X, proj(["u", "v"], [], GF(101))).yes


def test_budget_exhaustion_is_inconclusive():
    X = proj(["x", "y", "z", "w"], ["x*w - y*z"])
    v = check_regular(pmap(X, ["x", "y", "z"], ["a", "b", "c"]), X, Budget(max_spairs=2))
    assert v.inconclusive
    assert "reason" in v.evidence


def test_affine_embeddings():
    T = aff(["t"], [])
    par = aff(["x", "y"], ["y - x^2"])
    cusp = aff(["x", "y"], ["y^2 - x^3"])
    F = RationalMap([parse("t", T.ring), parse("t^2", T.ring)], "affine", target_names=["x", "y"])
    Gc = RationalMap([parse("t^2", T.ring), parse("t^3", T.ring)], "affine", target_names=["x", "y"])
    assert check_closed_embedding_affine(F, T, par).yes
    v = check_closed_embedding_affine(Gc, T, cusp)
    assert v.no
    assert Fraction(v.evidence["point"]["t"]) == 0


def test_affine_regular_and_surjective():
    T = aff(["t"], [])
    A = aff(["s"], [])
    sq = RationalMap([parse("t^2", T.ring)], "affine", target_names=["s"])
    assert check_surjective_regular_affine(sq, T, A).yes
    hyp = aff(["x", "y"], ["x*y - 1"])
    proj_x = RationalMap([parse("x", hyp.ring)], "affine", target_names=["s"])
    v = check_surjective_regular_affine(proj_x, hyp, A)
    assert v.no and Fraction(v.evidence["point"]["s"]) == 0
    inv = RationalMap([parse("1", T.ring)], "affine", denominator=parse("t", T.ring), target_names=["s"])
    assert check_regular_affine(inv, T).no
