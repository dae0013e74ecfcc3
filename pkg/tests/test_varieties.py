import pytest

from birmaps.groebner import Ideal
from birmaps.polyring import Ring, parse
from birmaps.varieties import (
    IndeterminateError,
    MapUndefinedError,
    RationalMap,
    Variety,
    bezout_degree_bound,
    find_point,
    graph_degree_bound,
    image_closure,
    jacobian,
    measured_degree,
    minors,
    restricted_graph,
    smoothness_check,
)

P3 = Ring(["x0", "x1", "x2"])


def conic():
    return Variety([parse("x0*x2 - x1^2", P3)], "projective", ring=P3)


def test_projective_dimension_and_degree_bound():
    X = conic()
    assert X.dimension() == 1
    assert X.ambient_dim == 2
    assert X.degree_bound().value == 2
    assert Variety([], "projective", ring=P3).dimension() == 2


def test_projective_variety_rejects_inhomogeneous():
    with pytest.raises(ValueError):
        Variety([parse("x0 + 1", P3)], "projective", ring=P3)


def test_restricted_graph_and_image_of_conic_projection():
    X = conic()
    F = RationalMap([P3.var("x0"), P3.var("x1")], target_names=["u", "v"])
    G = restricted_graph(F, X)
    # the saturation adds the second quadric relation
    assert len(G.generators) == 3
    img = image_closure(G, ["u", "v"])
    assert img.generators == ()


def test_undefined_map_rejected():
    X = Variety([parse("x0", P3)], ring=P3)
    F = RationalMap([P3.var("x0"), P3.var("x0")], target_names=["u", "v"])
    with pytest.raises(MapUndefinedError):
        restricted_graph(F, X)


def test_affine_map_evaluation():
    A = Ring(["t"])
    F = RationalMap([parse("1", A), parse("t", A)], "affine", denominator=parse("t - 1", A))
    assert F.evaluate({"t": 3}) == [parse("1/2", A).constant_term(), parse("3/2", A).constant_term()]
    with pytest.raises(IndeterminateError):
        F.evaluate({"t": 1})


def test_bezout_bounds():
    assert bezout_degree_bound([2, 3, 4]).value == 24
    assert bezout_degree_bound([2, 3, 4], N=2).value == 12
    X = conic()
    F = RationalMap([P3.var("x0"), P3.var("x1")])
    assert graph_degree_bound(F, X).value == 4


def test_measured_degree_of_twisted_cubic():
    S = Ring(["a", "b", "c", "d"])
    gens = [parse(g, S) for g in ["a*c - b^2", "b*d - c^2", "a*d - b*c"]]
    assert measured_degree(Ideal(gens, S), S.names, charts=[(S.names, "a")]) == 3


def test_jacobian_minors():
    S = Ring(["x", "y"])
    J = jacobian([parse("x^2 + y^2 - 1", S), parse("x - y", S)], ["x", "y"])
    (m,) = minors(J, 2)
    assert m == parse("-2*x - 2*y", S)


def test_smoothness():
    assert smoothness_check(conic())
    cone = Variety([parse("x0*x2 - x1^2", Ring(["x0", "x1", "x2"]))], "affine")
    assert not smoothness_check(cone)
    node = Variety([parse("x1^2*x2 - x0^2*(x0 + x2)", P3)], ring=P3)
    assert not smoothness_check(node)


def test_find_point_lies_on_variety():
    S = Ring(["x", "y"])
    I = Ideal([parse("y - x^2", S)], S)
    pt = find_point(I, seed=3)
    assert pt is not None
    assert pt["y"] == pt["x"] ** 2
