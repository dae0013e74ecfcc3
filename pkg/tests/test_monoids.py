import random
from math import comb

import pytest
from hypothesis import given, strategies as st

from birmaps.groebner import Ideal, radical_membership
from birmaps.monoids import (
    ChartEmptyError,
    Monoid,
    MonoidFitFailed,
    TwoVertexMonoid,
    fit_monoid,
    inverse_section,
    project_from_vertex,
    q_sequence,
    strict_transform_chart,
    validate_monoid,
)
from birmaps.polyring import Ring, parse
from birmaps.varieties import IndeterminateError, Variety

R = Ring(["x0", "x1", "x2"])
CONIC = parse("x0*x2 - x1^2", R)


def test_conic_is_a_monoid_at_its_point():
    M = Monoid.from_equation(CONIC, [0, 0, 1])
    diag = validate_monoid(M)
    assert diag.valid, diag.reasons
    assert diag.multiplicity == 1
    assert M.f_top == R.var("x0")


def test_factorable_equation_rejected():
    M = Monoid.from_equation(parse("x0*x2 - x0*x1", R), "x2")
    diag = validate_monoid(M)
    assert not diag.valid
    assert any("common factor" in r for r in diag.reasons)


def test_wrong_multiplicity_rejected():
    M = Monoid(parse("x0*x2^2 - x1^3", R), "x2")
    assert not validate_monoid(M).valid


def test_vertex_given_as_point_is_normalized():
    F = parse("x0*x1 - x2^2 + x1*x2", R)  # contains [1:0:0]
    M = Monoid.from_equation(F, [1, 0, 0])
    assert validate_monoid(M).valid
    assert M.vertex == [1, 0, 0]


def test_inverse_section_composed_with_projection_is_identity():
    M = Monoid(CONIC, "x2")
    G = inverse_section(M, ["u0", "u1"])
    S = G.source
    comps = dict(zip(G.target_names, G.components))
    ft = M.f_top.to_ring(Ring(["x0", "x1"])).subs({"x0": S.var("u0"), "x1": S.var("u1")}, S)
    # dropping the vertex slot gives f_top * u
    assert comps["x0"] == ft * S.var("u0")
    assert comps["x1"] == ft * S.var("u1")
    # and the image lies on the monoid
    assert CONIC.subs(comps, S).is_zero()


def test_roundtrip_on_sampled_points():
    M = Monoid(CONIC, "x2")
    G = inverse_section(M, ["u0", "u1"])
    rng = random.Random(7)
    seen = 0
    while seen < 30:
        s, t = rng.randint(-20, 20), rng.randint(-20, 20)
        p = [s * s, s * t, t * t]
        if M.f_top.evaluate(p) == 0:
            continue
        seen += 1
        u = project_from_vertex(M, p)
        back = G.evaluate(u)
        lam = M.f_top.evaluate(p)
        assert back == [lam * c for c in p]


def test_projection_undefined_at_vertex():
    with pytest.raises(IndeterminateError):
        project_from_vertex(Monoid(CONIC, "x2"), [0, 0, 1])


def test_fit_one_vertex_monoid_through_a_point():
    S = Ring(["a", "b", "c", "d"])
    twisted = Ideal([parse(g, S) for g in ["a*c - b^2", "b*d - c^2", "a*d - b*c"]], S)
    M = fit_monoid(twisted, ["d"], cap=3)
    assert validate_monoid(M).valid
    for g in [M.equation]:
        assert radical_membership(g, twisted)


def test_fit_two_vertex_monoid():
    S = Ring(["a", "b", "c", "d"])
    point = Ideal([S.var("a") - S.var("b"), S.var("c") - S.var("b"), S.var("d") - S.var("b")], S)
    M = fit_monoid(point, ["a", "d"], cap=3)
    assert isinstance(M, TwoVertexMonoid)
    assert validate_monoid(M).valid
    assert radical_membership(M.equation, point)


def test_fit_cap_exhausted():
    S = Ring(["a", "b", "c"])
    # three non-collinear points: no plane through them
    pts = Ideal([parse(g, S) for g in ["c^2 - a*b", "a*c - a*b", "b*c - a*b"]], S)
    with pytest.raises(MonoidFitFailed):
        fit_monoid(pts, ["c"], cap=1)


def test_strict_transform_chart_empty():
    M = Monoid(CONIC, "x2")
    X = Variety([parse("x0", Ring(["x0", "x1"]))], "projective")
    with pytest.raises(ChartEmptyError):
        strict_transform_chart(X, M)


def test_q_sequence_examples():
    assert q_sequence(1, 3) == 4
    assert q_sequence(2, 2) == 6


@given(st.integers(0, 6), st.integers(0, 8))
def test_q_sequence_is_binomial(m, d):
    assert q_sequence(m, d) == comb(d + m, m)
