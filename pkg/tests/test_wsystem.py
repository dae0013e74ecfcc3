import json

import pytest

from birmaps.polyring import Ring, parse
from birmaps.varieties import RationalMap, Variety
from birmaps.wsystem import (
    WCaps,
    WitnessAssignment,
    audit_structure,
    build_birational_plus_system,
    build_dominance_system,
    build_system,
    construct_dominance_witness,
    construct_witness,
    instantiate,
    system_from_json,
    toy_solve,
    verify_witness,
)


def proj(names, eqs):
    R = Ring(names)
    return Variety([parse(e, R) for e in eqs], "projective", ring=R)


def line_case():
    X = proj(["x", "y", "z"], ["z"])
    Y = proj(["u", "v", "w"], ["w"])
    F = RationalMap([X.ring.var(n) for n in "xyz"], target_names=["u", "v", "w"])
    return F, X, Y


@pytest.fixture(scope="module")
def line_witness():
    F, X, Y = line_case()
    S = build_system(X, Y, None, 1)
    w = construct_witness(F, X, Y, 1, system=S)
    return S, w


def test_identity_on_line_round_trip(line_witness):
    S, w = line_witness
    assert verify_witness(S, w).ok
    assert audit_structure(S) == []


def test_stage_counts(line_witness):
    S, _ = line_witness
    c = S.counts_by_tag()
    assert c["step5:j=1"] == 2
    assert c["step6"] == 3
    assert c["step7:j=1"] == c["step7:j=2"] == 2
    assert sum(1 for t in c if t.startswith("step5")) == S.n - 1
    assert sum(1 for t in c if t.startswith("step7")) == S.n


def test_zero_assignment_fails(line_witness):
    S, _ = line_witness
    zero = WitnessAssignment({p: 0 for p in S.param_vars})
    check = verify_witness(S, zero)
    assert not check.ok and check.violated


def test_perturbed_monoid_coefficient_reported(line_witness):
    S, w = line_witness
    name = next(p for p in S.param_vars if p.startswith("c_M_") and w.values[p] != 0)
    check = verify_witness(S, w.perturbed(name))
    assert not check.ok
    assert check.violated[0]["tag"].startswith(("step5", "step6", "step7"))


def test_toy_solve(line_witness):
    S, w = line_witness
    assert toy_solve(instantiate(S, w)).status == "sat"
    assert toy_solve(S.with_equation(1)).status == "unsat"


def test_unsolved_system_is_inconclusive():
    _, X, Y = line_case()
    S = build_system(X, Y, None, 2)
    r = toy_solve(S)
    assert r.status == "inconclusive" and r.exit_code == 2


def test_json_round_trip_and_determinism(line_witness):
    S, w = line_witness
    _, X, Y = line_case()
    assert build_system(X, Y, None, 1).dumps() == S.dumps()
    T = system_from_json(json.loads(S.dumps()))
    assert [e["poly"] for e in T.to_json()["equations"]] == [e["poly"] for e in S.to_json()["equations"]]
    w2 = WitnessAssignment.from_json(json.loads(json.dumps(w.to_json())))
    assert verify_witness(S, w2).ok


def test_wplus_contains_w_verbatim():
    _, X, Y = line_case()
    S = build_system(X, Y, None, 1).to_json()["equations"]
    P = build_birational_plus_system(X, Y, None, 1)
    Pj = P.to_json()["equations"]
    assert len(Pj) > len(S)
    assert all(e in Pj for e in S)
    extra = [e for e in Pj if e not in S]
    with_w = [e for e in Pj if "w" in e["poly"].replace("*", " ").split()]
    assert with_w and all(e in extra for e in with_w)
    assert audit_structure(P) == []


def test_dominance_systems_nested():
    X = proj(["x", "y", "z"], ["z"])
    Y = proj(["u", "v", "w"], ["u*w - v^2"])
    E, Ep = build_dominance_system(X, Y, None, 1)
    Ej, Epj = E.to_json()["equations"], Ep.to_json()["equations"]
    assert all(e in Epj for e in Ej) and len(Epj) > len(Ej)


def test_dominance_witness_solves_E():
    X = proj(["x", "y", "z"], ["z"])
    Y = proj(["u", "v", "w"], ["u*w - v^2"])
    F = RationalMap([parse("x + y", X.ring)] * 3, target_names=["u", "v", "w"])
    caps = WCaps(tau_degree=3)
    E, Ep = build_dominance_system(X, Y, None, 1, caps)
    w = construct_dominance_witness(F, X, Y, 1, caps, system=E)
    assert verify_witness(E, w).ok


def test_degree_above_bound_rejected():
    X = proj(["x", "y", "z"], ["x*z - y^2"])
    Y = proj(["u", "v", "w"], ["u*w - v^2"])
    F = RationalMap([parse(c, X.ring) for c in ["x^2", "x*y", "y^2"]], target_names=["u", "v", "w"])
    with pytest.raises(ValueError):
        construct_witness(F, X, Y, 1)


def test_preconditions():
    X = proj(["x", "y", "z"], ["z"])
    with pytest.raises(ValueError):
        build_system(X, proj(["u", "v", "w"], []), None, 1)
    with pytest.raises(ValueError):
        build_system(proj(["x", "y"], ["x"]), proj(["u", "v"], ["u"]), None, 1)
    with pytest.raises(ValueError):
        build_system(X, X, None, 0)


@pytest.mark.parametrize("plus", [False, True])
def test_conic_automorphism_round_trip(plus):
    X = proj(["x", "y", "z"], ["x*z - y^2"])
    Y = proj(["u", "v", "w"], ["u*w - v^2"])
    F = RationalMap([parse(c, X.ring) for c in ["x", "x + y", "x + 2*y + z"]], target_names=["u", "v", "w"])
    builder = build_birational_plus_system if plus else build_system
    S = builder(X, Y, None, 1)
    w = construct_witness(F, X, Y, 1, plus=plus, system=S)
    assert verify_witness(S, w).ok
    assert audit_structure(S) == []
