import pytest

from birmaps.groebner import Ideal, radical_membership
from birmaps.nullcert import (
    CertificateQuery,
    certify_containment,
    find_certificate,
    solve_identity,
    verify_certificate,
)
from birmaps.polyring import Ring, parse

from oracles import certificate_exists, nullstellensatz_corpus, radical_member

R = Ring(["x", "y"])


def test_square_certificate_at_degree_two():
    q = CertificateQuery([parse("x^2", R)], parse("x", R), d_max=4)
    c = find_certificate(q)
    assert c is not None and c.degree == 2
    assert verify_certificate(q, c)


def test_no_certificate_and_refutation():
    q = CertificateQuery([parse("x^2", R)], parse("y", R), d_max=4)
    assert find_certificate(q) is None
    assert not radical_membership(parse("y", R), Ideal([parse("x^2", R)], R))
    assert certify_containment([parse("x^2", R)], parse("y", R)).no


def test_tampered_certificate_fails():
    q = CertificateQuery([parse("x^2", R)], parse("x", R))
    c = find_certificate(q)
    c.tau = c.tau + 1
    assert not verify_certificate(q, c)


def test_cap_below_needed_degree_falls_back_to_groebner():
    v = certify_containment([parse("x^3", R)], parse("x", R), d_max=1)
    assert v.yes
    assert "groebner" in v.evidence


def test_solve_identity():
    x, y = R.var("x"), R.var("y")
    sol = solve_identity([x, y], x * y + y**2, 1)
    assert sol[0] * x + sol[1] * y == x * y + y**2
    assert solve_identity([x], y, 2) is None


def test_name_clash_rejected():
    with pytest.raises(ValueError):
        CertificateQuery([parse("x", R)], parse("y", R), a="x")


@pytest.mark.parametrize("idx", range(0, 50, 5))
def test_corpus_sample_agrees_with_oracles(idx):
    gens, h = nullstellensatz_corpus()[idx]
    q = CertificateQuery(gens, h, d_max=3)
    c = find_certificate(q)
    expected = next((D for D in range(4) if certificate_exists(gens, h, D)), None)
    assert (c.degree if c else None) == expected
    assert radical_membership(h, Ideal(gens, h.ring)) == radical_member(gens, h)
