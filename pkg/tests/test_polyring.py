from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from birmaps.polyring import (
    GF,
    GREVLEX,
    LEX,
    QQ,
    Polynomial,
    PolynomialSyntaxError,
    Ring,
    UnknownVariableError,
    block_order,
    field_from_spec,
    fmt,
    monomials_up_to,
    parse,
)

from conftest import polynomials, to_sympy

R = Ring(["x", "y", "z"])


@given(polynomials(R), polynomials(R))
def test_arithmetic_matches_sympy(f, g):
    assert to_sympy(f + g) == to_sympy(f) + to_sympy(g)
    assert to_sympy(f - g) == to_sympy(f) - to_sympy(g)
    assert to_sympy(f * g) == to_sympy(f) * to_sympy(g)


@given(polynomials(R, max_deg=2), st.integers(0, 3))
def test_power_matches_sympy(f, k):
    assert to_sympy(f**k) == to_sympy(f) ** k


@given(polynomials(R))
def test_format_parse_roundtrip(f):
    assert parse(fmt(f), R) == f


@given(polynomials(R), polynomials(R))
def test_exact_division(f, g):
    if g.is_zero():
        return
    assert (f * g).exact_div(g) == f


@given(polynomials(R), st.sampled_from(["x", "y", "z"]))
def test_derivative_matches_sympy(f, v):
    assert to_sympy(f.diff(v)) == to_sympy(f).diff(sympy.Symbol(v))


def test_parse_rationals_and_parentheses():
    p = parse("(x + 1/2*y)^2 - 3", R)
    assert p.coefficient((1, 1, 0)) == 1
    assert p.coefficient((0, 2, 0)) == Fraction(1, 4)
    assert p.constant_term() == -3


@pytest.mark.parametrize(
    "text, pos",
    [("x^^2", 2), ("x + ", 4), ("(x + y", 6), ("x*y)", 3), ("x $ y", 2)],
)
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(PolynomialSyntaxError) as e:
        parse(text, R)
    assert e.value.pos == pos
    assert f"position {pos}" in str(e.value)


def test_unknown_variable():
    with pytest.raises(UnknownVariableError):
        parse("x + w", R)


def test_orders():
    p = parse("x*z^2 + y^3 + x^2", R)
    assert p.leading_monomial(LEX) == (2, 0, 0)
    assert p.leading_monomial(GREVLEX) == (0, 3, 0)
    # block order: x first, then grevlex in the rest
    q = parse("x + y^5", R)
    assert q.leading_monomial(block_order(1)) == (1, 0, 0)


def test_prime_field_arithmetic():
    F = GF(7)
    S = Ring(["x"], F)
    x = S.var("x")
    assert (x + 3) * (x + 4) == x**2 + 5
    assert parse("1/2*x", S) == x.scale(4)
    assert field_from_spec("fp:7") is F
    assert field_from_spec("q") is QQ
    with pytest.raises(ValueError):
        GF(9)


def test_homogenize_roundtrip():
    S = Ring(["x", "y", "w"])
    p = parse("x^2 + y + 1", S)
    h = p.homogenize("w")
    assert h.is_homogeneous()
    assert h.dehomogenize("w") == p


def test_monomial_content_and_count():
    p = parse("x^2*y + x^3*y^2", R)
    assert p.monomial_content() == (2, 1, 0)
    assert len(monomials_up_to(3, 2)) == 10


def test_ring_mismatch_rejected():
    S = Ring(["x", "y"])
    with pytest.raises((ValueError, TypeError)):
        R.var("x") + S.var("x")
