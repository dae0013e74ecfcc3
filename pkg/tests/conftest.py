import sympy
from hypothesis import settings, strategies as st

from birmaps.polyring import Polynomial, Ring

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

VARS = ("x", "y", "z")


def to_sympy(p: Polynomial):
    syms = sympy.symbols(p.ring.names)
    return sympy.Poly(sympy.sympify(str(p).replace("^", "**"), locals=dict(zip(p.ring.names, syms))), *syms)


@st.composite
def polynomials(draw, ring: Ring, max_deg: int = 3, max_terms: int = 4, coeffs=st.integers(-5, 5)):
    n = ring.ngens
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        e = draw(st.lists(st.integers(0, max_deg), min_size=n, max_size=n))
        if sum(e) > max_deg:
            continue
        terms[tuple(e)] = draw(coeffs)
    return Polynomial(ring, terms)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
