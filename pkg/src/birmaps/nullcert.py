"""Effective Nullstellensatz certificates.

V(h_1, ..., h_k) is contained in V(h) iff there are polynomials with

    1 = tau * (1 - a*h) + tau_1*h_1 + ... + tau_k*h_k

in the ring extended by a fresh variable ``a``.  For a fixed bound D on
the cofactor degrees this is a linear system in the unknown coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .groebner import Budget, BudgetExceeded, Ideal, radical_membership
from .linalg import solve
from .polyring import Polynomial, Ring, fresh_name, monomials_up_to
from .verdict import Answer, Verdict, inconclusive

__all__ = [
    "CertificateQuery",
    "Certificate",
    "find_certificate",
    "verify_certificate",
    "certify_containment",
    "solve_identity",
]


@dataclass
class CertificateQuery:
    generators: Sequence[Polynomial]
    target: Polynomial
    d_max: int = 4
    a: str | None = None

    def __post_init__(self):
        R = self.target.ring
        for g in self.generators:
            if g.ring != R:
                raise ValueError("generators and target must share a ring")
        if self.a is None:
            self.a = fresh_name(R, "a")
        elif self.a in R:
            raise ValueError(f"{self.a} already occurs in the ring")
        if self.d_max < 0:
            raise ValueError("d_max must be non-negative")

    @property
    def ring(self) -> Ring:
        return self.target.ring

    @property
    def extended_ring(self) -> Ring:
        return self.ring.extend([self.a])


@dataclass
class Certificate:
    cofactors: list[Polynomial]
    tau: Polynomial
    degree: int

    def as_text(self) -> dict:
        return {"degree": self.degree, "tau": str(self.tau), "cofactors": [str(c) for c in self.cofactors]}


def solve_identity(
    blocks: Sequence[Polynomial],
    target: Polynomial,
    degree: int,
) -> list[Polynomial] | None:
    """Find c_i of degree <= ``degree`` with ``sum c_i * blocks[i] == target``.

    Exact linear algebra over the coefficient field; free unknowns are set
    to zero, so the answer is deterministic.
    """
    R = target.ring
    mons = monomials_up_to(R.ngens, degree)
    ncols = len(mons) * len(blocks)
    rows: dict[tuple, dict] = {}
    for b, poly in enumerate(blocks):
        base = b * len(mons)
        for j, m in enumerate(mons):
            col = base + j
            for e, c in poly.terms.items():
                ne = tuple(x + y for x, y in zip(e, m))
                rows.setdefault(ne, {})[col] = c
    for e in target.terms:
        rows.setdefault(e, {})
    keys = list(rows)
    rhs = [target.terms.get(e, 0) for e in keys]
    sol = solve([rows[e] for e in keys], rhs, ncols, R.field)
    if sol is None:
        return None
    out = []
    for b in range(len(blocks)):
        base = b * len(mons)
        terms = {}
        for j, m in enumerate(mons):
            v = sol.get(base + j)
            if v is not None and v != 0:
                terms[m] = v
        out.append(Polynomial(R, terms))
    return out


def _attempt(q: CertificateQuery, D: int) -> Certificate | None:
    S = q.extended_ring
    a = S.var(q.a)
    gens = [g.to_ring(S) for g in q.generators]
    chart = S.one - a * q.target.to_ring(S)
    sol = solve_identity(gens + [chart], S.one, D)
    if sol is None:
        return None
    return Certificate(sol[:-1], sol[-1], D)


def find_certificate(q: CertificateQuery) -> Certificate | None:
    """Certificate with the smallest cofactor degree bound D <= d_max, or ``None``.

    ``None`` means only that nothing exists up to the cap.
    """
    if _attempt(q, q.d_max) is None:
        return None
    for D in range(q.d_max + 1):
        c = _attempt(q, D)
        if c is not None:
            return c
    return None  # pragma: no cover - the d_max attempt succeeded


def verify_certificate(q: CertificateQuery, c: Certificate) -> bool:
    """Expand the identity exactly."""
    S = q.extended_ring
    if len(c.cofactors) != len(q.generators):
        return False
    a = S.var(q.a)
    total = c.tau.to_ring(S) * (S.one - a * q.target.to_ring(S))
    for t, g in zip(c.cofactors, q.generators):
        total = total + t.to_ring(S) * g.to_ring(S)
    return total == S.one


def certify_containment(
    ideal: Ideal | Sequence[Polynomial],
    h: Polynomial,
    d_max: int = 4,
    budget: Budget | None = None,
) -> Verdict:
    """Is V(I) contained in V(h)?

    A certificate gives "yes"; a Groebner computation refuting radical
    membership gives "no"; if no certificate exists up to ``d_max`` but the
    Groebner test confirms membership the answer is "yes" with that evidence.
    """
    gens = list(ideal.generators if isinstance(ideal, Ideal) else ideal)
    R = h.ring
    I = ideal if isinstance(ideal, Ideal) else Ideal(gens, R)
    q = CertificateQuery(gens, h, d_max)
    cert = find_certificate(q)
    if cert is not None:
        return Verdict(Answer.YES, {"certificate": cert.as_text(), "a": q.a})
    try:
        member = radical_membership(h, I, budget)
    except BudgetExceeded as e:
        return inconclusive(f"no certificate up to degree {d_max} and {e.reason}", e.spent)
    if member:
        return Verdict(Answer.YES, {"groebner": "1 lies in I + (1 - a*h)", "certificate_cap": d_max})
    return Verdict(Answer.NO, {"groebner": "I + (1 - a*h) is consistent"})
