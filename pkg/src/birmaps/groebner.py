"""Buchberger's algorithm and the ideal-theoretic decisions built on it.

The engine works on plain dicts ``{exponent tuple: int}``.  Over QQ the
arithmetic is fraction-free (integer coefficients, contents removed); over
GF(p) coefficients are ints reduced mod p.  Results are converted back to
monic :class:`~birmaps.polyring.Polynomial` values at the boundary.

Every computation is bounded by a :class:`Budget`; running out raises
:class:`BudgetExceeded`, which callers report as "inconclusive".
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Iterable, Sequence

from .polyring import (
    GREVLEX,
    LEX,
    QQ,
    MonomialOrder,
    Polynomial,
    Ring,
    block_order,
    fresh_name,
)

__all__ = [
    "Budget",
    "BudgetExceeded",
    "GBReport",
    "Ideal",
    "reduced_groebner_basis",
    "normal_form",
    "ideal_membership",
    "is_inconsistent",
    "radical_membership",
    "elimination_ideal",
    "dimension",
    "saturation_chart",
    "s_polynomial",
]


@dataclass(frozen=True)
class Budget:
    """Resource caps for one Groebner basis computation."""

    max_spairs: int = 20000
    max_degree: int = 60
    max_terms: int = 20000

    def scaled(self, factor: float) -> "Budget":
        return Budget(int(self.max_spairs * factor), self.max_degree, self.max_terms)


DEFAULT_BUDGET = Budget()


class BudgetExceeded(RuntimeError):
    """A computation hit its resource cap; the answer is unknown."""

    def __init__(self, reason: str, spent: dict | None = None):
        super().__init__(reason)
        self.reason = reason
        self.spent = spent or {}


@dataclass
class GBReport:
    basis: list[Polynomial]
    order: MonomialOrder
    s_pairs_processed: int = 0
    max_intermediate_degree: int = 0

    @property
    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant() and not self.basis[0].is_zero()

    def leading_monomials(self) -> list[tuple]:
        return [g.leading_monomial(self.order) for g in self.basis]


# ---------------------------------------------------------------------------
# low-level engine on dicts


class _Engine:
    """Coefficient domain + order for dict polynomials."""

    def __init__(self, ring: Ring, order: MonomialOrder, budget: Budget):
        self.ring = ring
        self.order = order
        self.key = order.key
        self.p = ring.field.characteristic
        self.budget = budget
        self.spairs = 0
        self.maxdeg = 0

    # conversion ------------------------------------------------------------
    def from_poly(self, f: Polynomial) -> dict:
        if self.p:
            p = self.p
            return {e: c.v for e, c in f.terms.items() if c.v % p}
        den = 1
        for c in f.terms.values():
            if isinstance(c, Fraction):
                den = lcm(den, c.denominator)
        out = {e: int(c * den) for e, c in f.terms.items()}
        return self.primitive(out)

    def to_poly(self, d: dict) -> Polynomial:
        """Monic polynomial (leading coefficient 1 w.r.t. the engine order)."""
        if not d:
            return self.ring.zero
        lm = self.lm(d)
        lc = d[lm]
        if self.p:
            inv = pow(lc, -1, self.p)
            conv = self.ring.field.convert
            return Polynomial(self.ring, {e: conv(c * inv) for e, c in d.items()}, _trusted=True)
        terms = {}
        for e, c in d.items():
            q = Fraction(c, lc)
            terms[e] = q.numerator if q.denominator == 1 else q
        return Polynomial(self.ring, terms, _trusted=True)

    def primitive(self, d: dict) -> dict:
        if self.p or not d:
            return d
        g = 0
        for c in d.values():
            g = gcd(g, c)
            if g == 1:
                break
        lc = d[self.lm(d)]
        if lc < 0:
            g = -g
        if g == 1:
            return d
        return {e: c // g for e, c in d.items()}

    # monomials -------------------------------------------------------------
    def lm(self, d: dict) -> tuple:
        return max(d, key=self.key)

    def check(self, d: dict):
        if len(d) > self.budget.max_terms:
            raise BudgetExceeded(f"intermediate polynomial with {len(d)} terms", self.spent())
        deg = max(sum(e) for e in d)
        if deg > self.maxdeg:
            self.maxdeg = deg
            if deg > self.budget.max_degree:
                raise BudgetExceeded(f"intermediate degree {deg} exceeds cap", self.spent())

    def spent(self) -> dict:
        return {"s_pairs": self.spairs, "max_degree": self.maxdeg}

    # reduction -------------------------------------------------------------
    def reduce(self, f: dict, basis: Sequence[tuple[tuple, dict]], full: bool = True) -> dict:
        """Remainder of ``f`` on division by ``basis`` (pairs of (lm, poly)).

        Over QQ the remainder is only defined up to a nonzero scalar.
        """
        if not f or not basis:
            return dict(f)
        key = self.key
        p = self.p
        f = dict(f)
        rem: dict = {}
        heap = [(tuple([-k for k in key(e)]), e) for e in f]
        heapq.heapify(heap)
        queued = set(f)
        while heap:
            _, e = heapq.heappop(heap)
            queued.discard(e)
            c = f.get(e)
            if c is None:
                continue
            for lmg, g in basis:
                if all(a >= b for a, b in zip(e, lmg)):
                    break
            else:
                del f[e]
                rem[e] = c
                if not full:
                    # top-irreducible: leave the tail untouched
                    rem.update(f)
                    return rem
                continue
            shift = tuple([a - b for a, b in zip(e, lmg)])
            lg = g[lmg]
            if p:
                q = c * pow(lg, -1, p) % p
                for ge, gc in g.items():
                    ne = tuple([a + b for a, b in zip(ge, shift)])
                    v = (f.get(ne, 0) - q * gc) % p
                    if v:
                        f[ne] = v
                        if ne not in queued:
                            queued.add(ne)
                            heapq.heappush(heap, (tuple([-k for k in key(ne)]), ne))
                    else:
                        f.pop(ne, None)
            else:
                gg = gcd(c, lg)
                mf = lg // gg
                q = c // gg
                if mf != 1:
                    if mf == -1:
                        for k in f:
                            f[k] = -f[k]
                        for k in rem:
                            rem[k] = -rem[k]
                    else:
                        for k in f:
                            f[k] *= mf
                        for k in rem:
                            rem[k] *= mf
                for ge, gc in g.items():
                    ne = tuple([a + b for a, b in zip(ge, shift)])
                    v = f.get(ne, 0) - q * gc
                    if v:
                        f[ne] = v
                        if ne not in queued:
                            queued.add(ne)
                            heapq.heappush(heap, (tuple([-k for k in key(ne)]), ne))
                    else:
                        f.pop(ne, None)
                if len(f) + len(rem) > self.budget.max_terms:
                    raise BudgetExceeded("polynomial grew past the term cap", self.spent())
        return self.primitive(rem) if not p else rem

    def spoly(self, f: dict, lf: tuple, g: dict, lg: tuple) -> dict:
        m = tuple(max(a, b) for a, b in zip(lf, lg))
        sf = tuple(a - b for a, b in zip(m, lf))
        sg = tuple(a - b for a, b in zip(m, lg))
        cf, cg = f[lf], g[lg]
        p = self.p
        out: dict = {}
        if p:
            a, b = cg % p, cf % p
        else:
            gg = gcd(cf, cg)
            a, b = cg // gg, cf // gg
        for e, c in f.items():
            ne = tuple(x + y for x, y in zip(e, sf))
            out[ne] = out.get(ne, 0) + a * c
        for e, c in g.items():
            ne = tuple(x + y for x, y in zip(e, sg))
            out[ne] = out.get(ne, 0) - b * c
        if p:
            return {e: c % p for e, c in out.items() if c % p}
        return {e: c for e, c in out.items() if c}


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a: tuple, b: tuple) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _buchberger(eng: _Engine, gens: list[dict]) -> list[dict]:
    """Reduced Groebner basis (as primitive/normalized dicts) of ``gens``."""
    polys: list[dict] = []
    lms: list[tuple] = []
    active: list[int] = []
    pairs: list = []  # heap of (deg(lcm), key(lcm), i, j, lcm)
    key = eng.key

    def push_pair(i, j, m):
        heapq.heappush(pairs, (sum(m), key(m), i, j, m))

    def update(h: dict):
        lh = eng.lm(h)
        idx = len(polys)
        polys.append(h)
        lms.append(lh)
        # Gebauer-Moeller: new pairs (h, g)
        cand = [(i, _lcm(lh, lms[i])) for i in active]
        keep = []
        for n, (i, m) in enumerate(cand):
            if _coprime(lh, lms[i]):
                keep.append((i, m, True))
                continue
            redundant = False
            for n2, (i2, m2) in enumerate(cand):
                if n2 == n:
                    continue
                if _divides(m2, m) and (m2 != m or n2 < n):
                    redundant = True
                    break
            if not redundant:
                keep.append((i, m, False))
        # old pairs killed by the chain criterion
        if pairs:
            survivors = []
            for item in pairs:
                _, _, i, j, m = item
                if (
                    _divides(lh, m)
                    and _lcm(lms[i], lh) != m
                    and _lcm(lms[j], lh) != m
                ):
                    continue
                survivors.append(item)
            if len(survivors) != len(pairs):
                pairs[:] = survivors
                heapq.heapify(pairs)
        for i, m, cop in keep:
            if not cop:
                push_pair(i, idx, m)
        active[:] = [i for i in active if not _divides(lh, lms[i])] + [idx]

    # seed: reduce generators against each other as they are added
    seeds = sorted((g for g in gens if g), key=lambda d: key(eng.lm(d)))
    for g in seeds:
        eng.check(g)
        h = eng.reduce(g, [(lms[i], polys[i]) for i in active])
        if h:
            if all(sum(e) == 0 for e in h):
                return [{tuple([0] * eng.ring.ngens): 1}]
            update(h)

    while pairs:
        _, _, i, j, _ = heapq.heappop(pairs)
        eng.spairs += 1
        if eng.spairs > eng.budget.max_spairs:
            raise BudgetExceeded("S-pair cap reached", eng.spent())
        s = eng.spoly(polys[i], lms[i], polys[j], lms[j])
        if not s:
            continue
        eng.check(s)
        h = eng.reduce(s, [(lms[k], polys[k]) for k in active])
        if not h:
            continue
        eng.check(h)
        if all(sum(e) == 0 for e in h):
            return [{tuple([0] * eng.ring.ngens): 1}]
        update(h)

    # interreduce the minimal basis
    minimal = [k for k in active]
    minimal.sort(key=lambda k: key(lms[k]))
    out = []
    for k in minimal:
        others = [(lms[o], polys[o]) for o in minimal if o != k]
        # the lead is irreducible in a minimal basis, so only the tail changes
        r = eng.reduce(polys[k], others)
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# public API


class Ideal:
    """An ideal given by generators; Groebner bases are cached per order."""

    def __init__(self, generators: Iterable[Polynomial], ring: Ring | None = None):
        gens = [g for g in generators]
        if ring is None:
            if not gens:
                raise ValueError("an empty generator list needs an explicit ring")
            ring = gens[0].ring
        for g in gens:
            if g.ring != ring:
                raise ValueError(f"generator {g} is not in {ring}")
        self.ring = ring
        self.generators = tuple(g for g in gens if not g.is_zero())
        self._gb: dict = {}

    def __repr__(self):
        return f"Ideal([{', '.join(map(str, self.generators))}])"

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def is_zero_ideal(self) -> bool:
        return not self.generators

    def __add__(self, other) -> "Ideal":
        if isinstance(other, Ideal):
            other = other.generators
        return Ideal(list(self.generators) + list(other), self.ring)

    def to_ring(self, ring: Ring) -> "Ideal":
        return Ideal([g.to_ring(ring) for g in self.generators], ring)

    def groebner(self, order: MonomialOrder = GREVLEX, budget: Budget | None = None) -> GBReport:
        return reduced_groebner_basis(self, order, budget)


def reduced_groebner_basis(
    ideal: Ideal | Sequence[Polynomial],
    order: MonomialOrder = GREVLEX,
    budget: Budget | None = None,
) -> GBReport:
    """Reduced (monic, sorted by descending leading monomial) Groebner basis."""
    if not isinstance(ideal, Ideal):
        ideal = Ideal(ideal)
    budget = budget or DEFAULT_BUDGET
    cached = ideal._gb.get(order)
    if cached is not None:
        return cached
    eng = _Engine(ideal.ring, order, budget)
    gens = [eng.from_poly(g) for g in ideal.generators]
    basis = _buchberger(eng, gens) if gens else []
    polys = [eng.to_poly(b) for b in basis]
    polys.sort(key=lambda f: order.key(f.leading_monomial(order)), reverse=True)
    report = GBReport(polys, order, eng.spairs, eng.maxdeg)
    ideal._gb[order] = report
    return report


def _basis_of(ideal_or_report, order, budget) -> GBReport:
    if isinstance(ideal_or_report, GBReport):
        return ideal_or_report
    return reduced_groebner_basis(ideal_or_report, order, budget)


def normal_form(
    p: Polynomial,
    ideal: Ideal | GBReport,
    order: MonomialOrder = GREVLEX,
    budget: Budget | None = None,
) -> Polynomial:
    """Fully reduced remainder of ``p`` modulo the ideal (exact scalar, not up to units)."""
    rep = _basis_of(ideal, order, budget)
    order = rep.order
    ring = p.ring
    if not p.terms or not rep.basis:
        return p
    field = ring.field
    basis = [(g.leading_monomial(order), g) for g in rep.basis]
    key = order.key
    f = dict(p.terms)
    rem = {}
    heap = [(tuple([-k for k in key(e)]), e) for e in f]
    heapq.heapify(heap)
    queued = set(f)
    while heap:
        _, e = heapq.heappop(heap)
        queued.discard(e)
        c = f.get(e)
        if c is None:
            continue
        for lmg, g in basis:
            if all(a >= b for a, b in zip(e, lmg)):
                break
        else:
            rem[e] = f.pop(e)
            continue
        shift = tuple(a - b for a, b in zip(e, lmg))
        # basis elements are monic
        for ge, gc in g.terms.items():
            ne = tuple(a + b for a, b in zip(ge, shift))
            v = f.get(ne, 0) - c * gc
            if v != 0:
                f[ne] = v
                if ne not in queued:
                    queued.add(ne)
                    heapq.heappush(heap, (tuple([-k for k in key(ne)]), ne))
            else:
                f.pop(ne, None)
    return Polynomial(ring, {e: field.convert(c) for e, c in rem.items()}, _trusted=True)


def ideal_membership(p: Polynomial, ideal: Ideal, order: MonomialOrder = GREVLEX, budget: Budget | None = None) -> bool:
    return normal_form(p, ideal, order, budget).is_zero()


def is_inconsistent(ideal: Ideal, budget: Budget | None = None) -> bool:
    """True iff 1 lies in the ideal (empty zero set over the algebraic closure)."""
    for g in ideal.generators:
        if g.is_constant():
            return True
    return reduced_groebner_basis(ideal, GREVLEX, budget).is_unit


def saturation_chart(ideal: Ideal, h: Polynomial, var: str | None = None) -> Ideal:
    """``I + (1 - t*h)`` in a ring with one fresh variable ``t`` (appended last)."""
    name = var or fresh_name(ideal.ring, "t")
    ring = ideal.ring.extend([name])
    t = ring.var(name)
    gens = [g.to_ring(ring) for g in ideal.generators]
    gens.append(ring.one - t * h.to_ring(ring))
    return Ideal(gens, ring)


def radical_membership(h: Polynomial, ideal: Ideal, budget: Budget | None = None) -> bool:
    """True iff ``h`` vanishes on V(I), via the inconsistency of ``I + (1 - a*h)``."""
    if h.is_zero():
        return True
    if ideal_membership(h, ideal, GREVLEX, budget):
        return True
    return is_inconsistent(saturation_chart(ideal, h, fresh_name(ideal.ring, "a")), budget)


def elimination_ideal(ideal: Ideal, keep: Iterable[str], budget: Budget | None = None) -> Ideal:
    """Generators of ``I ∩ k[keep]`` as an ideal of the subring on ``keep``.

    The subring keeps the variables in their original relative order.  An
    empty generator list means the zero ideal.
    """
    keep = set(keep)
    ring = ideal.ring
    for k in keep:
        ring.index(k)
    kept = [n for n in ring.names if n in keep]
    sub = Ring(kept, ring.field)
    if len(kept) == ring.ngens:
        return Ideal(list(ideal.generators), sub)
    gone = [n for n in ring.names if n not in keep]
    big = Ring(gone + kept, ring.field)
    rep = reduced_groebner_basis(ideal.to_ring(big), block_order(len(gone)), budget)
    k = len(gone)
    out = []
    for g in rep.basis:
        if all(not any(e[:k]) for e in g.terms):
            out.append(g.to_ring(sub))
    return Ideal(out, sub)


def dimension(ideal: Ideal, budget: Budget | None = None) -> int:
    """Krull dimension of V(I) in affine space; ``-1`` when V(I) is empty."""
    ring = ideal.ring
    n = ring.ngens
    if ideal.is_zero_ideal():
        return n
    rep = reduced_groebner_basis(ideal, GREVLEX, budget)
    if rep.is_unit:
        return -1
    supports = [frozenset(i for i, a in enumerate(m) if a) for m in rep.leading_monomials()]
    # largest variable set containing no leading-monomial support
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            s = set(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder = GREVLEX) -> Polynomial:
    lf, cf = f.leading_term(order)
    lg, cg = g.leading_term(order)
    m = _lcm(lf, lg)
    field = f.ring.field
    a = tuple(x - y for x, y in zip(m, lf))
    b = tuple(x - y for x, y in zip(m, lg))
    return f.mul_term(a, field.div(1, cf)) - g.mul_term(b, field.div(1, cg))


def is_groebner_basis(basis: Sequence[Polynomial], order: MonomialOrder = GREVLEX) -> bool:
    """Buchberger criterion: every S-polynomial reduces to zero."""
    if not basis:
        return True
    rep = GBReport(list(basis), order)
    rep.basis = [g.monic(order) for g in basis]
    for f, g in combinations(rep.basis, 2):
        if not normal_form(s_polynomial(f, g, order), rep).is_zero():
            return False
    return True


def same_ideal(a: Ideal, b: Ideal, budget: Budget | None = None) -> bool:
    ra = reduced_groebner_basis(a, GREVLEX, budget)
    rb = reduced_groebner_basis(b, GREVLEX, budget)
    return ra.basis == rb.basis


def radical_contains(a: Ideal, b: Ideal, budget: Budget | None = None) -> bool:
    """True iff V(a) ⊆ V(b), i.e. every generator of b lies in √a."""
    return all(radical_membership(g, a, budget) for g in b.generators)
