"""Independent reference computations built on sympy."""

import random
from itertools import combinations_with_replacement

import sympy
from sympy.polys.domains import QQ as SQQ
from sympy.polys.matrices import DomainMatrix

from birmaps.polyring import Polynomial, Ring, parse


def sym_poly(p: Polynomial, names):
    syms = sympy.symbols(names)
    expr = sympy.sympify(str(p).replace("^", "**"), locals=dict(zip(p.ring.names, syms[: len(p.ring.names)])))
    return sympy.Poly(expr, *syms)


def _monomials(nvars, D):
    out = []
    for d in range(D + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def certificate_exists(gens, h, D) -> bool:
    """Is 1 = tau*(1 - a*h) + sum tau_i*g_i solvable with all cofactors of degree <= D?"""
    names = list(h.ring.names) + ["a_"]
    a = sympy.Symbol("a_")
    blocks = [sym_poly(g, names) for g in gens]
    blocks.append(sympy.Poly(1 - a * sym_poly(h, names).as_expr(), *sympy.symbols(names)))
    mons = _monomials(len(names), D)
    rows: dict = {}
    ncols = len(mons) * len(blocks)
    for b, poly in enumerate(blocks):
        for j, m in enumerate(mons):
            for e, c in poly.terms():
                key = tuple(x + y for x, y in zip(e, m))
                rows.setdefault(key, {})[b * len(mons) + j] = c
    rows.setdefault(tuple([0] * len(names)), {})
    keys = list(rows)
    A = [[SQQ.from_sympy(sympy.Rational(rows[k].get(c, 0))) for c in range(ncols)] for k in keys]
    Ab = [r + [SQQ.from_sympy(sympy.Rational(1 if sum(k) == 0 else 0))] for r, k in zip(A, keys)]
    rA = DomainMatrix(A, (len(keys), ncols), SQQ).rank()
    rAb = DomainMatrix(Ab, (len(keys), ncols + 1), SQQ).rank()
    return rA == rAb


def radical_member(gens, h) -> bool:
    names = list(h.ring.names) + ["a_"]
    syms = sympy.symbols(names)
    exprs = [sym_poly(g, names).as_expr() for g in gens]
    exprs.append(1 - syms[-1] * sym_poly(h, names).as_expr())
    G = sympy.groebner(exprs, *syms, order="grevlex")
    return list(G.exprs) == [1]


def nullstellensatz_corpus(n=50, seed=2024):
    """(generators, h) pairs over at most 3 variables and degree at most 3.

    Half are built to satisfy V(I) inside V(h), the rest are random.
    """
    rng = random.Random(seed)
    out = []
    for k in range(n):
        nv = rng.randint(1, 3)
        R = Ring(["x", "y", "z"][:nv])
        def rand_poly(maxdeg):
            terms = {}
            for _ in range(rng.randint(1, 3)):
                e = [0] * nv
                for _ in range(rng.randint(0, maxdeg)):
                    e[rng.randrange(nv)] += 1
                terms[tuple(e)] = rng.choice([-2, -1, 1, 2, 3])
            return Polynomial(R, terms)
        h = rand_poly(1)
        while h.is_constant():
            h = rand_poly(1)
        if k % 2 == 0:
            e = rng.randint(1, 3)
            gens = [h**e]
            if rng.random() < 0.5:
                gens.append(rand_poly(2))
        else:
            gens = []
            while not gens:
                gens = [g for g in (rand_poly(3), rand_poly(2)) if not g.is_constant()][: rng.randint(1, 2)]
        out.append((gens, h))
    return out
