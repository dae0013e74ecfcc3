"""Exact sparse Gauss-Jordan elimination over QQ or GF(p).

Rows are dicts ``{column: value}``.  Over QQ values are ``Fraction``/``int``;
over GF(p) plain ints reduced mod p are used internally.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .polyring import Field


class _Arith:
    def __init__(self, field: Field):
        self.p = field.characteristic
        self.field = field

    def norm(self, v):
        if self.p:
            return self.field.convert(v).v
        return v if isinstance(v, Fraction) else Fraction(v)

    def inv(self, v):
        return pow(v, -1, self.p) if self.p else 1 / v

    def out(self, v):
        if self.p:
            return self.field.convert(v)
        return v.numerator if v.denominator == 1 else v


def rref(rows: Sequence[dict], field: Field, rhs: Sequence | None = None):
    """Reduced row echelon form.

    Returns ``(pivot_rows, consistent)`` where ``pivot_rows`` maps a pivot
    column to its (normalized, fully reduced) row and the right-hand side is
    stored under the key ``-1``.
    """
    A = _Arith(field)
    p = A.p
    work = []
    for k, r in enumerate(rows):
        row = {c: A.norm(v) for c, v in r.items()}
        row = {c: v for c, v in row.items() if v}
        if rhs is not None:
            b = A.norm(rhs[k])
            if b:
                row[-1] = b
        if row:
            work.append(row)
    pivots: dict[int, dict] = {}
    for row in work:
        # pivot rows are fully reduced, so one sweep per hit column suffices
        while True:
            hit = [c for c in row if c in pivots]
            if not hit:
                break
            for c in hit:
                if c not in row:
                    continue
                f = row[c]
                for cc, vv in pivots[c].items():
                    nv = row.get(cc, 0) - f * vv
                    if p:
                        nv %= p
                    if nv:
                        row[cc] = nv
                    else:
                        row.pop(cc, None)
        cols = [c for c in row if c >= 0]
        if not cols:
            if row.get(-1):
                return pivots, False
            continue
        piv = min(cols)
        inv = A.inv(row[piv])
        row = {c: (v * inv % p if p else v * inv) for c, v in row.items()}
        # eliminate the new pivot from older rows
        for prow in pivots.values():
            f = prow.get(piv)
            if f:
                for cc, vv in row.items():
                    nv = prow.get(cc, 0) - f * vv
                    if p:
                        nv %= p
                    if nv:
                        prow[cc] = nv
                    else:
                        prow.pop(cc, None)
        pivots[piv] = row
    return pivots, True


def solve(rows: Sequence[dict], rhs: Sequence, ncols: int, field: Field) -> dict | None:
    """A particular solution of ``rows * x = rhs`` with free variables 0, or ``None``."""
    pivots, ok = rref(rows, field, rhs)
    if not ok:
        return None
    A = _Arith(field)
    sol = {}
    for c, row in pivots.items():
        v = row.get(-1, 0)
        if v:
            sol[c] = A.out(v)
    return sol


def nullspace(rows: Sequence[dict], ncols: int, field: Field) -> list[dict]:
    """Basis of the right kernel, one vector per free column (in column order)."""
    pivots, _ = rref(rows, field)
    A = _Arith(field)
    p = A.p
    out = []
    for free in range(ncols):
        if free in pivots:
            continue
        vec = {free: A.out(1)}
        for c, row in pivots.items():
            v = row.get(free)
            if v:
                vec[c] = A.out((-v) % p if p else -v)
        out.append(vec)
    return out


def rank(rows: Sequence[dict], field: Field) -> int:
    pivots, _ = rref(rows, field)
    return len(pivots)
