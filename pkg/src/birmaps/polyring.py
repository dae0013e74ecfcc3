"""Exact sparse multivariate polynomials over QQ or a prime field GF(p).

A :class:`Ring` fixes an ordered tuple of variable names and a coefficient
field.  A :class:`Polynomial` is a map from exponent tuples (dense, one entry
per ring variable) to nonzero coefficients.  Values are immutable; every
operation returns a new polynomial.

    >>> R = Ring(["x", "y"])
    >>> x, y = R.gens()
    >>> print((x + y) * (x - y))
    x^2 - y^2
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from math import comb
from typing import Iterable, Mapping, Sequence

__all__ = [
    "QQ",
    "GF",
    "Field",
    "Ring",
    "Polynomial",
    "MonomialOrder",
    "LEX",
    "GREVLEX",
    "block_order",
    "PolynomialSyntaxError",
    "UnknownVariableError",
    "parse",
    "fmt",
    "fresh_name",
    "monomials_up_to",
]


# ---------------------------------------------------------------------------
# coefficient fields


class Field:
    characteristic = 0
    name = "q"

    def convert(self, value):
        raise NotImplementedError

    def div(self, a, b):
        raise NotImplementedError

    def format(self, c) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"<field {self.name}>"


class _Rationals(Field):
    """QQ; elements are ``int`` or :class:`fractions.Fraction`."""

    characteristic = 0
    name = "q"

    def convert(self, value):
        if isinstance(value, int):
            return value
        if isinstance(value, Fraction):
            return value.numerator if value.denominator == 1 else value
        if isinstance(value, ModP):
            raise TypeError("cannot coerce a GF(p) element into QQ")
        if isinstance(value, str):
            return self.convert(Fraction(value))
        raise TypeError(f"cannot coerce {value!r} into QQ (floats are not allowed)")

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in QQ")
        if isinstance(a, int) and isinstance(b, int):
            if a % b == 0:
                return a // b
            return Fraction(a, b)
        q = Fraction(a) / b
        return q.numerator if q.denominator == 1 else q

    def format(self, c) -> str:
        if isinstance(c, Fraction) and c.denominator != 1:
            return f"{c.numerator}/{c.denominator}"
        return str(int(c))

    def __eq__(self, other):
        return isinstance(other, _Rationals)

    def __hash__(self):
        return hash("QQ")


QQ = _Rationals()


class ModP:
    """An element of GF(p).  Mixed arithmetic with ``int`` is allowed."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, ModP):
            if other.p != self.p:
                raise TypeError("mixing elements of different prime fields")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return ModP(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return ModP(o * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __pow__(self, e: int):
        return ModP(pow(self.v, e, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self.v - o) % self.p == 0

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"{self.v} mod {self.p}"


class _PrimeField(Field):
    def __init__(self, p: int):
        if p < 2 or any(p % k == 0 for k in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.characteristic = p
        self.name = f"fp:{p}"

    def convert(self, value):
        p = self.characteristic
        if isinstance(value, ModP):
            if value.p != p:
                raise TypeError("mixing elements of different prime fields")
            return value
        if isinstance(value, int):
            return ModP(value, p)
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise ZeroDivisionError(f"denominator {value.denominator} vanishes mod {p}")
            return ModP(value.numerator * pow(value.denominator, -1, p), p)
        if isinstance(value, str):
            return self.convert(Fraction(value))
        raise TypeError(f"cannot coerce {value!r} into GF({p})")

    def div(self, a, b):
        return self.convert(a) / self.convert(b)

    def format(self, c) -> str:
        return str(self.convert(c).v)

    def __eq__(self, other):
        return isinstance(other, _PrimeField) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("GF", self.characteristic))


_prime_fields: dict[int, _PrimeField] = {}


def GF(p: int) -> Field:
    """The prime field with ``p`` elements (answers refer to its algebraic closure)."""
    if p not in _prime_fields:
        _prime_fields[p] = _PrimeField(p)
    return _prime_fields[p]


def field_from_spec(spec: str) -> Field:
    """``"q"`` -> QQ, ``"fp:101"`` -> GF(101)."""
    if spec in ("q", "QQ", "Q"):
        return QQ
    if spec.startswith("fp:"):
        return GF(int(spec[3:]))
    raise ValueError(f"unknown field spec {spec!r}")


# ---------------------------------------------------------------------------
# monomial orders


class MonomialOrder:
    """A term order given by a sort key on exponent tuples (larger key = larger term).

    Keys are flat tuples of ints, so ``tuple(-k for k in key(e))`` reverses it.

    ``kind`` is ``"lex"``, ``"grevlex"`` or ``"block"``; a block order compares
    the first ``split`` variables by grevlex and breaks ties by grevlex on the
    rest, so any monomial involving the first block beats every monomial in
    the second block alone.
    """

    __slots__ = ("kind", "split", "key")

    def __init__(self, kind: str, split: int | None = None):
        self.kind = kind
        self.split = split
        if kind == "lex":
            self.key = _lex_key
        elif kind == "grevlex":
            self.key = _grevlex_key
        elif kind == "block":
            if split is None or split < 0:
                raise ValueError("block order needs a non-negative split index")
            k = split

            def key(e, k=k):
                return _grevlex_key(e[:k]) + _grevlex_key(e[k:])

            self.key = key
        else:
            raise ValueError(f"unknown monomial order {kind!r}")

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.kind, self.split) == (other.kind, other.split)

    def __hash__(self):
        return hash((self.kind, self.split))

    def __repr__(self):
        return self.kind if self.split is None else f"block({self.split})"


def _lex_key(e):
    return e


def _grevlex_key(e):
    # flat int tuple so that keys can be negated for heap use
    return (sum(e),) + tuple([-a for a in reversed(e)])


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


def block_order(split: int) -> MonomialOrder:
    return MonomialOrder("block", split)


# ---------------------------------------------------------------------------
# rings


class Ring:
    """Polynomial ring over ``field`` in the ordered variables ``names``."""

    __slots__ = ("names", "field", "_index", "_hash")

    def __init__(self, names: Iterable[str], field: Field = QQ):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for n in names:
            if not _IDENT.fullmatch(n):
                raise ValueError(f"invalid variable name {n!r}")
        self.names = names
        self.field = field
        self._index = {n: i for i, n in enumerate(names)}
        self._hash = hash((names, field))

    @property
    def ngens(self) -> int:
        return len(self.names)

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Ring) and self.names == other.names and self.field == other.field
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Ring({list(self.names)}, {self.field.name})"

    def __contains__(self, name):
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"variable {name!r} not in {self.names}") from None

    def zero_exp(self) -> tuple:
        return (0,) * len(self.names)

    def var(self, name: str) -> "Polynomial":
        e = [0] * len(self.names)
        e[self.index(name)] = 1
        return Polynomial(self, {tuple(e): self.field.convert(1)}, _trusted=True)

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(n) for n in self.names)

    def const(self, c) -> "Polynomial":
        c = self.field.convert(c)
        if c == 0:
            return Polynomial(self, {}, _trusted=True)
        return Polynomial(self, {self.zero_exp(): c}, _trusted=True)

    @property
    def zero(self) -> "Polynomial":
        return Polynomial(self, {}, _trusted=True)

    @property
    def one(self) -> "Polynomial":
        return self.const(1)

    def monomial(self, exps: Sequence[int], coeff=1) -> "Polynomial":
        return Polynomial(self, {tuple(exps): coeff})

    def __call__(self, value) -> "Polynomial":
        if isinstance(value, Polynomial):
            return value.to_ring(self)
        if isinstance(value, str):
            return parse(value, self)
        return self.const(value)

    def extend(self, new_names: Iterable[str]) -> "Ring":
        return Ring(self.names + tuple(new_names), self.field)

    def drop(self, names: Iterable[str]) -> "Ring":
        names = set(names)
        return Ring([n for n in self.names if n not in names], self.field)

    def with_field(self, field: Field) -> "Ring":
        return Ring(self.names, field)


def fresh_name(ring_or_names, base: str) -> str:
    """First of ``base``, ``base_1``, ``base_2`` ... not already taken."""
    taken = set(ring_or_names.names if isinstance(ring_or_names, Ring) else ring_or_names)
    if base not in taken:
        return base
    k = 1
    while f"{base}_{k}" in taken:
        k += 1
    return f"{base}_{k}"


def monomials_up_to(nvars: int, degree: int) -> list[tuple]:
    """All exponent tuples in ``nvars`` variables of total degree <= ``degree``.

    Ordered by degree, then lexicographically descending, so the enumeration is
    fixed for a given (nvars, degree).
    """
    out = []
    for d in range(degree + 1):
        out.extend(_monomials_of_degree(nvars, d))
    return out


def _monomials_of_degree(nvars: int, d: int) -> list[tuple]:
    if nvars == 0:
        return [()] if d == 0 else []
    if nvars == 1:
        return [(d,)]
    out = []
    for a in range(d, -1, -1):
        for rest in _monomials_of_degree(nvars - 1, d - a):
            out.append((a,) + rest)
    return out


def count_monomials(nvars: int, degree: int) -> int:
    return comb(nvars + degree, degree) if degree >= 0 else 0


# ---------------------------------------------------------------------------
# polynomials


@total_ordering
class Polynomial:
    """An element of a :class:`Ring`.  Treat instances as immutable."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[tuple, object] | None = None, _trusted: bool = False):
        self.ring = ring
        self._hash = None
        if _trusted:
            self.terms = terms
            return
        conv = ring.field.convert
        n = ring.ngens
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n or any(a < 0 for a in e):
                raise ValueError(f"bad exponent vector {e} for {ring}")
            c = conv(c)
            if c != 0:
                clean[e] = clean.get(e, 0) + c
                if clean[e] == 0:
                    del clean[e]
        self.terms = clean

    # -- basic queries ------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self):
        return self.terms.get(self.ring.zero_exp(), self.ring.field.convert(0))

    def degree(self, var: str | None = None) -> int:
        """Total degree (or degree in ``var``); the zero polynomial has degree -1."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self.ring.index(var)
        return max(e[i] for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def variables(self) -> tuple[str, ...]:
        used = [False] * self.ring.ngens
        for e in self.terms:
            for i, a in enumerate(e):
                if a:
                    used[i] = True
        return tuple(n for n, u in zip(self.ring.names, used) if u)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), self.ring.field.convert(0))

    def sorted_terms(self, order: MonomialOrder = GREVLEX) -> list[tuple[tuple, object]]:
        key = order.key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder = GREVLEX) -> tuple[tuple, object]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = order.key
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def leading_monomial(self, order: MonomialOrder = GREVLEX) -> tuple:
        return self.leading_term(order)[0]

    def leading_coefficient(self, order: MonomialOrder = GREVLEX):
        return self.leading_term(order)[1]

    def monic(self, order: MonomialOrder = GREVLEX) -> "Polynomial":
        if not self.terms:
            return self
        lc = self.leading_coefficient(order)
        return self.scale(self.ring.field.div(1, lc))

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction, ModP)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v == 0:
                    del out[e]
                else:
                    out[e] = v
        return Polynomial(self.ring, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = -c
            else:
                v = v - c
                if v == 0:
                    del out[e]
                else:
                    out[e] = v
        return Polynomial(self.ring, out, _trusted=True)

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if len(self.terms) < len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        out: dict = {}
        get = out.get
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple([x + y for x, y in zip(ea, eb)])
                v = get(e)
                out[e] = ca * cb if v is None else v + ca * cb
        return Polynomial(self.ring, {e: c for e, c in out.items() if c != 0}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "Polynomial":
        c = self.ring.field.convert(c)
        if c == 0:
            return self.ring.zero
        return Polynomial(self.ring, {e: v * c for e, v in self.terms.items()}, _trusted=True)

    def mul_term(self, exps: tuple, c) -> "Polynomial":
        """Multiply by the single term ``c * x^exps``."""
        if c == 0:
            return self.ring.zero
        return Polynomial(
            self.ring,
            {tuple([x + y for x, y in zip(e, exps)]): v * c for e, v in self.terms.items()},
            _trusted=True,
        )

    def exact_div(self, other: "Polynomial") -> "Polynomial | None":
        """``self / other`` if ``other`` divides ``self``, else ``None``."""
        other = self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        field = self.ring.field
        lo, lc = other.leading_term(GREVLEX)
        rem = self
        quot: dict = {}
        while rem.terms:
            e, c = rem.leading_term(GREVLEX)
            if any(a < b for a, b in zip(e, lo)):
                return None
            shift = tuple(a - b for a, b in zip(e, lo))
            q = field.div(c, lc)
            quot[shift] = q
            rem = rem - other.mul_term(shift, q)
        return Polynomial(self.ring, quot, _trusted=True)

    def monomial_content(self) -> tuple:
        """Exponents of the largest monomial dividing every term."""
        if not self.terms:
            return self.ring.zero_exp()
        it = iter(self.terms)
        g = list(next(it))
        for e in it:
            g = [min(a, b) for a, b in zip(g, e)]
        return tuple(g)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction, ModP)):
            return self == self.ring.const(other)
        return NotImplemented

    def __lt__(self, other):
        # arbitrary but fixed total order, used only for deterministic sorting
        return self._sort_key() < other._sort_key()

    def _sort_key(self):
        return [(_grevlex_key(e), str(c)) for e, c in self.sorted_terms()]

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- calculus and substitution -----------------------------------------
    def diff(self, var: str) -> "Polynomial":
        """Formal partial derivative (characteristic-aware through the field)."""
        i = self.ring.index(var)
        out = {}
        for e, c in self.terms.items():
            a = e[i]
            if a:
                v = c * a
                if v != 0:
                    out[e[:i] + (a - 1,) + e[i + 1 :]] = v
        return Polynomial(self.ring, out, _trusted=True)

    def evaluate(self, point):
        """Exact value at ``point`` (mapping name -> value, or sequence in ring order)."""
        values = self._point_values(point)
        conv = self.ring.field.convert
        vals = [conv(v) for v in values]
        total = conv(0)
        for e, c in self.terms.items():
            t = c
            for v, a in zip(vals, e):
                if a:
                    t = t * v**a
            total = total + t
        return total

    def _point_values(self, point):
        names = self.ring.names
        if isinstance(point, Mapping):
            missing = [n for n in names if n not in point]
            if missing:
                raise ValueError(f"no value assigned to {missing}")
            return [point[n] for n in names]
        point = list(point)
        if len(point) != len(names):
            raise ValueError(f"expected {len(names)} values, got {len(point)}")
        return point

    def subs(self, mapping: Mapping[str, object], ring: Ring | None = None) -> "Polynomial":
        """Substitute polynomials or constants for variables.

        Values may be constants or polynomials in ``ring`` (default: this
        ring).  Unmapped variables are kept and must exist in ``ring``.
        """
        ring = ring or self.ring
        field = ring.field
        images = []
        for n in self.ring.names:
            if n in mapping:
                v = mapping[n]
                images.append(v if isinstance(v, Polynomial) else ring.const(v))
            else:
                images.append(ring.var(n))
        for im in images:
            if im.ring != ring:
                raise ValueError("substituted polynomials must live in the target ring")
        out = ring.zero
        powers: dict[tuple[int, int], Polynomial] = {}
        for e, c in self.terms.items():
            t = ring.const(field.convert(c))
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in powers:
                        powers[key] = images[i] ** a
                    t = t * powers[key]
            out = out + t
        return out

    def to_ring(self, ring: Ring) -> "Polynomial":
        """Re-express in ``ring``, matching variables by name."""
        if ring == self.ring:
            return self
        pos = []
        for n in self.variables():
            if n not in ring:
                raise ValueError(f"variable {n!r} does not exist in {ring}")
        idx = [ring.index(n) if n in ring else None for n in self.ring.names]
        pos = idx
        m = ring.ngens
        out = {}
        for e, c in self.terms.items():
            ne = [0] * m
            for i, a in enumerate(e):
                if a:
                    ne[pos[i]] = a
            out[tuple(ne)] = ring.field.convert(c)
        return Polynomial(ring, out, _trusted=True)

    def homogenize(self, var: str) -> "Polynomial":
        """Homogenize with respect to ``var`` (which must not occur in ``self``)."""
        i = self.ring.index(var)
        if any(e[i] for e in self.terms):
            raise ValueError(f"{var} already occurs in the polynomial")
        d = self.degree()
        out = {}
        for e, c in self.terms.items():
            ne = list(e)
            ne[i] = d - sum(e)
            out[tuple(ne)] = c
        return Polynomial(self.ring, out, _trusted=True)

    def dehomogenize(self, var: str, value=1) -> "Polynomial":
        """Set ``var`` to ``value`` (stays in the same ring)."""
        i = self.ring.index(var)
        value = self.ring.field.convert(value)
        out: dict = {}
        for e, c in self.terms.items():
            ne = e[:i] + (0,) + e[i + 1 :]
            v = c * value ** e[i] if e[i] else c
            out[ne] = out.get(ne, 0) + v
        return Polynomial(self.ring, {e: c for e, c in out.items() if c != 0}, _trusted=True)

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial(self.ring, {e: c for e, c in self.terms.items() if sum(e) == d}, _trusted=True)

    def coefficients_in(self, var: str) -> dict[int, "Polynomial"]:
        """Write ``self = sum_k c_k * var^k``; returns ``{k: c_k}``."""
        i = self.ring.index(var)
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            parts.setdefault(e[i], {})[e[:i] + (0,) + e[i + 1 :]] = c
        return {k: Polynomial(self.ring, t, _trusted=True) for k, t in parts.items()}

    # -- display ------------------------------------------------------------
    def __str__(self):
        return fmt(self)

    def __repr__(self):
        return f"Polynomial({fmt(self)!r})"


# ---------------------------------------------------------------------------
# text format


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


class UnknownVariableError(PolynomialSyntaxError):
    pass


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)(?:\s*/\s*(?P<den>\d+))?|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start("num") if m.group("num") else m.start("id") if m.group("id") else m.start("op")
        if m.group("num") is not None:
            den = m.group("den")
            if den is not None and int(den) == 0:
                raise PolynomialSyntaxError("zero denominator", start, text)
            out.append(("num", (int(m.group("num")), int(den) if den else 1), start))
        elif m.group("id") is not None:
            out.append(("id", m.group("id"), start))
        else:
            out.append(("op", m.group("op"), start))
        pos = m.end()
    out.append(("end", None, n))
    return out


class _Parser:
    def __init__(self, text: str, ring: Ring):
        self.text = text
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolynomialSyntaxError(msg, tok[2], self.text)

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            p = p * self.unary()
        return p

    def unary(self) -> Polynomial:
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            p = self.unary()
            return -p if t[1] == "-" else p
        return self.power()

    def power(self) -> Polynomial:
        p = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "num" or t[1][1] != 1:
                self.fail("exponent must be a non-negative integer", t)
            p = p ** t[1][0]
        return p

    def atom(self) -> Polynomial:
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            num, den = val
            return self.ring.const(Fraction(num, den))
        if kind == "id":
            if val not in self.ring:
                raise UnknownVariableError(f"unknown variable {val!r}", pos, self.text)
            return self.ring.var(val)
        if kind == "op" and val == "(":
            p = self.expr()
            t2 = self.take()
            if t2[0] != "op" or t2[1] != ")":
                self.fail("expected ')'", t2)
            return p
        if kind == "end":
            self.fail("unexpected end of input", t)
        self.fail(f"unexpected token {val!r}", t)


def parse(text: str, ring: Ring) -> Polynomial:
    """Parse ``text`` in the polynomial grammar (``^`` powers, explicit ``*``, ``p/q`` literals)."""
    return _Parser(text, ring).parse()


def _format_monomial(names, e) -> str:
    parts = []
    for n, a in zip(names, e):
        if a == 1:
            parts.append(n)
        elif a:
            parts.append(f"{n}^{a}")
    return "*".join(parts)


def fmt(p: Polynomial) -> str:
    """Canonical text: terms by descending grevlex, ``0`` for the zero polynomial."""
    if not p.terms:
        return "0"
    field = p.ring.field
    names = p.ring.names
    out = []
    for k, (e, c) in enumerate(p.sorted_terms(GREVLEX)):
        s = field.format(c)
        neg = s.startswith("-")
        if neg:
            s = s[1:]
        mono = _format_monomial(names, e)
        if mono:
            body = mono if s == "1" else f"{s}*{mono}"
        else:
            body = s
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
