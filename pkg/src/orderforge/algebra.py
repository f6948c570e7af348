"""Exact coefficient fields, rings and multivariate polynomials.

Polynomials are immutable and stored as a dict ``{exponent tuple: coefficient}``
with every coefficient nonzero.  The ordered term list is derived on demand
from the ring's monomial order.  Over a quotient ring every result is
normal-formed against the Groebner basis of the defining ideal.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from gmpy2 import mpq


class RingMismatch(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at column {pos + 1}" if text else message)


# ---------------------------------------------------------------- fields


class RationalField:
    characteristic = 0

    def __init__(self):
        self.zero = mpq(0)
        self.one = mpq(1)

    def __call__(self, x):
        if isinstance(x, Fraction):
            return mpq(x.numerator, x.denominator)
        return mpq(x)

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("inverse of zero")
        return 1 / x

    def fmt(self, x) -> str:
        return str(x)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """Residues mod a prime ``p < 2**31``, stored as ints in ``[0, p)``."""

    def __init__(self, p: int):
        if p < 2 or p >= 2**31 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not a prime below 2^31")
        self.characteristic = p
        self.zero = 0
        self.one = 1

    def __call__(self, x):
        p = self.characteristic
        if isinstance(x, (Fraction, type(mpq(0)))):
            num, den = int(x.numerator), int(x.denominator)
            if den % p == 0:
                raise ZeroDivisionError(f"denominator divisible by {p}")
            return num * pow(den, -1, p) % p
        return int(x) % p

    def inv(self, x):
        if x % self.characteristic == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(int(x), -1, self.characteristic)

    def fmt(self, x) -> str:
        # symmetric representative reads better in reports
        p = self.characteristic
        return str(x - p if x > p // 2 else x)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("GF", self.characteristic))

    def __repr__(self):
        return f"GF({self.characteristic})"


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


# ---------------------------------------------------------------- orders


@lru_cache(maxsize=None)
def _grevlex_key(exp: tuple) -> tuple:
    return (sum(exp),) + tuple(-e for e in reversed(exp))


def _lex_key(exp: tuple) -> tuple:
    return exp


class MonomialOrder:
    """Monomial order on exponent tuples, extended to free-module terms.

    ``key(exp)`` is increasing in the order.  For module terms
    ``(comp, exp)`` the extension is position-over-term (``"pot"``, lower
    component index is larger) or term-over-position (``"top"``).  A
    ``split`` makes components ``< split`` dominate all later ones, which is
    what syzygy and lift computations eliminate with.
    """

    def __init__(self, kind: str = "grevlex", module: str = "pot", split: int | None = None):
        if kind not in ("grevlex", "lex"):
            raise ValueError(f"unknown monomial order {kind!r}")
        if module not in ("pot", "top"):
            raise ValueError(f"unknown module extension {module!r}")
        self.kind = kind
        self.module = module
        self.split = split
        self.key = _grevlex_key if kind == "grevlex" else _lex_key
        self._tcache: dict = {}

    def with_split(self, split: int | None) -> "MonomialOrder":
        return MonomialOrder(self.kind, self.module, split)

    def tkey(self, comp: int, exp: tuple) -> tuple:
        k = self._tcache.get((comp, exp))
        if k is None:
            base = self.key(exp)
            if self.module == "pot":
                k = (-comp,) + base
            else:
                k = base + (-comp,)
            if self.split is not None:
                k = (comp < self.split,) + k
            self._tcache[(comp, exp)] = k
        return k

    def __eq__(self, other):
        return (isinstance(other, MonomialOrder) and other.kind == self.kind
                and other.module == self.module and other.split == self.split)

    def __hash__(self):
        return hash((self.kind, self.module, self.split))

    def __repr__(self):
        return f"MonomialOrder({self.kind!r}, {self.module!r})"


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


# ---------------------------------------------------------------- rings


class Ring:
    """Polynomial ring ``field[variables]``, optionally modulo an ideal.

    ``quotient`` holds generators of the defining ideal ``J`` (as
    polynomials of the ambient ring).  ``domain`` records whether the ring
    is known to be an integral domain; polynomial rings always are, a
    quotient only when the caller says so.
    """

    def __init__(self, variables: Iterable[str], field=QQ, order: str = "grevlex",
                 quotient: Iterable = (), domain: bool | None = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("repeated variable names")
        self.nvars = len(self.variables)
        self.field = field
        self.order = MonomialOrder(order)
        self._zero_exp = (0,) * self.nvars
        quotient = tuple(quotient)
        if quotient:
            self.ambient = Ring(self.variables, field, order)
            gens = []
            for q in quotient:
                q = q if isinstance(q, Poly) else self.ambient.parse(q)
                if q.ring != self.ambient:
                    q = Poly(self.ambient, q.terms)
                if q:
                    gens.append(q)
            self.quotient = tuple(gens)
        else:
            self.ambient = self
            self.quotient = ()
        self.domain = (not self.quotient) if domain is None else bool(domain)
        self._qgb = None
        self._ident = (self.variables, self.field, self.order.kind,
                       tuple(tuple(sorted(q.terms.items())) for q in self.quotient))

    def __eq__(self, other):
        return self is other or (isinstance(other, Ring) and self._ident == other._ident)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash(self._ident)

    def __repr__(self):
        s = f"{self.field!r}[{', '.join(self.variables)}]"
        if self.quotient:
            s += "/(" + ", ".join(str(q) for q in self.quotient) + ")"
        return s

    @property
    def is_quotient(self) -> bool:
        return bool(self.quotient)

    def quotient_gb(self):
        """Reduced Groebner basis of the defining ideal (ambient ring terms)."""
        if self._qgb is None:
            from .groebner import ideal_gb_terms
            self._qgb = ideal_gb_terms(self.ambient, [q.terms for q in self.quotient])
        return self._qgb

    # -- constructors
    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = self.field(c)
        return Poly(self, {self._zero_exp: c} if c else {})

    def var(self, name: str) -> "Poly":
        i = self.variables.index(name)
        exp = tuple(1 if k == i else 0 for k in range(self.nvars))
        return Poly(self, {exp: self.field.one})

    def gens(self) -> tuple:
        return tuple(self.var(x) for x in self.variables)

    def __call__(self, x) -> "Poly":
        if isinstance(x, Poly):
            if x.ring == self:
                return x
            if x.ring.variables == self.variables and x.ring.field == self.field:
                return Poly(self, x.terms)
            raise RingMismatch(f"cannot coerce from {x.ring} to {self}")
        if isinstance(x, str):
            return self.parse(x)
        return self.const(x)

    def parse(self, text: str) -> "Poly":
        symbols = {name: self.var(name) for name in self.variables}
        value = parse_expression(text, symbols, self.const)
        if not isinstance(value, Poly):
            value = self.const(value)
        return value

    def normalize(self, terms: dict) -> dict:
        """Canonical representative of ``terms`` modulo the defining ideal."""
        if not self.quotient or not terms:
            return terms
        from .groebner import reduce_terms
        return reduce_terms(self.ambient, terms, self.quotient_gb())


# ---------------------------------------------------------------- polynomials


def _add_terms(a: dict, b: dict, sign=1) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        if v is None:
            out[e] = c if sign == 1 else -c
        else:
            v = v + c if sign == 1 else v - c
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def mul_terms(a: dict, b: dict, p: int = 0) -> dict:
    out: dict = {}
    get = out.get
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple([x + y for x, y in zip(ea, eb)])
            out[e] = get(e, 0) + ca * cb
    if p:
        return {e: c % p for e, c in out.items() if c % p}
    return {e: c for e, c in out.items() if c}


class Poly:
    """Immutable polynomial in a :class:`Ring`."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict, _normal: bool = False):
        self.ring = ring
        if not _normal:
            p = ring.field.characteristic
            if p:
                terms = {e: c % p for e, c in terms.items() if c % p}
            else:
                terms = {e: c for e, c in terms.items() if c}
            terms = ring.normalize(terms)
        self.terms = terms
        self._hash = None

    def _wrap(self, terms: dict) -> "Poly":
        p = self.ring.field.characteristic
        if p:
            terms = {e: c % p for e, c in terms.items() if c % p}
        return Poly(self.ring, self.ring.normalize(terms), _normal=True)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction, type(mpq(0)))):
            return self.ring.const(other)
        return NotImplemented

    # -- arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(_add_terms(self.terms, other.terms))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(_add_terms(self.terms, other.terms, -1))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return self._wrap({e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return self._wrap(mul_terms(self.terms, other.terms, self.ring.field.characteristic))
        if isinstance(other, (int, Fraction, type(mpq(0)))):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = self.ring.field(c)
        return self._wrap({e: c * v for e, v in self.terms.items()})

    def derivative(self, name: str) -> "Poly":
        """Partial derivative with respect to the variable ``name``."""
        k = self.ring.variables.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                out[e[:k] + (e[k] - 1,) + e[k + 1:]] = c * e[k]
        return self._wrap(out)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers need a non-negative integer exponent")
        result, base = self.ring.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if other.is_constant() and other:
                return self.scale(self.ring.field.inv(other.constant_coefficient()))
            return self.exact_div(other)
        return self.scale(self.ring.field.inv(self.ring.field(other)))

    def exact_div(self, d: "Poly") -> "Poly":
        """Quotient in the ambient polynomial ring; raises if not exact."""
        if not d:
            raise ZeroDivisionError("division by zero polynomial")
        key = self.ring.order.key
        field = self.ring.field
        p = field.characteristic
        de, dc = max(d.terms.items(), key=lambda t: key(t[0]))
        dinv = field.inv(dc)
        rem = dict(self.terms)
        quo: dict = {}
        while rem:
            e, c = max(rem.items(), key=lambda t: key(t[0]))
            if any(x < y for x, y in zip(e, de)):
                raise ArithmeticError("inexact polynomial division")
            s = tuple(x - y for x, y in zip(e, de))
            q = c * dinv
            if p:
                q %= p
            quo[s] = q
            rem = _add_terms(rem, mul_terms({s: q}, d.terms, p), -1)
            if p:
                rem = {k: v % p for k, v in rem.items() if v % p}
        return Poly(self.ring, quo)

    # -- inspection
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction, type(mpq(0)))):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_coefficient(self):
        return self.terms.get(self.ring._zero_exp, self.ring.field.zero)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def ordered_terms(self, order: MonomialOrder | None = None) -> list:
        """Terms strictly descending in ``order`` (default: ring order)."""
        key = (order or self.ring.order).key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder | None = None):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = (order or self.ring.order).key
        return max(self.terms.items(), key=lambda t: key(t[0]))

    def __str__(self):
        return format_terms(self.ordered_terms(), self.ring.variables, self.ring.field)

    def __repr__(self):
        return f"Poly({str(self)!r})"


def leading_term(p: Poly, order: MonomialOrder | None = None):
    return p.leading_term(order)


def poly_arith(op: str, a: Poly, b) -> Poly:
    """``op`` is one of add, sub, mul, scalar (``b`` a field element for scalar)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scalar":
        return a.scale(b)
    raise ValueError(f"unknown operation {op!r}")


def format_monomial(exp: tuple, variables: tuple) -> str:
    parts = []
    for name, k in zip(variables, exp):
        if k == 1:
            parts.append(name)
        elif k:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_terms(terms: list, variables: tuple, field) -> str:
    """Render ordered ``(exp, coeff)`` pairs in task-file syntax."""
    if not terms:
        return "0"
    out = []
    for i, (e, c) in enumerate(terms):
        s = field.fmt(c)
        neg = s.startswith("-")
        if neg:
            s = s[1:]
        mono = format_monomial(e, variables)
        if mono:
            body = mono if s == "1" else f"{s}*{mono}"
        else:
            body = s
        if i == 0:
            out.append("-" + body if neg else body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r}", text, pos)
        start = m.start(1) if m.group(1) else m.start(2) if m.group(2) else m.start(3)
        if m.group(1):
            tokens.append(("num", int(m.group(1)), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


def parse_expression(text: str, symbols: dict, const):
    """Parse ``2*u^2*v - 1/3*w`` style text over the values in ``symbols``.

    ``const`` lifts a rational number into the value domain.  Division is
    only allowed by scalars.
    """
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def expr():
        if peek()[:2] in (("op", "-"), ("op", "+")):
            sign = take()[1]
            value = term()
            if sign == "-":
                value = -value
        else:
            value = term()
        while peek()[:2] in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term():
        value = factor()
        while peek()[:2] in (("op", "*"), ("op", "/")):
            op = take()[1]
            rhs = factor()
            if op == "*":
                value = value * rhs
            else:
                if isinstance(rhs, Fraction):
                    if rhs == 0:
                        raise ParseError("division by zero", text, tokens[pos - 1][2])
                    value = value / rhs if isinstance(value, Fraction) else value * (1 / rhs)
                else:
                    raise ParseError("division only by rational constants", text, tokens[pos - 1][2])
        return value

    def factor():
        base = atom()
        if peek()[:2] == ("op", "^"):
            take()
            kind, val, at = take()
            if kind != "num":
                raise ParseError("expected integer exponent", text, at)
            base = base ** val
        return base

    def atom():
        kind, val, at = take()
        if kind == "num":
            return Fraction(val)
        if kind == "name":
            if val not in symbols:
                raise ParseError(f"unknown symbol {val!r}", text, at)
            return symbols[val]
        if (kind, val) == ("op", "("):
            value = expr()
            k2, v2, at2 = take()
            if (k2, v2) != ("op", ")"):
                raise ParseError("expected ')'", text, at2)
            return value
        if (kind, val) == ("op", "-"):
            return -factor()
        raise ParseError("unexpected end of expression" if kind == "end" else f"unexpected {val!r}",
                         text, at)

    if tokens[0][0] == "end":
        raise ParseError("empty expression", text, 0)
    value = expr()
    kind, val, at = peek()
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", text, at)
    if isinstance(value, Fraction):
        value = const(value)
    return value
