"""Exact scalars, monomial orders and sparse multivariate polynomials."""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .errors import (
    ArityMismatch,
    ContextMismatch,
    DivisionByZero,
    FieldMismatch,
    ParseError,
    UnknownVariable,
)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """A prime field F_p (``characteristic=p``) or the rationals (``0``).

    Elements are plain Python values: ints in ``[0, p)`` for F_p and
    ``Fraction`` for the rationals.
    """

    __slots__ = ("characteristic",)

    def __init__(self, characteristic: int = 101):
        if characteristic != 0:
            if characteristic >= 2**31 or not _is_prime(characteristic):
                raise ValueError(f"characteristic must be 0 or a prime below 2^31, got {characteristic}")
        self.characteristic = characteristic

    @classmethod
    def parse(cls, name: str) -> "Field":
        name = name.strip()
        if name.upper() in ("QQ", "Q"):
            return cls(0)
        m = re.fullmatch(r"(?:F|GF|ZZ/)_?(\d+)", name, flags=re.I)
        if not m:
            raise ValueError(f"unknown field {name!r}; use F<p> or QQ")
        return cls(int(m.group(1)))

    @property
    def name(self) -> str:
        return "QQ" if self.characteristic == 0 else f"F{self.characteristic}"

    def __repr__(self):
        return f"Field({self.name})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("Field", self.characteristic))

    @property
    def zero(self):
        return 0 if self.characteristic else Fraction(0)

    @property
    def one(self):
        return 1 if self.characteristic else Fraction(1)

    def coerce(self, v):
        p = self.characteristic
        if p:
            if isinstance(v, Fraction):
                if v.denominator % p == 0:
                    raise DivisionByZero(f"{v} has no image in {self.name}")
                return v.numerator * pow(v.denominator, p - 2, p) % p
            return int(v) % p
        return Fraction(v)

    def is_zero(self, a) -> bool:
        return a == 0

    def add(self, a, b):
        p = self.characteristic
        return (a + b) % p if p else a + b

    def sub(self, a, b):
        p = self.characteristic
        return (a - b) % p if p else a - b

    def mul(self, a, b):
        p = self.characteristic
        return a * b % p if p else a * b

    def neg(self, a):
        p = self.characteristic
        return -a % p if p else -a

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero")
        p = self.characteristic
        return pow(a, p - 2, p) if p else 1 / Fraction(a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def signed(self, a):
        """Representative closest to zero, used for printing."""
        p = self.characteristic
        if p and a > p // 2:
            return a - p
        return a


F101 = Field(101)
QQ = Field(0)


class Scalar:
    """A field element tagged with its field; mixing fields is an error."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value):
        self.field = field
        self.value = field.coerce(value)

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field.name} vs {other.field.name}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        return Scalar(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.field, self.field.sub(self.value, self._other(other)))

    def __mul__(self, other):
        return Scalar(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def inverse(self):
        return Scalar(self.field, self.field.inv(self.value))

    def __truediv__(self, other):
        return self * Scalar(self.field, self._other(other)).inverse()

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"{self.field.signed(self.value)} in {self.field.name}"


def scalar_ops(a: Scalar, b: Scalar | None, op: str) -> Scalar:
    """Apply ``op`` in {add, mul, inv, neg} to scalars of one field."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "neg":
        return -a
    raise ValueError(f"unknown scalar op {op!r}")


# -- monomial orders --------------------------------------------------------

def _grevlex_key(e):
    return (sum(e), tuple(-x for x in reversed(e)))


class MonomialOrder:
    """grevlex, lex, or an elimination order for the first ``block`` variables.

    The elimination order compares the total degree in the first ``block``
    variables, then breaks ties by grevlex on all variables.
    """

    __slots__ = ("kind", "block", "key")

    def __init__(self, kind: str = "grevlex", block: int | None = None):
        if kind not in ("grevlex", "lex", "elim"):
            raise ValueError(f"unknown monomial order {kind!r}")
        if kind == "elim" and (block is None or block < 0):
            raise ValueError("elimination order needs a block size")
        self.kind = kind
        self.block = block if kind == "elim" else None
        if kind == "grevlex":
            self.key = _grevlex_key
        elif kind == "lex":
            self.key = tuple
        else:
            b = block

            def key(e, b=b):
                return (sum(e[:b]), sum(e), tuple(-x for x in reversed(e)))

            self.key = key

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.kind, self.block) == (other.kind, other.block)

    def __hash__(self):
        return hash((self.kind, self.block))

    def __repr__(self):
        return f"MonomialOrder({self.kind!r}" + (f", block={self.block})" if self.block is not None else ")")


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def monomial_compare(u, v, order: MonomialOrder = GREVLEX) -> str:
    """Return ``"LT"``, ``"EQ"`` or ``"GT"``."""
    u, v = tuple(u), tuple(v)
    if len(u) != len(v):
        raise ArityMismatch(f"monomials of length {len(u)} and {len(v)}")
    ku, kv = order.key(u), order.key(v)
    if ku == kv:
        return "EQ"
    return "GT" if ku > kv else "LT"


def divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


# -- polynomial rings -------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class PolyRing:
    """k[x_1, ..., x_n] with a fixed field and monomial order."""

    def __init__(self, variables: Iterable[str], field: Field = F101, order: MonomialOrder | str = GREVLEX):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        for v in self.variables:
            if not _IDENT.fullmatch(v):
                raise ValueError(f"bad variable name {v!r}")
        self.field = field
        self.order = MonomialOrder(order) if isinstance(order, str) else order
        self.nvars = len(self.variables)
        self.index = {v: i for i, v in enumerate(self.variables)}
        self._zero_exp = (0,) * self.nvars

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.variables == other.variables
            and self.field == other.field
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.variables, self.field, self.order))

    def __repr__(self):
        return f"PolyRing({','.join(self.variables)}; {self.field.name}; {self.order.kind})"

    def same_space(self, other: "PolyRing") -> bool:
        return self.variables == other.variables and self.field == other.field

    def with_order(self, order) -> "PolyRing":
        return PolyRing(self.variables, self.field, order)

    def extend(self, new_vars, front: bool = True, order=None) -> "PolyRing":
        names = tuple(new_vars) + self.variables if front else self.variables + tuple(new_vars)
        return PolyRing(names, self.field, order or self.order)

    # constructors
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {self._zero_exp: self.field.one})

    def const(self, c) -> "Polynomial":
        c = self.field.coerce(c)
        return Polynomial(self, {self._zero_exp: c} if c != 0 else {})

    def var(self, name: str) -> "Polynomial":
        if name not in self.index:
            raise UnknownVariable(name)
        e = [0] * self.nvars
        e[self.index[name]] = 1
        return Polynomial(self, {tuple(e): self.field.one})

    def gens(self):
        return [self.var(v) for v in self.variables]

    def monomial(self, exp, coeff=1) -> "Polynomial":
        exp = tuple(exp)
        if len(exp) != self.nvars:
            raise ArityMismatch(f"exponent of length {len(exp)} in a ring with {self.nvars} variables")
        c = self.field.coerce(coeff)
        return Polynomial(self, {exp: c} if c != 0 else {})

    def from_terms(self, terms) -> "Polynomial":
        f = self.field
        out = {}
        for e, c in (terms.items() if isinstance(terms, dict) else terms):
            e = tuple(e)
            if len(e) != self.nvars:
                raise ArityMismatch(f"exponent of length {len(e)}")
            c = f.add(out.get(e, f.zero), f.coerce(c))
            if c == 0:
                out.pop(e, None)
            else:
                out[e] = c
        return Polynomial(self, out)

    def __call__(self, value) -> "Polynomial":
        return self.coerce(value)

    def coerce(self, value) -> "Polynomial":
        if isinstance(value, Polynomial):
            if value.ring == self:
                return value
            return self.convert(value)
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, Scalar):
            if value.field != self.field:
                raise FieldMismatch(f"{value.field.name} scalar in a {self.field.name} ring")
            return self.const(value.value)
        return self.const(value)

    def convert(self, f: "Polynomial") -> "Polynomial":
        """Move ``f`` into this ring by variable name."""
        if f.ring.field != self.field:
            raise ContextMismatch(f"field {f.ring.field.name} vs {self.field.name}")
        if f.ring.variables == self.variables:
            return Polynomial(self, dict(f.terms))
        pos = []
        for i, v in enumerate(f.ring.variables):
            if v in self.index:
                pos.append(self.index[v])
            else:
                pos.append(None)
        out = {}
        for e, c in f.terms.items():
            ne = [0] * self.nvars
            for i, x in enumerate(e):
                if x:
                    if pos[i] is None:
                        raise ContextMismatch(f"variable {f.ring.variables[i]} is not in {self}")
                    ne[pos[i]] = x
            out[tuple(ne)] = c
        return Polynomial(self, out)

    def parse(self, text: str) -> "Polynomial":
        return _PolyParser(self, text).parse()

    def split_name(self, name: str):
        """Split a juxtaposed name like ``yw`` or ``x0x2`` into variables."""
        if name in self.index:
            return [name]
        best = _split_juxtaposed(name, tuple(sorted(self.variables, key=len, reverse=True)))
        if best is None:
            raise UnknownVariable(name)
        return best


@lru_cache(maxsize=4096)
def _split_juxtaposed(name, variables):
    if not name:
        return []
    for v in variables:
        if name.startswith(v):
            rest = _split_juxtaposed(name[len(v):], variables)
            if rest is not None:
                return [v] + rest
    return None


class Polynomial:
    """Immutable sparse polynomial: a dict from exponent tuples to nonzero coefficients."""

    __slots__ = ("ring", "terms", "_lead")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._lead = None

    # structure
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def leading_monomial(self):
        if not self.terms:
            return None
        if self._lead is None:
            self._lead = max(self.terms, key=self.ring.order.key)
        return self._lead

    lm = leading_monomial

    def leading_coefficient(self):
        m = self.leading_monomial()
        return self.ring.field.zero if m is None else self.terms[m]

    lc = leading_coefficient

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: self.ring.order.key(t[0]), reverse=True)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    @property
    def homogeneous_degree(self):
        degs = {sum(e) for e in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get(self.ring._zero_exp, self.ring.field.zero)

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial(self.ring, {e: c for e, c in self.terms.items() if sum(e) == d})

    def support_variables(self):
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return sorted(used)

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        c = self.lc()
        if c == self.ring.field.one:
            return self
        return self.scale(self.ring.field.inv(c))

    # arithmetic
    def _check(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring is self.ring or other.ring == self.ring:
                return other
            if other.ring.same_space(self.ring):
                return self.ring.convert(other)
            raise ContextMismatch(f"{self.ring} vs {other.ring}")
        return self.ring.coerce(other)

    def __add__(self, other):
        other = self._check(other)
        f = self.ring.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = f.add(out.get(e, f.zero), c)
            if v == 0:
                out.pop(e, None)
            else:
                out[e] = v
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        f = self.ring.field
        return Polynomial(self.ring, {e: f.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c) -> "Polynomial":
        f = self.ring.field
        c = f.coerce(c)
        if c == 0:
            return self.ring.zero()
        return Polynomial(self.ring, {e: f.mul(c, v) for e, v in self.terms.items()})

    def mul_term(self, exp, c) -> "Polynomial":
        f = self.ring.field
        return Polynomial(
            self.ring, {tuple(a + b for a, b in zip(e, exp)): f.mul(c, v) for e, v in self.terms.items()}
        )

    def __mul__(self, other):
        other = self._check(other)
        f = self.ring.field
        p = f.characteristic
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        if p:
            out = {e: c % p for e, c in out.items() if c % p}
        else:
            out = {e: c for e, c in out.items() if c != 0}
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring.same_space(other.ring) and self.terms == other.terms
        try:
            return self.terms == self.ring.coerce(other).terms
        except Exception:
            return NotImplemented

    def __hash__(self):
        return hash((self.ring.variables, frozenset(self.terms.items())))

    def evaluate(self, values: dict):
        """Substitute polynomials or scalars for variables by name."""
        ring = self.ring
        images = []
        for v in ring.variables:
            x = values.get(v, ring.var(v))
            images.append(x if isinstance(x, Polynomial) else None)
        target = next((x.ring for x in images if x is not None), ring)
        result = target.zero()
        for e, c in self.terms.items():
            term = target.const(c)
            for i, k in enumerate(e):
                if k:
                    x = values.get(ring.variables[i], ring.var(ring.variables[i]))
                    term = term * (x if isinstance(x, Polynomial) else target.const(x)) ** k
            result = result + term
        return result

    # printing
    def __str__(self):
        if not self.terms:
            return "0"
        f = self.ring.field
        names = self.ring.variables
        parts = []
        for e, c in self.sorted_terms():
            c = f.signed(c)
            neg = c < 0
            a = -c if neg else c
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append(("-" if neg else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


# -- text parser ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()−]))")


class _PolyParser:
    """Recursive descent over ``+ - * / ^`` and parentheses.

    ``*`` may be omitted between factors; division is only by nonzero
    constants.  Unknown identifiers are split into juxtaposed variables.
    """

    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.text = text
        self.tokens = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
            num, ident, op = m.groups()
            start = m.start(m.lastindex)
            if num is not None:
                self.tokens.append(("num", int(num), start))
            elif ident is not None:
                self.tokens.append(("id", ident, start))
            else:
                op = {"**": "^", "−": "-"}.get(op, op)
                self.tokens.append(("op", op, start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", None, len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2])

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise ParseError("empty polynomial", 0)
        f = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", t[2])
        return f

    def expr(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            f = self.term()
            if t[1] == "-":
                f = -f
        else:
            f = self.term()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                g = self.term()
                f = f + g if t[1] == "+" else f - g
            else:
                return f

    def term(self):
        f = self.power()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                f = f * self.power()
            elif t[0] == "op" and t[1] == "/":
                self.take()
                pos = self.peek()[2]
                g = self.power()
                if not g.is_constant() or g.is_zero():
                    raise ParseError("division only by nonzero constants", pos)
                f = f.scale(self.ring.field.inv(g.constant_term()))
            elif t[0] in ("num", "id") or (t[0] == "op" and t[1] == "("):
                f = f * self.power()
            else:
                return f

    def power(self):
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num":
                raise ParseError("expected a non-negative integer exponent", e[2])
            return base ** e[1]
        return base

    def atom(self):
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return self.ring.const(val)
        if kind == "id":
            try:
                names = self.ring.split_name(val)
            except UnknownVariable:
                raise UnknownVariable(f"{val!r} at offset {pos} is not a variable of {self.ring}") from None
            f = self.ring.one()
            for n in names:
                f = f * self.ring.var(n)
            return f
        if kind == "op" and val == "(":
            f = self.expr()
            self.expect(")")
            return f
        if kind == "op" and val == "-":
            return -self.power()
        raise ParseError("expected a number, variable or '('" if kind != "end" else "unexpected end of input", pos)
