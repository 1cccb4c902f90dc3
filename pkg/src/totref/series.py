"""Truncated integer power series in one variable and rational expressions for them."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import MalformedExpression, NonUnitDivision


class SeriesTrunc:
    """c_0 + c_1 t + ... + c_N t^N with exact integer coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, order: int | None = None):
        cs = [int(c) for c in coeffs]
        if order is not None:
            cs = (cs + [0] * (order + 1))[: order + 1]
        if not cs:
            cs = [0]
        self.coeffs = tuple(cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, order):
        return cls([0] * (order + 1))

    @classmethod
    def one(cls, order):
        return cls([1] + [0] * order)

    @classmethod
    def monomial(cls, k, order, coeff=1):
        c = [0] * (order + 1)
        if 0 <= k <= order:
            c[k] = coeff
        return cls(c)

    def truncate(self, order):
        return SeriesTrunc(self.coeffs, order)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, SeriesTrunc):
            return self.coeffs == other.coeffs
        if isinstance(other, (list, tuple)):
            return self.coeffs == tuple(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"SeriesTrunc({list(self.coeffs)})"

    def _common(self, other):
        if isinstance(other, int):
            other = SeriesTrunc([other], self.order)
        n = min(self.order, other.order)
        return self.coeffs[: n + 1], other.coeffs[: n + 1], n

    def __add__(self, other):
        a, b, _ = self._common(other)
        return SeriesTrunc([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return SeriesTrunc([-x for x in self.coeffs])

    def __sub__(self, other):
        a, b, _ = self._common(other)
        return SeriesTrunc([x - y for x, y in zip(a, b)])

    def __mul__(self, other):
        if isinstance(other, int):
            return SeriesTrunc([other * x for x in self.coeffs])
        a, b, n = self._common(other)
        out = [0] * (n + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(n + 1 - i):
                    out[i + j] += x * b[j]
        return SeriesTrunc(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            other = SeriesTrunc([other], self.order)
        return series_div(self, other)

    def __pow__(self, e: int):
        if e < 0:
            return series_div(SeriesTrunc.one(self.order), self ** (-e))
        out = SeriesTrunc.one(self.order)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def to_list(self):
        return list(self.coeffs)


def series_div(a: SeriesTrunc, b: SeriesTrunc) -> SeriesTrunc:
    if b.coeffs[0] not in (1, -1):
        raise NonUnitDivision(f"constant term {b.coeffs[0]} is not a unit in Z[[t]]")
    n = min(a.order, b.order)
    u = b.coeffs[0]
    out = []
    for i in range(n + 1):
        s = a.coeffs[i] - sum(out[j] * b.coeffs[i - j] for j in range(max(0, i - b.order), i))
        out.append(s * u)  # u is its own inverse
    return SeriesTrunc(out)


def series_arith(a: SeriesTrunc, b: SeriesTrunc, op: str) -> SeriesTrunc:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return series_div(a, b)
    if op == "sub":
        return a - b
    raise ValueError(f"unknown series operation {op!r}")


@dataclass(frozen=True)
class Comparison:
    passed: bool
    mode: str
    index: int | None = None
    left: int | None = None
    right: int | None = None

    def __bool__(self):
        return self.passed

    def to_dict(self):
        d = {"passed": self.passed, "mode": self.mode}
        if not self.passed:
            d.update(index=self.index, left=self.left, right=self.right)
        return d


def compare(a, b, mode: str = "eq") -> Comparison:
    """Coefficientwise comparison up to the shorter order; reports the first violation."""
    a = a if isinstance(a, SeriesTrunc) else SeriesTrunc(a)
    b = b if isinstance(b, SeriesTrunc) else SeriesTrunc(b)
    if mode not in ("eq", "leq"):
        raise ValueError("mode must be 'eq' or 'leq'")
    for i, (x, y) in enumerate(zip(a.coeffs, b.coeffs)):
        bad = x != y if mode == "eq" else x > y
        if bad:
            return Comparison(False, mode, i, x, y)
    return Comparison(True, mode)


def compare_scaled(a, b, scale: Fraction, mode: str = "leq") -> Comparison:
    """a ≼ scale·b for a rational scale, compared exactly."""
    scale = Fraction(scale)
    for i, (x, y) in enumerate(zip(a, b)):
        rhs = scale * y
        bad = x != rhs if mode == "eq" else x > rhs
        if bad:
            return Comparison(False, mode, i, x, rhs)
    return Comparison(True, mode)


# -- rational expressions -------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(t)|(\*\*|[-+*/^()]))")


class _Node:
    __slots__ = ("op", "args")

    def __init__(self, op, *args):
        self.op = op
        self.args = args

    def __eq__(self, other):
        return isinstance(other, _Node) and self.op == other.op and self.args == other.args

    def __hash__(self):
        return hash((self.op, self.args))


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _render(node, parent=0, right=False) -> str:
    op = node.op
    if op == "num":
        return str(node.args[0])
    if op == "t":
        return "t"
    if op == "neg":
        s = "-" + _render(node.args[0], _PREC["neg"])
        return f"({s})" if parent >= _PREC["neg"] else s
    if op == "^":
        s = f"{_render(node.args[0], _PREC['^'] + 1)}^{node.args[1]}"
        return s
    prec = _PREC[op]
    a = _render(node.args[0], prec)
    b = _render(node.args[1], prec, right=True)
    sep = op if op in "*/^" else f" {op} "
    if op in "*/":
        sep = op
    s = f"{a}{sep}{b}"
    if parent > prec or (right and parent == prec and op in "-/+*" and parent in (1, 2)):
        return f"({s})"
    return s


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = []
        pos = 0
        text = text.replace("−", "-").replace("·", "*")
        self.text = text
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise MalformedExpression(f"unexpected character {text[pos:].strip()[0]!r} at {pos}")
            if m.group(1):
                self.toks.append(("num", int(m.group(1)), m.start(1)))
            elif m.group(2):
                self.toks.append(("t", None, m.start(2)))
            else:
                op = m.group(3)
                self.toks.append(("op", "^" if op == "**" else op, m.start(3)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t is None or t[0] != "op" or t[1] != op:
            where = t[2] if t else len(self.text)
            raise MalformedExpression(f"expected {op!r} at {where}")

    def parse(self):
        if not self.toks:
            raise MalformedExpression("empty expression")
        node = self.sum()
        if self.peek() is not None:
            raise MalformedExpression(f"unexpected token at {self.peek()[2]}")
        return node

    def sum(self):
        node = self.product()
        while (t := self.peek()) and t[0] == "op" and t[1] in "+-":
            self.take()
            node = _Node(t[1], node, self.product())
        return node

    def product(self):
        node = self.unary()
        while True:
            t = self.peek()
            if t and t[0] == "op" and t[1] in "*/":
                self.take()
                node = _Node(t[1], node, self.unary())
            elif t and (t[0] in ("num", "t") or (t[0] == "op" and t[1] == "(")):
                node = _Node("*", node, self.unary())  # implicit product, e.g. 2t or (..)(..)
            else:
                return node

    def unary(self):
        t = self.peek()
        if t and t[0] == "op" and t[1] in "+-":
            self.take()
            inner = self.unary()
            return inner if t[1] == "+" else _Node("neg", inner)
        return self.power()

    def power(self):
        base = self.atom()
        t = self.peek()
        if t and t[0] == "op" and t[1] == "^":
            self.take()
            sign = 1
            s = self.peek()
            if s and s[0] == "op" and s[1] in "+-":
                self.take()
                sign = -1 if s[1] == "-" else 1
            e = self.take()
            if e is None or e[0] != "num":
                raise MalformedExpression("exponent must be an integer")
            return _Node("^", base, sign * e[1])
        return base

    def atom(self):
        t = self.take()
        if t is None:
            raise MalformedExpression("unexpected end of expression")
        if t[0] == "num":
            return _Node("num", t[1])
        if t[0] == "t":
            return _Node("t")
        if t[1] == "(":
            node = self.sum()
            self.expect(")")
            return node
        raise MalformedExpression(f"unexpected {t[1]!r} at {t[2]}")


class RationalSeriesExpr:
    """A rational function of t written with integers, + - * / and integer powers.

    Division is only by series with constant term ±1, e.g.
    ``(1-t^2)^3/((1-t)^5*(1-2*t))``.
    """

    def __init__(self, node: _Node, text: str | None = None):
        self.node = node
        self.text = text

    @classmethod
    def parse(cls, text: str) -> "RationalSeriesExpr":
        return cls(_Parser(text).parse(), text)

    @classmethod
    def from_factors(cls, numerator, factors):
        """numerator (integer coefficients) times Π (1 - a t^k)^e over (a, k, e)."""
        num = None
        for i, c in enumerate(numerator):
            if not c:
                continue
            mono = _Node("t") if i == 1 else _Node("^", _Node("t"), i)
            if i == 0:
                term = _Node("num", abs(c))
            else:
                term = mono if abs(c) == 1 else _Node("*", _Node("num", abs(c)), mono)
            if num is None:
                num = _Node("neg", term) if c < 0 else term
            else:
                num = _Node("-" if c < 0 else "+", num, term)
        node = num or _Node("num", 0)
        unit = node == _Node("num", 1)
        for a, k, e in factors:
            if e == 0:
                continue
            tk = _Node("t") if k == 1 else _Node("^", _Node("t"), k)
            base = _Node("-", _Node("num", 1), tk if a == 1 else _Node("*", _Node("num", a), tk))
            factor = base if e == 1 else _Node("^", base, e)
            node = factor if unit else _Node("*", node, factor)
            unit = False
        return cls(node)

    def __str__(self):
        return _render(self.node)

    def __repr__(self):
        return f"RationalSeriesExpr({str(self)!r})"

    def __eq__(self, other):
        return isinstance(other, RationalSeriesExpr) and self.node == other.node

    def __hash__(self):
        return hash(self.node)

    def __mul__(self, other):
        return RationalSeriesExpr(_Node("*", self.node, other.node))

    def __truediv__(self, other):
        return RationalSeriesExpr(_Node("/", self.node, other.node))

    def expand(self, order: int) -> SeriesTrunc:
        return _eval(self.node, order)


def _eval(node, n) -> SeriesTrunc:
    op = node.op
    if op == "num":
        return SeriesTrunc([node.args[0]], n)
    if op == "t":
        return SeriesTrunc.monomial(1, n)
    if op == "neg":
        return -_eval(node.args[0], n)
    if op == "^":
        return _eval(node.args[0], n) ** node.args[1]
    a = _eval(node.args[0], n)
    b = _eval(node.args[1], n)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    return series_div(a, b)


def expand(expr, order: int) -> SeriesTrunc:
    if isinstance(expr, str):
        expr = RationalSeriesExpr.parse(expr)
    return expr.expand(order)
