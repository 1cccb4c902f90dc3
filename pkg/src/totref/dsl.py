"""Line-oriented script language for ring, ideal, module and task declarations.

    field F101
    ring S = poly(w,x,y,z)
    ideal J = (w^2, x^2, y^2, z^2, z*w)
    quotient R = S / J
    module M over R = coker [[x, y, z+w], [0, 0, x*y]]
    family F over R I=(x,y) y=x*y a=(z) b=w u=0..4 n=1
    task betti target=k bound=8

Ideal expressions combine literals ``(f, g, ...)``, names, ``minors(k, [[..]])``
with ``+`` (sum), ``*`` (product), ``:`` (colon) and ``&`` (intersection),
left to right.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import Redefinition, ScriptSyntaxError, UndefinedName

TASKS = (
    "betti", "bass", "hilbert", "socle", "qgor", "tref", "exactpair",
    "verify-main1", "verify-l22", "verify-large", "verify-t22", "verify-type-lemma",
    "verify-betti-bound", "family-verify", "dim", "colon", "series-check",
    "koszul", "minmult", "nu", "grade", "reduce",
)
SETTINGS = ("bound", "degree-bound", "seed")
KEYWORDS = ("field", "set", "ring", "ideal", "quotient", "module", "family", "task")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_INT = re.compile(r"-?\d+")
_POLY_CHARS = re.compile(r"[A-Za-z0-9_'\s+\-*/^().−]*")


# -- AST ----------------------------------------------------------------------

@dataclass(frozen=True)
class Value:
    kind: str  # int, range, ideal, name, poly, matrix, string
    text: str

    def __str__(self):
        return f'"{self.text}"' if self.kind == "string" else self.text


@dataclass(frozen=True)
class IdealLit:
    gens: tuple

    def __str__(self):
        return "(" + ", ".join(self.gens) + ")"


@dataclass(frozen=True)
class IdealRef:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Minors:
    size: int
    rows: tuple

    def __str__(self):
        return f"minors({self.size}, {_matrix_text(self.rows)})"


@dataclass(frozen=True)
class IdealOp:
    op: str
    left: object
    right: object

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True)
class Stmt:
    line: int = field(default=0, compare=False, kw_only=True)


@dataclass(frozen=True)
class FieldDecl(Stmt):
    name: str


@dataclass(frozen=True)
class SetDecl(Stmt):
    key: str
    value: Value


@dataclass(frozen=True)
class RingDecl(Stmt):
    name: str
    variables: tuple


@dataclass(frozen=True)
class IdealDecl(Stmt):
    name: str
    expr: object
    ring: str | None = None


@dataclass(frozen=True)
class QuotientDecl(Stmt):
    name: str
    base: str
    expr: object


@dataclass(frozen=True)
class ModuleDecl(Stmt):
    name: str
    ring: str | None
    kind: str  # coker, cyclic, residue, free, dual
    arg: object = None


@dataclass(frozen=True)
class FamilyDecl(Stmt):
    name: str
    ring: str | None
    args: tuple


@dataclass(frozen=True)
class TaskDecl(Stmt):
    task: str
    args: tuple

    def arg(self, key, default=None):
        for k, v in self.args:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class Script:
    statements: tuple = ()

    @property
    def declarations(self):
        return [s for s in self.statements if not isinstance(s, TaskDecl)]

    @property
    def tasks(self):
        return [s for s in self.statements if isinstance(s, TaskDecl)]


def _matrix_text(rows):
    return "[" + ", ".join("[" + ", ".join(r) + "]" for r in rows) + "]"


# -- printing ------------------------------------------------------------------

def print_script(script: Script) -> str:
    out = []
    for s in script.statements:
        out.append(print_statement(s))
    return "\n".join(out) + ("\n" if out else "")


def print_statement(s) -> str:
    if isinstance(s, FieldDecl):
        return f"field {s.name}"
    if isinstance(s, SetDecl):
        return f"set {s.key}={s.value}"
    if isinstance(s, RingDecl):
        return f"ring {s.name} = poly({', '.join(s.variables)})"
    if isinstance(s, IdealDecl):
        where = f" in {s.ring}" if s.ring else ""
        return f"ideal {s.name}{where} = {s.expr}"
    if isinstance(s, QuotientDecl):
        return f"quotient {s.name} = {s.base} / {s.expr}"
    if isinstance(s, ModuleDecl):
        where = f" over {s.ring}" if s.ring else ""
        if s.kind == "coker":
            body = f"coker {_matrix_text(s.arg)}"
        elif s.kind == "residue":
            body = "residue"
        else:
            body = f"{s.kind} {s.arg}"
        return f"module {s.name}{where} = {body}"
    if isinstance(s, FamilyDecl):
        where = f" over {s.ring}" if s.ring else ""
        args = "".join(f" {k}={v}" for k, v in s.args)
        return f"family {s.name}{where}{args}"
    if isinstance(s, TaskDecl):
        args = "".join(f" {k}={v}" for k, v in s.args)
        return f"task {s.task}{args}"
    raise TypeError(f"not a statement: {s!r}")


# -- parsing -------------------------------------------------------------------

class _Line:
    """Cursor over one source line; columns are 1-based in errors."""

    def __init__(self, text, lineno):
        self.text = text
        self.lineno = lineno
        self.pos = 0

    def error(self, message, expected=(), pos=None):
        col = (self.pos if pos is None else pos) + 1
        return ScriptSyntaxError(message, self.lineno, col, expected)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self):
        self.ws()
        return self.pos >= len(self.text)

    def peek(self, lit):
        self.ws()
        return self.text.startswith(lit, self.pos)

    def accept(self, lit):
        if self.peek(lit):
            self.pos += len(lit)
            return True
        return False

    def expect(self, lit, what=None):
        if not self.accept(lit):
            found = self.text[self.pos : self.pos + 1] or "end of line"
            raise self.error(f"unexpected {found!r}" if found != "end of line" else "unexpected end of line",
                             (what or repr(lit),))

    def ident(self, what="name"):
        self.ws()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            found = self.text[self.pos : self.pos + 1]
            raise self.error(f"unexpected {found!r}" if found else "unexpected end of line", (what,))
        self.pos = m.end()
        return m.group(0)

    def integer(self, what="integer"):
        self.ws()
        m = _INT.match(self.text, self.pos)
        if not m:
            raise self.error("expected an integer", (what,))
        self.pos = m.end()
        return int(m.group(0))

    def balanced(self, open_, close):
        """Raw text between matching brackets (cursor on the opening bracket)."""
        self.ws()
        start = self.pos
        if not self.text.startswith(open_, self.pos):
            raise self.error(f"expected {open_!r}", (open_,))
        depth = 0
        i = self.pos
        pairs = {"(": ")", "[": "]"}
        stack = []
        while i < len(self.text):
            ch = self.text[i]
            if ch in pairs:
                stack.append(pairs[ch])
                depth += 1
            elif ch in ")]":
                if not stack or stack[-1] != ch:
                    raise self.error(f"unbalanced {ch!r}", (stack[-1] if stack else "expression",), pos=i)
                stack.pop()
                depth -= 1
                if depth == 0:
                    self.pos = i + 1
                    return self.text[start + 1 : i], start + 1
            i += 1
        self.pos = len(self.text)
        raise self.error("unexpected end of line", (stack[-1] if stack else close,))

    def word(self):
        """A bare value: everything up to the next blank at bracket depth zero."""
        self.ws()
        start = self.pos
        depth = 0
        i = self.pos
        while i < len(self.text):
            ch = self.text[i]
            if ch in "([":
                depth += 1
            elif ch in ")]":
                depth -= 1
                if depth < 0:
                    raise self.error(f"unbalanced {ch!r}", ("value",), pos=i)
            elif ch in " \t" and depth == 0:
                break
            i += 1
        if depth > 0:
            self.pos = len(self.text)
            raise self.error("unexpected end of line", (")",))
        self.pos = i
        return self.text[start:i], start


def _split_top(text, base, line: _Line):
    """Split on commas at bracket depth 0; returns [(piece, offset)]."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append((text[start:i], base + start))
            start = i + 1
    parts.append((text[start:], base + start))
    return parts


def _poly(piece, offset, line: _Line, what="polynomial"):
    text = piece.strip()
    if not text:
        pos = offset + len(piece) - len(piece.lstrip())
        raise line.error("empty entry", (what,), pos=min(pos, len(line.text)))
    if not _POLY_CHARS.fullmatch(text):
        bad = next(i for i, ch in enumerate(piece) if not _POLY_CHARS.fullmatch(ch))
        raise line.error(f"unexpected {piece[bad]!r} in {what}", (what,), pos=offset + bad)
    if text[-1] in "+-*/^−":
        raise line.error("expression ends with an operator", (what,), pos=offset + len(piece.rstrip()))
    return " ".join(text.split())


def _ideal_literal(line: _Line):
    body, base = line.balanced("(", ")")
    if not body.strip():
        return IdealLit(())
    return IdealLit(tuple(_poly(p, o, line) for p, o in _split_top(body, base, line)))


def _matrix(line: _Line):
    body, base = line.balanced("[", "]")
    rows = []
    for piece, off in _split_top(body, base, line):
        sub = _Line(line.text, line.lineno)
        sub.pos = off
        inner, ibase = sub.balanced("[", "]")
        rest = piece[sub.pos - off :].strip()
        if rest:
            raise line.error("unexpected text after matrix row", ("','", "']'"), pos=sub.pos)
        rows.append(tuple(_poly(p, o, line, "matrix entry") for p, o in _split_top(inner, ibase, line)))
    if len({len(r) for r in rows}) > 1:
        raise line.error("matrix rows have different lengths", ("row of equal length",), pos=base)
    return tuple(rows)


def _ideal_term(line: _Line, known):
    line.ws()
    if line.peek("("):
        return _ideal_literal(line)
    pos = line.pos
    name = line.ident("ideal")
    if name == "minors" and line.peek("("):
        line.expect("(")
        k = line.integer("minor size")
        line.expect(",", "','")
        line.ws()
        rows = _matrix(line)
        line.expect(")", "')'")
        return Minors(k, rows)
    if name not in known:
        raise UndefinedName(f"ideal {name!r} is not declared", line.lineno, pos + 1)
    return IdealRef(name)


def _ideal_expr(line: _Line, known):
    node = _ideal_term(line, known)
    while True:
        line.ws()
        for op in ("+", "*", ":", "&"):
            if line.accept(op):
                node = IdealOp(op, node, _ideal_term(line, known))
                break
        else:
            return node


def _value(line: _Line):
    line.ws()
    if line.peek('"'):
        start = line.pos
        end = line.text.find('"', start + 1)
        if end < 0:
            raise line.error("unterminated string", ('"',))
        line.pos = end + 1
        return Value("string", line.text[start + 1 : end])
    if line.peek("[["):
        return Value("matrix", _matrix_text(_matrix(line)))
    if line.peek("("):
        return Value("ideal", str(_ideal_literal(line)))
    text, start = line.word()
    if not text:
        raise line.error("missing value", ("value",))
    if re.fullmatch(r"-?\d+\.\.-?\d+", text):
        return Value("range", text)
    if _INT.fullmatch(text):
        return Value("int", text)
    if _IDENT.fullmatch(text):
        return Value("name", text)
    return Value("poly", _poly(text, start, line, "value"))


def _args(line: _Line, allowed=None):
    out = []
    seen = set()
    while not line.at_end():
        pos = line.pos
        key = line.ident("key=value")
        if "-" in line.text[line.pos : line.pos + 1]:
            # keys such as degree-bound
            line.pos += 1
            key += "-" + line.ident("key")
        line.expect("=", "'='")
        if key in seen:
            raise line.error(f"argument {key!r} given twice", ("new key",), pos=pos)
        if allowed is not None and key not in allowed:
            raise line.error(f"unknown argument {key!r}", tuple(sorted(allowed)), pos=pos)
        seen.add(key)
        out.append((key, _value(line)))
    return tuple(out)


class _Names:
    def __init__(self):
        self.kinds = {}

    def define(self, name, kind, line, col):
        if name in self.kinds:
            raise Redefinition(f"{name!r} is already declared as a {self.kinds[name]}", line, col)
        self.kinds[name] = kind

    def need(self, name, kinds, line, col):
        if self.kinds.get(name) not in kinds:
            what = "/".join(kinds)
            raise UndefinedName(f"{what} {name!r} is not declared", line, col)

    def of(self, kind):
        return {n for n, k in self.kinds.items() if k == kind}


_FAMILY_KEYS = {"I", "y", "a", "b", "u", "n", "name"}


def parse_script(text: str) -> Script:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    names = _Names()
    stmts = []
    have_field = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        code = raw.split("#", 1)[0].rstrip()
        if not code.strip():
            continue
        line = _Line(code, lineno)
        line.ws()
        kw_pos = line.pos
        kw = line.ident("keyword")
        if kw not in KEYWORDS:
            raise line.error(f"unknown keyword {kw!r}", KEYWORDS, pos=kw_pos)
        if kw == "field":
            line.ws()
            pos = line.pos
            fname = line.ident("field name (F<p> or QQ)")
            if not re.fullmatch(r"(?:F|GF)_?\d+|QQ|Q", fname, flags=re.I):
                raise line.error(f"unknown field {fname!r}", ("F<p>", "QQ"), pos=pos)
            if have_field:
                raise Redefinition("only one field declaration is allowed", lineno, kw_pos + 1)
            have_field = True
            stmt = FieldDecl(fname, line=lineno)
        elif kw == "set":
            line.ws()
            pos = line.pos
            args = _args(line, set(SETTINGS))
            if len(args) != 1:
                raise line.error("set takes exactly one key=value", SETTINGS, pos=pos)
            stmt = SetDecl(args[0][0], args[0][1], line=lineno)
        elif kw == "ring":
            line.ws()
            pos = line.pos
            name = line.ident("ring name")
            line.expect("=", "'='")
            line.ws()
            if line.ident("'poly'") != "poly":
                raise line.error("rings are declared as poly(...)", ("poly",))
            body, base = line.balanced("(", ")")
            variables = []
            for piece, off in _split_top(body, base, line):
                v = piece.strip()
                if not _IDENT.fullmatch(v):
                    raise line.error(f"bad variable name {v!r}", ("variable",), pos=off)
                variables.append(v)
            names.define(name, "ring", lineno, pos + 1)
            stmt = RingDecl(name, tuple(variables), line=lineno)
        elif kw == "ideal":
            line.ws()
            pos = line.pos
            name = line.ident("ideal name")
            ring = None
            if line.peek("in "):
                line.accept("in")
                line.ws()
                rpos = line.pos
                ring = line.ident("ring name")
                names.need(ring, ("ring",), lineno, rpos + 1)
            line.expect("=", "'='")
            expr = _ideal_expr(line, names.of("ideal"))
            if ring is None and not names.of("ring"):
                raise UndefinedName("an ideal needs a ring declared before it", lineno, pos + 1)
            names.define(name, "ideal", lineno, pos + 1)
            stmt = IdealDecl(name, expr, ring, line=lineno)
        elif kw == "quotient":
            line.ws()
            pos = line.pos
            name = line.ident("quotient name")
            line.expect("=", "'='")
            line.ws()
            bpos = line.pos
            base = line.ident("ring name")
            names.need(base, ("ring", "quotient"), lineno, bpos + 1)
            line.expect("/", "'/'")
            expr = _ideal_expr(line, names.of("ideal"))
            names.define(name, "quotient", lineno, pos + 1)
            stmt = QuotientDecl(name, base, expr, line=lineno)
        elif kw == "module":
            line.ws()
            pos = line.pos
            name = line.ident("module name")
            ring = None
            if line.peek("over "):
                line.accept("over")
                line.ws()
                rpos = line.pos
                ring = line.ident("quotient name")
                names.need(ring, ("quotient",), lineno, rpos + 1)
            elif not names.of("quotient"):
                raise UndefinedName("a module needs a quotient ring declared before it", lineno, pos + 1)
            line.expect("=", "'='")
            line.ws()
            kpos = line.pos
            kind = line.ident("coker, cyclic, residue, free or dual")
            if kind == "coker":
                arg = _matrix(line)
            elif kind == "cyclic":
                arg = _ideal_expr(line, names.of("ideal"))
            elif kind == "residue":
                arg = None
            elif kind == "free":
                arg = line.integer("rank")
            elif kind == "dual":
                line.ws()
                apos = line.pos
                arg = line.ident("module name")
                names.need(arg, ("module",), lineno, apos + 1)
            else:
                raise line.error(f"unknown module form {kind!r}", ("coker", "cyclic", "residue", "free", "dual"),
                                 pos=kpos)
            names.define(name, "module", lineno, pos + 1)
            stmt = ModuleDecl(name, ring, kind, arg, line=lineno)
        elif kw == "family":
            line.ws()
            pos = line.pos
            name = "F"
            ring = None
            save = line.pos
            m = _IDENT.match(line.text, line.pos)
            if m and not line.text[m.end() : m.end() + 1] == "=":
                name = m.group(0)
                line.pos = m.end()
            if line.peek("over "):
                line.accept("over")
                line.ws()
                rpos = line.pos
                ring = line.ident("quotient name")
                names.need(ring, ("quotient",), lineno, rpos + 1)
            elif not names.of("quotient"):
                raise UndefinedName("a family needs a quotient ring declared before it", lineno, save + 1)
            args = _args(line, _FAMILY_KEYS)
            keys = {k for k, _ in args}
            missing = [k for k in ("I", "y", "a", "b", "u") if k not in keys]
            if missing:
                raise line.error("family is missing arguments", tuple(f"{k}=" for k in missing))
            names.define(name, "family", lineno, pos + 1)
            stmt = FamilyDecl(name, ring, args, line=lineno)
        else:  # task
            line.ws()
            pos = line.pos
            m = re.compile(r"[A-Za-z][A-Za-z0-9\-]*").match(line.text, line.pos)
            tname = m.group(0) if m else ""
            if tname not in TASKS:
                raise line.error(f"unknown task {tname!r}" if tname else "missing task name", TASKS, pos=pos)
            line.pos = m.end()
            args = _args(line)
            for key, val in args:
                if val.kind == "name" and key in ("target", "other", "over", "family", "of"):
                    if val.text != "k" and val.text not in names.kinds:
                        raise UndefinedName(f"{val.text!r} is not declared", lineno, pos + 1)
            stmt = TaskDecl(tname, args, line=lineno)
        if not line.at_end():
            raise line.error(f"unexpected {line.text[line.pos]!r}", ("end of line",))
        stmts.append(stmt)
    return Script(tuple(stmts))
