"""Buchberger's algorithm and the ideal algebra built on it.

Polynomials enter the engine as plain dicts keyed by exponent tuples.  For
modules the exponent tuple carries one extra trailing entry, the component
index, and a position-over-term order is used.
"""

from __future__ import annotations

import heapq
import itertools
import threading
from itertools import combinations

from .errors import ArityMismatch, ContextMismatch, SizeOutOfRange, UnknownVariable
from .kernel import MonomialOrder, Polynomial, PolyRing, divides

_B = 1 << 16


def int_key(order: MonomialOrder, n: int):
    """Integer-valued sort key equivalent to ``order.key`` on ``n`` variables."""
    top = _B - 1
    if order.kind == "lex":
        def key(e):
            k = 0
            for x in e:
                k = k * _B + x
            return k
    elif order.kind == "grevlex":
        def key(e):
            k = sum(e)
            for x in reversed(e):
                k = k * _B + (top - x)
            return k
    else:
        b = order.block

        def key(e):
            k = sum(e[:b]) * _B + sum(e)
            for x in reversed(e):
                k = k * _B + (top - x)
            return k
    return key


class _Engine:
    """Shared reduction and pair machinery over one field and order."""

    def __init__(self, field, key, ncomp: int = 0, comp_rank=None):
        self.field = field
        self.p = field.characteristic
        self.module = ncomp > 0
        if self.module:
            # component is the last exponent entry; lower rank means bigger
            base = key
            rank = comp_rank or (lambda c: c)
            big = _B ** 40

            def mkey(e):
                return (ncomp - rank(e[-1])) * big + base(e[:-1])

            self.key = mkey
        else:
            self.key = key

    # monomial helpers aware of components
    def divides(self, a, b):
        if self.module:
            return a[-1] == b[-1] and all(x <= y for x, y in zip(a[:-1], b[:-1]))
        return all(x <= y for x, y in zip(a, b))

    def lcm(self, a, b):
        if self.module:
            if a[-1] != b[-1]:
                return None
            return tuple(max(x, y) for x, y in zip(a[:-1], b[:-1])) + (a[-1],)
        return tuple(x if x > y else y for x, y in zip(a, b))

    def quot(self, a, b):
        if self.module:
            return tuple(x - y for x, y in zip(a[:-1], b[:-1])) + (0,)
        return tuple(x - y for x, y in zip(a, b))

    def shift(self, e, m):
        if self.module:
            return tuple(x + y for x, y in zip(e[:-1], m[:-1])) + (e[-1],)
        return tuple(x + y for x, y in zip(e, m))

    def coprime(self, a, b):
        if self.module:
            return False
        return all(x == 0 or y == 0 for x, y in zip(a, b))

    def lead(self, f):
        return max(f, key=self.key)

    def monic(self, f):
        if not f:
            return f
        c = f[self.lead(f)]
        inv = self.field.inv(c)
        mul = self.field.mul
        return {e: mul(inv, v) for e, v in f.items()}

    def spoly(self, f, g, lf, lg):
        m = self.lcm(lf, lg)
        a, b = self.quot(m, lf), self.quot(m, lg)
        fd = self.field
        cf, cg = f[lf], g[lg]
        out = {}
        for e, c in f.items():
            out[self.shift(e, a)] = fd.mul(c, cg)
        for e, c in g.items():
            k = self.shift(e, b)
            v = fd.sub(out.get(k, 0), fd.mul(c, cf))
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        return out

    def reduce(self, f, basis, leads, full=True):
        """Reduce dict ``f`` by ``basis`` (list of dicts) with leading monomials ``leads``."""
        if not f:
            return {}
        key = self.key
        fd = self.field
        p = self.p
        work = dict(f)
        heap = [(-key(e), e) for e in work]
        heapq.heapify(heap)
        rem = {}
        seen_in_heap = set(work)
        while heap:
            _, m = heapq.heappop(heap)
            seen_in_heap.discard(m)
            c = work.pop(m, 0)
            if c == 0 or (p and c % p == 0):
                continue
            if p:
                c %= p
            for g, lg in zip(basis, leads):
                if self.divides(lg, m):
                    break
            else:
                if not full:
                    rem[m] = c
                    for e, v in work.items():
                        if (v % p if p else v) != 0:
                            rem[e] = v % p if p else v
                    return rem
                rem[m] = c
                continue
            q = self.quot(m, lg)
            factor = fd.mul(c, fd.inv(g[lg]))
            for e, v in g.items():
                if e == lg:
                    continue
                k = self.shift(e, q)
                if p:
                    work[k] = work.get(k, 0) - factor * v
                else:
                    work[k] = work.get(k, 0) - factor * v
                if k not in seen_in_heap:
                    seen_in_heap.add(k)
                    heapq.heappush(heap, (-key(k), k))
        return rem

    def groebner(self, polys):
        """Reduced Groebner basis of ``polys`` (list of dicts)."""
        G = []
        L = []
        for f in polys:
            f = {e: c for e, c in f.items() if c != 0}
            if f:
                G.append(f)
                L.append(self.lead(f))
        if not G:
            return []
        # seed with an inter-reduced generating set
        order = sorted(range(len(G)), key=lambda i: self.key(L[i]))
        basis: list = []
        leads: list = []
        active: list = []
        pairs: list = []
        counter = itertools.count()
        for i in order:
            h = self.reduce(G[i], [basis[j] for j in active], [leads[j] for j in active])
            if h:
                h = self.monic(h)
                basis.append(h)
                leads.append(self.lead(h))
                self._update(basis, leads, active, pairs, len(basis) - 1, counter)
        while pairs:
            # normal selection: smallest lcm first
            best = min(range(len(pairs)), key=lambda t: (pairs[t][0], pairs[t][1]))
            _, _, i, j, _ = pairs.pop(best)
            s = self.spoly(basis[i], basis[j], leads[i], leads[j])
            h = self.reduce(s, [basis[k] for k in active], [leads[k] for k in active])
            if h:
                h = self.monic(h)
                basis.append(h)
                leads.append(self.lead(h))
                self._update(basis, leads, active, pairs, len(basis) - 1, counter)
        # reduce
        final = []
        act = sorted(active, key=lambda k: self.key(leads[k]))
        for t, k in enumerate(act):
            others = [basis[x] for x in act if x != k]
            olead = [leads[x] for x in act if x != k]
            g = {leads[k]: basis[k][leads[k]]}
            tail = {e: c for e, c in basis[k].items() if e != leads[k]}
            tail = self.reduce(tail, others, olead)
            g.update(tail)
            final.append(self.monic(g))
        final.sort(key=lambda g: self.key(self.lead(g)))
        return final

    def _update(self, basis, leads, active, pairs, h, counter):
        """Gebauer-Moeller pair update; pairs are (key, tiebreak, i, j, lcm)."""
        lh = leads[h]
        C = [g for g in active]
        D = []
        lc = {g: self.lcm(lh, leads[g]) for g in C}
        cand = [g for g in C if lc[g] is not None]
        for idx, g1 in enumerate(cand):
            m1 = lc[g1]
            if self.coprime(lh, leads[g1]):
                D.append(g1)
                continue
            redundant = False
            for g2 in cand[idx + 1 :]:
                if self.divides(lc[g2], m1):
                    redundant = True
                    break
            if not redundant:
                for g2 in D:
                    if self.divides(lc[g2], m1):
                        redundant = True
                        break
            if not redundant:
                D.append(g1)
        E = [g for g in D if not self.coprime(lh, leads[g])]
        keep = []
        for item in pairs:
            _, _, i, j, m = item
            if (
                self.divides(lh, m)
                and self.lcm(leads[i], lh) != m
                and self.lcm(leads[j], lh) != m
            ):
                continue
            keep.append(item)
        for g in E:
            m = lc[g]
            keep.append((self.key(m), next(counter), g, h, m))
        pairs[:] = keep
        active[:] = [g for g in active if not self.divides(lh, leads[g])] + [h]


def engine_for_ring(ring: PolyRing, order: MonomialOrder | None = None) -> _Engine:
    order = order or ring.order
    return _Engine(ring.field, int_key(order, ring.nvars))


def buchberger(gens, order: MonomialOrder | str | None = None):
    """Reduced Groebner basis of ``gens`` as a list of monic Polynomials.

    The polynomials are returned in a ring carrying ``order``, sorted by
    increasing leading monomial.
    """
    gens = list(gens)
    if not gens:
        return []
    ring = gens[0].ring
    if isinstance(order, str):
        order = MonomialOrder(order)
    order = order or ring.order
    oring = ring if order == ring.order else ring.with_order(order)
    eng = engine_for_ring(oring)
    out = eng.groebner([ring.coerce(g).terms for g in gens])
    return [Polynomial(oring, g) for g in out]


class Ideal:
    """An ideal of a polynomial ring with a lazily cached reduced GB."""

    def __init__(self, ring: PolyRing, gens=()):
        self.ring = ring
        self.gens = []
        for g in gens:
            g = ring.coerce(g)
            if not g.is_zero():
                self.gens.append(g)
        self._gb: dict = {}
        self._lock = threading.Lock()
        self.warnings: list[str] = []

    @classmethod
    def parse(cls, ring: PolyRing, text: str) -> "Ideal":
        text = text.strip()
        if text.startswith("(") and text.endswith(")"):
            text = text[1:-1]
        parts = _split_top(text)
        return cls(ring, [ring.parse(s) for s in parts if s.strip()])

    def __repr__(self):
        return f"Ideal({', '.join(str(g) for g in self.gens) or '0'})"

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.gens) + ")" if self.gens else "(0)"

    def groebner(self, order: MonomialOrder | None = None):
        order = order or self.ring.order
        with self._lock:
            if order not in self._gb:
                self._gb[order] = buchberger(self.gens, order) if self.gens else []
            return self._gb[order]

    gb = groebner

    def leading_monomials(self, order=None):
        return [g.lm() for g in self.groebner(order)]

    def normal_form(self, f) -> Polynomial:
        f = self.ring.coerce(f)
        G = self.groebner()
        if not G or f.is_zero():
            return f
        eng = engine_for_ring(self.ring)
        r = eng.reduce(f.terms, [g.terms for g in G], [g.lm() for g in G])
        return Polynomial(self.ring, r)

    def contains(self, f) -> bool:
        return self.normal_form(f).is_zero()

    __contains__ = contains

    def contains_ideal(self, other: "Ideal") -> bool:
        return all(self.contains(g) for g in other.gens)

    def is_unit(self) -> bool:
        G = self.groebner()
        return len(G) == 1 and G[0].is_constant()

    def is_zero(self) -> bool:
        return not self.gens

    def reduced_generators(self):
        return list(self.groebner())

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return ideal_equal(self, other)

    def __hash__(self):
        return hash(tuple(str(g) for g in self.groebner()))

    def __add__(self, other):
        return ideal_combine(self, other, "sum")

    def __mul__(self, other):
        return ideal_combine(self, other, "product")

    def minimal_generators(self):
        """A minimal homogeneous generating set (graded case)."""
        gens = sorted(self.gens, key=lambda g: g.total_degree())
        keep: list = []
        for g in gens:
            if not Ideal(self.ring, keep).contains(g):
                keep.append(g)
        return keep


def _split_top(text: str):
    """Split on commas that are not nested in parentheses or brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur))
    return out


def normal_form(f, ideal: Ideal) -> Polynomial:
    return ideal.normal_form(f)


def ideal_equal(I: Ideal, J: Ideal) -> bool:
    if not I.ring.same_space(J.ring):
        raise ContextMismatch(f"{I.ring} vs {J.ring}")
    a = I.groebner()
    b = J.groebner(I.ring.order)
    return [g.terms for g in a] == [g.terms for g in b]


def _fresh(ring: PolyRing, base: str = "t"):
    name = base
    k = 0
    while name in ring.index:
        k += 1
        name = f"{base}{k}"
    return name


def eliminate(I: Ideal, variables) -> Ideal:
    """I ∩ k[remaining variables], computed with a block elimination order."""
    ring = I.ring
    variables = list(variables)
    for v in variables:
        if v not in ring.index:
            raise UnknownVariable(v)
    rest = [v for v in ring.variables if v not in variables]
    er = PolyRing(variables + rest, ring.field, MonomialOrder("elim", len(variables)))
    G = buchberger([er.convert(g) for g in I.gens]) if I.gens else []
    b = len(variables)
    keep = [g for g in G if all(not any(e[:b]) for e in g.terms)]
    return Ideal(ring, [ring.convert(g) for g in keep])


def intersect(I: Ideal, J: Ideal) -> Ideal:
    ring = I.ring
    if I.is_zero() or J.is_zero():
        return Ideal(ring, [])
    t = _fresh(ring)
    big = ring.extend([t], front=True, order=MonomialOrder("elim", 1))
    tv = big.var(t)
    gens = [tv * big.convert(f) for f in I.gens] + [(big.one() - tv) * big.convert(g) for g in J.gens]
    G = buchberger(gens)
    keep = [g for g in G if all(e[0] == 0 for e in g.terms)]
    small = PolyRing(ring.variables, ring.field, ring.order)
    return Ideal(ring, [ring.convert(small.from_terms({e[1:]: c for e, c in g.terms.items()})) for g in keep])


def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial:
    """``f / g`` when ``g`` divides ``f``; raises ValueError otherwise."""
    ring = f.ring
    eng = engine_for_ring(ring)
    lg = g.lm()
    inv = ring.field.inv(g.lc())
    q: dict = {}
    r = dict(f.terms)
    fd = ring.field
    while r:
        m = eng.lead(r)
        if not divides(lg, m):
            raise ValueError(f"{g} does not divide {f}")
        e = tuple(a - b for a, b in zip(m, lg))
        c = fd.mul(r[m], inv)
        q[e] = c
        for ge, gc in g.terms.items():
            k = tuple(a + b for a, b in zip(ge, e))
            v = fd.sub(r.get(k, 0), fd.mul(c, gc))
            if v == 0:
                r.pop(k, None)
            else:
                r[k] = v
    return Polynomial(ring, q)


def colon(I: Ideal, J: Ideal) -> Ideal:
    """(I : J) = {f : f J ⊆ I}.

    A zero ``J`` gives the unit ideal with a warning recorded on the result.
    """
    ring = I.ring
    if not ring.same_space(J.ring):
        raise ContextMismatch(f"{I.ring} vs {J.ring}")
    if J.is_zero() or all(I.contains(g) for g in J.gens):
        out = Ideal(ring, [ring.one()])
        if J.is_zero():
            out.warnings.append("colon by the zero ideal; returning the unit ideal")
        return out
    result = None
    for g in J.gens:
        if I.contains(g):
            continue
        inter = intersect(I, Ideal(ring, [g]))
        part = Ideal(ring, [exact_divide(h, g) for h in inter.groebner()])
        result = part if result is None else intersect(result, part)
    return Ideal(ring, result.groebner())


def ideal_combine(I: Ideal, J: Ideal, mode: str, variables=None) -> Ideal:
    ring = I.ring
    if mode != "eliminate" and not ring.same_space(J.ring):
        raise ContextMismatch(f"{I.ring} vs {J.ring}")
    if mode == "sum":
        return Ideal(ring, I.gens + [ring.convert(g) for g in J.gens])
    if mode == "product":
        return Ideal(ring, [f * ring.convert(g) for f in I.gens for g in J.gens])
    if mode == "intersect":
        return intersect(I, J)
    if mode == "eliminate":
        return eliminate(I, variables or [])
    raise ValueError(f"unknown mode {mode!r}")


def krull_dim(I: Ideal) -> int:
    """Dimension of S/I from the leading monomials of the GB (-1 for the unit ideal)."""
    G = I.groebner()
    n = I.ring.nvars
    if any(g.is_constant() for g in G):
        return -1
    supports = [frozenset(i for i, x in enumerate(g.lm()) if x) for g in G]
    for size in range(n, -1, -1):
        for Y in combinations(range(n), size):
            ys = set(Y)
            if not any(s <= ys for s in supports):
                return size
    return 0


def is_regular_element(J: Ideal, f) -> bool:
    """True iff ``f`` is a nonzerodivisor on S/J."""
    f = J.ring.coerce(f)
    if J.contains(f):
        return False
    return ideal_equal(colon(J, Ideal(J.ring, [f])), J)


def regularity_witness(J: Ideal, f):
    """An element of (J : f) outside J, or None when ``f`` is regular."""
    f = J.ring.coerce(f)
    if J.contains(f):
        return J.ring.one()
    C = colon(J, Ideal(J.ring, [f]))
    for g in C.groebner():
        if not J.contains(g):
            return g
    return None


# -- matrices ---------------------------------------------------------------

class PolyMatrix:
    """Rectangular matrix of polynomials over one ring.

    ``row_degrees``/``col_degrees`` optionally record the degree shifts of a
    graded map; an entry (i, j) then has degree col_degrees[j] - row_degrees[i].
    """

    def __init__(self, ring: PolyRing, rows, row_degrees=None, col_degrees=None):
        self.ring = ring
        self.rows = [[ring.coerce(x) for x in r] for r in rows]
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise ArityMismatch("ragged matrix")
        self.nrows = len(self.rows)
        self.ncols = widths.pop() if widths else 0
        self.row_degrees = list(row_degrees) if row_degrees is not None else None
        self.col_degrees = list(col_degrees) if col_degrees is not None else None

    @classmethod
    def zeros(cls, ring, m, n):
        return cls(ring, [[ring.zero() for _ in range(n)] for _ in range(m)])

    @classmethod
    def from_columns(cls, ring, cols, nrows=None):
        cols = list(cols)
        m = nrows if nrows is not None else (len(cols[0]) if cols else 0)
        return cls(ring, [[cols[j][i] for j in range(len(cols))] for i in range(m)])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j):
        return [r[j] for r in self.rows]

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self):
        return PolyMatrix(self.ring, [self.column(j) for j in range(self.ncols)],
                          self.col_degrees and [-d for d in self.col_degrees],
                          self.row_degrees and [-d for d in self.row_degrees])

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise ArityMismatch(f"{self.shape} @ {other.shape}")
        z = self.ring.zero()
        rows = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = z
                for k in range(self.ncols):
                    a = self.rows[i][k]
                    if a:
                        b = other.rows[k][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            rows.append(row)
        return PolyMatrix(self.ring, rows)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def entries(self):
        return [x for r in self.rows for x in r]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.shape == other.shape and all(
            a == b for a, b in zip(self.entries(), other.entries())
        )

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "]"

    __repr__ = __str__


def minors(M: PolyMatrix, size: int):
    """All ``size``×``size`` minors, by memoized cofactor expansion."""
    if not 1 <= size <= min(M.nrows, M.ncols):
        raise SizeOutOfRange(f"minor size {size} for a {M.nrows}x{M.ncols} matrix")
    memo: dict = {}

    def det(rows, cols):
        if len(rows) == 1:
            return M.rows[rows[0]][cols[0]]
        key = (rows, cols)
        if key in memo:
            return memo[key]
        acc = M.ring.zero()
        r0 = rows[0]
        for t, c in enumerate(cols):
            a = M.rows[r0][c]
            if a.is_zero():
                continue
            sub = det(rows[1:], cols[:t] + cols[t + 1 :])
            term = a * sub
            acc = acc - term if t % 2 else acc + term
        memo[key] = acc
        return acc

    out = []
    for rows in combinations(range(M.nrows), size):
        for cols in combinations(range(M.ncols), size):
            out.append(det(rows, cols))
    return out


def minors_ideal(M: PolyMatrix, size: int) -> Ideal:
    return Ideal(M.ring, [d for d in minors(M, size) if not d.is_zero()])


def syzygies(M: PolyMatrix) -> PolyMatrix:
    """Generators of ker(S^n -> S^m) for an m×n matrix, as columns.

    Computed with a module Groebner basis of the graph {(M v, v)} under a
    position-over-term order in which the image coordinates dominate.
    """
    ring = M.ring
    m, n = M.shape
    if n == 0:
        return PolyMatrix(ring, [[] for _ in range(0)])
    key = int_key(ring.order, ring.nvars)
    eng = _Engine(ring.field, key, ncomp=m + n)
    gens = []
    for j in range(n):
        f = {}
        for i in range(m):
            for e, c in M.rows[i][j].terms.items():
                f[e + (i,)] = c
        f[ring._zero_exp + (m + j,)] = ring.field.one
        gens.append(f)
    G = eng.groebner(gens)
    cols = []
    for g in G:
        lead = eng.lead(g)
        if lead[-1] < m:
            continue
        col = [dict() for _ in range(n)]
        for e, c in g.items():
            col[e[-1] - m][e[:-1]] = c
        cols.append([Polynomial(ring, d) for d in col])
    if not cols:
        return PolyMatrix(ring, [[] for _ in range(n)])
    return PolyMatrix.from_columns(ring, cols, n)
