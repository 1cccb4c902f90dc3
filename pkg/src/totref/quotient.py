"""Quotient rings S/J with their standard-monomial realization."""

from __future__ import annotations

import itertools
import random
import threading

import numpy as np

from .errors import CapExceeded, NotArtinian, NotGraded, NotRegular, StillPositiveDimensional, UnitIdeal
from .groebner import Ideal, engine_for_ring, krull_dim, regularity_witness
from .kernel import Polynomial, PolyRing, divides
from .linalg import engine_for

DEFAULT_CAP = 5000


class GradedPieces:
    """Finite-dimensional pieces R_0, ..., R_top with variable actions.

    ``step`` is 1 for a graded ring (a variable maps R_d into R_{d+1}) and
    0 for the ungraded fallback, where everything lives in one piece.
    """

    def __init__(self, ring: "QuotientRing", basis_by_degree, top, graded, truncated):
        self.ring = ring
        self.la = ring.la
        self.graded = graded
        self.step = 1 if graded else 0
        self.truncated = truncated
        if graded:
            self.basis = [list(b) for b in basis_by_degree]
        else:
            self.basis = [[m for b in basis_by_degree for m in b]]
        self.top = len(self.basis) - 1
        self.dims = [len(b) for b in self.basis]
        self.index = [{m: i for i, m in enumerate(b)} for b in self.basis]
        self.nvars = ring.nvars
        self._mult: dict = {}

    def dim(self, d: int) -> int:
        return self.dims[d] if 0 <= d <= self.top else 0

    def mult(self, v: int, d: int):
        """Matrix of multiplication by variable ``v`` from piece d to piece d+step (rows are inputs)."""
        key = (v, d)
        if key not in self._mult:
            t = d + self.step
            rows = self.dim(d)
            cols = self.dim(t)
            M = self.la.zeros((rows, cols))
            if rows and cols:
                e = [0] * self.nvars
                e[v] = 1
                e = tuple(e)
                for i, b in enumerate(self.basis[d]):
                    m = tuple(x + y for x, y in zip(b, e))
                    for mono, c in self.ring.monomial_normal_form(m).items():
                        j = self.index[t].get(mono)
                        if j is None:
                            if self.truncated and sum(mono) > self.top:
                                continue
                            raise AssertionError("normal form left the standard basis")
                        M[i, j] = self.la.from_raw(c)
            self._mult[key] = M
        return self._mult[key]

    def parents(self, d: int):
        """For each basis monomial of piece d: (variable, index of m/variable in piece d-step).

        The degree-0 monomial has parent None.
        """
        out = []
        for m in self.basis[d]:
            if not any(m):
                out.append(None)
                continue
            v = next(i for i, x in enumerate(m) if x)
            par = tuple(x - (1 if i == v else 0) for i, x in enumerate(m))
            src = d - self.step
            out.append((v, src, self.index[src][par]))
        return out


class Realization:
    """Ordered k-basis of an artinian R with one action matrix per variable.

    Row-vector convention: the element with coordinates ``c`` times the
    variable ``v`` has coordinates ``c @ actions[v]``.
    """

    def __init__(self, ring: "QuotientRing", basis, actions, degrees):
        self.ring = ring
        self.basis = basis
        self.index = {m: i for i, m in enumerate(basis)}
        self.actions = actions
        self.degrees = degrees
        self.la = ring.la

    @property
    def length(self):
        return len(self.basis)

    def vector(self, f) -> np.ndarray:
        f = self.ring.normal_form(f)
        v = self.la.zeros((len(self.basis),))
        for e, c in f.terms.items():
            v[self.index[e]] = self.la.from_raw(c)
        return v

    def element(self, vec) -> Polynomial:
        S = self.ring.S
        terms = {}
        for i, c in enumerate(np.asarray(vec).ravel()):
            c = self.la.to_raw(c)
            if c:
                terms[self.basis[i]] = c
        return S.from_terms(terms)

    def monomial_action(self, exp):
        L = len(self.basis)
        A = self.la.eye(L)
        for v, k in enumerate(exp):
            for _ in range(k):
                A = self.la.matmul(A, self.actions[v])
        return A

    def multiplication(self, f):
        """Matrix of multiplication by ``f``."""
        f = self.ring.normal_form(f)
        L = len(self.basis)
        A = self.la.zeros((L, L))
        for e, c in f.terms.items():
            A = self.la.add(A, self.la.scale(c, self.monomial_action(e)))
        return A


class QuotientRing:
    """R = S/J for a proper ideal J of a polynomial ring S."""

    def __init__(self, ideal: Ideal, name: str | None = None, cap: int = DEFAULT_CAP):
        self.S: PolyRing = ideal.ring
        self.ideal = ideal
        self.name = name
        self.cap = cap
        self.field = self.S.field
        self.nvars = self.S.nvars
        self.variables = self.S.variables
        self.la = engine_for(self.field)
        G = ideal.groebner()
        if any(g.is_constant() for g in G):
            raise UnitIdeal(f"{ideal} is the unit ideal")
        self.gb = G
        self.leads = [g.lm() for g in G]
        self.graded = all(g.is_homogeneous() for g in G)
        pure = set()
        for m in self.leads:
            nz = [i for i, x in enumerate(m) if x]
            if len(nz) == 1:
                pure.add(nz[0])
        self.artinian = len(pure) == self.nvars
        self._nf_cache: dict = {}
        self._lock = threading.Lock()
        self._real = None
        self._pieces: dict = {}
        self._std = None
        self._eng = engine_for_ring(self.S)

    def __repr__(self):
        return f"QuotientRing({self.name or ''} {self.S.variables} / {self.ideal})"

    # -- elements -----------------------------------------------------
    def normal_form(self, f) -> Polynomial:
        f = self.S.coerce(f)
        return self.ideal.normal_form(f)

    def monomial_normal_form(self, m):
        r = self._nf_cache.get(m)
        if r is None:
            if not any(divides(l, m) for l in self.leads):
                r = {m: self.field.one}
            else:
                r = self._eng.reduce({m: self.field.one}, [g.terms for g in self.gb], self.leads)
            self._nf_cache[m] = r
        return r

    def is_zero(self, f) -> bool:
        return self.normal_form(f).is_zero()

    def is_standard(self, m) -> bool:
        return not any(divides(l, m) for l in self.leads)

    # -- standard monomials ------------------------------------------
    def standard_monomials_by_degree(self, max_degree: int | None = None):
        """Standard monomials grouped by degree (all of them when artinian)."""
        if max_degree is None:
            if not self.artinian:
                raise NotArtinian("standard_monomials", "give a degree bound")
            if self._std is not None:
                return self._std
        out = []
        layer = [tuple([0] * self.nvars)]
        d = 0
        total = 0
        while layer and (max_degree is None or d <= max_degree):
            out.append(layer)
            total += len(layer)
            if max_degree is None and total > self.cap * 4:
                raise CapExceeded(f"more than {self.cap * 4} standard monomials")
            nxt = set()
            for m in layer:
                for v in range(self.nvars):
                    e = list(m)
                    e[v] += 1
                    e = tuple(e)
                    if self.is_standard(e):
                        nxt.add(e)
            key = self.S.order.key
            layer = sorted(nxt, key=key, reverse=True)
            d += 1
        if max_degree is None:
            self._std = out
        return out

    def standard_monomials(self):
        return [m for layer in self.standard_monomials_by_degree() for m in layer]

    def hilbert(self, max_degree: int | None = None):
        if max_degree is None and not self.artinian:
            raise NotArtinian("hilbert_and_length")
        if not self.graded:
            raise NotGraded("Hilbert function of a non-graded quotient")
        return [len(layer) for layer in self.standard_monomials_by_degree(max_degree)]

    def hilbert_and_length(self):
        h = self.hilbert()
        return h, sum(h)

    @property
    def length(self) -> int:
        if not self.artinian:
            raise NotArtinian("length")
        return sum(len(l) for l in self.standard_monomials_by_degree())

    def krull_dim(self) -> int:
        return krull_dim(self.ideal)

    def embedding_dim(self) -> int:
        """ν(𝔪) = dim 𝔪/𝔪²."""
        if self.graded:
            linear = sum(1 for g in self.gb if g.total_degree() == 1)
            return self.nvars - linear
        real = self.realize()
        la = self.la
        L = real.length
        unit = real.index.get(tuple([0] * self.nvars))
        mask = [i for i in range(L) if i != unit]
        maxideal = la.eye(L)[mask]
        sq = [la.matmul(maxideal, A) for A in real.actions]
        r_m = la.rank(maxideal)
        r_m2 = la.rank(np.vstack(sq)) if sq else 0
        return r_m - r_m2

    # -- realization --------------------------------------------------
    def realize(self) -> Realization:
        if not self.artinian:
            raise NotArtinian("realize")
        with self._lock:
            if self._real is None:
                layers = self.standard_monomials_by_degree()
                basis = [m for layer in layers for m in layer]
                if len(basis) > self.cap:
                    raise CapExceeded(f"length {len(basis)} exceeds the cap {self.cap}")
                index = {m: i for i, m in enumerate(basis)}
                acts = []
                L = len(basis)
                for v in range(self.nvars):
                    A = self.la.zeros((L, L))
                    for i, b in enumerate(basis):
                        m = tuple(x + (1 if k == v else 0) for k, x in enumerate(b))
                        for mono, c in self.monomial_normal_form(m).items():
                            A[i, index[mono]] = self.la.from_raw(c)
                    acts.append(A)
                degrees = [sum(m) for m in basis]
                self._real = Realization(self, basis, acts, degrees)
            return self._real

    def pieces(self, max_degree: int | None = None) -> GradedPieces:
        """Graded pieces (all of them when artinian, else truncated at ``max_degree``)."""
        if self.artinian:
            key = None
        else:
            if max_degree is None:
                raise NotArtinian("pieces", "a degree bound is required")
            if not self.graded:
                raise NotGraded("truncated pieces need a graded ring")
            key = max_degree
        with self._lock:
            if key not in self._pieces:
                layers = self.standard_monomials_by_degree(max_degree if key is not None else None)
                if key is None and sum(len(l) for l in layers) > self.cap:
                    raise CapExceeded(f"length exceeds the cap {self.cap}")
                self._pieces[key] = GradedPieces(self, layers, len(layers) - 1, self.graded, key is not None)
            return self._pieces[key]

    def socle_and_type(self):
        """Basis of (0 : 𝔪) as polynomials, and its dimension r."""
        if not self.artinian:
            raise NotArtinian("socle_and_type")
        real = self.realize()
        la = self.la
        if self.nvars == 0:
            return [self.S.one()], 1
        big = np.hstack(real.actions)
        K = la.left_kernel(big)
        # present the socle with leading-term reduced vectors for stable output
        if K.shape[0]:
            K, _ = la.rref(K[:, ::-1])
            K = K[:, ::-1]
        socle = [real.element(K[i]) for i in range(K.shape[0])]
        return socle, len(socle)

    @property
    def type(self) -> int:
        return self.socle_and_type()[1]

    # -- ideals of R --------------------------------------------------
    def ideal_of(self, gens) -> Ideal:
        """Preimage in S of the ideal of R generated by ``gens``."""
        return Ideal(self.S, [self.S.coerce(g) for g in gens] + list(self.gb))

    def quotient_by(self, gens, name=None) -> "QuotientRing":
        return QuotientRing(self.ideal_of(gens), name=name, cap=self.cap)


def make_quotient(S: PolyRing, J: Ideal | list, name=None, allow_unit=False) -> QuotientRing:
    if not isinstance(J, Ideal):
        J = Ideal(S, J)
    return QuotientRing(J, name=name)


def socle_and_type(R: QuotientRing):
    return R.socle_and_type()


def hilbert_and_length(R: QuotientRing):
    return R.hilbert_and_length()


def realize(R: QuotientRing) -> Realization:
    return R.realize()


def _candidate_forms(S: PolyRing, coeff_bound: int = 3):
    """Single variables first, then combinations with coefficients in {0, ±1, ..., ±bound}."""
    n = S.nvars
    gens = S.gens()
    for g in gens:
        yield g
    values = [0] + [s * k for k in range(1, coeff_bound + 1) for s in (1, -1)]
    for support_size in range(2, n + 1):
        for support in itertools.combinations(range(n), support_size):
            for coeffs in itertools.product(values[1:], repeat=support_size):
                if coeffs[0] != 1:
                    continue  # forms are taken up to scaling
                f = S.zero()
                for i, c in zip(support, coeffs):
                    f = f + gens[i].scale(c)
                yield f


def find_regular_form(R: QuotientRing, coeff_bound: int = 3, limit: int = 5000, seed=None):
    """First linear form regular on R in the search order.

    The order is fixed (variables, then small combinations); a seed shuffles
    the candidate list reproducibly.
    """
    cands = itertools.islice(_candidate_forms(R.S, coeff_bound), limit)
    if seed is not None:
        cands = list(cands)
        random.Random(seed).shuffle(cands)
    for f in cands:
        if regularity_witness(R.ideal, f) is None:
            return f
    return None


def artinian_reduction(R: QuotientRing, forms=None, search: bool = True, seed=None):
    """Cut R down by regular linear forms until it is artinian.

    Returns ``(Rbar, d, forms_used)``; the Poincare series of k satisfies
    P^R(t) = (1+t)^d * P^Rbar(t).
    """
    current = R
    used = []
    forms = list(forms or [])
    for f in forms:
        f = R.S.coerce(f)
        w = regularity_witness(current.ideal, f)
        if w is not None:
            raise NotRegular(str(f), str(w))
        current = current.quotient_by([f], name=(R.name or "R") + "bar")
        used.append(f)
    while not current.artinian:
        if not search:
            raise StillPositiveDimensional(f"still of dimension {current.krull_dim()} after {len(used)} forms")
        f = find_regular_form(current, seed=seed)
        if f is None:
            raise StillPositiveDimensional("no regular linear form found in the search range")
        current = current.quotient_by([f], name=(R.name or "R") + "bar")
        used.append(f)
    return current, len(used), used
