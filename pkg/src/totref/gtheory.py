"""Certificates for Gorenstein-dimension questions over artinian quotient rings.

Ideals of an artinian ring R are handled as subspaces of its realization, so
annihilators, products, minimal generator counts and equality are plain
linear algebra.  Every Ext-vanishing statement is bounded: ``verified(N)``
means nothing was found up to index N, while a refutation is exact and
carries the index and dimension that witness it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .errors import HypothesisFailed, NotArtinian, UnitIdeal
from .fpmodule import (
    DEFAULT_BOUND,
    FPModule,
    _complement,
    bass_dims,
    biduality_iso,
    dual,
    ext_dims,
)
from .groebner import Ideal, colon, ideal_equal
from .quotient import QuotientRing, artinian_reduction
from .series import RationalSeriesExpr, SeriesTrunc, compare, compare_scaled

VERIFIED = "verified"
REFUTED = "refuted"
FULL_PROOF = "full-proof"
INDETERMINATE = "indeterminate"


@dataclass
class Certificate:
    kind: str
    status: str
    bound: int | None = None
    witness: dict | None = None
    data: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status in (VERIFIED, FULL_PROOF)

    def __bool__(self):
        return self.passed

    def __str__(self):
        tag = f"{self.status}({self.bound})" if self.status == VERIFIED and self.bound is not None else self.status
        return f"{self.kind}: {tag}"

    def to_dict(self):
        out = {"kind": self.kind, "status": self.status, "bound": self.bound}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        out["data"] = _jsonable(self.data)
        out["params"] = _jsonable(self.params)
        return out


def _jsonable(x):
    if isinstance(x, Certificate):
        return x.to_dict()
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, SeriesTrunc):
        return list(x.coeffs)
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (np.integer,)):
        return int(x)
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


def _params(R: QuotientRing, N=None, **extra):
    out = {"field": R.S.field.name, "engine": "graded" if R.graded else "ungraded"}
    if N is not None:
        out["N"] = N
    out.update(extra)
    return out


@dataclass(frozen=True)
class AtLeast:
    """A lower bound reported when no obstruction was found up to the search bound."""

    value: int

    def __str__(self):
        return f">={self.value}"


# -- ideals of an artinian ring as subspaces ---------------------------------

def _generators(R: QuotientRing, I) -> list:
    S = R.S
    if isinstance(I, Ideal):
        gens = I.gens
    elif isinstance(I, str):
        gens = Ideal.parse(S, I).gens
    else:
        gens = [S.coerce(g) for g in I]
    return [g for g in (R.normal_form(g) for g in gens) if not g.is_zero()]


class IdealSpace:
    """An ideal of an artinian ring, stored as a reduced row basis of its k-span."""

    def __init__(self, R: QuotientRing, rows):
        self.R = R
        la = R.la
        L = R.realize().length
        rows = rows if rows is not None and len(rows) else la.zeros((0, L))
        if rows.shape[0]:
            rows, piv = la.rref(rows)
            rows = rows[: len(piv)]
        self.basis = rows

    @classmethod
    def generated(cls, R: QuotientRing, I) -> "IdealSpace":
        if not R.artinian:
            raise NotArtinian("ideal span")
        real = R.realize()
        la = R.la
        gens = _generators(R, I)
        if not gens:
            return cls(R, None)
        V = cls(R, np.vstack([real.vector(g) for g in gens])).basis
        while True:
            grown = cls(R, np.vstack([V] + [la.matmul(V, A) for A in real.actions])).basis
            if grown.shape[0] == V.shape[0]:
                return cls(R, V)
            V = grown

    @classmethod
    def annihilator(cls, R: QuotientRing, I) -> "IdealSpace":
        """(0 :_R I)."""
        if not R.artinian:
            raise NotArtinian("annihilator")
        real = R.realize()
        la = R.la
        gens = I.generators() if isinstance(I, IdealSpace) else _generators(R, I)
        if not gens:
            return cls.unit(R)
        K = la.left_kernel(np.hstack([real.multiplication(g) for g in gens]))
        return cls(R, K)

    @classmethod
    def unit(cls, R):
        return cls(R, R.la.eye(R.realize().length))

    @classmethod
    def maximal(cls, R):
        return cls.generated(R, R.S.gens())

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def is_zero(self):
        return self.dim == 0

    def times_max(self) -> "IdealSpace":
        la = self.R.la
        if self.is_zero():
            return self
        acts = self.R.realize().actions
        return IdealSpace(self.R, np.vstack([la.matmul(self.basis, A) for A in acts]))

    def __mul__(self, other: "IdealSpace") -> "IdealSpace":
        la = self.R.la
        real = self.R.realize()
        gens = self.generators()
        if not gens or other.is_zero():
            return IdealSpace(self.R, None)
        return IdealSpace(self.R, np.vstack([la.matmul(other.basis, real.multiplication(g)) for g in gens]))

    def __add__(self, other):
        return IdealSpace(self.R, np.vstack([self.basis, other.basis]))

    def __eq__(self, other):
        if not isinstance(other, IdealSpace):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.basis, other.basis))

    def __hash__(self):
        return hash((self.dim, self.basis.tobytes()))

    def contains(self, other: "IdealSpace") -> bool:
        return (self + other).dim == self.dim

    def generator_vectors(self):
        return _complement(self.R.la, self.basis, self.times_max().basis)

    def generators(self) -> list:
        """Minimal generators (a k-basis of I/𝔪I lifted to I)."""
        real = self.R.realize()
        return [real.element(v) for v in self.generator_vectors()]

    @property
    def nu(self) -> int:
        return self.dim - self.times_max().dim

    def to_ideal(self) -> Ideal:
        """Preimage in the polynomial ring."""
        return self.R.ideal_of(self.generators())

    def colength(self) -> int:
        return self.R.realize().length - self.dim


def annihilator(R: QuotientRing, I) -> list:
    """Minimal generators of (0 :_R I)."""
    return IdealSpace.annihilator(R, I).generators()


def ideal_nu(R: QuotientRing, I) -> int:
    """Minimal number of generators of the ideal I of R.

    Artinian rings use the realization; graded rings of positive dimension
    compare Hilbert functions of S/(J + I) and S/(J + 𝔪I) up to the top
    generator degree, where (I + J)/(𝔪I + J) lives.
    """
    gens = _generators(R, I)
    if R.artinian:
        return IdealSpace.generated(R, gens).nu
    if not R.graded:
        raise NotArtinian("ideal_nu", "ungraded input needs an artinian ring")
    top = max((g.total_degree() for g in gens), default=0)
    mI = [v * g for g in gens for v in R.S.gens()]
    a = QuotientRing(R.ideal_of(gens)).hilbert(top)
    b = QuotientRing(R.ideal_of(mI)).hilbert(top)
    return sum(b) - sum(a)


def ideal_equal_in(R: QuotientRing, I, J) -> bool:
    return IdealSpace.generated(R, I) == IdealSpace.generated(R, J)


def _cyclic(R, gens, name=None):
    return FPModule.cyclic(R, gens, name=name)


def _first_nonzero_ext(M: FPModule, N: int):
    """(index, dim) of the first nonvanishing Ext^i(M, R), 1 <= i <= N, or None."""
    if N < 1:
        return None
    # Ext^1 alone first: it is cheap and catches most obstructions
    d1 = ext_dims(M, [1])[0]
    if d1:
        return 1, d1
    if N == 1:
        return None
    dims = ext_dims(M, range(2, N + 1))
    for i, d in enumerate(dims, start=2):
        if d:
            return i, d
    return None


# -- grade and quasi-Gorenstein ideals -----------------------------------------

def grade_of(I, R: QuotientRing, N: int = DEFAULT_BOUND):
    if not R.artinian:
        raise NotArtinian("grade_of")
    gens = _generators(R, I)
    if IdealSpace.generated(R, gens).colength() == 0:
        raise UnitIdeal("grade_of needs a proper ideal")
    if not IdealSpace.annihilator(R, gens).is_zero():
        return 0
    # unreachable for a proper ideal of an artinian local ring (the socle
    # kills it), kept for completeness
    hit = _first_nonzero_ext(_cyclic(R, gens), N)
    return hit[0] if hit else AtLeast(N + 1)


def is_quasi_gorenstein(I, R: QuotientRing, N: int = DEFAULT_BOUND) -> Certificate:
    """Bounded quasi-Gorenstein certificate for a grade-zero ideal."""
    if not R.artinian:
        raise NotArtinian("is_quasi_gorenstein")
    params = _params(R, N)
    gens = _generators(R, I)
    Ispace = IdealSpace.generated(R, gens)
    if Ispace.colength() == 0:
        raise UnitIdeal("is_quasi_gorenstein needs a proper ideal")
    A = IdealSpace.annihilator(R, gens)
    data = {"ideal": [str(g) for g in gens], "grade": 0}
    if A.is_zero():
        g = grade_of(gens, R, N)
        return Certificate("quasi-gorenstein", INDETERMINATE, N,
                           {"check": "grade", "grade": str(g)}, data, params)
    ann_gens = A.generators()
    data["annihilator"] = [str(g) for g in ann_gens]
    data["annihilator_nu"] = len(ann_gens)
    if len(ann_gens) != 1:
        return Certificate("quasi-gorenstein", REFUTED, N,
                           {"check": "annihilator principal", "nu": len(ann_gens),
                            "generators": data["annihilator"]}, data, params)
    y = ann_gens[0]
    # R -> (0:I), 1 -> y is onto with kernel (0:y); it induces R/I ~ (0:I) iff (0:y) = I
    double = IdealSpace.annihilator(R, [y])
    data["length_quotient"] = Ispace.colength()
    data["length_annihilator"] = A.dim
    data["double_colon"] = double == Ispace
    if not data["double_colon"]:
        extra = [str(g) for g in double.generators()]
        return Certificate("quasi-gorenstein", REFUTED, N,
                           {"check": "(0:(0:I)) = I", "double_colon": extra}, data, params)
    if data["length_quotient"] != data["length_annihilator"]:
        return Certificate("quasi-gorenstein", REFUTED, N,
                           {"check": "length R/I = length (0:I)"}, data, params)
    hit = _first_nonzero_ext(_cyclic(R, gens), N)
    if hit:
        return Certificate("quasi-gorenstein", REFUTED, N,
                           {"check": "Ext vanishing", "index": hit[0], "dimension": hit[1]}, data, params)
    return Certificate("quasi-gorenstein", VERIFIED, N, None, data, params)


def colon_stability(I, R: QuotientRing) -> bool:
    """(0 : I²) = (0 : I)."""
    if not R.artinian:
        raise NotArtinian("colon_stability")
    Ispace = IdealSpace.generated(R, I)
    if Ispace.is_zero():
        return True
    return IdealSpace.annihilator(R, Ispace * Ispace) == IdealSpace.annihilator(R, Ispace)


def _exact_pair_by_colons(x, y, R: QuotientRing, data, params) -> Certificate:
    """Same test on preimages in S: (J : x) = J + (y) and (J : y) = J + (x)."""
    J = R.ideal
    for a, b, label in ((x, y, "(0:x) = (y)"), (y, x, "(0:y) = (x)")):
        ann = colon(J, R.ideal_of([a]))
        if not ideal_equal(ann, R.ideal_of([b])):
            gens = [str(g) for g in (R.normal_form(f) for f in ann.groebner()) if not g.is_zero()]
            return Certificate("exact-pair", REFUTED, None, {"check": label, "annihilator": gens}, data, params)
    data["method"] = "Groebner colon"
    data["note"] = "2-periodic complete resolution; R/(x) and R/(y) are totally reflexive"
    return Certificate("exact-pair", FULL_PROOF, None, None, data, params)


def exact_pair_check(x, y, R: QuotientRing) -> Certificate:
    S = R.S
    x, y = R.normal_form(S.coerce(x)), R.normal_form(S.coerce(y))
    params = _params(R)
    data = {"x": str(x), "y": str(y)}
    if not R.artinian:
        return _exact_pair_by_colons(x, y, R, data, params)
    ann_x = IdealSpace.annihilator(R, [x])
    ann_y = IdealSpace.annihilator(R, [y])
    data["ann_x"] = [str(g) for g in ann_x.generators()]
    data["ann_y"] = [str(g) for g in ann_y.generators()]
    if ann_x != IdealSpace.generated(R, [y]):
        return Certificate("exact-pair", REFUTED, None, {"check": "(0:x) = (y)", "ann_x": data["ann_x"]}, data, params)
    if ann_y != IdealSpace.generated(R, [x]):
        return Certificate("exact-pair", REFUTED, None, {"check": "(0:y) = (x)", "ann_y": data["ann_y"]}, data, params)
    data["note"] = "2-periodic complete resolution; R/(x) and R/(y) are totally reflexive"
    return Certificate("exact-pair", FULL_PROOF, None, None, data, params)


# -- total reflexivity -----------------------------------------------------------

def tref_certificate(M: FPModule, R: QuotientRing | None = None, N: int = DEFAULT_BOUND) -> Certificate:
    R = R or M.ring
    if not R.artinian:
        raise NotArtinian("tref_certificate")
    params = _params(R, N)
    data = {"module": M.name or str(M.matrix), "length": M.length}
    hit = _first_nonzero_ext(M, N)
    if hit:
        return Certificate("totally-reflexive", REFUTED, N,
                           {"module": "M", "index": hit[0], "dimension": hit[1]}, data, params)
    Md = dual(M, name=f"{M.name or 'M'}*")
    data["dual_length"] = Md.length
    hit = _first_nonzero_ext(Md, N)
    if hit:
        return Certificate("totally-reflexive", REFUTED, N,
                           {"module": "M*", "index": hit[0], "dimension": hit[1]}, data, params)
    bid = biduality_iso(M)
    data["biduality"] = bool(bid)
    if not bid:
        return Certificate("totally-reflexive", REFUTED, N,
                           {"check": "biduality", "lengths": bid.lengths, "detail": bid.witness}, data, params)
    return Certificate("totally-reflexive", VERIFIED, N, None, data, params)


# -- theorem verifiers -------------------------------------------------------------

def _reduce_if_needed(R: QuotientRing, seed=None):
    if R.artinian:
        return R, 0, []
    Rbar, d, used = artinian_reduction(R, seed=seed)
    return Rbar, d, used


def _lift_by_forms(series, d, N):
    """Multiply by (1+t)^d, as each regular linear form does to P_k."""
    out = [0] * (N + 1)
    for i in range(N + 1):
        out[i] = sum(comb(d, j) * series[i - j] for j in range(0, min(d, i) + 1) if i - j < len(series))
    return out


def _betti_k(R: QuotientRing, N: int):
    k = FPModule.residue_field(R)
    return k.betti(N)


def _require_non_gorenstein(R):
    r = R.type
    if r < 2:
        raise HypothesisFailed("non-Gorenstein (type r >= 2)", {"type": r})
    return r


def _require_square_kills(M: FPModule):
    if not M.annihilated_by_square_of_max_ideal():
        raise HypothesisFailed("m^2 M = 0", {"module": M.name or str(M.matrix)})


def _require_tref(M: FPModule, R, N):
    cert = tref_certificate(M, R, N)
    if not cert.passed:
        raise HypothesisFailed("totally reflexive (bounded certificate)", cert.to_dict())
    return cert


def _reduce_module(M: FPModule, Rbar: QuotientRing) -> FPModule:
    return FPModule(Rbar, M.matrix.rows, gen_degrees=M.gen_degrees, name=(M.name or "M") + "bar")


def verify_main1(R: QuotientRing, M: FPModule, N: int = 8, seed=None) -> Certificate:
    """β_i(k) against the expansion of P_M(t)(1+t)^d / (ν(M)(1 - rt)), cross-multiplied."""
    Rbar, d, forms = _reduce_if_needed(R, seed)
    Mbar = M if d == 0 else _reduce_module(M, Rbar)
    params = _params(R, N, reduction_forms=[str(f) for f in forms])
    r = _require_non_gorenstein(Rbar)
    if Mbar.length == 0:
        raise HypothesisFailed("M nonzero")
    if not Mbar.annihilated_by_square_of_max_ideal():
        if d:
            return Certificate("main-theorem-1", INDETERMINATE, N,
                               {"hypothesis": "m^2 M in qM", "status": "hypothesis-not-established",
                                "parameter_ideal": [str(f) for f in forms]}, {}, params)
        _require_square_kills(Mbar)
    tref = _require_tref(Mbar, Rbar, N)
    nu = Mbar.nu
    PM = Mbar.betti(N)
    bk = _lift_by_forms(_betti_k(Rbar, N), d, N)
    # ν·β(k)·(1 - rt) = P_M (1+t)^d, compared as integers
    lhs = SeriesTrunc([nu * b for b in bk], N) * SeriesTrunc([1, -r], N)
    rhs = SeriesTrunc(_lift_by_forms(PM, d, N), N)
    cmp = compare(lhs, rhs)
    expected = [Fraction(c, nu) for c in (rhs / SeriesTrunc([1, -r], N)).coeffs]
    data = {
        "type": r, "dimension": d, "nu": nu, "poincare_M": PM, "betti_k": bk,
        "expected": expected,
        "formula": f"P_M(t)*(1+t)^{d}/({nu}*(1-{r}*t))",
        "comparison": cmp.to_dict(), "tref": tref.to_dict(),
    }
    if not cmp:
        return Certificate("main-theorem-1", REFUTED, N, cmp.to_dict(), data, params)
    return Certificate("main-theorem-1", VERIFIED, N, None, data, params)


def verify_poincare_ratio(R: QuotientRing, M: FPModule, M2: FPModule, N: int = 8) -> Certificate:
    """P_M/ν(M) = P_M'/ν(M') as the integer identity ν(M')β_i(M) = ν(M)β_i(M')."""
    params = _params(R, N)
    for X in (M, M2):
        _require_square_kills(X)
        _require_tref(X, R, N)
    a, b = M.betti(N), M2.betti(N)
    nu_a, nu_b = M.nu, M2.nu
    cmp = compare([nu_b * x for x in a], [nu_a * x for x in b])
    data = {"poincare_M": a, "poincare_M2": b, "nu": [nu_a, nu_b], "comparison": cmp.to_dict()}
    return Certificate("poincare-ratio", VERIFIED if cmp else REFUTED, N, None if cmp else cmp.to_dict(), data, params)


def verify_betti_bound(R: QuotientRing, M: FPModule, N_mod: FPModule, bound: int = 8) -> Certificate:
    """Betti numbers of a totally reflexive N against C·P_M.

    Pass/fail follows the inequality after dividing by (1 - rt); the plain
    coefficientwise P_N ≼ C·P_M is computed as well and reported.
    """
    if not R.artinian:
        raise NotArtinian("verify_betti_bound", "reduce to an artinian ring first")
    params = _params(R, bound)
    r = _require_non_gorenstein(R)
    _require_square_kills(M)
    _require_tref(M, R, bound)
    _require_tref(N_mod, R, bound)
    nu = M.nu
    lN = N_mod.length
    lNd = dual(N_mod).length
    C = Fraction(r * lN - lNd, (r * r - 1) * nu)
    PN, PM = N_mod.betti(bound), M.betti(bound)
    geo = SeriesTrunc([1, -r], bound)
    left = (SeriesTrunc(PN, bound) / geo).coeffs
    right = (SeriesTrunc(PM, bound) / geo).coeffs
    weak = compare_scaled(left, right, C)
    strong = compare_scaled(PN, PM, C)
    data = {"C": C, "type": r, "nu_M": nu, "length_N": lN, "length_N_dual": lNd,
            "poincare_N": PN, "poincare_M": PM,
            "after_division": weak.to_dict(), "coefficientwise": strong.to_dict()}
    if R.graded and N_mod.graded:
        C2 = Fraction(lN, (r + 1) * nu)
        data["C_graded"] = C2
        data["C_consistent"] = C == C2
        if C != C2:
            return Certificate("betti-bound", REFUTED, bound, {"check": "graded constant", "C": C, "C_graded": C2},
                               data, params)
    if not weak:
        return Certificate("betti-bound", REFUTED, bound, weak.to_dict(), data, params)
    return Certificate("betti-bound", VERIFIED, bound, None, data, params)


def _square_inside(R: QuotientRing, I) -> bool:
    """𝔪² ⊆ I, tested on the products of two variables."""
    J = R.ideal_of(_generators(R, I))
    gens = R.S.gens()
    return all(J.contains(a * b) for i, a in enumerate(gens) for b in gens[i:])


def verify_l22(R: QuotientRing, I, N: int = DEFAULT_BOUND) -> Certificate:
    """ν(𝔪) = ν(I) + r, ℓ(𝔪/I) = r and 𝔪² = I𝔪 for I ⊇ 𝔪² with R/I totally reflexive."""
    if not R.artinian:
        raise NotArtinian("verify_l22")
    params = _params(R, N)
    r = _require_non_gorenstein(R)
    gens = _generators(R, I)
    if not _square_inside(R, gens):
        raise HypothesisFailed("m^2 contained in I", {"ideal": [str(g) for g in gens]})
    tref = _require_tref(_cyclic(R, gens), R, N)
    Isp = IdealSpace.generated(R, gens)
    m = IdealSpace.maximal(R)
    checks = {
        "nu_m = nu_I + r": (m.nu, Isp.nu + r),
        "length(m/I) = r": (m.dim - Isp.dim, r),
        "m^2 = I m": (m.times_max().dim, (Isp * m).dim),
    }
    data = {"type": r, "nu_m": m.nu, "nu_I": Isp.nu, "checks": {k: list(v) for k, v in checks.items()},
            "tref": tref.to_dict()}
    for name, (a, b) in checks.items():
        if a != b:
            return Certificate("type-identities", REFUTED, N, {"check": name, "left": a, "right": b}, data, params)
    # equal dimensions plus 𝔪I ⊆ 𝔪² give equality of the ideals
    if not m.times_max().contains(Isp * m):
        return Certificate("type-identities", REFUTED, N, {"check": "I m inside m^2"}, data, params)
    return Certificate("type-identities", VERIFIED, N, None, data, params)


def verify_large(R: QuotientRing, I, N: int = DEFAULT_BOUND) -> Certificate:
    """Levin's factorization P^R_k = P^R_{R/I} · P^{R/I}_k, coefficientwise to N."""
    if not R.artinian:
        raise NotArtinian("verify_large")
    params = _params(R, N)
    gens = _generators(R, I)
    if IdealSpace.generated(R, gens).colength() == 0:
        raise UnitIdeal("verify_large needs a proper ideal")
    Rq = R.quotient_by(gens, name=(R.name or "R") + "/I")
    bk = _betti_k(R, N)
    bq = _cyclic(R, gens).betti(N)
    bkq = _betti_k(Rq, N)
    prod = SeriesTrunc(bq, N) * SeriesTrunc(bkq, N)
    cmp = compare(bk, prod)
    data = {"betti_k": bk, "poincare_R_mod_I": bq, "betti_k_over_R_mod_I": bkq, "product": prod,
            "comparison": cmp.to_dict()}
    if not cmp:
        return Certificate("large-homomorphism", REFUTED, N, cmp.to_dict(), data, params)
    return Certificate("large-homomorphism", VERIFIED, N, None, data, params)


def t22_series(nu_m: int, r: int, d: int, N: int) -> tuple[RationalSeriesExpr, SeriesTrunc]:
    """(1 - t²)^d / ((1 - t)^(ν(𝔪) - r) (1 - rt)) and its expansion."""
    factors = [(1, 2, d), (1, 1, -(nu_m - r)), (r, 1, -1)]
    expr = RationalSeriesExpr.from_factors([1], [f for f in factors if f[2]])
    return expr, expr.expand(N)


def verify_t22(R: QuotientRing, I, N: int = 8, seed=None) -> Certificate:
    """Closed formula for β(k) when I ⊇ 𝔪² is quasi-complete intersection.

    The quasi-complete intersection property itself is taken as an input
    assumption; only 𝔪² ⊆ I is checked.
    """
    gens = _generators(R, I)
    if not _square_inside(R, gens):
        raise HypothesisFailed("m^2 contained in I", {"ideal": [str(g) for g in gens]})
    Rbar, d, forms = _reduce_if_needed(R, seed)
    nu_m = R.embedding_dim()
    r = Rbar.type
    params = _params(R, N, reduction_forms=[str(f) for f in forms])
    expr, formula = t22_series(nu_m, r, d, N)
    bk = _lift_by_forms(_betti_k(Rbar, N), d, N)
    cmp = compare(bk, formula)
    data = {"nu_m": nu_m, "type": r, "dimension": d, "formula": str(expr), "expansion": formula,
            "betti_k": bk, "comparison": cmp.to_dict(), "assumption": "I is quasi-complete intersection"}
    if not cmp:
        return Certificate("residue-field-formula", REFUTED, N, cmp.to_dict(), data, params)
    return Certificate("residue-field-formula", VERIFIED, N, None, data, params)


def verify_type_lemma(R: QuotientRing, M: FPModule, N: int = 5) -> Certificate:
    """dim 𝔪M = r·ν(M) and Bass numbers of R from (r - t)/(1 - rt)."""
    if not R.artinian:
        raise NotArtinian("verify_type_lemma")
    params = _params(R, N)
    r = _require_non_gorenstein(R)
    _require_square_kills(M)
    tref = _require_tref(M, R, max(N, 1))
    nu = M.nu
    mM = M.length - nu
    bass = bass_dims(R, range(0, N + 1))
    expr = RationalSeriesExpr.from_factors([r, -1], [(r, 1, -1)])
    expected = expr.expand(N)
    cmp = compare(bass, expected)
    data = {"type": r, "nu": nu, "dim_mM": mM, "bass": bass, "formula": str(expr), "expansion": expected,
            "comparison": cmp.to_dict(), "tref": tref.to_dict()}
    if mM != r * nu:
        return Certificate("type-lemma", REFUTED, N, {"check": "dim mM = r nu(M)", "left": mM, "right": r * nu},
                           data, params)
    if not cmp:
        return Certificate("type-lemma", REFUTED, N, cmp.to_dict(), data, params)
    return Certificate("type-lemma", VERIFIED, N, None, data, params)
