"""Families of totally reflexive modules presented by block matrices T(x, y, a).

For a grade-zero quasi-Gorenstein ideal I = (x_1..x_r) with (0:I) = (y), the
matrix T(x, y, a) has n diagonal copies of the row (x_1 .. x_r), a last column
(a_1 .. a_n, y) and a bottom row that is zero except for y.  Its cokernel sits
in 0 -> (R/I)^n -> M -> R/(y) -> 0, and twisting a_1 by u·b gives pairwise
non-isomorphic indecomposable modules as u runs through the prime field.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import flint
import numpy as np

from .errors import NotArtinian, PreconditionFailed, SpecInvalid
from .fpmodule import FPModule, _project, minimize_presentation
from .groebner import PolyMatrix
from .gtheory import (
    REFUTED,
    VERIFIED,
    Certificate,
    IdealSpace,
    _generators,
    _params,
    colon_stability,
    is_quasi_gorenstein,
    tref_certificate,
)
from .quotient import QuotientRing


def build_T(xs, y, a, R: QuotientRing | None = None) -> PolyMatrix:
    """The (n+1) × (nr+1) matrix T(x, y, a).

    With ``R`` given, the precondition a_i ∈ (I : (0:y)) is checked.
    """
    if R is not None:
        S = R.S
    else:
        S = next(p.ring for p in list(xs) + [y] + list(a) if hasattr(p, "ring"))
    xs = [S.coerce(x) for x in xs]
    a = [S.coerce(v) for v in a]
    y = S.coerce(y)
    r, n = len(xs), len(a)
    if r < 1 or n < 1:
        raise ValueError("build_T needs at least one x and one a")
    if R is not None:
        _check_colon_condition(R, xs, y, a)
    zero = S.zero()
    rows = []
    for i in range(n):
        row = [zero] * (n * r + 1)
        row[i * r : (i + 1) * r] = xs
        row[-1] = a[i]
        rows.append(row)
    rows.append([zero] * (n * r) + [y])
    return PolyMatrix(S, rows)


def _check_colon_condition(R, xs, y, a):
    I = IdealSpace.generated(R, xs)
    ann_y = IdealSpace.annihilator(R, [y])
    real = R.realize()
    for ai in a:
        if ann_y.is_zero():
            break
        prod = R.la.matmul(ann_y.basis, real.multiplication(ai))
        if not I.contains(IdealSpace(R, prod)):
            for v in ann_y.basis:
                z = real.element(v)
                if not I.contains(IdealSpace.generated(R, [z * ai])):
                    raise PreconditionFailed(f"{ai} is not in (I : (0:y))", f"{ai}*({z}) is not in I")
            raise PreconditionFailed(f"{ai} is not in (I : (0:y))")


def nu_of_elements(Rbar: QuotientRing, elems) -> int:
    """Minimal number of generators of the ideal of Rbar generated by ``elems``."""
    if not Rbar.artinian:
        raise NotArtinian("nu_of_elements")
    return IdealSpace.generated(Rbar, elems).nu


@dataclass
class FamilySpec:
    R: QuotientRing
    I: list
    y: object
    a: list
    b: object
    us: list
    name: str = "M"
    checked: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.a)

    @property
    def r(self):
        return len(self.I)

    def __post_init__(self):
        S = self.R.S
        self.I = [S.coerce(g) for g in (_generators(self.R, self.I) if not isinstance(self.I, list) else self.I)]
        self.y = S.coerce(self.y)
        self.a = [S.coerce(v) for v in self.a]
        self.b = S.coerce(self.b)
        self.us = list(self.us)

    def reduced_ring(self) -> QuotientRing:
        """R̄ = R/(I + (y))."""
        if "Rbar" not in self.checked:
            self.checked["Rbar"] = self.R.quotient_by(self.I + [self.y], name="Rbar")
        return self.checked["Rbar"]

    def twisted(self, u):
        return [self.a[0] + self.b.scale(u)] + self.a[1:]

    def validate(self):
        """Check (y) = (0:I) and the generator counts the construction consumes."""
        R = self.R
        if not R.artinian:
            raise NotArtinian("FamilySpec")
        if not self.I or not self.a:
            raise SpecInvalid("need a nonempty ideal I and at least one element a")
        if IdealSpace.annihilator(R, self.I) != IdealSpace.generated(R, [self.y]):
            raise SpecInvalid(f"(0:I) is not generated by y = {self.y}")
        Rbar = self.reduced_ring()
        full = nu_of_elements(Rbar, self.a + [self.b])
        self.checked["nu_a_b"] = full
        if full != self.n + 1:
            raise SpecInvalid(f"nu over R/(I+(y)) of (a, b) is {full}, expected {self.n + 1}")
        for u in self.us:
            nu = nu_of_elements(Rbar, self.twisted(u))
            if nu != self.n:
                raise SpecInvalid(f"nu over R/(I+(y)) of the twisted elements at u={u} is {nu}, expected {self.n}")
        self.checked["valid"] = True
        return self


def build_family(spec: FamilySpec) -> list:
    if not spec.checked.get("valid"):
        spec.validate()
    out = []
    for u in spec.us:
        T = build_T(spec.I, spec.y, spec.twisted(u), spec.R)
        M = minimize_presentation(FPModule(spec.R, T, name=f"{spec.name}_{u}"))
        M.name = f"{spec.name}_{u}"
        M.source_matrix = T
        M.parameter = u
        out.append(M)
    return out


def fitting_distinct(Mu: FPModule, Mv: FPModule) -> bool:
    """Do the ideals of entries of the two presentations differ (Fitting invariant)?"""
    R = Mu.ring

    def entries(M):
        mat = M.matrix
        gens = [f for row in mat.rows for f in row if not f.is_zero()]
        return R.ideal_of(gens)

    return entries(Mu) != entries(Mv)


# -- checks on a realized module ---------------------------------------------

def _total(M: FPModule):
    """Full action matrices of M and the images of its generators, in one coordinate system."""
    Mr = M.realize()
    la = M.ring.la
    mats, offs = Mr.total_actions(M.ring.nvars)
    L = Mr.length
    F = Mr.free
    gens = la.zeros((M.ngens, L))
    pos = {orig: p for p, orig in enumerate(F.order)}
    for i in range(M.ngens):
        j = M.gen_degrees[i] if F.step else 0
        if j not in Mr.proj:
            continue
        p = pos[i]
        for a, n, g0, off, d in F.layout(j)[0]:
            if g0 <= p < g0 + n:
                basis = F.pieces.basis[d]
                k = basis.index(tuple([0] * M.ring.nvars))
                X = la.zeros((1, F.dim(j)))
                X[0, off + (p - g0) * len(basis) + k] = 1
                img = _project(la, X, Mr.proj[j])
                gens[i, offs[j] : offs[j] + img.shape[1]] = img[0]
    return mats, gens


def _span(la, rows):
    if rows.shape[0] == 0:
        return rows
    R, piv = la.rref(rows)
    return R[: len(piv)]


def _submodule(la, mats, rows):
    V = _span(la, rows)
    while V.shape[0]:
        W = _span(la, np.vstack([V] + [la.matmul(V, A) for A in mats]))
        if W.shape[0] == V.shape[0]:
            break
        V = W
    return V


def _poly_action(la, mats, f, L):
    out = la.zeros((L, L))
    for e, c in f.terms.items():
        A = la.eye(L)
        for v, k in enumerate(e):
            for _ in range(k):
                A = la.matmul(A, mats[v])
        out = la.add(out, la.scale(c, A))
    return out


def exact_sequence_witness(spec: FamilySpec, M: FPModule) -> dict:
    """Certify 0 -> (R/I)^n -> M -> R/(y) -> 0 for M = coker T (generators e_1..e_{n+1}).

    K is the submodule generated by e_1..e_n.  R/(y) maps onto M/K via the last
    generator and (R/I)^n onto K; both are isomorphisms once lengths agree.
    """
    R = spec.R
    la = R.la
    n = spec.n
    T = getattr(M, "source_matrix", None)
    Mt = FPModule(R, T) if T is not None else M
    mats, gens = _total(Mt)
    L = gens.shape[1]
    K = _submodule(la, mats, gens[:n])
    mK = _span(la, np.vstack([la.matmul(K, A) for A in mats])) if K.shape[0] else K
    killed = all(la.is_zero(la.matmul(K, _poly_action(la, mats, x, L))) for x in spec.I) if K.shape[0] else True
    y_last = la.matmul(gens[n : n + 1], _poly_action(la, mats, spec.y, L))
    y_in_K = _span(la, np.vstack([K, y_last])).shape[0] == K.shape[0]
    len_RI = IdealSpace.generated(R, spec.I).colength()
    len_Ry = IdealSpace.generated(R, [spec.y]).colength()
    out = {
        "kernel_length": int(K.shape[0]),
        "expected_kernel_length": n * len_RI,
        "kernel_nu": int(K.shape[0] - mK.shape[0]),
        "kernel_killed_by_I": bool(killed),
        "cokernel_length": L - int(K.shape[0]),
        "expected_cokernel_length": len_Ry,
        "y_kills_last_generator_mod_kernel": bool(y_in_K),
    }
    out["passed"] = (
        out["kernel_length"] == out["expected_kernel_length"]
        and out["kernel_nu"] == n
        and killed
        and y_in_K
        and out["cokernel_length"] == len_Ry
    )
    return out


def endomorphism_algebra(M: FPModule):
    """k-basis of End_R(M) as matrices on M (row convention: v ↦ v·X)."""
    la = M.ring.la
    mats, _ = _total(M)
    L = M.length
    if L == 0:
        return []
    if not mats:
        return [la.eye(L)]
    eye = la.eye(L)
    # X commutes with every action; with row-major vec, vec(XA) = (I⊗Aᵀ)vec(X) and vec(AX) = (A⊗I)vec(X)
    C = np.vstack([la.sub(la.reduce(np.kron(eye, A.T)), la.reduce(np.kron(A, eye))) for A in mats])
    K = la.left_kernel(C.T)
    return [K[i].reshape(L, L) for i in range(K.shape[0])]


def _charpoly_factors(la, E):
    p = getattr(la, "p", 0) or 0
    if p:
        mat = flint.nmod_mat([[la.to_raw(x) for x in row] for row in E], p)
    else:
        vals = [[Fraction(la.to_raw(x)) for x in row] for row in E]
        mat = flint.fmpq_mat([[flint.fmpq(v.numerator, v.denominator) for v in row] for row in vals])
    _, facs = mat.charpoly().factor()
    return [f for f, _ in facs]


def local_endomorphism_check(M: FPModule, extra_random: int = 4, seed: int = 7) -> dict:
    """Decide indecomposability of M from End_R(M), when the eigenvalue data allow it.

    An endomorphism whose characteristic polynomial has two distinct prime
    factors splits M (Fitting decomposition).  If instead every basis element
    is a scalar plus a nilpotent and those nilpotent parts generate a
    nilpotent algebra, End_R(M) is local and M is indecomposable.
    """
    la = M.ring.la
    basis = endomorphism_algebra(M)
    L = M.length
    out = {"end_dim": len(basis), "indecomposable": None}
    rng = np.random.default_rng(seed)
    probes = list(basis)
    bound = min(getattr(la, "p", 0) or 97, 97)
    for _ in range(extra_random if len(basis) > 1 else 0):
        c = rng.integers(0, bound, size=len(basis))
        E = la.zeros((L, L))
        for ci, B in zip(c, basis):
            E = la.add(E, la.scale(int(ci), B))
        probes.append(E)
    nil = []
    for idx, E in enumerate(probes):
        facs = _charpoly_factors(la, E)
        if len(facs) >= 2:
            out.update(indecomposable=False, witness={"endomorphism": idx, "factors": [str(f) for f in facs]})
            return out
        f = facs[0]
        if f.degree() != 1:
            out["witness"] = {"endomorphism": idx, "irreducible_factor": str(f)}
            return out
        c0, c1 = f.coeffs()[:2]
        if getattr(la, "p", 0):
            lam = (-int(c0) * pow(int(c1), -1, la.p)) % la.p
        else:
            lam = -Fraction(int(c0.p), int(c0.q)) / Fraction(int(c1.p), int(c1.q))
        if idx < len(basis):
            nil.append(la.sub(E, la.scale(lam, la.eye(L))))
    # the algebra generated by the nilpotent parts
    def flat(mats):
        return _span(la, np.vstack([m.reshape(1, -1) for m in mats])) if mats else la.zeros((0, L * L))

    P = flat(nil)
    for _ in range(L + 1):
        if P.shape[0] == 0:
            out["indecomposable"] = True
            out["witness"] = {"radical_nilpotent": True}
            return out
        P = flat([la.matmul(row.reshape(L, L), n) for row in P for n in nil])
    out["witness"] = {"radical_nilpotent": False}
    return out


# -- the family certificate ---------------------------------------------------

def _residue(u, p):
    return u % p if p else u


def verify_family(spec: FamilySpec, modules, N: int = 6, jobs: int = 1, idempotent_check: bool = False) -> Certificate:
    R = spec.R
    p = R.S.field.characteristic
    params = _params(R, N)
    for M in modules:
        if getattr(M, "parameter", None) is None:
            raise SpecInvalid(f"{M.name or M} was not produced by build_family")
    n = spec.n
    Rbar = spec.reduced_ring()
    qgor = is_quasi_gorenstein(spec.I, R, N)
    hyp_a = colon_stability(spec.I, R)
    R_mod_I = FPModule.cyclic(R, spec.I, name="R/I")
    hyp_b = R_mod_I.annihilated_by_square_of_max_ideal()
    shared = {
        "quasi_gorenstein": qgor.to_dict(),
        "colon_stability": hyp_a,
        "square_of_max_kills_R_mod_I": hyp_b,
        "hypothesis_path": "(a)" if hyp_a else ("(b)" if hyp_b else None),
    }

    def one(M):
        u = M.parameter
        checks = {}
        nu = M.nu
        checks["nu"] = {"passed": nu == n + 1, "value": nu, "expected": n + 1}
        ses = exact_sequence_witness(spec, M)
        checks["exact_sequence"] = ses
        tref = tref_certificate(M, R, N)
        checks["totally_reflexive"] = {"passed": tref.passed, "certificate": tref.to_dict()}
        b1 = M.betti(1)[1]
        checks["non_free"] = {"passed": b1 != 0, "beta_1": b1}
        nu_tw = nu_of_elements(Rbar, spec.twisted(u))
        ok = qgor.passed and (hyp_a or hyp_b) and nu_tw == n
        checks["indecomposable"] = {"passed": ok, "path": shared["hypothesis_path"], "nu_twisted": nu_tw}
        if idempotent_check:
            checks["indecomposable"]["endomorphism_check"] = local_endomorphism_check(M)
        return checks

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(one, modules))
    else:
        results = [one(M) for M in modules]
    table = {M.name: res for M, res in zip(modules, results)}

    pairs = []
    for A, B in combinations(modules, 2):
        same = _residue(A.parameter, p) == _residue(B.parameter, p)
        distinct = fitting_distinct(A, B)
        pairs.append({"u": A.parameter, "v": B.parameter, "distinct": distinct, "expected": not same,
                      "passed": distinct == (not same)})
    classes = len({_residue(M.parameter, p) for M in modules})
    for M in modules:
        mine = [q for q in pairs if M.parameter in (q["u"], q["v"])]
        table[M.name]["pairwise_distinct"] = {"passed": all(q["passed"] for q in mine),
                                              "distinct_from": sum(q["distinct"] for q in mine)}
    failures = [(name, c) for name, res in table.items() for c, v in res.items() if not v["passed"]]
    data = {
        "modules": table,
        "pairs": pairs,
        "distinct_pairs": sum(q["distinct"] for q in pairs),
        "isomorphism_classes": classes,
        "shared": shared,
        "note": f"{classes} pairwise non-isomorphic modules" + (f" over F{p}" if p else ""),
    }
    status = VERIFIED if not failures else REFUTED
    witness = None if not failures else {"failed": [f"{a}:{b}" for a, b in failures]}
    return Certificate("family", status, N, witness, data, params)
