"""Acceptance criteria 1-9.  Each test prints one ``ACCEPTANCE`` line with its verdict."""

import functools
import inspect
import time

from conftest import cyclic
from oracles import series_coefficients
from totref.construct import FamilySpec, build_family, fitting_distinct, local_endomorphism_check, verify_family
from totref.fpmodule import FPModule, bass_dims, has_minimal_multiplicity, is_koszul
from totref.groebner import Ideal, colon, is_regular_element, krull_dim
from totref.gtheory import (
    REFUTED,
    VERIFIED,
    exact_pair_check,
    ideal_equal_in,
    ideal_nu,
    is_quasi_gorenstein,
    tref_certificate,
    verify_l22,
    verify_large,
    verify_main1,
    verify_t22,
)
from totref.kernel import PolyRing
from totref.quotient import artinian_reduction
from totref.series import expand

MSQ = "(w^2, w*x, w*y, w*z, x^2, x*y, x*z, y^2, y*z, z^2)"


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, capsys, **kwargs):
            t0 = time.perf_counter()
            verdict, note = "FAIL", ""
            try:
                note = fn(*args, **kwargs) or ""
                verdict = "PASS"
            finally:
                with capsys.disabled():
                    dt = time.perf_counter() - t0
                    print(f"\nACCEPTANCE {number} {verdict} ({dt:.1f}s) {title}" + (f" | {note}" if note else ""))
        sig = inspect.signature(fn)
        params = list(sig.parameters.values()) + [inspect.Parameter("capsys", inspect.Parameter.KEYWORD_ONLY)]
        del run.__wrapped__
        run.__signature__ = sig.replace(parameters=params)
        return run
    return wrap


@criterion(1, "qci ring: beta_i(k), i <= 8, equal 1/((1-t)^2(1-2t))")
def test_criterion_1(qci):
    betti = FPModule.residue_field(qci).resolution(8).betti_numbers[:9]
    expected = [1, 4, 11, 26, 57, 120, 247, 502, 1013]
    assert betti == expected
    assert list(expand("1/((1-t)^2*(1-2*t))", 8)) == expected
    assert series_coefficients([1], [1, -4, 5, -2], 9) == expected
    return f"beta = {betti}"


@criterion(2, "qci ring: type 2, Bass numbers (2,3,6,12,24,48), Hilbert (1,4,5,2), length 12")
def test_criterion_2(qci):
    assert qci.type == 2
    mu = bass_dims(qci, range(0, 6))
    assert mu == [2, 3, 6, 12, 24, 48] == list(expand("(2-t)/(1-2*t)", 5))
    assert qci.hilbert_and_length() == ([1, 4, 5, 2], 12)
    return f"mu = {mu}"


@criterion(3, "qci ring: main formula to 8, generator/type lemma, largeness to 6, Koszul to 6")
def test_criterion_3(qci):
    M = cyclic(qci, "(x,y)")
    assert verify_main1(qci, M, 8).status == VERIFIED
    c = verify_l22(qci, "(x,y)")
    assert c.status == VERIFIED
    assert qci.embedding_dim() == 4 == ideal_nu(qci, "(x,y)") + qci.type
    assert verify_large(qci, "(x,y)", 6).status == VERIFIED
    assert is_koszul(qci, 6)


@criterion(4, "short ring: type 3, beta(k) = 1/((1-t)(1-3t)) to 8, exact pair, annihilator, refutations")
def test_criterion_4(short):
    assert short.type == 3
    betti = FPModule.residue_field(short).resolution(8).betti_numbers[:9]
    assert betti == [1, 4, 13, 40, 121, 364, 1093, 3280, 9841] == list(expand("1/((1-t)*(1-3*t))", 8))
    assert exact_pair_check("x", "y", short).status == "full-proof"
    ann = short.ideal_of([short.S.parse("x-z")])
    Q = colon(short.ideal, ann)
    assert [str(g) for g in Q.groebner()] == [str(g) for g in short.ideal_of(Ideal.parse(short.S, "(x-y+z, y*w)").gens).groebner()]
    assert ideal_equal_in(short, Q.gens, "(x-y+z, y*w)")
    assert cyclic(short, "(x-z)").resolution(2).betti_numbers[2] == 2
    assert is_quasi_gorenstein("(x-z)", short, 6).status == REFUTED
    c = verify_large(short, "(x-z)", 6)
    assert c.status == REFUTED and c.witness["index"] == 2
    return f"largeness witness {c.witness['left']} vs {c.witness['right']} at degree 2"


@criterion(5, "complete intersection bookkeeping: dim S/c = 2 for n = 3, 4")
def test_criterion_5():
    for n in (3, 4):
        S = PolyRing([f"x{i}" for i in range(n + 1)])
        x = S.gens()
        c = Ideal(S, [x[i] ** 2 - x[i - 1] * x[i + 1] for i in range(1, n)])
        assert len(c.gens) == n - 1
        assert krull_dim(c) == 2
        assert S.nvars - krull_dim(c) == n - 1


@criterion(6, "family over F5: nu 2, length 12, tref, 10 distinct pairs, indecomposable, multiplicity")
def test_criterion_6(qci5):
    S = qci5.S
    x, y, z, w = (S.var(v) for v in "xyzw")
    spec = FamilySpec(qci5, [x, y], x * y, [z], w, [0, 1, 2, 3, 4])
    mods = build_family(spec)
    assert [(M.nu, M.length) for M in mods] == [(2, 12)] * 5
    cert = verify_family(spec, mods, 6)
    assert cert.status == VERIFIED
    for checks in cert.data["modules"].values():
        assert checks["totally_reflexive"]["certificate"]["status"] == VERIFIED
        assert checks["totally_reflexive"]["certificate"]["bound"] == 6
        assert checks["indecomposable"]["path"] == "(b)"
    assert cert.data["distinct_pairs"] == 10
    assert all(fitting_distinct(A, B) for i, A in enumerate(mods) for B in mods[i + 1:])
    assert has_minimal_multiplicity(FPModule.cyclic(qci5, [x, y]))
    assert not any(has_minimal_multiplicity(M) for M in mods)
    # independent cross-check of indecomposability through the endomorphism ring
    assert local_endomorphism_check(mods[0])["indecomposable"] is True


@criterion(7, "one-dimensional ring: nu(m) = 7, nu(I) = 5, beta_2(k) = 33 vs 28, t22 refuted")
def test_criterion_7(rnc_ring):
    R = rnc_ring
    assert R.krull_dim() == 1
    assert ideal_nu(R, "(x0,x1,x2,x3,x4,y,z)") == 7
    assert ideal_nu(R, "(x0,x1,x2,x3,x4)") == 5
    Rb, d, forms = artinian_reduction(R, seed=0)
    assert d == 1
    assert is_regular_element(R.ideal, forms[0])
    bb = FPModule.residue_field(Rb).resolution(2).betti_numbers
    lifted = [bb[0], bb[1] + bb[0], bb[2] + bb[1]]  # multiply by (1+t) for the one regular form
    assert lifted[2] == 33
    assert expand("(1-t^2)/((1-t)^5*(1-2*t))", 2)[2] == 28
    c = verify_t22(R, "(x0,x1,x2,x3,x4)", 2, seed=0)
    assert c.status == REFUTED and c.witness["left"] == 33 and c.witness["right"] == 28
    return f"reduction form {forms[0]}"


@criterion(8, "property suites: GB, resolutions, dense oracle, double colon, dual length, series")
def test_criterion_8(qci, short):
    import test_fpmodule
    import test_gtheory
    import test_groebner
    import test_series

    test_groebner.test_random_ideals_confluence_and_order_independence()
    test_fpmodule.test_betti_numbers_agree_with_dense_oracle()
    test_gtheory.test_double_colon_on_verified_ideals(qci, short)
    test_gtheory.test_dual_has_same_length_on_verified_modules(qci, short)
    test_series.test_random_multiply_divide_round_trip()


@criterion(9, "negative control: tref(R/m^2) is never verified on the qci and short rings")
def test_criterion_9(qci, short):
    notes = []
    for name, R in (("qci", qci), ("short", short)):
        c = tref_certificate(cyclic(R, MSQ), R, 6)
        assert c.status != VERIFIED
        if c.status == REFUTED:
            assert c.witness["index"] <= 6
            notes.append(f"{name}: refuted at {c.witness['index']}")
        else:
            notes.append(f"{name}: {c.status} (manual review)")
    return "; ".join(notes)
