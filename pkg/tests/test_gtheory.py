import pytest

from conftest import cyclic, quotient
from oracles import series_coefficients
from totref.errors import HypothesisFailed, NotArtinian
from totref.fpmodule import FPModule, dual
from totref.groebner import PolyMatrix
from totref.gtheory import (
    FULL_PROOF,
    INDETERMINATE,
    REFUTED,
    VERIFIED,
    IdealSpace,
    annihilator,
    colon_stability,
    exact_pair_check,
    grade_of,
    ideal_equal_in,
    ideal_nu,
    is_quasi_gorenstein,
    t22_series,
    tref_certificate,
    verify_betti_bound,
    verify_l22,
    verify_large,
    verify_main1,
    verify_poincare_ratio,
    verify_t22,
    verify_type_lemma,
)

MSQ = "(w^2, w*x, w*y, w*z, x^2, x*y, x*z, y^2, y*z, z^2)"


def test_ideal_spaces(qci, short):
    A = IdealSpace.annihilator(qci, "(x,y)")
    assert A == IdealSpace.generated(qci, "(x*y)")
    assert ideal_equal_in(short, annihilator(short, "(x-z)"), "(x-y+z, y*w)")
    m = IdealSpace.maximal(qci)
    assert (m.dim, m.nu) == (11, 4)
    assert ideal_nu(qci, "(x, y, x+y, x*z)") == 2
    assert IdealSpace.generated(qci, "(x)") + IdealSpace.generated(qci, "(y)") == IdealSpace.generated(qci, "(x,y)")
    assert IdealSpace.generated(qci, "(x,y)").colength() == 3


def test_grade_zero_examples(qci, short):
    assert grade_of("(x,y)", qci) == 0
    assert grade_of("(x)", short) == 0
    assert grade_of([], qci) == 0


def test_quasi_gorenstein(qci, short):
    c = is_quasi_gorenstein("(x)", short, 6)
    assert c.status == VERIFIED and c.bound == 6
    c = is_quasi_gorenstein("(x-z)", short, 6)
    assert c.status == REFUTED and c.witness["nu"] == 2
    assert is_quasi_gorenstein("(x,y)", qci, 6).status == VERIFIED


def test_double_colon_on_verified_ideals(qci, short):
    for R, I in [(qci, "(x,y)"), (short, "(x)"), (short, "(y)"), (qci, "(w,x,y,z)")]:
        if is_quasi_gorenstein(I, R, 4):
            A = IdealSpace.annihilator(R, I)
            assert IdealSpace.annihilator(R, A.generators()) == IdealSpace.generated(R, I)


def test_colon_stability(qci):
    assert colon_stability([], qci)
    assert not colon_stability("(x,y)", qci)


def test_exact_pairs(short):
    assert exact_pair_check("x", "y", short).status == FULL_PROOF
    R = quotient("x", "(x^2)")
    assert exact_pair_check("x", "x", R).status == FULL_PROOF
    T = quotient("xy", "(x*y, x^3, y^3)")
    assert exact_pair_check("x", "y", T).status == REFUTED


def test_exact_pair_in_nonartinian_ring():
    T = quotient("xy", "(x*y)")
    assert exact_pair_check("x", "y", T).status == FULL_PROOF
    assert exact_pair_check("x", "x+y", T).status == REFUTED


def test_tref_certificates(qci, short):
    assert tref_certificate(cyclic(short, "(x)"), short, 6).status == VERIFIED
    assert tref_certificate(FPModule.free(qci, 1), qci, 6).status == VERIFIED
    for R in (qci, short):
        c = tref_certificate(cyclic(R, MSQ), R, 6)
        assert c.status == REFUTED and c.witness["index"] <= 6


def test_dual_has_same_length_on_verified_modules(qci, short):
    for R, I in [(qci, "(x,y)"), (short, "(x)"), (short, "(y)"), (qci, MSQ)]:
        M = cyclic(R, I)
        if tref_certificate(M, R, 4):
            assert dual(M).length == M.length


def test_main_formula(qci):
    c = verify_main1(qci, cyclic(qci, "(x,y)"), 8)
    assert c.status == VERIFIED
    assert c.data["betti_k"][:9] == series_coefficients([1], [1, -4, 5, -2], 9)


def test_main_formula_needs_non_gorenstein():
    R = quotient("x", "(x^2)")
    with pytest.raises(HypothesisFailed) as e:
        verify_main1(R, cyclic(R, "(x)"), 4)
    assert "Gorenstein" in e.value.hypothesis or "type" in e.value.hypothesis


def test_poincare_ratio(qci):
    S = qci.S
    x, y = S.var("x"), S.var("y")
    M2 = FPModule(qci, PolyMatrix(S, [[x, y, 0, 0], [0, 0, x, y]]))
    assert verify_poincare_ratio(qci, cyclic(qci, "(x,y)"), M2, 6).status == VERIFIED


def test_betti_bound(qci):
    M = cyclic(qci, "(x,y)")
    c = verify_betti_bound(qci, M, M, 8)
    assert c.status == VERIFIED
    assert c.data["C"] == 1


def test_type_and_generators_lemma(qci, short):
    assert verify_l22(short, "(x)").status == VERIFIED
    assert verify_l22(qci, "(x,y)").status == VERIFIED
    with pytest.raises(HypothesisFailed):
        verify_l22(qci, "(x)")


def test_largeness(qci, short):
    assert verify_large(qci, "(x,y)", 6).status == VERIFIED
    c = verify_large(short, "(x-z)", 2)
    assert c.status == REFUTED and c.witness["index"] == 2
    assert verify_large(qci, "(w,x,y,z)", 4).status == VERIFIED


def test_explicit_poincare_series(qci, short, rnc_ring):
    assert verify_t22(qci, "(x,y)", 8).status == VERIFIED
    assert verify_t22(short, "(x)", 8).status == VERIFIED
    c = verify_t22(rnc_ring, "(x0,x1,x2,x3,x4)", 2)
    assert c.status == REFUTED
    assert (c.witness["index"], c.witness["left"], c.witness["right"]) == (2, 33, 28)


def test_t22_formula_shape():
    expr, series = t22_series(7, 2, 1, 3)
    assert list(series)[:3] == [1, 7, 28]


def test_type_lemma(qci, qci5):
    assert verify_type_lemma(qci, cyclic(qci, "(x,y)"), 5).status == VERIFIED
    S = qci5.S
    x, y, z, w = (S.var(v) for v in "xyzw")
    Mu = FPModule(qci5, PolyMatrix(S, [[x, y, z + w], [0, 0, x * y]]))
    with pytest.raises(HypothesisFailed):
        verify_type_lemma(qci5, Mu, 3)


def test_artinian_guards(rnc_ring):
    with pytest.raises(NotArtinian):
        is_quasi_gorenstein("(x0)", rnc_ring)
    with pytest.raises(NotArtinian):
        tref_certificate(FPModule.residue_field(rnc_ring), rnc_ring)


def test_certificate_serialization(short):
    c = verify_large(short, "(x-z)", 2)
    d = c.to_dict()
    assert d["status"] == REFUTED and d["kind"]
    assert str(c).endswith(REFUTED)
    assert INDETERMINATE not in str(c)
