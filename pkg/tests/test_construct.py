import pytest

from conftest import quotient
from totref.construct import (
    FamilySpec,
    build_T,
    build_family,
    endomorphism_algebra,
    exact_sequence_witness,
    fitting_distinct,
    local_endomorphism_check,
    nu_of_elements,
    verify_family,
)
from totref.errors import PreconditionFailed, SpecInvalid
from totref.fpmodule import FPModule, has_minimal_multiplicity
from totref.groebner import PolyMatrix


def family(R, us=range(5)):
    S = R.S
    x, y, z, w = (S.var(v) for v in "xyzw")
    return FamilySpec(R, [x, y], x * y, [z], w, list(us))


@pytest.fixture(scope="module")
def modules(qci5):
    spec = family(qci5)
    return spec, build_family(spec)


def test_matrix_shape(qci5):
    S = qci5.S
    x, y, z, w = (S.var(v) for v in "xyzw")
    T = build_T([x, y], x * y, [z + 3 * w], qci5)
    assert T == PolyMatrix(S, [[x, y, z + 3 * w], [0, 0, x * y]])
    T2 = build_T([x, y], x * y, [z, w])
    assert T2.shape == (3, 5)


def test_colon_precondition(qci5):
    S = qci5.S
    x, y, w = (S.var(v) for v in "xyw")
    # (0:w) = (w, z) and y*w is not in (x)
    with pytest.raises(PreconditionFailed):
        build_T([x], w, [y], qci5)


def test_generator_counts_mod_i_and_y():
    Rbar = quotient("wz", "(w^2, z^2, w*z)")
    S = Rbar.S
    z, w = S.var("z"), S.var("w")
    assert nu_of_elements(Rbar, [z, w]) == 2
    assert nu_of_elements(Rbar, [z, z]) == 1
    assert nu_of_elements(Rbar, [S.zero()]) == 0


def test_family_members(modules):
    spec, mods = modules
    assert len(mods) == 5
    for M in mods:
        assert (M.nu, M.length) == (2, 12)
        assert not has_minimal_multiplicity(M)
        w = exact_sequence_witness(spec, M)
        assert w["passed"]
        assert M.length == spec.n * 3 + w["expected_cokernel_length"]
    assert has_minimal_multiplicity(FPModule.cyclic(spec.R, spec.I))


def test_single_member(qci5):
    assert len(build_family(family(qci5, [2]))) == 1


def test_fitting_distinctness(qci5, modules):
    spec, mods = modules
    assert fitting_distinct(mods[0], mods[1])
    assert not fitting_distinct(mods[1], mods[1])
    same = build_family(family(qci5, [0, 5]))
    assert not fitting_distinct(same[0], same[1])


def test_family_certificate(modules):
    spec, mods = modules
    c = verify_family(spec, mods, 6)
    assert c.status == "verified"
    d = c.data
    assert d["distinct_pairs"] == 10 and d["isomorphism_classes"] == 5
    assert d["shared"]["hypothesis_path"] == "(b)"
    for name, checks in d["modules"].items():
        assert all(v["passed"] for v in checks.values()), name
        assert checks["totally_reflexive"]["certificate"]["status"] == "verified"


def test_collapsed_parameters(qci5):
    spec = family(qci5, [1, 6, 2])
    mods = build_family(spec)
    c = verify_family(spec, mods, 2)
    assert c.data["isomorphism_classes"] == 2
    assert c.data["distinct_pairs"] == 2


def test_modules_outside_the_family_are_rejected(qci5, modules):
    spec, _ = modules
    S = qci5.S
    x, y = S.var("x"), S.var("y")
    M = FPModule(qci5, PolyMatrix(S, [[0, 0], [x, y]]))
    with pytest.raises(SpecInvalid):
        verify_family(spec, [M], 2)


def test_invalid_specs(qci5):
    S = qci5.S
    x, y, z, w = (S.var(v) for v in "xyzw")
    with pytest.raises(SpecInvalid):
        build_family(FamilySpec(qci5, [x, y], x, [z], w, [0]))
    with pytest.raises(SpecInvalid):
        build_family(FamilySpec(qci5, [x, y], x * y, [z], z, [0]))


def test_endomorphisms(qci5, modules):
    _, mods = modules
    r = local_endomorphism_check(mods[0])
    assert r["indecomposable"] is True
    # R/I ⊕ R/I decomposes; its endomorphism ring holds a nontrivial idempotent
    S = qci5.S
    x, y = S.var("x"), S.var("y")
    D = FPModule(qci5, PolyMatrix(S, [[x, y, 0, 0], [0, 0, x, y]]))
    assert len(endomorphism_algebra(D)) == 4 * 3
    assert local_endomorphism_check(D)["indecomposable"] is False
