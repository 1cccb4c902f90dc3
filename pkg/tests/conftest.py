import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from totref import Field, FPModule, Ideal, PolyRing, QuotientRing  # noqa: E402

QCI = "(w^2, x^2, y^2, z^2, z*w)"
SHORT = "(w^2, w*x-y^2, w*y-x*z, w*z, x^2+y*z, x*y, z^2)"


def quotient(variables, ideal, field="F101"):
    S = PolyRing(variables, Field.parse(field))
    return QuotientRing(Ideal.parse(S, ideal))


@pytest.fixture(scope="session")
def qci():
    return quotient("wxyz", QCI)


@pytest.fixture(scope="session")
def qci5():
    return quotient("wxyz", QCI, "F5")


@pytest.fixture(scope="session")
def short():
    return quotient("wxyz", SHORT)


@pytest.fixture(scope="session")
def rnc_ring():
    """One-dimensional ring built from 2x2 minors of the rational normal quartic."""
    from totref.groebner import PolyMatrix, colon, ideal_combine, minors_ideal

    S = PolyRing(["x0", "x1", "x2", "x3", "x4", "y", "z"])
    x = [S.var(f"x{i}") for i in range(5)]
    P = minors_ideal(PolyMatrix(S, [x[:4], x[1:]]), 2)
    C = Ideal(S, [x[i] ** 2 - x[i - 1] * x[i + 1] for i in (1, 2, 3)])
    J = ideal_combine(ideal_combine(P, colon(C, P), "sum"), Ideal.parse(S, "(y^2, y*z, z^2)"), "sum")
    return QuotientRing(J)


def cyclic(R, text):
    return FPModule.cyclic(R, Ideal.parse(R.S, text).gens)
