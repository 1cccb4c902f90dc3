import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import series_coefficients
from totref.errors import MalformedExpression, NonUnitDivision
from totref.series import RationalSeriesExpr, SeriesTrunc, compare, expand, series_arith


def test_expansions():
    assert list(expand("1/(1-2t)", 3)) == [1, 2, 4, 8]
    assert list(expand("1/((1-t)^2*(1-2*t))", 4)) == [1, 4, 11, 26, 57]
    assert list(expand("1/((1-t)^2*(1-2*t))", 4)) == [2 ** (n + 2) - n - 3 for n in range(5)]
    assert expand("(1-t^2)/((1-t)^5*(1-2*t))", 2)[2] == 28
    assert list(expand("(2-t)/(1-2t)", 5)) == [2, 3, 6, 12, 24, 48]


def test_display_syntax_with_cubes():
    e = expand("(1-t^2)^3/((1-t)^5*(1-2*t))", 6)
    num = [1, 0, -3, 0, 3, 0, -1]
    # (1-t)^5 (1-2t) expanded by hand
    den = [1, -7, 20, -30, 25, -11, 2]
    assert list(e) == series_coefficients(num, den, 7)


def test_comparisons():
    assert compare([1, 1, 1], [1, 2, 4], "leq")
    assert compare([1, 4, 13, 40], expand("1/((1-t)(1-3t))", 3), "eq")
    assert [(3 ** (n + 1) - 1) // 2 for n in range(4)] == [1, 4, 13, 40]
    c = compare([1, 2], [1, 1], "leq")
    assert not c and (c.index, c.left, c.right) == (1, 2, 1)


def test_arithmetic():
    ones = SeriesTrunc([1, 1, 1, 1])
    assert list(series_arith(ones, ones, "mul")) == [1, 2, 3, 4]
    assert list(series_arith(SeriesTrunc([1, 4, 11, 26]), SeriesTrunc([1, 2, 4, 8]), "div")) == [1, 2, 3, 4]
    a = SeriesTrunc([3, -1, 4])
    assert all(c == 0 for c in series_arith(a, -a, "add"))


def test_errors():
    with pytest.raises(NonUnitDivision):
        series_arith(SeriesTrunc([1, 1]), SeriesTrunc([2, 1]), "div")
    with pytest.raises(MalformedExpression):
        expand("1/(1-", 3)
    with pytest.raises(MalformedExpression):
        expand("1/(1-x)", 3)


def test_factored_form_round_trips():
    e = RationalSeriesExpr.from_factors([1, 0, -1], [(1, 1, -5), (2, 1, -1)])
    assert str(e) == "(1 - t^2)*(1 - t)^-5*(1 - 2*t)^-1"
    assert RationalSeriesExpr.parse(str(e)) == e
    assert list(e.expand(3)) == [1, 7, 28, 86]


def test_random_multiply_divide_round_trip():
    """Fifty random pairs: (a*b)/b == a and (a/b)*b == a when b has unit constant term."""
    rng = random.Random(17)
    for _ in range(50):
        n = rng.randint(1, 12)
        a = SeriesTrunc([rng.randint(-9, 9) for _ in range(n)])
        b = SeriesTrunc([rng.choice([1, -1])] + [rng.randint(-9, 9) for _ in range(n - 1)])
        assert series_arith(series_arith(a, b, "mul"), b, "div") == a
        assert series_arith(series_arith(a, b, "div"), b, "mul") == a


small = st.lists(st.integers(-20, 20), min_size=1, max_size=8)


@settings(max_examples=50)
@given(small, small, small)
def test_ring_laws(x, y, z):
    a, b, c = SeriesTrunc(x, 7), SeriesTrunc(y, 7), SeriesTrunc(z, 7)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
