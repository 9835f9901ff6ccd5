import os
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from quasifree import fixtures as fx
from quasifree.errors import DegreeError, NotAComplexError, ParseError
from quasifree.koszul import ce_cochains, minimalize, quillen_L
from quasifree.textio import (format_algebra, format_morphisms, parse_algebra, parse_expr,
                              parse_morphism, parse_morphisms)

from conftest import FIXTURES

CP2_TEXT = """algebra lie chain cutoff 9
gen x1 1
gen x2 3
d x2 = 1/2 [x1,x1]
"""


def test_parse_cp2_fixture():
    assert parse_algebra(CP2_TEXT) == fx.cp_model(2, 9)


def test_empty_generator_list():
    A = parse_algebra("algebra com cochain reduced cutoff 5\n")
    assert A.gens == () and not A.flavor.unitary


ALGEBRAS = [fx.cp_model(2, 9), fx.cp_infinity(9), fx.lambda_ace(), fx.lambda_uw(), fx.cylinder(), fx.nonsparse(),
            ce_cochains(fx.cp_model(2, 7)), quillen_L(fx.lambda_uw(8)), minimalize(ce_cochains(fx.cp_model(2, 7)))[0],
            fx.cp2_cohomology(), fx.abelian_lie(2)]


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: str(A.name))
def test_print_parse_round_trip(A):
    text = format_algebra(A)
    B = parse_algebra(text)
    assert format_algebra(B) == text
    if hasattr(A, "d") and not callable(A.d):
        assert B == A
    else:
        assert B.basis == A.basis and B.mul == A.mul and B.diff == A.diff


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(1, 4)), min_size=1, max_size=4))
def test_expression_round_trip(coefs):
    L = fx.cp_model(3, 9).free
    basis = L.basis(5)
    x = L.zero()
    for (p, q), b in zip(coefs, basis * 4):
        x = x + Fraction(p, q) * b
    assert parse_expr(L, L.format(x)) == x


def test_expression_forms():
    A = fx.lambda_ace().free
    a, c = A.gen("a"), A.gen("c")
    assert parse_expr(A, "5 a*a*a") == 5 * a * a * a
    assert parse_expr(A, "-(a*c) + 2/3 c*a") == Fraction(-1, 3) * a * c
    assert parse_expr(A, "0") == A.zero()
    L = fx.cp_model(2).free
    assert parse_expr(L, "[x1,[x1,x2]] - [x1,[x1,x2]]") == L.zero()


@pytest.mark.parametrize("text, line, column", [
    ("algebra lie chain cutoff 9\ngen x1 1\nd x1 = [x1,", 3, None),
    ("algebra lie chain cutoff 9\ngen x1 1\ngen x2 3\nd x2 = 1/2 [x1,x1] $", 4, 20),
    ("algebra lie chain cutoff 9\ngen x1 1\ngen x2 3\nd x2 = y", 4, 8),
    ("algebra lie chain cutoff 9\ngen x1 1\ngen x2 3\nd x2 = x1*x1", 4, 10),
    ("algebra lie chain cutoff nine", 1, 1),
    ("algebra lie chain weird cutoff 9", 1, 1),
    ("algebra jordan chain cutoff 9", 1, 1),
    ("algebra lie chain cutoff 9\ngen x1", 2, 1),
    ("algebra lie chain cutoff 9\ngenerator x1 1", 2, 1),
    ("", 1, 1),
])
def test_parse_errors_carry_location(text, line, column):
    with pytest.raises(ParseError) as err:
        parse_algebra(text)
    assert err.value.line == line
    if column is not None:
        assert err.value.column == column


def test_wrong_shift_is_a_degree_error():
    with pytest.raises(DegreeError):
        parse_algebra("algebra com cochain cutoff 9\ngen u 2\ngen v 4\nd u = v")
    with pytest.raises(DegreeError):
        parse_algebra("algebra lie chain cutoff 9\ngen x1 1\ngen x2 3\nd x1 = x2")


def test_non_complex_is_rejected():
    with pytest.raises(NotAComplexError):
        parse_algebra("algebra com cochain cutoff 9\ngen a 2\ngen b 3\ngen e 4\nd b = a*a\nd e = a*b")


def test_morphism_files():
    A = fx.cp_model(2, 9)
    maps = [fx.scaling(A, l) for l in (2, Fraction(1, 2), -1)]
    text = format_morphisms(maps)
    back = parse_morphisms(text, A, A)
    assert back == maps
    assert [f.name for f in back] == ["lambda=2", "lambda=1/2", "lambda=-1"]
    f = parse_morphism("map x1 = 0\n", A, A)     # x2 defaults to zero
    assert f == fx.scaling(A, 0)
    with pytest.raises(ParseError):
        parse_morphism("map y = x1", A, A)
    with pytest.raises(DegreeError):
        parse_morphism("map x1 = x2", A, A)


def test_fixture_files_match_fixtures():
    expected = {"cp2.alg": fx.cp_model(2, 9), "cp_inf.alg": fx.cp_infinity(9), "lambda_uw.alg": fx.lambda_uw(10),
                "lambda_ace.alg": fx.lambda_ace(10), "cylinder.alg": fx.cylinder()}
    for name, A in expected.items():
        with open(os.path.join(FIXTURES, name)) as fh:
            assert parse_algebra(fh.read()) == A
