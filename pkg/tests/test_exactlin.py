from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from quasifree.exactlin import (Echelon, GradedVectorSpace, LinearMap, SparseMatrix, homology_dim_of_matrices,
                                image, inverse, kernel, rank, solve, solve_matrix)
from quasifree.errors import DimensionError

small = st.integers(-3, 3)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return [[Fraction(draw(small), draw(st.integers(1, 3))) for _ in range(c)] for _ in range(r)]


def sym(rows):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows])


@given(matrices())
def test_rank_matches_sympy(rows):
    assert rank(SparseMatrix.from_dense(rows)) == sym(rows).rank()


@given(matrices())
def test_kernel_is_a_basis_of_the_nullspace(rows):
    M = SparseMatrix.from_dense(rows)
    K = kernel(M)
    assert len(K) == len(sym(rows).nullspace())
    for v in K:
        assert M.apply(v) == {}
    assert rank(SparseMatrix.from_columns(M.ncols, K)) == len(K) if K else True


@given(matrices())
def test_image_spans_column_space(rows):
    M = SparseMatrix.from_dense(rows)
    im = image(M)
    assert len(im) == rank(M)
    ech = Echelon()
    for v in im:
        ech.add(v)
    for col in M.columns:
        assert ech.contains(col)


@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_matrix_solutions_are_exact(rows, x):
    M = SparseMatrix.from_dense(rows)
    b = M.apply({j: Fraction(v) for j, v in enumerate(x[:M.ncols]) if v})
    sol = solve_matrix(M, b)
    assert sol is not None
    assert M.apply(sol) == b


def test_solve_matrix_inconsistent():
    M = SparseMatrix.from_dense([[1, 0], [0, 0]])
    assert solve_matrix(M, {1: Fraction(1)}) is None


def test_solution_is_pivot_supported():
    # free column 1 must stay zero
    M = SparseMatrix.from_dense([[1, 1, 0], [0, 0, 1]])
    assert solve_matrix(M, {0: Fraction(2), 1: Fraction(3)}) == {0: 2, 2: 3}


@given(st.integers(1, 4), st.data())
def test_inverse_of_unitriangular(n, data):
    rows = [[Fraction(1) if i == j else (Fraction(data.draw(small)) if j > i else Fraction(0))
             for j in range(n)] for i in range(n)]
    M = SparseMatrix.from_dense(rows)
    assert M @ inverse(M) == SparseMatrix.identity(n)


def test_singular_inverse_raises():
    with pytest.raises(DimensionError):
        inverse(SparseMatrix.from_dense([[1, 2], [2, 4]]))


def test_homology_of_small_complex():
    # 0 -> Q -> Q^2 -> Q -> 0 with d∘d = 0
    d1 = SparseMatrix.from_dense([[1], [1]])
    d2 = SparseMatrix.from_dense([[1, -1]])
    assert (d2 @ d1).is_zero()
    assert homology_dim_of_matrices(d1, d2) == 0
    assert homology_dim_of_matrices(SparseMatrix.zero(2, 0), d2) == 1


def test_graded_solve():
    V = GradedVectorSpace({1: ("a", "b")})
    W = GradedVectorSpace({1: ("c",)})
    f = LinearMap(V, W, 0, {"a": {"c": 1}, "b": {"c": 2}})
    x = solve(f, 1, [Fraction(4)])
    assert f.matrix(1).apply(dict(enumerate(x))) == {0: 4}
    assert solve(LinearMap(V, W, 0, {}), 1, [Fraction(1)]) is None
