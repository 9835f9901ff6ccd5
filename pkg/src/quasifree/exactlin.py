"""Exact rational linear algebra over degree-indexed bases.

Vectors are sparse ``dict`` objects mapping a sortable key to a nonzero
:class:`fractions.Fraction`.  Matrices are stored by columns.  All pivoting is
deterministic: the pivot of a vector is its smallest key, and columns are
consumed left to right, so every result is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import DimensionError, NotAComplexError

Vector = Dict[Hashable, Fraction]


def Q(x) -> Fraction:
    """Coerce ints, strings like ``"3/4"`` and Fractions to a Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def vec_add(y: Vector, x: Mapping, scale=1) -> Vector:
    """In-place ``y += scale * x`` dropping zeros; returns ``y``."""
    if not scale:
        return y
    for k, v in x.items():
        s = y.get(k, 0) + scale * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)
    return y


def vec_scale(x: Mapping, scale) -> Vector:
    if not scale:
        return {}
    return {k: v * scale for k, v in x.items()}


def vec_sum(items: Iterable[Tuple[Fraction, Mapping]]) -> Vector:
    out: Vector = {}
    for c, x in items:
        vec_add(out, x, c)
    return out


class Echelon:
    """Incrementally built echelon basis of a subspace.

    Every stored row remembers which inserted vectors it is a combination of,
    so membership tests also return coordinates relative to the *independent*
    inserted vectors (those for which :meth:`add` returned True).
    """

    def __init__(self):
        self._rows: Dict[Hashable, Tuple[Vector, Dict[int, Fraction]]] = {}
        self.labels: List = []

    def __len__(self):
        return len(self.labels)

    @property
    def rank(self) -> int:
        return len(self.labels)

    def reduce(self, v: Mapping) -> Tuple[Vector, Dict[int, Fraction]]:
        """Return ``(residual, combo)`` with ``v = residual + sum combo[i]*basis_i``."""
        r = dict(v)
        combo: Dict[int, Fraction] = {}
        if not self._rows:
            return r, combo
        done = set()
        while True:
            cands = [k for k in r if k in self._rows and k not in done]
            if not cands:
                return r, combo
            p = min(cands)
            c = r[p]
            row, rcombo = self._rows[p]
            vec_add(r, row, -c)
            vec_add(combo, rcombo, c)
            done.add(p)

    def add(self, v: Mapping, label=None) -> bool:
        r, combo = self.reduce(v)
        if not r:
            return False
        idx = len(self.labels)
        self.labels.append(label if label is not None else idx)
        p = min(r)
        inv = 1 / r[p]
        # row = (v - sum combo*b) / r[p]
        rcombo = vec_scale(combo, -inv)
        rcombo[idx] = inv
        self._rows[p] = (vec_scale(r, inv), rcombo)
        return True

    def coords(self, v: Mapping) -> Optional[Dict[int, Fraction]]:
        """Coordinates of ``v`` in the independent inserted vectors, or None."""
        r, combo = self.reduce(v)
        if r:
            return None
        return combo

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)[0]


@dataclass(frozen=True)
class SparseMatrix:
    """``nrows x ncols`` rational matrix stored column by column."""

    nrows: int
    ncols: int
    columns: Tuple[Dict[int, Fraction], ...]

    def __post_init__(self):
        if len(self.columns) != self.ncols:
            raise DimensionError(f"expected {self.ncols} columns, got {len(self.columns)}")
        for col in self.columns:
            for i in col:
                if not 0 <= i < self.nrows:
                    raise DimensionError(f"row index {i} out of range for {self.nrows} rows")

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Mapping]) -> "SparseMatrix":
        cols = tuple({i: Q(x) for i, x in c.items() if x} for c in columns)
        return cls(nrows, len(cols), cols)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        cols = []
        for j in range(ncols):
            cols.append({i: Q(rows[i][j]) for i in range(nrows) if rows[i][j]})
        return cls(nrows, ncols, tuple(cols))

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, tuple({i: Fraction(1)} for i in range(n)))

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols, tuple({} for _ in range(ncols)))

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, x in col.items():
                out[i][j] = x
        return out

    def apply(self, x: Mapping[int, Fraction]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for j, c in x.items():
            if j >= self.ncols:
                raise DimensionError(f"vector index {j} out of range for {self.ncols} columns")
            vec_add(out, self.columns[j], c)
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot compose {self.nrows}x{self.ncols} with {other.nrows}x{other.ncols}")
        return SparseMatrix(self.nrows, other.ncols, tuple(self.apply(c) for c in other.columns))

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._same_shape(other)
        return SparseMatrix(self.nrows, self.ncols,
                            tuple(vec_add(dict(a), b) for a, b in zip(self.columns, other.columns)))

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._same_shape(other)
        return SparseMatrix(self.nrows, self.ncols,
                            tuple(vec_add(dict(a), b, -1) for a, b in zip(self.columns, other.columns)))

    def scaled(self, c) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols, tuple(vec_scale(col, Q(c)) for col in self.columns))

    def transpose(self) -> "SparseMatrix":
        cols: List[Dict[int, Fraction]] = [dict() for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, x in col.items():
                cols[i][j] = x
        return SparseMatrix(self.ncols, self.nrows, tuple(cols))

    def is_zero(self) -> bool:
        return not any(self.columns)

    def _same_shape(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionError("shape mismatch")

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and all(
            a == b for a, b in zip(self.columns, other.columns))

    def __hash__(self):
        return hash((self.nrows, self.ncols))


def _column_echelon(M: SparseMatrix) -> Tuple[Echelon, List[int], List[int]]:
    ech = Echelon()
    pivots, free = [], []
    for j, col in enumerate(M.columns):
        if ech.add(col, j):
            pivots.append(j)
        else:
            free.append(j)
    return ech, pivots, free


def rank(M: SparseMatrix) -> int:
    return _column_echelon(M)[0].rank


def kernel(M: SparseMatrix) -> List[Dict[int, Fraction]]:
    """Basis of ker M, one vector per non-pivot column (in column order)."""
    ech, pivots, free = _column_echelon(M)
    basis = []
    for j in free:
        combo = ech.coords(M.columns[j])
        v = {pivots[i]: -c for i, c in combo.items() if c}
        v[j] = Fraction(1)
        basis.append(v)
    return basis


def image(M: SparseMatrix) -> List[Dict[int, Fraction]]:
    """The independent columns of M, leftmost first."""
    _, pivots, _ = _column_echelon(M)
    return [dict(M.columns[j]) for j in pivots]


def solve_matrix(M: SparseMatrix, b: Mapping[int, Fraction]) -> Optional[Dict[int, Fraction]]:
    """Solve ``M x = b``; None when inconsistent.

    The returned solution is supported on the pivot columns only (all free
    variables zero), which makes it canonical.
    """
    for i in b:
        if not 0 <= i < M.nrows:
            raise DimensionError(f"right-hand side index {i} out of range for {M.nrows} rows")
    ech, pivots, _ = _column_echelon(M)
    combo = ech.coords(b)
    if combo is None:
        return None
    return {pivots[i]: c for i, c in combo.items() if c}


def inverse(M: SparseMatrix) -> SparseMatrix:
    if M.nrows != M.ncols:
        raise DimensionError("only square matrices can be inverted")
    n = M.nrows
    ech, pivots, _ = _column_echelon(M)
    if ech.rank != n:
        raise DimensionError("matrix is singular")
    cols = []
    for i in range(n):
        combo = ech.coords({i: Fraction(1)})
        cols.append({pivots[k]: c for k, c in combo.items() if c})
    return SparseMatrix(n, n, tuple(cols))


# ---------------------------------------------------------------------------
# graded layer


@dataclass(frozen=True)
class GradedVectorSpace:
    """Finite named basis per integer degree."""

    basis: Mapping[int, Tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for d, names in self.basis.items():
            names = tuple(names)
            if len(set(names)) != len(names):
                raise ValueError(f"duplicate basis names in degree {d}")
            if names:
                clean[int(d)] = names
        object.__setattr__(self, "basis", clean)

    @property
    def degrees(self) -> List[int]:
        return sorted(self.basis)

    def dim(self, degree: int) -> int:
        return len(self.basis.get(degree, ()))

    def names(self, degree: int) -> Tuple[str, ...]:
        return self.basis.get(degree, ())

    def index(self, degree: int, name: str) -> int:
        return self.basis[degree].index(name)

    def __hash__(self):
        return hash(tuple(sorted(self.basis.items())))


@dataclass(frozen=True)
class LinearMap:
    """Graded linear map of degree ``shift``.

    ``columns[name]`` is the image of a source basis vector, as a mapping from
    target basis names (all in degree ``deg(name) + shift``) to rationals.
    """

    source: GradedVectorSpace
    target: GradedVectorSpace
    shift: int
    columns: Mapping[str, Mapping[str, Fraction]]

    def __post_init__(self):
        for d in self.source.degrees:
            tnames = set(self.target.names(d + self.shift))
            for s in self.source.names(d):
                for t, x in self.columns.get(s, {}).items():
                    if x and t not in tnames:
                        raise DimensionError(
                            f"image of {s} has component {t} outside target degree {d + self.shift}")

    def matrix(self, degree: int) -> SparseMatrix:
        src = self.source.names(degree)
        tgt = self.target.names(degree + self.shift)
        pos = {n: i for i, n in enumerate(tgt)}
        cols = []
        for s in src:
            cols.append({pos[t]: Q(x) for t, x in self.columns.get(s, {}).items() if x})
        return SparseMatrix(len(tgt), len(src), tuple(cols))

    def compose(self, first: "LinearMap") -> "LinearMap":
        """``self ∘ first``; shifts add."""
        cols = {}
        for d in first.source.degrees:
            for s in first.source.names(d):
                out: Dict[str, Fraction] = {}
                for m, c in first.columns.get(s, {}).items():
                    vec_add(out, self.columns.get(m, {}), Q(c))
                cols[s] = out
        return LinearMap(first.source, self.target, first.shift + self.shift, cols)


def solve(M: LinearMap, degree: int, b: Sequence) -> Optional[List[Fraction]]:
    """Solve ``M x = b`` on one source degree; ``b`` is a dense coordinate list."""
    A = M.matrix(degree)
    if len(b) != A.nrows:
        raise DimensionError(f"right-hand side has length {len(b)}, target degree has dimension {A.nrows}")
    x = solve_matrix(A, {i: Q(v) for i, v in enumerate(b) if v})
    if x is None:
        return None
    return [x.get(j, Fraction(0)) for j in range(A.ncols)]


def homology_dim_of_matrices(d_in: SparseMatrix, d_out: SparseMatrix) -> int:
    """``dim ker d_out - rank d_in`` for a two-step complex ``-> C -> ``."""
    if d_in.nrows != d_out.ncols:
        raise DimensionError("the two differentials do not share the middle space")
    if d_in.ncols and d_out.nrows and not (d_out @ d_in).is_zero():
        raise NotAComplexError("d_out ∘ d_in ≠ 0")
    return d_out.ncols - rank(d_out) - rank(d_in)


def homology_dims(d_in: LinearMap, d_out: LinearMap, degree: int) -> int:
    """Dimension of homology at ``degree`` of ``d_in`` followed by ``d_out``."""
    if d_in.target != d_out.source:
        raise DimensionError("d_in and d_out do not share the middle space")
    A = d_in.matrix(degree - d_in.shift)
    B = d_out.matrix(degree)
    return homology_dim_of_matrices(A, B)
