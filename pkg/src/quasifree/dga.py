"""Quasi-free (co)chain algebras, their truncations, morphisms and homology.

An algebra carries a cutoff ``D``: only degrees ``<= D`` are ever certified.
Homology is certified in degrees ``<= D - 1`` (one degree of slack for the
boundary or cycle side of the differential).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import (ChainMapError, CutoffError, DegreeError, FlavorError, NotAComplexError,
                     NotClosedError, ConnectivityError, PreconditionError)
from .exactlin import Echelon, SparseMatrix, Q, kernel, image, rank, vec_add, inverse
from .freealg import Element, Flavor, FreeAlgebra, sign


class QuasiFreeAlgebra:
    """``(P(V), d)``: a free graded algebra with a differential given on generators.

    ``differential`` maps generator names to elements (or to raw term dicts);
    missing generators have zero differential.  Every generator must lie in
    degree ``>= 1`` and ``<= cutoff``.
    """

    def __init__(self, flavor: Flavor, generators: Mapping[str, int],
                 differential: Mapping[str, object] = None, cutoff: int = 10, name: str = None):
        self.flavor = flavor
        self.cutoff = int(cutoff)
        self.name = name
        self.koszul = None      # set by the CE / Quillen constructions
        self.free = FreeAlgebra(flavor, generators)
        for g, dg in self.free.deg.items():
            if dg < 1:
                raise ConnectivityError(f"generator {g} has degree {dg}; generators must have degree >= 1")
            if dg > self.cutoff:
                raise CutoffError(f"generator {g} of degree {dg} lies above the cutoff {self.cutoff}")
        self.d: Dict[str, Element] = {}
        for g in self.free.gens:
            raw = (differential or {}).get(g)
            if raw is None:
                self.d[g] = self.free.zero()
                continue
            terms = raw.terms if isinstance(raw, Element) else raw
            el = self.free.element(terms) if self.flavor.operad == "com" else Element(self.free, terms)
            if el.terms:
                if not el.is_homogeneous() or el.degree != self.free.deg[g] + flavor.dsign:
                    raise DegreeError(
                        f"d {g} must have degree {self.free.deg[g] + flavor.dsign}, got {el.degree}")
                if flavor.operad == "lie":
                    self.free.coords(el, el.degree)  # raises unless a Lie element
            self.d[g] = el
        extra = set(differential or {}) - set(self.free.deg)
        if extra:
            raise KeyError(f"differential given for unknown generators {sorted(extra)}")
        self._dmat: Dict[int, SparseMatrix] = {}
        self._check_square_zero()

    # -- basic structure ----------------------------------------------------
    @property
    def generators(self) -> Dict[str, int]:
        return {g: self.free.deg[g] for g in self.free.gens}

    @property
    def gens(self) -> Tuple[str, ...]:
        return self.free.gens

    def degree_of(self, g: str) -> int:
        return self.free.deg[g]

    @property
    def dsign(self) -> int:
        return self.flavor.dsign

    @property
    def top_generator_degree(self) -> int:
        return max(self.free.deg.values(), default=0)

    @property
    def one_connected(self) -> bool:
        low = 2 if self.flavor.direction == "cochain" else 1
        return all(d >= low for d in self.free.deg.values())

    def gen(self, name: str) -> Element:
        return self.free.gen(name)

    def zero(self) -> Element:
        return self.free.zero()

    def element(self, terms) -> Element:
        return self.free.element(terms)

    def __eq__(self, other):
        if not isinstance(other, QuasiFreeAlgebra):
            return NotImplemented
        return (self.flavor == other.flavor and self.free.deg == other.free.deg
                and self.cutoff == other.cutoff
                and all(self.d[g].terms == other.d[g].terms for g in self.gens))

    def __hash__(self):
        return hash((self.flavor, tuple(self.gens), self.cutoff))

    def __repr__(self):
        gens = ", ".join(f"{g}:{self.free.deg[g]}" for g in self.gens)
        return f"QuasiFreeAlgebra({self.flavor}; {gens}; cutoff {self.cutoff})"

    # -- differential -------------------------------------------------------
    def diff(self, x: Element) -> Element:
        return Element(self.free, self.free.derivation_terms(self.d, x.terms, self.dsign))

    def _check_square_zero(self):
        for g in self.gens:
            if self.free.deg[g] + 2 * self.dsign > self.cutoff:
                continue
            dd = self.diff(self.d[g])
            if dd.terms:
                raise NotAComplexError(f"d(d({g})) = {dd} ≠ 0")

    def basis(self, degree: int) -> List[Element]:
        return self.free.basis(degree)

    def dim(self, degree: int) -> int:
        if self.flavor.unitary and degree == 0:
            return 1
        return self.free.dim(degree)

    def coords(self, x: Element, degree: int) -> Dict[int, Fraction]:
        return self.free.coords(x, degree)

    def d_matrix(self, degree: int) -> SparseMatrix:
        """Matrix of ``d`` from ``degree`` to ``degree + dsign`` in :meth:`basis` coordinates."""
        if degree not in self._dmat:
            tgt = degree + self.dsign
            cols = []
            for b in self.free.basis(degree):
                cols.append(self.free.coords(self.diff(b), tgt))
            self._dmat[degree] = SparseMatrix(self.free.dim(tgt), len(cols), tuple(cols))
        return self._dmat[degree]

    def solve_boundary(self, y: Element, degree: int) -> Optional[Element]:
        """Some ``x`` of the given degree with ``d x = y`` (pivot-supported), or None."""
        from .exactlin import solve_matrix
        tgt = degree + self.dsign
        if not y.terms:
            return self.zero()
        if degree < 1:
            return None
        sol = solve_matrix(self.d_matrix(degree), self.free.coords(y, tgt))
        return None if sol is None else self.free.from_coords(degree, sol)

    def cycles(self, degree: int) -> List[Element]:
        return [self.free.from_coords(degree, z) for z in kernel(self.d_matrix(degree))]

    def random_element(self, degree: int, rng, span: int = 3, density: float = 1.0) -> Element:
        """Random element with small integer coefficients (for tests and samplers)."""
        out = self.zero()
        for b in self.free.basis(degree):
            if rng.random() <= density:
                out = out + Fraction(rng.randint(-span, span)) * b
        return out

    # -- homology -----------------------------------------------------------
    def homology_dim(self, degree: int) -> int:
        if degree > self.cutoff - 1:
            raise CutoffError(f"homology in degree {degree} is not certified (cutoff {self.cutoff})")
        if self.flavor.unitary and degree == 0:
            return 1
        if degree < 1:
            return 0
        out = self.d_matrix(degree)
        inc = self.d_matrix(degree - self.dsign)
        return out.ncols - rank(out) - rank(inc)

    def homology(self, degree: int) -> "HomologyData":
        if degree > self.cutoff - 1:
            raise CutoffError(f"homology in degree {degree} is not certified (cutoff {self.cutoff})")
        return HomologyData(self, degree)

    # -- predicates ---------------------------------------------------------
    def is_minimal(self) -> bool:
        return all(self.free.is_decomposable(self.d[g]) for g in self.gens)

    def is_sparsely_generated(self) -> bool:
        degs = set(self.free.deg.values())
        return not any(d + 1 in degs for d in degs)

    def to_finite(self, top: int = None) -> "FiniteAlgebra":
        return FiniteAlgebra.from_quasi_free(self, self.cutoff if top is None else top)


def check_minimal(A: QuasiFreeAlgebra) -> bool:
    """True iff no generator has a linear part in its differential."""
    return A.is_minimal()


def check_sparsely_generated(A: QuasiFreeAlgebra) -> bool:
    return A.is_sparsely_generated()


def truncate(A: QuasiFreeAlgebra, n: int) -> QuasiFreeAlgebra:
    """The subalgebra generated by the generators of degree ``<= n``."""
    keep = [g for g in A.gens if A.degree_of(g) <= n]
    keepset = set(keep)
    d = {}
    for g in keep:
        stray = A.free.generators_in(A.d[g]) - keepset
        if stray:
            raise NotClosedError(f"d {g} involves {sorted(stray)}, outside the truncation at {n}")
        d[g] = A.d[g].terms
    return QuasiFreeAlgebra(A.flavor, {g: A.degree_of(g) for g in keep}, d, A.cutoff,
                            name=f"{A.name}_{n}" if A.name else None)


def homology_in_range(A: QuasiFreeAlgebra, lo: int, hi: int) -> List[int]:
    """Betti numbers of ``A`` in degrees ``lo..hi`` (inclusive)."""
    if hi > A.cutoff - 1:
        raise CutoffError(f"degree {hi} exceeds the certified range <= {A.cutoff - 1}")
    return [A.homology_dim(k) for k in range(lo, hi + 1)]


class HomologyData:
    """Cycle representatives of a homology group and a classifier for cycles."""

    def __init__(self, A: QuasiFreeAlgebra, degree: int):
        self.algebra = A
        self.degree = degree
        self.unit = A.flavor.unitary and degree == 0
        self.reps: List[Dict[int, Fraction]] = []
        if self.unit or degree < 1:
            self._ech = None
            return
        out = A.d_matrix(degree)
        inc = A.d_matrix(degree - A.dsign)
        self._ech = Echelon()
        self._nb = 0
        for v in image(inc):
            if self._ech.add(v, ("b", self._nb)):
                self._nb += 1
        for z in kernel(out):
            if self._ech.add(z, ("h", len(self.reps))):
                self.reps.append(z)

    @property
    def dim(self) -> int:
        return 1 if self.unit else len(self.reps)

    def rep_elements(self) -> List[Element]:
        return [self.algebra.free.from_coords(self.degree, z) for z in self.reps]

    def classify(self, x) -> List[Fraction]:
        """Coordinates of the class of the cycle ``x`` (Element or coords)."""
        if self.unit:
            return [Fraction(1)]
        if isinstance(x, Element):
            x = self.algebra.coords(x, self.degree)
        if self._ech is None:
            return []
        combo = self._ech.coords(x)
        if combo is None:
            raise ValueError("not a cycle of this degree")
        out = [Fraction(0)] * len(self.reps)
        for i, c in combo.items():
            kind, j = self._ech.labels[i]
            if kind == "h":
                out[j] = c
        return out


# ---------------------------------------------------------------------------
# finite-type presentations


class FiniteAlgebra:
    """Finite-dimensional (or degree-truncated) algebra with explicit structure constants.

    Elements are sparse vectors ``{basis name: coefficient}``.  ``mul`` holds
    the products (brackets for Lie) of basis pairs; products of total degree
    above ``cutoff`` are treated as unknown, never as zero.
    """

    def __init__(self, flavor: Flavor, basis: Mapping[int, Sequence[str]],
                 diff: Mapping[str, Mapping[str, Fraction]] = None,
                 mul: Mapping[Tuple[str, str], Mapping[str, Fraction]] = None,
                 cutoff: int = None, check: bool = True, name: str = None):
        self.flavor = flavor
        self.name = name
        self.basis = {int(k): tuple(v) for k, v in basis.items() if v}
        self.degree_of: Dict[str, int] = {}
        for k, names in self.basis.items():
            if k < 1:
                raise ConnectivityError("only the reduced part (degrees >= 1) is stored")
            for n in names:
                if n in self.degree_of:
                    raise ValueError(f"duplicate basis name {n}")
                self.degree_of[n] = k
        top = max(self.basis, default=0)
        self.cutoff = top if cutoff is None else int(cutoff)
        self.diff = {n: {m: Q(c) for m, c in v.items() if c} for n, v in (diff or {}).items()}
        self.mul = {tuple(k): {m: Q(c) for m, c in v.items() if c} for k, v in (mul or {}).items()}
        for n, v in self.diff.items():
            for m in v:
                if self.degree_of.get(m) != self.degree_of[n] + flavor.dsign:
                    raise DegreeError(f"d {n} has a component {m} of the wrong degree")
        for (a, b), v in self.mul.items():
            for m in v:
                if self.degree_of.get(m) != self.degree_of[a] + self.degree_of[b]:
                    raise DegreeError(f"{a}·{b} has a component {m} of the wrong degree")
        if check:
            self._validate()

    @property
    def dsign(self) -> int:
        return self.flavor.dsign

    def names(self, degree: int) -> Tuple[str, ...]:
        return self.basis.get(degree, ())

    def dim(self, degree: int) -> int:
        if self.flavor.unitary and degree == 0:
            return 1
        return len(self.names(degree))

    def d(self, x: Mapping[str, Fraction]) -> Dict[str, Fraction]:
        out: Dict[str, Fraction] = {}
        for n, c in x.items():
            vec_add(out, self.diff.get(n, {}), c)
        return out

    def product(self, x: Mapping[str, Fraction], y: Mapping[str, Fraction]) -> Dict[str, Fraction]:
        out: Dict[str, Fraction] = {}
        for a, ca in x.items():
            for b, cb in y.items():
                if self.degree_of[a] + self.degree_of[b] > self.cutoff:
                    raise CutoffError(f"product {a}·{b} lies above the cutoff")
                vec_add(out, self.mul.get((a, b), {}), ca * cb)
        return out

    def d_matrix(self, degree: int) -> SparseMatrix:
        src, tgt = self.names(degree), self.names(degree + self.dsign)
        pos = {n: i for i, n in enumerate(tgt)}
        cols = [{pos[m]: c for m, c in self.diff.get(n, {}).items()} for n in src]
        return SparseMatrix(len(tgt), len(src), tuple(cols))

    def homology_dim(self, degree: int) -> int:
        if self.flavor.unitary and degree == 0:
            return 1
        if degree < 1:
            return 0
        out = self.d_matrix(degree)
        inc = self.d_matrix(degree - self.dsign)
        return out.ncols - rank(out) - rank(inc)

    def _validate(self):
        for n in self.diff:
            if self.degree_of[n] + 2 * self.dsign > self.cutoff:
                continue
            if self.d(self.d({n: Fraction(1)})):
                raise NotAComplexError(f"d(d({n})) ≠ 0")
        names = list(self.degree_of)
        for a in names:
            for b in names:
                da, db = self.degree_of[a], self.degree_of[b]
                if da + db + self.dsign > self.cutoff or da + db + self.dsign < 1 or da + db > self.cutoff:
                    continue
                self._check_leibniz(a, b)

    def _check_leibniz(self, a: str, b: str):
        # d(ab) = d(a)b + (-1)^{|a|} a d(b)
        lhs = self.d(self.mul.get((a, b), {}))
        rhs: Dict[str, Fraction] = {}
        vec_add(rhs, self.product(self.d({a: Fraction(1)}), {b: Fraction(1)}))
        vec_add(rhs, self.product({a: Fraction(1)}, self.d({b: Fraction(1)})), sign(self.degree_of[a]))
        if lhs != rhs:
            raise NotAComplexError(f"d is not a derivation on {a}·{b}")

    @classmethod
    def from_quasi_free(cls, A: QuasiFreeAlgebra, top: int) -> "FiniteAlgebra":
        """Explicit structure constants of ``A`` in degrees ``<= top``.

        Basis names are the labels of :meth:`FreeAlgebra.basis_labels`.
        """
        top = min(top, A.cutoff)
        basis = {k: A.free.basis_labels(k) for k in range(1, top + 1)}
        elems = {k: A.free.basis(k) for k in range(1, top + 1)}
        diff = {}
        for k in range(1, top + 1):
            tgt = k + A.dsign
            if tgt > top or tgt < 1:
                continue
            tl = basis[tgt]
            for lab, e in zip(basis[k], elems[k]):
                diff[lab] = {tl[i]: c for i, c in A.free.coords(A.diff(e), tgt).items()}
        mul = {}
        for p in range(1, top + 1):
            for q in range(1, top + 1 - p):
                tl = basis[p + q]
                for la, a in zip(basis[p], elems[p]):
                    for lb, b in zip(basis[q], elems[q]):
                        prod = A.free.mul(a, b)
                        mul[(la, lb)] = {tl[i]: c for i, c in A.free.coords(prod, p + q).items()}
        fa = cls(A.flavor, basis, diff, mul, cutoff=top, check=False, name=A.name)
        fa.elements = elems
        return fa


# ---------------------------------------------------------------------------
# morphisms


class Morphism:
    """Algebra map between quasi-free algebras, given on generators.

    The map is certified up to ``cutoff = min(source.cutoff, target.cutoff)``;
    generators of the source above that degree are outside its domain.
    """

    def __init__(self, source: QuasiFreeAlgebra, target: QuasiFreeAlgebra,
                 assignment: Mapping[str, object], check: bool = True, name: str = None):
        if source.flavor.operad != target.flavor.operad or source.flavor.direction != target.flavor.direction:
            raise FlavorError(f"cannot map {source.flavor} to {target.flavor}")
        self.source = source
        self.target = target
        self.name = name
        self.cutoff = min(source.cutoff, target.cutoff)
        self.domain = tuple(g for g in source.gens if source.degree_of(g) <= self.cutoff)
        self.assignment: Dict[str, Element] = {}
        for g in self.domain:
            raw = assignment.get(g)
            if raw is None:
                raise KeyError(f"assignment missing generator {g!r}")
            terms = raw.terms if isinstance(raw, Element) else raw
            el = target.free.element(terms)
            if el.terms and (not el.is_homogeneous() or el.degree != source.degree_of(g)):
                raise DegreeError(f"{g} has degree {source.degree_of(g)} but is sent to degree {el.degree}")
            self.assignment[g] = el
        if check:
            bad = self.chain_map_failure()
            if bad is not None:
                raise ChainMapError(f"f(d {bad}) ≠ d f({bad})")

    def chain_map_failure(self) -> Optional[str]:
        dom = set(self.domain)
        for g in self.domain:
            dg = self.source.d[g]
            if self.source.degree_of(g) + self.source.dsign > self.cutoff:
                continue
            if not self.source.free.generators_in(dg) <= dom:
                continue
            if (self(dg) - self.target.diff(self.assignment[g])).terms:
                return g
        return None

    def __call__(self, x: Element) -> Element:
        return self.source.free.extend_as_morphism(self.assignment, x, self.target.free)

    def compose(self, first: "Morphism") -> "Morphism":
        """``self ∘ first``."""
        a, b = first.target.free.deg, self.source.free.deg
        if first.target.flavor != self.source.flavor or any(a[g] != b[g] for g in a.keys() & b.keys()):
            raise FlavorError("morphisms are not composable")
        assign = {}
        for g in first.domain:
            x = first.assignment[g]
            if x.terms and x.degree > self.cutoff:
                continue
            assign[g] = self(self.source.free.coerce(x)) if x.terms else self.target.zero()
        src = first.source
        cut = min(first.cutoff, self.cutoff)
        if cut < src.cutoff:
            src = _with_cutoff(src, cut)
        return Morphism(src, self.target, assign, check=False)

    def __mul__(self, first: "Morphism") -> "Morphism":
        return self.compose(first)

    def restrict(self, sub: QuasiFreeAlgebra) -> "Morphism":
        return Morphism(sub, self.target, {g: self.assignment[g] for g in sub.gens
                                           if sub.degree_of(g) <= min(sub.cutoff, self.target.cutoff)})

    def with_target(self, target: QuasiFreeAlgebra) -> "Morphism":
        return Morphism(self.source, target, {g: target.free.coerce(v) for g, v in self.assignment.items()})

    def matrix(self, degree: int) -> SparseMatrix:
        cols = [self.target.free.coords(self(b), degree) for b in self.source.free.basis(degree)]
        return SparseMatrix(self.target.free.dim(degree), len(cols), tuple(cols))

    def induced_on_homology(self, degree: int) -> SparseMatrix:
        hs = self.source.homology(degree)
        ht = self.target.homology(degree)
        if hs.unit:
            return SparseMatrix.identity(1)
        cols = []
        for z in hs.rep_elements():
            cols.append({i: c for i, c in enumerate(ht.classify(self(z))) if c})
        return SparseMatrix(ht.dim, hs.dim, tuple(cols))

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        if set(self.domain) != set(other.domain):
            return False
        return all(self.assignment[g].terms == other.assignment[g].terms for g in self.domain)

    def __hash__(self):
        return hash(self.domain)

    def __repr__(self):
        body = ", ".join(f"{g} ↦ {self.assignment[g]}" for g in self.domain)
        return f"Morphism({body})"

    @classmethod
    def identity(cls, A: QuasiFreeAlgebra) -> "Morphism":
        return cls(A, A, {g: A.gen(g) for g in A.gens}, check=False)


def _with_cutoff(A: QuasiFreeAlgebra, cutoff: int) -> QuasiFreeAlgebra:
    keep = {g: A.degree_of(g) for g in A.gens if A.degree_of(g) <= cutoff}
    d = {g: A.d[g].terms for g in keep
         if A.free.generators_in(A.d[g]) <= set(keep)}
    out = QuasiFreeAlgebra(A.flavor, keep, d, cutoff, name=A.name)
    out.koszul = A.koszul
    return out


def compose(f: Morphism, g: Morphism) -> Morphism:
    """``f ∘ g``."""
    return f.compose(g)


def is_quasi_iso_in_range(f: Morphism, lo: int, hi: int) -> bool:
    """Does ``f`` induce isomorphisms on homology in degrees ``lo..hi``?"""
    if hi > min(f.source.cutoff, f.target.cutoff) - 1:
        raise CutoffError(f"degree {hi} exceeds the certified range")
    for k in range(lo, hi + 1):
        M = f.induced_on_homology(k)
        if M.nrows != M.ncols or rank(M) != M.nrows:
            return False
    return True


def homology_invariant_difference(f: Morphism, g: Morphism, lo: int, hi: int) -> Optional[str]:
    """First degree where ``f`` and ``g`` induce different maps on homology, as text."""
    for k in range(lo, hi + 1):
        Mf, Mg = f.induced_on_homology(k), g.induced_on_homology(k)
        if Mf != Mg:
            if Mf.nrows == Mf.ncols == 1:
                a = Mf.columns[0].get(0, Fraction(0))
                b = Mg.columns[0].get(0, Fraction(0))
                return f"H{k} invariant differs: {a} vs {b}"
            return f"H{k} invariant differs: {Mf.to_dense()} vs {Mg.to_dense()}"
    return None


def linear_part_matrix(f: Morphism, degree: int) -> SparseMatrix:
    """Matrix of the map induced on generators (indecomposables) in one degree."""
    src = [g for g in f.source.gens if f.source.degree_of(g) == degree]
    tgt = [g for g in f.target.gens if f.target.degree_of(g) == degree]
    pos = {g: i for i, g in enumerate(tgt)}
    cols = []
    for g in src:
        cols.append({pos[w[0]]: c for w, c in f.assignment[g].terms.items() if len(w) == 1})
    return SparseMatrix(len(tgt), len(src), tuple(cols))


def is_isomorphism(f: Morphism) -> bool:
    """For 1-connected quasi-free algebras: iso iff the linear part is invertible."""
    degs = sorted(set(f.source.free.deg.values()) | set(f.target.free.deg.values()))
    for k in degs:
        if k > f.cutoff:
            continue
        M = linear_part_matrix(f, k)
        if M.nrows != M.ncols or rank(M) != M.nrows:
            return False
    return True


def invert(f: Morphism) -> Morphism:
    """Strict inverse of an automorphism-like map with invertible linear part.

    Generators are processed by increasing degree: if ``f(v) = L(v) + q(v)``
    with ``q`` decomposable in lower generators, then
    ``f^{-1}(v) = Σ c_w (w - f^{-1}(q(w)))`` where ``c = L^{-1}``.
    """
    if not is_isomorphism(f):
        raise PreconditionError("map is not invertible (singular linear part)")
    A, B = f.source, f.target
    inv: Dict[str, Element] = {}
    for k in sorted(set(B.free.deg.values())):
        if k > f.cutoff:
            continue
        tg = [g for g in B.gens if B.degree_of(g) == k]
        sg = [g for g in A.gens if A.degree_of(g) == k]
        M = linear_part_matrix(f, k)
        Minv = inverse(M)
        for j, v in enumerate(tg):
            out = A.zero()
            for i, c in Minv.columns[j].items():
                w = sg[i]
                dec = Element(B.free, {m: x for m, x in f.assignment[w].terms.items() if len(m) >= 2})
                corr = B.free.extend_as_morphism(inv, dec, A.free) if dec.terms else A.zero()
                out = out + c * (A.gen(w) - corr)
            inv[v] = out
    return Morphism(B, A, inv, check=True)


def lift_through_surjection(p: Morphism, f: Morphism, preimages: Mapping[str, Element] = None) -> Morphism:
    """Lift ``f: A -> C`` through a surjective quasi-isomorphism ``p: B -> C``.

    Returns ``g: A -> B`` with ``p ∘ g = f``.  Generators of ``A`` are processed
    by increasing degree, so ``A`` must satisfy the usual triangularity
    (``d v`` only involves generators of lower degree), which holds for
    minimal 1-connected algebras.  ``preimages`` may supply a chosen preimage
    of ``f(v)`` for some generators.
    """
    A, B = f.source, p.source
    if p.target.free.deg != f.target.free.deg:
        raise FlavorError("p and f must share the target")
    lifted: Dict[str, Element] = {}
    for g in sorted(f.domain, key=lambda g: (A.degree_of(g), A.free.rank[g])):
        k = A.degree_of(g)
        if k > B.cutoff or (k + B.dsign > B.cutoff):
            continue
        stray = A.free.generators_in(A.d[g]) - set(lifted)
        if stray:
            raise PreconditionError(f"d {g} involves generators {sorted(stray)} not yet lifted")
        target_val = f.assignment[g]
        x = (preimages or {}).get(g)
        if x is None:
            x = _preimage(p, target_val, k)
        # e = g(dv) - d x lies in ker p and is a cycle; kill it inside ker p
        gdv = A.free.extend_as_morphism(lifted, A.d[g], B.free) if A.d[g].terms else B.zero()
        e = gdv - B.diff(x)
        if e.terms:
            y = _solve_in_kernel(p, e, k)
            x = x + y
        lifted[g] = x
    src = A if all(g in lifted for g in A.gens) else _with_cutoff(A, max((A.degree_of(g) for g in lifted), default=0))
    return Morphism(src, B, lifted)


def _preimage(p: Morphism, y: Element, degree: int) -> Element:
    from .exactlin import solve_matrix
    M = p.matrix(degree)
    x = solve_matrix(M, p.target.free.coords(y, degree))
    if x is None:
        raise PreconditionError(f"{y} is not in the image of the surjection")
    return p.source.free.from_coords(degree, x)


def _solve_in_kernel(p: Morphism, e: Element, degree: int) -> Element:
    """Find ``y`` in ``ker p`` of the given degree with ``d y = e``."""
    from .exactlin import solve_matrix
    B = p.source
    K = kernel(p.matrix(degree))
    tgt = degree + B.dsign
    D = B.d_matrix(degree)
    cols = [D.apply(k) for k in K]
    M = SparseMatrix(B.free.dim(tgt), len(cols), tuple(cols))
    sol = solve_matrix(M, B.free.coords(e, tgt))
    if sol is None:
        raise PreconditionError("kernel of the surjection is not acyclic in the needed degree")
    out: Dict[int, Fraction] = {}
    for j, c in sol.items():
        vec_add(out, K[j], c)
    return B.free.from_coords(degree, out)
