"""Free graded algebras on a graded generator set.

Three operads are supported:

* ``com``   -- free graded-commutative algebra; a monomial is a tuple of
  generator names sorted by (degree, name), odd generators at most once;
* ``assoc`` -- free associative algebra; a monomial is any word;
* ``lie``   -- free graded Lie algebra, realized inside the tensor algebra via
  ``[a, b] = a⊗b - (-1)^{|a||b|} b⊗a``.  Elements are stored as tensor words.

Sign convention (shared by every module): moving a homogeneous ``a`` past a
homogeneous ``b`` costs ``(-1)^{|a||b|}``; a derivation ``θ`` of degree ``s``
picks up ``(-1)^{s·|x|}`` when it passes ``x``.  Only parities matter, so
chain and cochain gradings use the same rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import DegreeError, FlavorError, ShiftError
from .exactlin import Echelon, Q, vec_add, vec_scale

Word = Tuple[str, ...]
Terms = Dict[Word, Fraction]

OPERADS = ("com", "lie", "assoc")
DIRECTIONS = ("chain", "cochain")


def sign(n: int) -> int:
    return -1 if n % 2 else 1


@dataclass(frozen=True)
class Flavor:
    operad: str
    direction: str
    unitary: bool = False

    def __post_init__(self):
        if self.operad not in OPERADS:
            raise FlavorError(f"unknown operad {self.operad!r}")
        if self.direction not in DIRECTIONS:
            raise FlavorError(f"unknown direction {self.direction!r}")
        if self.operad == "lie" and self.unitary:
            raise FlavorError("Lie algebras are always reduced")

    @property
    def dsign(self) -> int:
        """Degree of the differential: +1 cochain, -1 chain."""
        return 1 if self.direction == "cochain" else -1

    def __str__(self):
        return f"{self.operad} {self.direction} {'unitary' if self.unitary else 'reduced'}"


class Element:
    """Exact-rational combination of monomials of a :class:`FreeAlgebra`."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: "FreeAlgebra", terms: Mapping[Word, Fraction] = None):
        self.alg = alg
        self.terms: Terms = {w: Q(c) for w, c in (terms or {}).items() if c}

    @property
    def degree(self) -> Optional[int]:
        """Degree of a homogeneous element, None for zero."""
        for w in self.terms:
            return self.alg.word_degree(w)
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        return len({self.alg.word_degree(w) for w in self.terms}) <= 1

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if other.alg.flavor.operad != self.alg.flavor.operad:
            raise FlavorError(f"cannot combine {self.alg.flavor} with {other.alg.flavor}")
        return other

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.alg, vec_add(dict(self.terms), other.terms))

    __radd__ = __add__

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.alg, vec_add(dict(self.terms), other.terms, -1))

    def __neg__(self):
        return Element(self.alg, vec_scale(self.terms, -1))

    def __mul__(self, other):
        if isinstance(other, Element):
            return self.alg.mul(self, other)
        return Element(self.alg, vec_scale(self.terms, Q(other)))

    def __rmul__(self, other):
        return Element(self.alg, vec_scale(self.terms, Q(other)))

    def __truediv__(self, other):
        return Element(self.alg, vec_scale(self.terms, 1 / Q(other)))

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Element):
            return NotImplemented
        return self.alg.flavor.operad == other.alg.flavor.operad and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Element({self.alg.format(self)})"

    def __str__(self):
        return self.alg.format(self)


def _fmt_coef(c: Fraction, first: bool) -> str:
    neg = c < 0
    a = -c if neg else c
    body = "" if a == 1 else f"{a} "
    if first:
        return ("-" if neg else "") + body
    return (" - " if neg else " + ") + body


class FreeAlgebra:
    """Free graded algebra of a given flavor on named generators.

    ``generators`` maps names to integer degrees.  Generators are ordered by
    (degree, name); this order fixes the normal form of commutative monomials
    and the order of every basis produced here.
    """

    def __init__(self, flavor: Flavor, generators: Mapping[str, int]):
        self.flavor = flavor
        self.deg: Dict[str, int] = {str(k): int(v) for k, v in generators.items()}
        self.gens: Tuple[str, ...] = tuple(sorted(self.deg, key=lambda g: (self.deg[g], g)))
        self.rank = {g: i for i, g in enumerate(self.gens)}
        self._basis_cache: Dict[int, tuple] = {}

    # -- identity -----------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, FreeAlgebra) and self.flavor == other.flavor and self.deg == other.deg

    def __hash__(self):
        return hash((self.flavor, tuple(sorted(self.deg.items()))))

    def __repr__(self):
        gens = ", ".join(f"{g}:{self.deg[g]}" for g in self.gens)
        return f"FreeAlgebra({self.flavor}; {gens})"

    @property
    def operad(self) -> str:
        return self.flavor.operad

    # -- elements -----------------------------------------------------------
    def word_degree(self, w: Word) -> int:
        return sum(self.deg[g] for g in w)

    def gen(self, name: str) -> Element:
        if name not in self.deg:
            raise KeyError(f"no generator named {name!r}")
        return Element(self, {(name,): Fraction(1)})

    def zero(self) -> Element:
        return Element(self)

    def element(self, terms: Mapping[Word, Fraction]) -> Element:
        for w in terms:
            for g in w:
                if g not in self.deg:
                    raise KeyError(f"no generator named {g!r}")
        if self.operad == "com":
            out: Terms = {}
            for w, c in terms.items():
                s, m = self._com_normalize(w)
                if s:
                    vec_add(out, {m: Q(c)}, s)
            return Element(self, out)
        return Element(self, terms)

    def coerce(self, x: Element) -> Element:
        """Re-home ``x`` (e.g. from a subalgebra) into this algebra."""
        if x.alg is self:
            return x
        if x.alg.operad != self.operad:
            raise FlavorError("cannot coerce across operads")
        for w in x.terms:
            for g in w:
                if self.deg.get(g) != x.alg.deg[g]:
                    raise KeyError(f"generator {g!r} is not shared")
        return Element(self, x.terms)

    # -- products -----------------------------------------------------------
    def _com_normalize(self, w: Word) -> Tuple[int, Word]:
        """Sort a commutative word with its Koszul sign; (0, ()) if it vanishes."""
        seq = list(w)
        s = 1
        # insertion sort, tracking transpositions of odd elements
        for i in range(1, len(seq)):
            j = i
            while j > 0 and self.rank[seq[j - 1]] > self.rank[seq[j]]:
                if self.deg[seq[j - 1]] % 2 and self.deg[seq[j]] % 2:
                    s = -s
                seq[j - 1], seq[j] = seq[j], seq[j - 1]
                j -= 1
        for a, b in zip(seq, seq[1:]):
            if a == b and self.deg[a] % 2:
                return 0, ()
        return s, tuple(seq)

    def _com_merge(self, m1: Word, m2: Word) -> Tuple[int, Word]:
        if not m1:
            return 1, m2
        if not m2:
            return 1, m1
        rank, deg = self.rank, self.deg
        out = []
        i = j = 0
        odd_left_remaining = sum(1 for g in m1 if deg[g] % 2)
        exp = 0
        while i < len(m1) and j < len(m2):
            a, b = m1[i], m2[j]
            if rank[b] < rank[a]:
                if deg[b] % 2:
                    exp += odd_left_remaining
                out.append(b)
                j += 1
            else:
                if a == b and deg[a] % 2:
                    return 0, ()
                out.append(a)
                if deg[a] % 2:
                    odd_left_remaining -= 1
                i += 1
        out.extend(m1[i:])
        out.extend(m2[j:])
        return sign(exp), tuple(out)

    def word_mul_terms(self, a: Mapping[Word, Fraction], b: Mapping[Word, Fraction]) -> Terms:
        """Underlying associative product: commutative product or concatenation."""
        out: Terms = {}
        if self.operad == "com":
            for w1, c1 in a.items():
                for w2, c2 in b.items():
                    s, m = self._com_merge(w1, w2)
                    if s:
                        c = out.get(m, 0) + s * c1 * c2
                        if c:
                            out[m] = c
                        else:
                            out.pop(m, None)
        else:
            for w1, c1 in a.items():
                for w2, c2 in b.items():
                    m = w1 + w2
                    c = out.get(m, 0) + c1 * c2
                    if c:
                        out[m] = c
                    else:
                        out.pop(m, None)
        return out

    def bracket_terms(self, a: Terms, b: Terms, da: int, db: int) -> Terms:
        out = self.word_mul_terms(a, b)
        vec_add(out, self.word_mul_terms(b, a), -sign(da * db))
        return out

    def mul(self, a: Element, b: Element) -> Element:
        """Flavor product: graded-commutative product, concatenation, or bracket."""
        for x in (a, b):
            if x.alg.operad != self.operad:
                raise FlavorError(f"mixed flavors: {x.alg.flavor} vs {self.flavor}")
        if self.operad == "lie":
            if not a.terms or not b.terms:
                return self.zero()
            return Element(self, self.bracket_terms(a.terms, b.terms, a.degree, b.degree))
        return Element(self, self.word_mul_terms(a.terms, b.terms))

    def bracket(self, a: Element, b: Element) -> Element:
        """Graded commutator ``ab - (-1)^{|a||b|} ba`` (for any operad)."""
        if not a.terms or not b.terms:
            return self.zero()
        return Element(self, self.bracket_terms(a.terms, b.terms, a.degree, b.degree))

    # -- bases --------------------------------------------------------------
    def _words(self, degree: int, commutative: bool) -> List[Word]:
        gens = [g for g in self.gens if self.deg[g] > 0]
        out: List[Word] = []

        def rec(prefix: list, remaining: int, start: int):
            if remaining == 0:
                if prefix:
                    out.append(tuple(prefix))
                return
            for k in range(start if commutative else 0, len(gens)):
                g = gens[k]
                dg = self.deg[g]
                if dg > remaining:
                    if commutative:
                        break
                    continue
                if commutative and self.deg[g] % 2 and prefix and prefix[-1] == g:
                    continue
                prefix.append(g)
                rec(prefix, remaining - dg, k)
                prefix.pop()

        if degree > 0:
            rec([], degree, 0)
        return out

    def _build_basis(self, degree: int):
        if degree in self._basis_cache:
            return self._basis_cache[degree]
        if degree <= 0:
            data = ([], [], None)
        elif self.operad == "com":
            ws = sorted(self._words(degree, True), key=lambda w: (len(w), [self.rank[g] for g in w]))
            data = ([Element(self, {w: Fraction(1)}) for w in ws], ["*".join(w) for w in ws],
                    {w: i for i, w in enumerate(ws)})
        elif self.operad == "assoc":
            ws = sorted(self._words(degree, False), key=lambda w: (len(w), [self.rank[g] for g in w]))
            data = ([Element(self, {w: Fraction(1)}) for w in ws], ["*".join(w) for w in ws],
                    {w: i for i, w in enumerate(ws)})
        else:
            data = self._build_lie_basis(degree)
        self._basis_cache[degree] = data
        return data

    def _build_lie_basis(self, degree: int):
        # L_d is spanned by generators of degree d and [g, y] with y in a basis of L_{d-|g|}
        elems: List[Element] = []
        labels: List[str] = []
        by_content: Dict[Word, Tuple[Echelon, List[int]]] = {}

        def offer(terms: Terms, label: str):
            if not terms:
                return
            content = tuple(sorted(next(iter(terms)), key=lambda g: self.rank[g]))
            ech, idx = by_content.setdefault(content, (Echelon(), []))
            if ech.add(terms):
                idx.append(len(elems))
                elems.append(Element(self, terms))
                labels.append(label)

        for g in self.gens:
            if self.deg[g] == degree:
                offer({(g,): Fraction(1)}, g)
        for g in self.gens:
            dg = self.deg[g]
            if dg <= 0 or dg >= degree:
                continue
            ys, ylabels, _ = self._build_basis(degree - dg)
            for y, yl in zip(ys, ylabels):
                offer(self.bracket_terms({(g,): Fraction(1)}, y.terms, dg, degree - dg), f"[{g},{yl}]")
        return elems, labels, by_content

    def basis(self, degree: int) -> List[Element]:
        """Linearly independent spanning set of the degree component (deterministic)."""
        return list(self._build_basis(degree)[0])

    def basis_labels(self, degree: int) -> List[str]:
        return list(self._build_basis(degree)[1])

    def dim(self, degree: int) -> int:
        return len(self._build_basis(degree)[0])

    def coords(self, x, degree: int) -> Dict[int, Fraction]:
        """Sparse coordinates of ``x`` (Element or terms) in :meth:`basis`.

        Raises :class:`DegreeError` when ``x`` is not in the degree component
        (for Lie: not a Lie element).
        """
        terms = x.terms if isinstance(x, Element) else x
        elems, _, index = self._build_basis(degree)
        if not terms:
            return {}
        if self.operad != "lie":
            out = {}
            for w, c in terms.items():
                i = index.get(w) if index is not None else None
                if i is None:
                    raise DegreeError(f"monomial {w} is not in degree {degree}")
                out[i] = c
            return out
        groups: Dict[Word, Terms] = {}
        for w, c in terms.items():
            content = tuple(sorted(w, key=lambda g: self.rank[g]))
            groups.setdefault(content, {})[w] = c
        out: Dict[int, Fraction] = {}
        for content, part in groups.items():
            if content not in index:
                raise DegreeError(f"element is not a Lie element of degree {degree}")
            ech, idx = index[content]
            combo = ech.coords(part)
            if combo is None:
                raise DegreeError(f"element is not a Lie element of degree {degree}")
            for i, c in combo.items():
                if c:
                    out[idx[i]] = c
        return out

    def from_coords(self, degree: int, coords: Mapping[int, Fraction]) -> Element:
        elems = self._build_basis(degree)[0]
        out: Terms = {}
        for i, c in coords.items():
            vec_add(out, elems[i].terms, Q(c))
        return Element(self, out)

    # -- maps ---------------------------------------------------------------
    def evaluate(self, x: Element, images: Mapping[str, Terms],
                 mul: Callable[[object, object], object], add: Callable, scale: Callable, zero):
        """Evaluate ``x`` under the algebra map sending each generator to ``images[g]``.

        ``mul`` is the (associative) product of the target, applied to images
        in word order; ``add``/``scale``/``zero`` give its vector structure.
        """
        cache: Dict[Word, object] = {}

        def word_image(w: Word):
            if w in cache:
                return cache[w]
            if len(w) == 1:
                r = images[w[0]]
            else:
                r = mul(word_image(w[:-1]), images[w[-1]])
            cache[w] = r
            return r

        total = zero
        for w, c in x.terms.items():
            total = add(total, scale(word_image(w), c))
        return total

    def extend_as_morphism(self, assignment: Mapping[str, Element], x: Element,
                           target: "FreeAlgebra" = None) -> Element:
        """Image of ``x`` under the algebra map determined on generators."""
        target = target or self
        if target.operad != self.operad:
            raise FlavorError("morphisms must preserve the operad")
        imgs = {}
        for g in {h for w in x.terms for h in w}:
            if g not in assignment:
                raise KeyError(f"assignment missing generator {g!r}")
            v = assignment[g]
            if v.terms and v.degree != self.deg[g]:
                raise DegreeError(f"{g} has degree {self.deg[g]} but its image has degree {v.degree}")
            imgs[g] = v.terms
        terms = self.evaluate(x, imgs, target.word_mul_terms,
                              lambda a, b: vec_add(dict(a), b), vec_scale, {})
        return Element(target, terms)

    def extend_as_derivation(self, assignment: Mapping[str, Element], x: Element,
                             shift: int = None) -> Element:
        """Apply the degree-``shift`` derivation determined on generators to ``x``."""
        shift = self._derivation_shift(assignment, shift)
        return Element(self, self.derivation_terms(assignment, x.terms, shift))

    def _derivation_shift(self, assignment, shift):
        found = set()
        for g, v in assignment.items():
            if v.terms:
                if not v.is_homogeneous():
                    raise ShiftError(f"image of {g} is not homogeneous")
                found.add(v.degree - self.deg[g])
        if shift is not None:
            found.add(shift)
        if len(found) > 1:
            raise ShiftError(f"non-uniform derivation shift {sorted(found)}")
        return found.pop() if found else 0

    def derivation_terms(self, assignment: Mapping[str, Element], terms: Mapping[Word, Fraction],
                         shift: int) -> Terms:
        out: Terms = {}
        com = self.operad == "com"
        for w, c in terms.items():
            acc = 0
            for i, g in enumerate(w):
                img = assignment.get(g)
                if img is not None and img.terms:
                    s = sign(shift * acc) * c
                    pre, post = w[:i], w[i + 1:]
                    if com:
                        part = self.word_mul_terms(self.word_mul_terms({pre: Fraction(1)}, img.terms),
                                                   {post: Fraction(1)})
                    else:
                        part = {pre + m + post: v for m, v in img.terms.items()}
                    vec_add(out, part, s)
                acc += self.deg[g]
        return out

    # -- misc ---------------------------------------------------------------
    def linear_part(self, x: Element) -> Element:
        return Element(self, {w: c for w, c in x.terms.items() if len(w) == 1})

    def is_decomposable(self, x: Element) -> bool:
        return all(len(w) >= 2 for w in x.terms)

    def generators_in(self, x: Element) -> set:
        return {g for w in x.terms for g in w}

    def subalgebra(self, names: Iterable[str]) -> "FreeAlgebra":
        return FreeAlgebra(self.flavor, {g: self.deg[g] for g in names})

    def format(self, x: Element) -> str:
        """Text form reparsable by :mod:`quasifree.textio`."""
        if not x.terms:
            return "0"
        if self.operad == "lie":
            pieces = []
            by_deg: Dict[int, Terms] = {}
            for w, c in x.terms.items():
                by_deg.setdefault(self.word_degree(w), {})[w] = c
            for d in sorted(by_deg):
                labels = self.basis_labels(d)
                co = self.coords(by_deg[d], d)
                pieces.extend((co[i], labels[i]) for i in sorted(co))
        else:
            keyf = lambda w: (self.word_degree(w), len(w), [self.rank[g] for g in w])
            pieces = [(x.terms[w], "*".join(w)) for w in sorted(x.terms, key=keyf)]
        out = []
        for k, (c, lab) in enumerate(pieces):
            out.append(_fmt_coef(c, k == 0) + lab)
        return "".join(out)
