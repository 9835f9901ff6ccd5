"""Homotopies of algebra maps, and the obstruction-theoretic extension engine.

A homotopy ``h: A -> B ⊗ Λ(t, dt)`` is stored through its coefficient maps on
generators:

    h(v) = Σ_i α_i(v) t^i + (-1)^{|v|} β_i(v) t^i dt.

The same formula defines α_i(x), β_i(x) for every x in A once h is extended
multiplicatively.  Comparing the ``t^i dt`` parts of ``d h(v) = h(d v)`` gives

    -(i+1) α_{i+1} = d β_i + β_i d,

so α_0 and the β_i determine everything (see :meth:`Homotopy.build`).

Conventions in ``B ⊗ Λ(t,dt)``: the B factor comes first, ``t`` has degree 0,
``dt`` is odd (degree +1 for cochain, -1 for chain algebras) and

    (b ⊗ ω)(b' ⊗ ω') = (-1)^{|ω||b'|} b b' ⊗ ω ω',
    d(b ⊗ ω) = d b ⊗ ω + (-1)^{|b|} b ⊗ d ω.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .dga import (Morphism, QuasiFreeAlgebra, homology_invariant_difference, invert,
                  is_isomorphism, _with_cutoff)
from .errors import (ChainMapError, HypothesisError, MalformedHomotopyError, ObstructionError,
                     PreconditionError, QuasiFreeError, SparsenessError)
from .exactlin import SparseMatrix, solve_matrix, vec_add, vec_scale
from .freealg import Element, Terms, sign

# a polynomial form: (power of t, number of dt) -> terms of B
Form = Dict[Tuple[int, int], Terms]


class PolyForms:
    """Arithmetic in ``B ⊗ Λ(t, dt)`` for a quasi-free target B."""

    def __init__(self, B: QuasiFreeAlgebra):
        self.B = B

    def _wdeg(self, w) -> int:
        return self.B.free.word_degree(w)

    def add(self, p: Form, q: Form, scale: Fraction = Fraction(1)) -> Form:
        out = {k: dict(v) for k, v in p.items()}
        for k, v in q.items():
            t = out.setdefault(k, {})
            vec_add(t, v, scale)
            if not t:
                del out[k]
        return out

    def scale(self, p: Form, c: Fraction) -> Form:
        if not c:
            return {}
        return {k: vec_scale(v, c) for k, v in p.items()}

    def mul(self, p: Form, q: Form) -> Form:
        out: Form = {}
        mul = self.B.free.word_mul_terms
        for (i, e), bt in p.items():
            for (j, f), ct in q.items():
                if e + f > 1:
                    continue
                if e:
                    ct = {w: (-c if self._wdeg(w) % 2 else c) for w, c in ct.items()}
                prod = mul(bt, ct)
                if prod:
                    t = out.setdefault((i + j, e + f), {})
                    vec_add(t, prod)
                    if not t:
                        del out[(i + j, e + f)]
        return out

    def d(self, p: Form) -> Form:
        out: Form = {}
        B = self.B
        for (i, e), bt in p.items():
            db = B.free.derivation_terms(B.d, bt, B.dsign)
            if db:
                t = out.setdefault((i, e), {})
                vec_add(t, db)
            if e == 0 and i > 0:
                t = out.setdefault((i - 1, 1), {})
                for w, c in bt.items():
                    vec_add(t, {w: c}, i * sign(self._wdeg(w)))
        return {k: v for k, v in out.items() if v}

    def from_coefficients(self, degree: int, alphas: Sequence[Element], betas: Sequence[Element]) -> Form:
        out: Form = {}
        for i, a in enumerate(alphas):
            if a.terms:
                out[(i, 0)] = dict(a.terms)
        s = sign(degree)
        for i, b in enumerate(betas):
            if b.terms:
                out[(i, 1)] = vec_scale(b.terms, Fraction(s))
        return out

    def alpha(self, p: Form, i: int) -> Element:
        return Element(self.B.free, p.get((i, 0), {}))

    def beta(self, p: Form, i: int, degree: int) -> Element:
        """β_i of an element of the given degree whose image is ``p``."""
        return Element(self.B.free, vec_scale(p.get((i, 1), {}), Fraction(sign(degree))))

    def max_power(self, p: Form) -> int:
        return max((i for i, _ in p), default=-1)


class Homotopy:
    """A homotopy between two maps ``A -> B`` given by its α and β coefficients."""

    def __init__(self, source: QuasiFreeAlgebra, target: QuasiFreeAlgebra,
                 alphas: Mapping[str, Sequence[Element]], betas: Mapping[str, Sequence[Element]]):
        self.source = source
        self.target = target
        self.cutoff = min(source.cutoff, target.cutoff)
        self.domain = tuple(g for g in source.gens if source.degree_of(g) <= self.cutoff)
        self.alphas = {g: [target.free.coerce(a) for a in alphas.get(g, ())] for g in self.domain}
        self.betas = {g: [target.free.coerce(b) for b in betas.get(g, ())] for g in self.domain}
        for g in self.domain:
            if not self.alphas[g]:
                self.alphas[g] = [target.zero()]
        self.forms = PolyForms(target)
        self.solution_freedom: Dict[str, int] = {}

    # -- construction -------------------------------------------------------
    @classmethod
    def build(cls, f: Morphism, betas: Mapping[str, Sequence[Element]]) -> "Homotopy":
        """The homotopy starting at ``f`` with the given β_i on generators.

        The α_{i+1} are derived from the recursion, generator by generator in
        increasing degree, which needs ``d v`` to involve earlier generators
        only (automatic for chain algebras, and for minimal cochain algebras).
        """
        A, B = f.source, f.target
        P = PolyForms(B)
        images: Dict[str, Form] = {}
        alphas: Dict[str, List[Element]] = {}
        clean_betas: Dict[str, List[Element]] = {}
        for v in f.domain:
            dv = A.d[v]
            stray = A.free.generators_in(dv) - set(images)
            if stray:
                raise PreconditionError(
                    f"d {v} involves {sorted(stray)}, not yet processed; the source must be triangular")
            bv = [B.free.coerce(b) for b in betas.get(v, ())]
            deg_v = A.degree_of(v)
            for b in bv:
                if b.terms and b.degree != deg_v - A.dsign:
                    raise PreconditionError(f"β({v}) must have degree {deg_v - A.dsign}, got {b.degree}")
            hdv = _evaluate(A, P, images, dv)
            top = max(len(bv), P.max_power(hdv) + 1)
            av = [f.assignment[v]]
            for i in range(top):
                bi = bv[i] if i < len(bv) else B.zero()
                bdv = P.beta(hdv, i, deg_v + A.dsign)
                av.append(-(B.diff(bi) + bdv) / (i + 1))
            while len(av) > 1 and not av[-1].terms:
                av.pop()
            alphas[v] = av
            clean_betas[v] = bv
            images[v] = P.from_coefficients(deg_v, av, bv)
        return cls(f.source, B, alphas, clean_betas)

    @classmethod
    def constant(cls, f: Morphism) -> "Homotopy":
        return cls(f.source, f.target, {g: [f.assignment[g]] for g in f.domain}, {})

    # -- evaluation ---------------------------------------------------------
    def image(self, g: str) -> Form:
        return self.forms.from_coefficients(self.source.degree_of(g), self.alphas[g], self.betas[g])

    def __call__(self, x: Element) -> Form:
        return _evaluate(self.source, self.forms, {g: self.image(g) for g in self.domain}, x)

    def alpha_of(self, x: Element, i: int) -> Element:
        return self.forms.alpha(self(x), i)

    def beta_of(self, x: Element, i: int) -> Element:
        return self.forms.beta(self(x), i, x.degree)

    @property
    def length(self) -> int:
        return max([len(a) for a in self.alphas.values()] + [len(b) for b in self.betas.values()] + [1])

    # -- checks -------------------------------------------------------------
    def failing_generator(self) -> Optional[str]:
        """First generator where ``d h(v) ≠ h(d v)``, or None."""
        A = self.source
        imgs = {g: self.image(g) for g in self.domain}
        for v in self.domain:
            if A.degree_of(v) + A.dsign > self.cutoff:
                continue
            if not A.free.generators_in(A.d[v]) <= set(imgs):
                continue
            lhs = self.forms.d(imgs[v])
            rhs = _evaluate(A, self.forms, imgs, A.d[v])
            if self.forms.add(lhs, rhs, Fraction(-1)):
                return v
        return None

    def recursion_defects(self) -> List[Tuple[str, int]]:
        """Pairs ``(v, i)`` where ``-(i+1) α_{i+1}(v) ≠ d β_i(v) + β_i(d v)``."""
        A, B = self.source, self.target
        bad = []
        for v in self.domain:
            hdv = self(A.d[v]) if A.d[v].terms else {}
            n = max(self.length, self.forms.max_power(hdv) + 1)
            for i in range(n):
                a_next = self.alphas[v][i + 1] if i + 1 < len(self.alphas[v]) else B.zero()
                bi = self.betas[v][i] if i < len(self.betas[v]) else B.zero()
                rhs = B.diff(bi) + self.forms.beta(hdv, i, A.degree_of(v) + A.dsign)
                if ((i + 1) * a_next + rhs).terms:
                    bad.append((v, i))
        return bad

    def endpoints(self) -> Tuple[Morphism, Morphism]:
        f = {g: self.alphas[g][0] for g in self.domain}
        g1 = {}
        for g in self.domain:
            tot = self.target.zero()
            for a in self.alphas[g]:
                tot = tot + a
            g1[g] = tot
        try:
            return (Morphism(self.source, self.target, f), Morphism(self.source, self.target, g1))
        except ChainMapError as e:
            raise MalformedHomotopyError(f"endpoint is not a chain map: {e}") from e

    def restrict(self, sub: QuasiFreeAlgebra) -> "Homotopy":
        keep = [g for g in sub.gens if sub.degree_of(g) <= min(sub.cutoff, self.target.cutoff)]
        return Homotopy(sub, self.target, {g: self.alphas[g] for g in keep}, {g: self.betas[g] for g in keep})

    def coefficients_equal(self, other: "Homotopy", generators=None) -> bool:
        gens = self.domain if generators is None else generators
        def trim(xs):
            xs = [x.terms for x in xs]
            while xs and not xs[-1]:
                xs.pop()
            return xs
        return all(trim(self.alphas[g]) == trim(other.alphas[g]) and trim(self.betas[g]) == trim(other.betas[g])
                   for g in gens)

    def generators_used(self) -> set:
        out = set()
        for g in self.domain:
            for x in self.alphas[g] + self.betas[g]:
                out |= self.target.free.generators_in(x)
        return out

    def __repr__(self):
        return f"Homotopy({len(self.domain)} generators, length {self.length})"


def _evaluate(A: QuasiFreeAlgebra, P: PolyForms, images: Mapping[str, Form], x: Element) -> Form:
    if not x.terms:
        return {}
    return A.free.evaluate(x, images, P.mul, lambda p, q: P.add(p, q), P.scale, {})


def verify_homotopy(h: Homotopy) -> Tuple[bool, Optional[str]]:
    """``(True, None)`` if ``h`` is a chain algebra map into ``B ⊗ Λ(t,dt)``, else ``(False, generator)``."""
    bad = h.failing_generator()
    if bad is not None:
        return False, bad
    try:
        h.endpoints()
    except MalformedHomotopyError:
        return False, "endpoints"
    return True, None


def endpoints(h: Homotopy) -> Tuple[Morphism, Morphism]:
    return h.endpoints()


# ---------------------------------------------------------------------------
# extension of homotopies and maps


def _new_generators(small, big: QuasiFreeAlgebra, cutoff: int) -> List[str]:
    have = set(small)
    return [g for g in big.gens if g not in have and big.degree_of(g) <= cutoff]


def extend_homotopy(h: Homotopy, f_next: Morphism, g_next: Morphism,
                    perturb: Dict[str, List[Fraction]] = None) -> Homotopy:
    """Extend ``h`` (on a truncation) to a homotopy ``f_next ≃ g_next``.

    For each new generator v the obstruction is the cycle
    ``c = g(v) - f(v) + Σ_i β_i(d v)/(i+1)``; when ``c = d z`` we set
    ``β_0(v) = -z`` and ``β_{i≥1}(v) = 0``.  ``perturb[v]`` adds a combination
    of the cycle basis ``B.cycles(|v| - dsign)`` to ``z`` (this does not change
    the α of v, only the obstructions met later).
    """
    A = f_next.source
    B = h.target
    if g_next.source.free.deg != A.free.deg:
        raise PreconditionError("f_next and g_next must share a source")
    f0, g0 = h.endpoints()
    for g in h.domain:
        if g not in f_next.assignment or g not in g_next.assignment:
            continue
        if f_next.assignment[g].terms != f0.assignment[g].terms or \
           g_next.assignment[g].terms != g0.assignment[g].terms:
            raise PreconditionError(f"f_next, g_next do not restrict to the endpoints of h at {g}")
    betas = {g: list(h.betas[g]) for g in h.domain}
    alphas = {g: list(h.alphas[g]) for g in h.domain}
    P = h.forms
    images = {g: h.image(g) for g in h.domain}
    cutoff = min(f_next.cutoff, g_next.cutoff)
    freedom = dict(h.solution_freedom)
    for v in _new_generators(h.domain, A, cutoff):
        dv = A.d[v]
        stray = A.free.generators_in(dv) - set(images)
        if stray:
            raise PreconditionError(f"d {v} involves {sorted(stray)}, not yet processed")
        deg_v = A.degree_of(v)
        hdv = _evaluate(A, P, images, dv)
        c = g_next.assignment[v] - f_next.assignment[v]
        for i in range(P.max_power(hdv) + 1):
            c = c + P.beta(hdv, i, deg_v + A.dsign) / (i + 1)
        zdeg = deg_v - A.dsign
        z = B.solve_boundary(c, zdeg)
        if z is None:
            raise ObstructionError(f"obstruction for {v} is not a boundary: {c}", cocycle=c, generator=v)
        if zdeg >= 1:
            cyc = B.cycles(zdeg)
            freedom[v] = len(cyc)
            for lam, zc in zip((perturb or {}).get(v, ()), cyc):
                if lam:
                    z = z + lam * zc
        bv = [-z] if z.terms else []
        av = [f_next.assignment[v]]
        for i in range(max(len(bv), P.max_power(hdv) + 1)):
            bi = bv[i] if i < len(bv) else B.zero()
            av.append(-(B.diff(bi) + P.beta(hdv, i, deg_v + A.dsign)) / (i + 1))
        while len(av) > 1 and not av[-1].terms:
            av.pop()
        alphas[v], betas[v] = av, bv
        images[v] = P.from_coefficients(deg_v, av, bv)
    src = A if cutoff >= A.cutoff else _with_cutoff(A, cutoff)
    out = Homotopy(src, B, alphas, betas)
    out.solution_freedom = freedom
    return out


def extend_map(f_prev: Morphism, A_next: QuasiFreeAlgebra, rng=None, cutoff: int = None) -> Morphism:
    """Extend ``f_prev`` over the generators of ``A_next`` it does not cover.

    Each new generator v needs ``d b = f(d v)``; the pivot-supported solution
    is used, plus a random cycle when ``rng`` is given (to sample the whole
    solution space).  Raises :class:`ObstructionError` when ``f(d v)`` is not
    exact.
    """
    B = f_prev.target
    cut = min(A_next.cutoff, B.cutoff) if cutoff is None else cutoff
    assign = dict(f_prev.assignment)
    for v in _new_generators(f_prev.domain, A_next, cut):
        dv = A_next.d[v]
        stray = A_next.free.generators_in(dv) - set(assign)
        if stray:
            raise PreconditionError(f"d {v} involves {sorted(stray)}, not yet mapped")
        y = A_next.free.extend_as_morphism(assign, dv, B.free) if dv.terms else B.zero()
        deg = A_next.degree_of(v)
        b = B.solve_boundary(y, deg)
        if b is None:
            raise ObstructionError(f"f(d {v}) = {y} is not a boundary", cocycle=y, generator=v)
        if rng is not None:
            for z in B.cycles(deg):
                b = b + Fraction(rng.randint(-2, 2)) * z
        assign[v] = b
    src = A_next if cut >= A_next.cutoff else _with_cutoff(A_next, cut)
    return Morphism(src, B, assign)


def extend_iso(f_n: Morphism, A_next: QuasiFreeAlgebra) -> Tuple[Morphism, Morphism]:
    """Extend an automorphism of ``A_n`` to one of ``A_next`` (with its inverse).

    ``f_n`` is regarded as a map ``A_n -> A_next`` through the inclusion.
    """
    if not is_isomorphism(f_n):
        raise PreconditionError("f_n is not an isomorphism")
    into = Morphism(f_n.source, A_next, {g: A_next.free.coerce(x) for g, x in f_n.assignment.items()})
    ext = extend_map(into, A_next)
    ext = Morphism(A_next, A_next, ext.assignment) if ext.source.free.deg == A_next.free.deg else ext
    if not is_isomorphism(ext):
        raise QuasiFreeError("extension of an isomorphism is not invertible; this contradicts the theory "
                             "under the stated hypotheses and indicates a bug")
    return ext, invert(ext)


# ---------------------------------------------------------------------------
# deciding homotopy


@dataclass
class Verdict:
    """Three-valued answer: ``value`` is True, False, or None (unknown)."""
    value: Optional[bool]
    reason: str = ""
    certificate: Optional[Homotopy] = None

    def __bool__(self):
        raise TypeError("Verdict is three-valued; inspect .value")

    @property
    def exit_code(self) -> int:
        return {True: 0, False: 1, None: 2}[self.value]


def concentration_degree(B, lo: int = 1) -> int:
    """Largest certified degree with nonzero homology (0 if none)."""
    top = 0
    for k in range(lo, B.cutoff):
        if B.homology_dim(k):
            top = k
    return top


def check_concentration(B: QuasiFreeAlgebra, n: int):
    """Raise :class:`HypothesisError` unless homology vanishes in degrees ``n+1 .. cutoff-1``."""
    if n + 1 > B.cutoff - 1:
        raise HypothesisError(f"cannot certify homology concentrated in degrees <= {n}: cutoff {B.cutoff} too low")
    for k in range(n + 1, B.cutoff):
        if B.homology_dim(k):
            raise HypothesisError(f"homology of the target is nonzero in degree {k} > {n}")


def homotopic(f: Morphism, g: Morphism, n: int = None) -> Verdict:
    """Decide whether ``f ≃ g``.

    False is definitive (the maps differ on homology).  True comes with a
    homotopy built generator by generator from the bottom.  If that greedy
    construction hits an obstruction the answer is unknown.  When ``n`` is
    given, homology of the target must vanish in certified degrees above it.
    """
    if f.source.free.deg != g.source.free.deg or f.target.free.deg != g.target.free.deg:
        raise PreconditionError("maps must share source and target")
    B = f.target
    if n is not None:
        check_concentration(B, n)
    if f == g:
        return Verdict(True, "maps are equal", Homotopy.constant(f))
    hi = min(f.cutoff, g.cutoff) - 1
    if n is not None:
        hi = min(hi, n)
    diff = homology_invariant_difference(f, g, 1, hi)
    if diff is not None:
        return Verdict(False, diff)
    try:
        h = build_homotopy(f, g)
    except ObstructionError as e:
        return Verdict(None, f"construction obstructed at {e.generator}: {e.cocycle}")
    ok, bad = verify_homotopy(h)
    if not ok:
        raise QuasiFreeError(f"constructed homotopy fails at {bad}")
    return Verdict(True, "homotopy constructed", h)


def build_homotopy(f: Morphism, g: Morphism, rounds: int = 8) -> Homotopy:
    """Bottom-up homotopy ``f ≃ g`` (raises :class:`ObstructionError`).

    The greedy choice can get stuck on an obstruction class that a different
    choice of cycles in earlier ``β_0`` would have killed.  When that happens
    we linearise the class in those cycle coefficients and solve; the result
    is accepted only if a fresh build goes through.
    """
    A = f.source
    B = f.target
    empty = QuasiFreeAlgebra(A.flavor, {}, {}, A.cutoff)
    h0 = Homotopy(empty, B, {}, {})
    perturb: Dict[str, List[Fraction]] = {}
    err = None
    for _ in range(rounds):
        try:
            return extend_homotopy(h0, f, g, perturb)
        except ObstructionError as e:
            err = e
        v = err.generator
        deg_v = A.degree_of(v)
        if deg_v > B.cutoff - 1:
            raise err
        H = B.homology(deg_v)
        base = H.classify(err.cocycle)
        params = []
        for w in A.gens:
            if w == v or A.degree_of(w) >= deg_v or A.degree_of(w) > min(f.cutoff, g.cutoff):
                continue
            zdeg = A.degree_of(w) - A.dsign
            if zdeg < 1:
                continue
            for j in range(len(B.cycles(zdeg))):
                params.append((w, j))
        cols = []
        for w, j in params:
            trial = {k: list(x) for k, x in perturb.items()}
            n = len(B.cycles(A.degree_of(w) - A.dsign))
            row = trial.setdefault(w, [Fraction(0)] * n)
            row += [Fraction(0)] * (n - len(row))
            row[j] += 1
            cocycle = _obstruction_at(h0, f, g, trial, v)
            cls = H.classify(cocycle) if cocycle is not None else [Fraction(0)] * len(base)
            cols.append({i: c - b for i, (c, b) in enumerate(zip(cls, base)) if c != b})
        M = SparseMatrix.from_columns(len(base), cols)
        lam = solve_matrix(M, {i: -b for i, b in enumerate(base) if b})
        if lam is None:
            raise err
        for k, (w, j) in enumerate(params):
            if lam.get(k):
                n = len(B.cycles(A.degree_of(w) - A.dsign))
                row = perturb.setdefault(w, [Fraction(0)] * n)
                row[j] += lam[k]
    raise err


def _obstruction_at(h0, f, g, perturb, v):
    """Cocycle obstructing ``v`` under ``perturb``, or None if ``v`` extends."""
    try:
        extend_homotopy(h0, _upto(f, v), _upto(g, v), perturb)
    except ObstructionError as e:
        if e.generator == v:
            return e.cocycle
        raise
    return None


def _upto(f: Morphism, v: str) -> Morphism:
    """``f`` restricted to the generators processed up to and including ``v``."""
    A = f.source
    order = _new_generators([], A, f.cutoff)
    keep = order[:order.index(v) + 1]
    d = {w: A.d[w] for w in keep}
    sub = QuasiFreeAlgebra(A.flavor, {w: A.degree_of(w) for w in keep}, d, max(A.degree_of(w) for w in keep))
    return Morphism(sub, f.target, {w: f.assignment[w] for w in keep}, check=False)


# ---------------------------------------------------------------------------
# sparseness


def require_sparse(A: QuasiFreeAlgebra):
    """Raise :class:`SparsenessError` unless ``A`` is sparsely generated."""
    degs = sorted(set(A.free.deg.values()))
    for a, b in zip(degs, degs[1:]):
        if b == a + 1:
            raise SparsenessError(
                f"generators in consecutive degrees {a} and {b}: a homotopy of maps out of a truncation "
                f"may leave it, so [A_n, A] cannot be identified with [A_n, A_n]")


def image_within_truncation(h: Homotopy, n: int) -> bool:
    """Do all α_i, β_i of ``h`` only involve generators of degree <= n?"""
    return all(h.target.degree_of(g) <= n for g in h.generators_used())


def identify_self_map_classes(A: QuasiFreeAlgebra, n: int, h: Homotopy = None) -> bool:
    """Gate for treating homotopies into ``A`` from ``A_n`` as homotopies of self-maps of ``A_n``.

    Refuses non-sparse chain algebras; for an engine-produced ``h`` also
    checks that its image lies in the truncation.
    """
    if A.flavor.direction != "chain":
        raise PreconditionError("the identification is a statement about chain algebras")
    require_sparse(A)
    if h is not None and not image_within_truncation(h, n):
        raise SparsenessError(f"homotopy leaves the truncation at degree {n}")
    return True
