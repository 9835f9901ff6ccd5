"""Matrix realizations of automorphisms, the unipotent subgroup ``K(A)``, and the
ρ pipeline ``Aut(a) -> Aut(A_n)`` between a Lie model and its cochain model.

Level bookkeeping: an automorphism of a quasi-free algebra whose generators sit
in degrees ``<= n`` is determined by its restriction to ``A^{≤ n+ε}``, with
``ε = 0`` for chain and ``ε = 1`` for cochain algebras (the extra degree
records where the differential of the top generators lands).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .dga import (FiniteAlgebra, Morphism, QuasiFreeAlgebra, invert, lift_through_surjection,
                  truncate, _with_cutoff)
from .errors import (DimensionError, NilpotenceError, PreconditionError)
from .exactlin import SparseMatrix, rank, solve_matrix
from .freealg import Element
from .homotopy import Verdict, homotopic
from .koszul import (ce_cochains, ce_on_morphism, find_isomorphism, minimalize, quillen_L,
                     quillen_on_morphism, unit_inverse_map)


def epsilon(A) -> int:
    return 1 if A.flavor.direction == "cochain" else 0


class RestrictedStructure:
    """The ``n``-restricted structure maps of ``A``: d and the binary product on ``A^{≤n}``.

    Products whose degree exceeds ``n`` are recorded as zero.  Higher arities
    are iterated binary products, so the binary table determines them.
    """

    def __init__(self, A: QuasiFreeAlgebra, n: int):
        if n > A.cutoff:
            from .errors import CutoffError
            raise CutoffError(f"level {n} exceeds the cutoff {A.cutoff}")
        self.algebra = A
        self.level = n
        self.table = FiniteAlgebra.from_quasi_free(A, n)
        self.degrees = [k for k in range(1, n + 1) if self.table.names(k)]

    def dim(self, k: int) -> int:
        return len(self.table.names(k))

    def mu2(self, a: str, b: str) -> Dict[str, Fraction]:
        if self.table.degree_of[a] + self.table.degree_of[b] > self.level:
            return {}
        return dict(self.table.mul.get((a, b), {}))

    def d_block(self, k: int) -> SparseMatrix:
        if k + self.algebra.dsign > self.level or k + self.algebra.dsign < 1:
            return SparseMatrix(0, self.dim(k), tuple({} for _ in range(self.dim(k))))
        return self.table.d_matrix(k)


@dataclass
class AutMatrix:
    """Block matrices of a graded linear self-map of ``A^{≤ level}`` (one block per degree)."""
    level: int
    blocks: Dict[int, SparseMatrix]
    flavor: str
    epsilon: int

    @classmethod
    def from_morphism(cls, phi: Morphism, level: int) -> "AutMatrix":
        A = phi.source
        blocks = {k: phi.matrix(k) for k in range(1, level + 1) if A.free.dim(k)}
        return cls(level, blocks, A.flavor.direction, epsilon(A))

    def is_unipotent(self) -> bool:
        for k, M in self.blocks.items():
            N = M - SparseMatrix.identity(M.ncols)
            # nilpotent iff N^dim = 0
            P = N
            for _ in range(M.ncols):
                P = P @ N
            if not P.is_zero():
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, AutMatrix) and self.level == other.level and self.blocks == other.blocks


def is_automorphism(M: AutMatrix, S: RestrictedStructure) -> Tuple[bool, str]:
    """Invertible blocks commuting with the restricted product and differential."""
    T = S.table
    for k in range(1, S.level + 1):
        dk = S.dim(k)
        blk = M.blocks.get(k)
        if blk is None:
            if dk:
                raise DimensionError(f"missing block in degree {k}")
            continue
        if blk.nrows != dk or blk.ncols != dk:
            raise DimensionError(f"block in degree {k} is {blk.nrows}x{blk.ncols}, expected {dk}x{dk}")
        if rank(blk) != dk:
            return False, f"block in degree {k} is singular"
    dsign = S.algebra.dsign
    for k in S.degrees:
        kt = k + dsign
        if kt < 1 or kt > S.level or not S.dim(kt):
            continue
        D = S.d_block(k)
        if M.blocks[kt] @ D != D @ M.blocks[k]:
            return False, f"does not commute with d on degree {k}"
    for p in S.degrees:
        for q in S.degrees:
            if p + q > S.level or not S.dim(p + q):
                continue
            pos = {nm: i for i, nm in enumerate(T.names(p + q))}
            for i, a in enumerate(T.names(p)):
                for j, b in enumerate(T.names(q)):
                    lhs = M.blocks[p + q].apply({pos[c]: v for c, v in S.mu2(a, b).items()})
                    ma = {T.names(p)[r]: v for r, v in M.blocks[p].columns[i].items()}
                    mb = {T.names(q)[r]: v for r, v in M.blocks[q].columns[j].items()}
                    prod = T.product(ma, mb)
                    rhs = {pos[c]: v for c, v in prod.items() if v}
                    if lhs != rhs:
                        return False, f"does not commute with the product of {a} and {b}"
    return True, ""


# ---------------------------------------------------------------------------
# derivations and the unipotent subgroup


def derivation_bracket_with_d(A: QuasiFreeAlgebra, eta: Mapping[str, Element]) -> Dict[str, Element]:
    """``θ = d η + η d`` on generators, for ``η`` of degree ``-dsign``."""
    shift = -A.dsign
    full = {g: eta.get(g, A.zero()) for g in A.gens}
    for g, v in full.items():
        if v.terms and v.degree != A.degree_of(g) + shift:
            raise PreconditionError(f"η({g}) must have degree {A.degree_of(g) + shift}")
    theta = {}
    for g in A.gens:
        a = A.diff(full[g]) if full[g].terms else A.zero()
        b = Element(A.free, A.free.derivation_terms(full, A.d[g].terms, shift)) if A.d[g].terms else A.zero()
        theta[g] = a + b
    return theta


def _exp_derivation(A: QuasiFreeAlgebra, theta: Mapping[str, Element], n: int) -> Dict[str, Element]:
    out = {}
    for g in A.gens:
        if A.degree_of(g) > n:
            continue
        term = A.gen(g)
        total = term
        j = 0
        limit = A.degree_of(g) + 2
        while True:
            j += 1
            term = Element(A.free, A.free.derivation_terms(theta, term.terms, 0)) / j
            if not term.terms:
                break
            if j > limit:
                raise NilpotenceError(f"θ is not nilpotent on {g} within {limit} steps")
            total = total + term
        out[g] = total
    return out


def k_group_element(A: QuasiFreeAlgebra, eta: Mapping[str, Element], n: int = None) -> Tuple[AutMatrix, Morphism]:
    """``exp(d η + η d)`` as a matrix at level ``n + ε`` and as a morphism."""
    n = A.top_generator_degree if n is None else n
    theta = derivation_bracket_with_d(A, eta)
    for g in A.gens:
        if theta[g].terms and any(len(w) < 2 for w in theta[g].terms) and A.is_minimal():
            raise NilpotenceError(f"θ({g}) has a linear part")
    phi = Morphism(A, A, _exp_derivation(A, theta, A.cutoff))
    level = min(n + epsilon(A), A.cutoff)
    M = AutMatrix.from_morphism(phi, level)
    return M, phi


def _matrix_log(M: SparseMatrix) -> SparseMatrix:
    n = M.ncols
    N = M - SparseMatrix.identity(n)
    out = SparseMatrix.zero(n, n)
    P = N
    for j in range(1, n + 2):
        if P.is_zero():
            break
        out = out + P.scaled(Fraction((-1) ** (j + 1), j))
        P = P @ N
    else:
        raise NilpotenceError("matrix is not unipotent")
    return out


def log_of_automorphism(phi: Morphism) -> Dict[str, Element]:
    """The derivation ``θ = log φ`` on generators, for unipotent ``φ``."""
    A = phi.source
    theta = {}
    for g in phi.domain:
        k = A.degree_of(g)
        M = phi.matrix(k)
        L = _matrix_log(M)
        idx = A.free.coords(A.gen(g), k)
        (i, _), = idx.items()
        theta[g] = A.free.from_coords(k, L.columns[i])
    return theta


def solve_eta(A: QuasiFreeAlgebra, theta: Mapping[str, Element]) -> Optional[Dict[str, Element]]:
    """Some ``η`` of degree ``-dsign`` with ``d η + η d = θ`` on generators, or None."""
    shift = -A.dsign
    gens = [g for g in A.gens if A.degree_of(g) + shift >= 1 and A.degree_of(g) <= A.cutoff - 1]
    unknowns: List[Tuple[str, int]] = []
    for g in gens:
        for i in range(A.free.dim(A.degree_of(g) + shift)):
            unknowns.append((g, i))
    rows: Dict[Tuple[str, int], int] = {}
    for g in A.gens:
        if A.degree_of(g) > A.cutoff - 1:
            continue
        for i in range(A.free.dim(A.degree_of(g))):
            rows[(g, i)] = len(rows)
    cols = []
    for g, i in unknowns:
        e = {g: A.free.basis(A.degree_of(g) + shift)[i]}
        th = derivation_bracket_with_d(A, e)
        col = {}
        for h, v in th.items():
            if (h, 0) not in rows and not v.terms:
                continue
            for j, c in A.free.coords(v, A.degree_of(h)).items() if v.terms else []:
                col[rows[(h, j)]] = c
        cols.append(col)
    rhs = {}
    for h, v in theta.items():
        if v.terms and A.degree_of(h) <= A.cutoff - 1:
            for j, c in A.free.coords(v, A.degree_of(h)).items():
                rhs[rows[(h, j)]] = c
    M = SparseMatrix(len(rows), len(cols), tuple(cols))
    sol = solve_matrix(M, rhs)
    if sol is None:
        return None
    eta = {g: A.zero() for g in A.gens}
    for j, c in sol.items():
        g, i = unknowns[j]
        eta[g] = eta[g] + c * A.free.basis(A.degree_of(g) + shift)[i]
    return eta


def homotopic_to_identity(phi: Morphism, n: int = None) -> Verdict:
    """Decide ``φ ≃ id`` with the homotopy engine; a found log witness is reported too."""
    v = homotopic(phi, Morphism(phi.source, phi.target, {g: phi.target.gen(g) for g in phi.domain}), n)
    if v.value is not False:
        try:
            eta = solve_eta(phi.source, log_of_automorphism(phi))
        except NilpotenceError:
            eta = None
        if eta is not None:
            v.reason += "; φ = exp(dη + ηd) for a computed η"
    return v


# ---------------------------------------------------------------------------
# the ρ pipeline


@dataclass
class KoszulContext:
    """Everything the ρ pipeline needs for a minimal chain Lie algebra ``a``."""
    a: QuasiFreeAlgebra
    C: QuasiFreeAlgebra                 # C*(a)
    A: QuasiFreeAlgebra                 # minimal model of C*(a)
    eta: Morphism                       # A -> C*(a)
    nu: Morphism                        # C*(a) -> A
    n: int
    LA: Optional[QuasiFreeAlgebra] = None
    CLA: Optional[QuasiFreeAlgebra] = None
    kappa: Optional[Morphism] = None    # a -> L(A)
    tau: Optional[Morphism] = None      # L(A) -> a
    u_map: Optional[Morphism] = None    # C*(L(A)) -> A
    u_inv: Optional[Morphism] = None    # A -> C*(L(A))

    @classmethod
    def build(cls, a: QuasiFreeAlgebra, n: int, A: QuasiFreeAlgebra = None, surjectivity: bool = True):
        C = ce_cochains(a)
        Amin, eta, nu = minimalize(C)
        if A is not None:
            psi = find_isomorphism(Amin, A)
            psi_inv = invert(psi)
            eta = eta.compose(psi_inv)
            nu = psi.compose(nu)
        else:
            A = Amin
        ctx = cls(a, C, A, eta, nu, n)
        if surjectivity:
            ctx._build_surjectivity()
        return ctx

    def _build_surjectivity(self):
        A, a = self.A, self.a
        LA = quillen_L(A)
        ML, eta_L, nu_L = minimalize(LA)
        psi = find_isomorphism(ML, _with_cutoff(a, min(a.cutoff, ML.cutoff)))
        psi_inv = invert(psi)
        psi.target
        self.LA = LA
        self.kappa = eta_L.compose(psi_inv)              # a -> L(A)
        t = psi.compose(nu_L)
        self.tau = Morphism(_with_cutoff(LA, t.cutoff), a, t.assignment)   # L(A) -> a
        self.CLA = ce_cochains(LA)
        self.u_map = unit_inverse_map(A, self.CLA, LA)
        self.u_inv = lift_through_surjection(self.u_map, Morphism.identity(A))

    def rho(self, phi: Morphism) -> Morphism:
        """``ν ∘ C*(φ) ∘ η: A -> A``."""
        C = self.C
        if phi.cutoff < self.a.cutoff:
            C = ce_cochains(_with_cutoff(self.a, phi.cutoff))
        Cphi = ce_on_morphism(phi, C, C)
        out = self.nu.compose(Cphi.compose(self.eta))
        return Morphism(_with_cutoff(self.A, out.cutoff), self.A, out.assignment)

    def rho_matrix(self, phi: Morphism) -> AutMatrix:
        """Matrix of ``ρ(φ)`` restricted to ``A_n`` at level ``n + ε``."""
        r = self.rho(phi)
        An = truncate(self.A, self.n)
        An = _with_cutoff(An, min(An.cutoff, r.cutoff))
        restricted = Morphism(An, An, {g: An.free.coerce(r.assignment[g]) for g in An.gens})
        return AutMatrix.from_morphism(restricted, min(self.n + 1, An.cutoff))

    def preimage(self, Phi: Morphism) -> Morphism:
        """Surjectivity recipe: ``φ = τ ∘ L(j^{-1} Φ ℓ^{-1}) ∘ κ`` for ``Φ ∈ Aut(A)``."""
        if self.kappa is None:
            self._build_surjectivity()
        A = self.A
        C_tau = ce_on_morphism(self.tau, self.CLA, _ce_for(self, self.tau.target))
        j = self.u_map.compose(C_tau.compose(self.eta))             # A -> A
        C_kappa = ce_on_morphism(self.kappa, _ce_for(self, self.kappa.source), self.CLA)
        ell = self.nu.compose(C_kappa.compose(self.u_inv))          # A -> A
        j = _square(j, A)
        ell = _square(ell, A)
        F = invert(j).compose(_square(Phi, A).compose(invert(ell)))
        LF = quillen_on_morphism(_square(F, A), self.LA, self.LA)
        phi = self.tau.compose(LF.compose(self.kappa))
        return Morphism(phi.source, self.a, phi.assignment)


def _ce_for(ctx: KoszulContext, a: QuasiFreeAlgebra) -> QuasiFreeAlgebra:
    return ctx.C if a.cutoff + 1 == ctx.C.cutoff else ce_cochains(a)


def _square(f: Morphism, A: QuasiFreeAlgebra) -> Morphism:
    """View ``f`` as a self-map of ``A`` truncated to the cutoff of ``f``."""
    src = _with_cutoff(A, f.cutoff) if f.cutoff < A.cutoff else A
    return Morphism(src, _with_cutoff(A, f.cutoff) if f.cutoff < A.cutoff else A,
                    {g: f.assignment[g] for g in src.gens})


def rho_pipeline(phi: Morphism, eta: Morphism, nu: Morphism, n: int, check: bool = True) -> Tuple[Morphism, AutMatrix]:
    """``ρ(φ) = ν ∘ C*(φ) ∘ η`` and its matrix on ``A_n`` at level ``n + 1``."""
    A = eta.source
    if check:
        back = nu.compose(eta)
        v = homotopic(Morphism(back.source, A, back.assignment),
                      Morphism(back.source, A, {g: A.gen(g) for g in back.domain}), n)
        if v.value is not True:
            raise PreconditionError(f"η and ν are not homotopy inverse: {v.reason}")
    C = eta.target
    ctx = KoszulContext(phi.source, C, A, eta, nu, n)
    return ctx.rho(phi), ctx.rho_matrix(phi)


# ---------------------------------------------------------------------------
# main theorem desk check


@dataclass
class SampleRow:
    sample: str
    invariant: str
    lie_class: int
    com_class: int
    roundtrip: str


@dataclass
class MainTheoremReport:
    rows: List[SampleRow] = field(default_factory=list)
    group_law: List[Tuple[str, str, Optional[bool]]] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def format(self) -> str:
        lines = ["sample\tinvariant\tlie-class\tcom-class\tround-trip"]
        for r in self.rows:
            lines.append(f"{r.sample}\t{r.invariant}\t{r.lie_class}\t{r.com_class}\t{r.roundtrip}")
        for a, b, v in self.group_law:
            lines.append(f"group law rho({a} o {b}) ~ rho({b}) o rho({a}): {_fmt3(v)}")
        for f in self.failures:
            lines.append(f"FAIL: {f}")
        lines.append("result: " + ("pass" if self.ok else "fail"))
        return "\n".join(lines)


def _fmt3(v):
    return {True: "yes", False: "no", None: "unknown"}[v]


def _classes(maps: Sequence[Morphism], n: int) -> List[int]:
    ids: List[int] = []
    reps: List[Morphism] = []
    for f in maps:
        for cid, r in enumerate(reps):
            if homotopic(f, r, n).value is True:
                ids.append(cid)
                break
        else:
            reps.append(f)
            ids.append(len(reps) - 1)
    return ids


def _h_invariant(f: Morphism, k: int) -> str:
    M = f.induced_on_homology(k)
    return " ".join(str(c) for row in M.to_dense() for c in row)


def check_main_theorem(a: QuasiFreeAlgebra, n: int, samples: Sequence[Tuple[str, Morphism]],
                       A: QuasiFreeAlgebra = None, lie_n: int = None, ctx: KoszulContext = None) -> MainTheoremReport:
    """Desk check of ``Aut^h(a) ≅ Aut^h(A_n)`` on the given automorphisms of ``a``.

    Per sample: the homology invariant, homotopy-class ids on both sides,
    and the surjectivity round trip ``ρ(preimage(ρ(φ))) ≃ ρ(φ)``.  Also the
    group law ``ρ(φψ) ≃ ρ(ψ)ρ(φ)`` on all pairs.
    """
    ctx = ctx or KoszulContext.build(a, n, A)
    rep = MainTheoremReport()
    lie_n = lie_n if lie_n is not None else _top_homology(a)
    names = [s for s, _ in samples]
    phis = [f for _, f in samples]
    rhos = [ctx.rho(f) for f in phis]
    low = min(ctx.A.degree_of(g) for g in ctx.A.gens)
    lie_ids = _classes(phis, lie_n)
    com_ids = _classes(rhos, n)
    for i in range(len(phis)):
        for j in range(i + 1, len(phis)):
            if (lie_ids[i] == lie_ids[j]) != (com_ids[i] == com_ids[j]):
                rep.failures.append(f"classes of {names[i]} and {names[j]} are not matched by ρ")
    for name, f, r, li, ci in zip(names, phis, rhos, lie_ids, com_ids):
        pre = ctx.preimage(r)
        v = homotopic(*_aligned(ctx.rho(pre), r, ctx.A), n)
        w = homotopic(*_aligned(pre, f, a), lie_n)
        status = "ok" if v.value is True and w.value is True else f"failed ({v.reason}; {w.reason})"
        if status != "ok":
            rep.failures.append(f"round trip for {name}: {status}")
        rep.rows.append(SampleRow(name, _h_invariant(r, low), li, ci, status))
    for na, fa in samples:
        for nb, fb in samples:
            lhs = ctx.rho(fa.compose(fb))
            rhs = ctx.rho(fb).compose(ctx.rho(fa))
            v = homotopic(*_aligned(lhs, rhs, ctx.A), n)
            rep.group_law.append((na, nb, v.value))
            if v.value is not True:
                rep.failures.append(f"group law fails for ({na}, {nb}): {v.reason}")
    return rep


def _aligned(f: Morphism, g: Morphism, X: QuasiFreeAlgebra) -> Tuple[Morphism, Morphism]:
    """``f`` and ``g`` as self-maps of ``X`` cut to their common certified range."""
    cut = min(f.cutoff, g.cutoff, X.cutoff)
    S = _with_cutoff(X, cut) if cut < X.cutoff else X
    return (Morphism(S, S, {v: f.assignment[v] for v in S.gens}),
            Morphism(S, S, {v: g.assignment[v] for v in S.gens}))


def _top_homology(X: QuasiFreeAlgebra) -> int:
    top = 0
    for k in range(1, X.cutoff):
        if X.homology_dim(k):
            top = k
    return top
