"""Chevalley–Eilenberg cochains, the Quillen construction, and minimal models.

Sign conventions (checked by ``d² = 0`` on every construction and by the
chain-map condition on every functorial image):

* ``C*(g)`` for a chain Lie algebra g with basis ``e_i``: generators ``u_i``
  dual to ``s e_i`` (cochain degree ``|e_i| + 1``) and

      d u_k = -Σ_i (-1)^{|u_i|} D_{ki} u_i + ½ Σ_{i,j} (-1)^{|e_i||u_j|} c^k_{ij} u_i u_j

  where ``d e_i = Σ_k D_{ki} e_k`` and ``[e_i, e_j] = Σ_k c^k_{ij} e_k``.
* ``L(A)`` for a reduced cochain algebra A with basis ``a``: generators
  ``x_a`` dual to ``s^{-1} a`` (chain degree ``|a| - 1``) and

      d x_c = (-1)^{|c|} ( -Σ_a δ_{ca} x_a + ½ Σ_{a,b} (-1)^{|x_a||b|} m^c_{ab} [x_a, x_b] )

  where ``d a = Σ_c δ_{ca} c`` and ``a b = Σ_c m^c_{ab} c``.

Certified ranges: ``C*(g)`` has cutoff ``D`` when g is known in degrees
``<= D - 1`` (its generators reach degree ``D``); ``L(A)`` has cutoff
``D - 1`` when A is known in degrees ``<= D``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .dga import (FiniteAlgebra, Morphism, QuasiFreeAlgebra, is_isomorphism, lift_through_surjection,
                  _with_cutoff)
from .errors import (ChainMapError, ConnectivityError, CutoffError, FlavorError, PreconditionError,
                     QuasiFreeError)
from .exactlin import Echelon, SparseMatrix, inverse, kernel, vec_add
from .freealg import Element, Flavor, FreeAlgebra, sign
from .homotopy import Homotopy, verify_homotopy

COM_COCHAIN = Flavor("com", "cochain", True)
LIE_CHAIN = Flavor("lie", "chain")

# sign rules tried, in order, where a dualization sign is fixed by validation;
# the winner is recorded as ``sign_rule`` on the result
SIGN_RULES = (("+1", lambda k: 1), ("-1", lambda k: -1),
              ("(-1)^k", lambda k: sign(k)), ("-(-1)^k", lambda k: -sign(k)))


@dataclass
class KoszulData:
    """How the generators of a CE or Quillen object dualize a basis of the input."""
    kind: str                                  # "ce" or "quillen"
    source: object                             # the input algebra
    table: FiniteAlgebra                       # explicit structure of the input
    dual: Dict[str, Tuple[int, int]] = field(default_factory=dict)   # generator -> (degree, index)

    def basis_element(self, gen: str):
        k, i = self.dual[gen]
        return self.table.names(k)[i]

    def generator_of(self, degree: int, index: int) -> Optional[str]:
        if len(getattr(self, "_inverse", ())) != len(self.dual):
            self._inverse = {v: g for g, v in self.dual.items()}
        return self._inverse.get((degree, index))


def _table(X, top: int) -> FiniteAlgebra:
    if isinstance(X, QuasiFreeAlgebra):
        return FiniteAlgebra.from_quasi_free(X, top)
    if isinstance(X, FiniteAlgebra):
        return X
    raise TypeError(f"expected an algebra, got {type(X).__name__}")


def _gen_names(prefix: str, degree: int, count: int) -> List[str]:
    if count == 1:
        return [f"{prefix}{degree}"]
    return [f"{prefix}{degree}_{i + 1}" for i in range(count)]


# ---------------------------------------------------------------------------
# Chevalley–Eilenberg


def ce_cochains(g, D: int = None, prefix: str = "u") -> QuasiFreeAlgebra:
    """``C*(g)``: Sullivan-type cochain algebra of a chain Lie algebra, cutoff ``D``."""
    if g.flavor.operad != "lie" or g.flavor.direction != "chain":
        raise FlavorError("C* takes a chain Lie algebra")
    if D is None:
        D = g.cutoff + 1
    if D - 1 > g.cutoff:
        raise CutoffError(f"C* up to degree {D} needs the Lie algebra up to degree {D - 1}; cutoff is {g.cutoff}")
    T = _table(g, min(D, g.cutoff))
    gens: Dict[str, int] = {}
    data = KoszulData("ce", g, T)
    name_of: Dict[str, str] = {}
    for k in range(1, D):
        labels = T.names(k)
        for i, (lab, nm) in enumerate(zip(labels, _gen_names(prefix, k + 1, len(labels)))):
            gens[nm] = k + 1
            name_of[lab] = nm
            data.dual[nm] = (k, i)
    diff: Dict[str, Dict] = {nm: {} for nm in gens}
    # linear part: dual of d_g
    for lab_i, dvec in T.diff.items():
        if lab_i not in name_of:
            continue
        ui = name_of[lab_i]
        s = -sign(gens[ui])
        for lab_k, c in dvec.items():
            if lab_k in name_of:
                vec_add(diff[name_of[lab_k]], {(ui,): c * s})
    # quadratic part: dual of the bracket
    for (lab_i, lab_j), prod in T.mul.items():
        if lab_i not in name_of or lab_j not in name_of:
            continue
        ui, uj = name_of[lab_i], name_of[lab_j]
        s = sign(T.degree_of[lab_i] * gens[uj])
        for lab_k, c in prod.items():
            if lab_k in name_of:
                vec_add(diff[name_of[lab_k]], {(ui, uj): Fraction(s) * c / 2})
    C = QuasiFreeAlgebra(COM_COCHAIN, gens, diff, D, name=f"C*({g.name})" if g.name else None)
    C.koszul = data
    return C


def quillen_L(A, D: int = None, prefix: str = "x") -> QuasiFreeAlgebra:
    """``L(A)``: Quillen's free chain Lie algebra on ``s^{-1}`` of the dual of reduced A.

    ``D`` is the top degree of A used; the result has cutoff ``D - 1``.
    """
    if A.flavor.operad != "com" or A.flavor.direction != "cochain":
        raise FlavorError("the Quillen construction takes a commutative cochain algebra")
    if D is None:
        D = A.cutoff
    if D > A.cutoff:
        raise CutoffError(f"A is only known up to degree {A.cutoff}")
    T = _table(A, D)
    if T.names(1):
        raise ConnectivityError("A has elements in degree 1; L(A) needs a 1-connected algebra")
    gens: Dict[str, int] = {}
    data = KoszulData("quillen", A, T)
    name_of: Dict[str, str] = {}
    for m in range(2, D + 1):
        labels = T.names(m)
        for i, (lab, nm) in enumerate(zip(labels, _gen_names(prefix, m - 1, len(labels)))):
            gens[nm] = m - 1
            name_of[lab] = nm
            data.dual[nm] = (m, i)
    L = FreeAlgebra(LIE_CHAIN, gens)
    diff: Dict[str, Element] = {nm: L.zero() for nm in gens}
    for lab_a, dvec in T.diff.items():
        if lab_a not in name_of:
            continue
        for lab_c, c in dvec.items():
            if lab_c in name_of:
                xc = name_of[lab_c]
                diff[xc] = diff[xc] + (-sign(T.degree_of[lab_c]) * c) * L.gen(name_of[lab_a])
    for (lab_a, lab_b), prod in T.mul.items():
        if lab_a not in name_of or lab_b not in name_of:
            continue
        xa, xb = name_of[lab_a], name_of[lab_b]
        s = sign(gens[xa] * T.degree_of[lab_b])
        br = L.bracket(L.gen(xa), L.gen(xb))
        for lab_c, c in prod.items():
            if lab_c in name_of:
                xc = name_of[lab_c]
                diff[xc] = diff[xc] + (Fraction(sign(T.degree_of[lab_c]) * s) * c / 2) * br
    out = QuasiFreeAlgebra(LIE_CHAIN, gens, diff, D - 1, name=f"L({A.name})" if A.name else None)
    out.koszul = data
    return out


# ---------------------------------------------------------------------------
# functoriality


def _coords_in_table(T: FiniteAlgebra, X: QuasiFreeAlgebra, x: Element, degree: int) -> Dict[int, Fraction]:
    return X.free.coords(x, degree) if x.terms else {}


def ce_on_morphism(f: Morphism, C_source: QuasiFreeAlgebra = None, C_target: QuasiFreeAlgebra = None) -> Morphism:
    """``C*(f): C*(target) -> C*(source)`` for a map of chain Lie algebras."""
    C_source = C_source or ce_cochains(f.source)
    C_target = C_target or ce_cochains(f.target)
    Ts, Tt = C_source.koszul, C_target.koszul
    if not isinstance(Ts.table, FiniteAlgebra) or not hasattr(Ts.table, "elements"):
        raise PreconditionError("C*(f) needs the source given as a quasi-free Lie algebra")
    assign: Dict[str, Element] = {}
    for gname, (k, idx) in Tt.dual.items():
        if k > f.cutoff:
            continue
        out = C_source.zero()
        for i, e in enumerate(Ts.table.elements.get(k, [])):
            img = f(e)
            c = f.target.free.coords(img, k).get(idx) if img.terms else None
            if c:
                src = Ts.generator_of(k, i)
                if src is not None:
                    out = out + c * C_source.gen(src)
        assign[gname] = out
    # generators dual to degrees above the certified range of f are dropped
    src = C_target if f.cutoff + 1 >= C_target.cutoff else _with_cutoff(C_target, f.cutoff + 1)
    return Morphism(src, C_source, assign)


def quillen_on_morphism(F: Morphism, L_source: QuasiFreeAlgebra = None, L_target: QuasiFreeAlgebra = None) -> Morphism:
    """``L(F): L(target) -> L(source)`` for a map of commutative cochain algebras."""
    L_source = L_source or quillen_L(F.source)
    L_target = L_target or quillen_L(F.target)
    Ts, Tt = L_source.koszul, L_target.koszul
    assign: Dict[str, Element] = {}
    for gname, (m, idx) in Tt.dual.items():
        if m > F.cutoff:
            continue
        out = L_source.zero()
        for i, a in enumerate(Ts.table.elements.get(m, [])):
            img = F(a)
            c = F.target.free.coords(img, m).get(idx) if img.terms else None
            if c:
                src = Ts.generator_of(m, i)
                if src is not None:
                    out = out + c * L_source.gen(src)
        assign[gname] = out
    src = L_target if F.cutoff - 1 >= L_target.cutoff else _with_cutoff(L_target, F.cutoff - 1)
    return Morphism(src, L_source, assign)


def functor_on_morphism(f: Morphism, image_of_source: QuasiFreeAlgebra = None,
                        image_of_target: QuasiFreeAlgebra = None) -> Morphism:
    """Apply C* (to Lie maps) or L (to commutative cochain maps); contravariant."""
    if f.source.flavor.operad == "lie":
        return ce_on_morphism(f, image_of_source, image_of_target)
    if f.source.flavor.operad == "com":
        return quillen_on_morphism(f, image_of_source, image_of_target)
    raise FlavorError("only the Lie/Com pair is supported")


def _dual_homotopy(h: Homotopy, S: QuasiFreeAlgebra, T: QuasiFreeAlgebra, beta_shift: int) -> List[Homotopy]:
    """Candidate dual homotopies ``T -> S ⊗ Λ(t,dt)`` of ``h``, one per β sign rule."""
    src_tab, tgt_tab = S.koszul, T.koszul
    B = h.target
    n = h.length
    alpha_mats: Dict[str, List[Element]] = {}
    beta_raw: Dict[str, List[Element]] = {}
    cache = {}
    for gname, (k, idx) in tgt_tab.dual.items():
        if gname not in T.free.deg:
            continue
        av, bv = [], []
        for j in range(n + 1):
            acc_a, acc_b = S.zero(), S.zero()
            for i, e in enumerate(src_tab.table.elements.get(k, [])):
                key = (k, i)
                if key not in cache:
                    cache[key] = h(e) if e.terms else {}
                form = cache[key]
                a_j = h.forms.alpha(form, j)
                if a_j.terms and k <= B.cutoff:
                    c = B.free.coords(a_j, k).get(idx)
                    if c:
                        acc_a = acc_a + c * S.gen(src_tab.generator_of(k, i))
            kb = k - beta_shift         # input degree whose β lands in degree k
            for i, e in enumerate(src_tab.table.elements.get(kb, [])):
                key = (kb, i)
                if key not in cache:
                    cache[key] = h(e) if e.terms else {}
                b_j = h.forms.beta(cache[key], j, kb)
                if b_j.terms and k <= B.cutoff:
                    c = B.free.coords(b_j, k).get(idx)
                    if c:
                        acc_b = acc_b + c * S.gen(src_tab.generator_of(kb, i))
            av.append(acc_a)
            bv.append(acc_b)
        alpha_mats[gname] = av
        beta_raw[gname] = bv
    out = []
    for label, rule in SIGN_RULES:
        betas = {g: [rule(T.degree_of(g)) * b for b in bs] for g, bs in beta_raw.items()}
        cand = Homotopy(T, S, alpha_mats, betas)
        cand.sign_rule = label
        out.append(cand)
    return out


def transport_homotopy(h: Homotopy, image_of_source: QuasiFreeAlgebra = None,
                       image_of_target: QuasiFreeAlgebra = None) -> Homotopy:
    """Homotopy between the functor images of the endpoints of ``h``.

    The homotopy ``h: X -> Y ⊗ Λ(t,dt)`` is dualized coefficientwise: the α and
    β maps on the basis of X are transposed onto the generators of the image
    of Y.  The sign of the β part is fixed by validation.
    """
    X = h.source
    if X.flavor.operad == "lie":
        S = image_of_source or ce_cochains(X)
        T = image_of_target or ce_cochains(h.target)
        shift = 1      # β raises Lie degree by one: β(e) for |e| = k - 1 hits degree k
    elif X.flavor.operad == "com":
        S = image_of_source or quillen_L(X)
        T = image_of_target or quillen_L(h.target)
        shift = -1     # β lowers cochain degree by one
    else:
        raise FlavorError("only the Lie/Com pair is supported")
    if not X.one_connected:
        raise ConnectivityError("homotopy transport needs a 1-connected source")
    f, g = h.endpoints()
    Ff = functor_on_morphism(f, S, T)
    Fg = functor_on_morphism(g, S, T)
    if shift < 0:
        # β on the top generators of L would need A one degree above its cutoff
        T = _with_cutoff(T, T.cutoff - 1)
    for cand in _dual_homotopy(h, S, T, shift):
        ok, _ = verify_homotopy(cand)
        if ok:
            e0, e1 = cand.endpoints()
            if _agree(e0, Ff) and _agree(e1, Fg):
                return cand
    raise QuasiFreeError("no dual homotopy passed verification")


def _agree(f: Morphism, g: Morphism) -> bool:
    return all(f.assignment[v].terms == g.assignment[v].terms for v in f.domain if v in g.assignment)


# ---------------------------------------------------------------------------
# (co)unit maps


def counit(g: QuasiFreeAlgebra, LC: QuasiFreeAlgebra = None, C: QuasiFreeAlgebra = None) -> Morphism:
    """``L(C*(g)) -> g``: duals of the CE generators go to the basis of g, the rest to 0."""
    C = C or (LC.koszul.source if LC is not None else ce_cochains(g))
    LC = LC or quillen_L(C)
    Cd, Ld = C.koszul, LC.koszul
    tries = []
    for label, rule in SIGN_RULES:
        assign = {}
        for xname, (m, idx) in Ld.dual.items():
            c_elem = Ld.table.elements[m][idx]
            if len(c_elem.terms) == 1:
                (w, coef), = c_elem.terms.items()
                if len(w) == 1 and w[0] in Cd.dual:
                    k, i = Cd.dual[w[0]]
                    if k <= g.cutoff:
                        assign[xname] = (coef * rule(k)) * Cd.table.elements[k][i]
                        continue
            assign[xname] = g.zero()
        try:
            out = Morphism(LC, g, assign)
        except ChainMapError as e:
            tries.append(str(e))
            continue
        out.sign_rule = label
        return out
    raise QuasiFreeError(f"counit is not a chain map: {tries}")


def unit_inverse_map(A: QuasiFreeAlgebra, CL: QuasiFreeAlgebra = None, L: QuasiFreeAlgebra = None) -> Morphism:
    """``C*(L(A)) -> A``: duals of the Quillen generators go to the basis of A, the rest to 0."""
    L = L or (CL.koszul.source if CL is not None else quillen_L(A))
    CL = CL or ce_cochains(L)
    Ld, Cd = L.koszul, CL.koszul
    tries = []
    for label, rule in SIGN_RULES:
        assign = {}
        for uname, (k, idx) in Cd.dual.items():
            e = Cd.table.elements[k][idx]
            val = A.zero()
            if len(e.terms) == 1:
                (w, coef), = e.terms.items()
                if len(w) == 1 and w[0] in Ld.dual:
                    m, i = Ld.dual[w[0]]
                    val = (coef * rule(m)) * Ld.table.elements[m][i]
            assign[uname] = val
        try:
            out = Morphism(CL, A, assign)
        except ChainMapError as e:
            tries.append(str(e))
            continue
        out.sign_rule = label
        return out
    raise QuasiFreeError(f"unit map is not a chain map: {tries}")


# ---------------------------------------------------------------------------
# minimal models


def _linear_matrix(A: QuasiFreeAlgebra, k: int) -> Tuple[List[str], List[str], SparseMatrix]:
    src = [g for g in A.gens if A.degree_of(g) == k]
    tgt = [g for g in A.gens if A.degree_of(g) == k + A.dsign]
    pos = {g: i for i, g in enumerate(tgt)}
    cols = []
    for g in src:
        cols.append({pos[w[0]]: c for w, c in A.d[g].terms.items() if len(w) == 1})
    return src, tgt, SparseMatrix(len(tgt), len(src), tuple(cols))


def _vec_element(A: QuasiFreeAlgebra, names: List[str], vec: Dict[int, Fraction]) -> Element:
    out = A.zero()
    for i, c in vec.items():
        out = out + c * A.gen(names[i])
    return out


def minimalize(A: QuasiFreeAlgebra, prefix: str = "w") -> Tuple[QuasiFreeAlgebra, Morphism, Morphism]:
    """Minimal model ``M`` of a 1-connected quasi-free ``A`` with ``η: M -> A`` and ``ν: A -> M``.

    The linear part ``d_1`` of the differential splits the generators in each
    degree as ``W ⊕ U ⊕ d_1 U`` with ``W`` representing ``H(V, d_1)``.  The
    ideal generated by ``U`` and ``d U`` is acyclic, and ``ν`` is the quotient
    by it: ``ν(w) = w``, ``ν(u) = 0``, ``ν(d_1 u) = -ν(d u - d_1 u)``.  Then
    ``η`` is a section of ``ν`` lifted through the surjective quasi-iso.

    ``M`` is certified below the cutoff of ``A`` (its cutoff is one less);
    an already minimal ``A`` is returned unchanged with identities.
    """
    if not A.one_connected:
        raise ConnectivityError("minimal models are built for 1-connected algebras")
    if A.is_minimal():
        ident = Morphism.identity(A)
        return A, ident, ident
    top = A.cutoff - 1
    W: Dict[int, List[Tuple[str, Dict[int, Fraction]]]] = {}
    U: Dict[int, List[Dict[int, Fraction]]] = {}
    names_by_deg: Dict[int, List[str]] = {}
    degs = sorted(set(A.free.deg.values()))
    for k in degs:
        names, _, M1 = _linear_matrix(A, k)
        names_by_deg[k] = names
        Z = kernel(M1)
        ech = Echelon()
        for z in Z:
            ech.add(z)
        U[k] = []
        for j in range(len(names)):
            if ech.add({j: Fraction(1)}):
                U[k].append({j: Fraction(1)})
    Bv: Dict[int, List[Tuple[Dict[int, Fraction], Dict[int, Fraction]]]] = {}   # degree -> [(b, u)]
    for k in degs:
        _, tgt, M1 = _linear_matrix(A, k)
        if not tgt:
            continue
        kt = k + A.dsign
        for u in U[k]:
            Bv.setdefault(kt, []).append((M1.apply(u), u))
    used = set()
    for k in degs:
        if k > top:
            continue
        names = names_by_deg[k]
        _, _, M1 = _linear_matrix(A, k)
        ech = Echelon()
        for b, _ in Bv.get(k, []):
            ech.add(b)
        W[k] = []
        singles = [{j: Fraction(1)} for j in range(len(names))]
        Zk = kernel(M1)
        zech = Echelon()
        for z in Zk:
            zech.add(z)
        cand = [s for s in singles if zech.contains(s)] + Zk
        count = 0
        for z in cand:
            if ech.add(z):
                if len(z) == 1 and next(iter(z.values())) == 1:
                    nm = names[next(iter(z))]
                else:
                    count += 1
                    nm = f"{prefix}{k}_{count}"
                    while nm in A.free.deg or nm in used:
                        count += 1
                        nm = f"{prefix}{k}_{count}"
                used.add(nm)
                W[k].append((nm, z))
    Mgens = {nm: k for k, lst in W.items() for nm, _ in lst}
    MF = FreeAlgebra(A.flavor, Mgens)
    nu: Dict[str, Element] = {}
    dbar: Dict[str, Element] = {}
    for k in degs:
        if k > top:
            continue
        names = names_by_deg[k]
        wl = W.get(k, [])
        ul = U[k]
        bl = Bv.get(k, [])
        cols = [z for _, z in wl] + ul + [b for b, _ in bl]
        N = SparseMatrix(len(names), len(cols), tuple(cols))
        Ninv = inverse(N)
        # images of the new basis vectors
        img: List[Element] = [MF.gen(nm) for nm, _ in wl] + [MF.zero() for _ in ul]
        for b, u in bl:
            ue = _vec_element(A, names_by_deg[k - A.dsign], u)
            q = A.diff(ue) - _vec_element(A, names, b)
            img.append(-A.free.extend_as_morphism(nu, q, MF) if q.terms else MF.zero())
        for j, g in enumerate(names):
            out = MF.zero()
            for i, c in Ninv.columns[j].items():
                out = out + c * img[i]
            nu[g] = out
        for nm, z in wl:
            dz = A.diff(_vec_element(A, names, z))
            dbar[nm] = A.free.extend_as_morphism(nu, dz, MF) if dz.terms else MF.zero()
    M = QuasiFreeAlgebra(A.flavor, Mgens, dbar, top, name=f"min({A.name})" if A.name else None)
    nu_map = Morphism(A, M, {g: M.free.coerce(v) for g, v in nu.items()})
    ident = Morphism.identity(M)
    pre = {nm: _vec_element(A, names_by_deg[k], z) for k, lst in W.items() for nm, z in lst}
    eta = lift_through_surjection(nu_map, ident, pre)
    return M, eta, nu_map


def find_isomorphism(M1: QuasiFreeAlgebra, M2: QuasiFreeAlgebra, rng=None, attempts: int = 20) -> Morphism:
    """An isomorphism ``M1 -> M2`` of minimal algebras, built degree by degree.

    Each generator is sent to a solution of ``d ψ(v) = ψ(d v)`` whose linear
    part is, when possible, the matching generator of ``M2`` (same position
    within its degree); otherwise random cycles are added.
    """
    rng = rng or random.Random(0)
    cut = min(M1.cutoff, M2.cutoff)
    dims1 = _gen_dims(M1, cut)
    if dims1 != _gen_dims(M2, cut):
        raise PreconditionError(f"generator dimensions differ: {dims1} vs {_gen_dims(M2, cut)}")
    for attempt in range(attempts):
        assign: Dict[str, Element] = {}
        ok = True
        for k in sorted(dims1):
            g1 = [g for g in M1.gens if M1.degree_of(g) == k]
            g2 = [g for g in M2.gens if M2.degree_of(g) == k]
            for v, target_gen in zip(g1, g2):
                y = M1.free.extend_as_morphism(assign, M1.d[v], M2.free) if M1.d[v].terms else M2.zero()
                x = M2.solve_boundary(y, k)
                if x is None:
                    ok = False
                    break
                Z = M2.cycles(k)
                x = _steer_linear_part(M2, x, Z, target_gen, k)
                if attempt:
                    for z in Z:
                        x = x + Fraction(rng.randint(-2, 2)) * z
                assign[v] = x
            if not ok:
                break
        if ok:
            psi = Morphism(M1, M2, assign)
            if is_isomorphism(psi):
                return psi
    raise PreconditionError("no isomorphism found")


def _gen_dims(M: QuasiFreeAlgebra, cut: int) -> Dict[int, int]:
    out: Dict[int, int] = {}
    for g in M.gens:
        if M.degree_of(g) <= cut:
            out[M.degree_of(g)] = out.get(M.degree_of(g), 0) + 1
    return out


def _steer_linear_part(M: QuasiFreeAlgebra, x: Element, Z: List[Element], gen: str, k: int) -> Element:
    """Add cycles to ``x`` so that its linear part is ``gen`` if that is possible."""
    gens = [g for g in M.gens if M.degree_of(g) == k]
    pos = {g: i for i, g in enumerate(gens)}

    def lin(e):
        return {pos[w[0]]: c for w, c in e.terms.items() if len(w) == 1}

    want = {pos[gen]: Fraction(1)}
    cur = lin(x)
    rhs = dict(want)
    vec_add(rhs, cur, Fraction(-1))
    if not rhs:
        return x
    from .exactlin import solve_matrix
    Mz = SparseMatrix(len(gens), len(Z), tuple(lin(z) for z in Z))
    sol = solve_matrix(Mz, rhs)
    if sol is None:
        return x
    for i, c in sol.items():
        x = x + c * Z[i]
    return x


# ---------------------------------------------------------------------------
# finite generation


@dataclass
class FiniteGenerationReport:
    value: Optional[bool]
    betti: List[int]
    generators: int
    generator_degrees: List[int]
    reason: str

    @property
    def exit_code(self) -> int:
        return {True: 0, False: 1, None: 2}[self.value]


def _is_finite(A) -> bool:
    return isinstance(A, FiniteAlgebra) and A.cutoff >= max(A.basis, default=0)


def check_finite_generation(A, D: int = None) -> FiniteGenerationReport:
    """Is the minimal model of ``L(A)`` finitely generated (equivalently: is H(A) finite)?

    Exact for explicit finite algebras.  For quasi-free A only the Betti
    numbers up to the certified degree are known: the answer is True when
    they vanish on a window above the last class at least as long as the
    range where classes occur, False when classes keep appearing up to the
    largest gap seen below the cutoff, and unknown otherwise.
    """
    if A.flavor.operad != "com" or A.flavor.direction != "cochain":
        raise FlavorError("finite generation is tested for commutative cochain algebras")
    D = A.cutoff if D is None else min(D, A.cutoff)
    finite = _is_finite(A)
    hi = D if finite else D - 1
    betti = [A.homology_dim(k) for k in range(1, hi + 1)]
    support = [k + 1 for k, b in enumerate(betti) if b]
    L = quillen_L(A, D)
    M, _, _ = minimalize(L)
    certified = [M.degree_of(g) for g in M.gens if M.degree_of(g) <= hi - 1]
    expected = sum(b for k, b in zip(range(1, hi + 1), betti) if k - 1 <= hi - 1 and k >= 2)
    if len(certified) != expected:
        raise QuasiFreeError(f"generator count {len(certified)} disagrees with reduced Betti sum {expected}")
    count = len(certified)
    if finite:
        return FiniteGenerationReport(True, betti, count, certified,
                                      "finite-dimensional algebra: homology is finite")
    t = max(support, default=0)
    window = (D - 1) - t
    gaps = [b - a for a, b in zip([0] + support, support)]
    gap = max(gaps, default=0)
    if window >= max(t, 1):
        return FiniteGenerationReport(True, betti, count, certified,
                                      f"homology vanishes in degrees {t + 1}..{D - 1}")
    if support and window <= gap:
        return FiniteGenerationReport(False, betti, count, certified,
                                      f"homology keeps appearing up to degree {t} (cutoff {D})")
    return FiniteGenerationReport(None, betti, count, certified, "inconclusive at this cutoff")
