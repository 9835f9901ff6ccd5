"""Standard small algebras used by the tests, the acceptance suite and the CLI examples."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict

from .dga import FiniteAlgebra, Morphism, QuasiFreeAlgebra
from .freealg import Flavor

LIE_CHAIN = Flavor("lie", "chain")
COM_COCHAIN = Flavor("com", "cochain", True)


def cp_model(m: int, cutoff: int = None) -> QuasiFreeAlgebra:
    """Lie model of CP^m: ``x_k`` in degree ``2k-1``, ``d x_k = ½ Σ_{i+j=k} [x_i, x_j]``.

    Also the truncation to degrees ``<= 2m-1`` of the CP^∞ model.
    """
    cutoff = 2 * m + 3 if cutoff is None else cutoff
    gens = {f"x{i}": 2 * i - 1 for i in range(1, m + 1)}
    d: Dict[str, Dict] = {}
    for k in range(2, m + 1):
        terms: Dict[tuple, Fraction] = {}
        for i in range(1, k):
            j = k - i
            # ½[x_i,x_j] = ½(x_i x_j + x_j x_i) for odd x's
            for w in ((f"x{i}", f"x{j}"), (f"x{j}", f"x{i}")):
                terms[w] = terms.get(w, 0) + Fraction(1, 2)
        d[f"x{k}"] = terms
    return QuasiFreeAlgebra(LIE_CHAIN, gens, d, cutoff, name=f"CP{m}")


def cp_infinity(cutoff: int) -> QuasiFreeAlgebra:
    """The CP^∞ model with all generators of degree ``<= cutoff``."""
    return cp_model((cutoff + 1) // 2, cutoff)


def sphere_model(n: int, cutoff: int = 9) -> QuasiFreeAlgebra:
    """Free Lie algebra on one generator of degree ``n`` with ``d = 0``."""
    return QuasiFreeAlgebra(LIE_CHAIN, {"x": n}, {}, cutoff, name=f"L(x{n})")


def abelian_lie(dim: int = 2, cutoff: int = 9) -> FiniteAlgebra:
    """Abelian Lie algebra concentrated in degree 1."""
    names = [f"a{i}" for i in range(1, dim + 1)]
    return FiniteAlgebra(LIE_CHAIN, {1: names}, {}, {}, cutoff=cutoff, name="abelian")


def lambda_u(cutoff: int = 10) -> QuasiFreeAlgebra:
    """``Λ(u)`` with ``|u| = 2``: the minimal model of K(Q,2)."""
    return QuasiFreeAlgebra(COM_COCHAIN, {"u": 2}, {}, cutoff, name="Lambda(u)")


def lambda_uw(cutoff: int = 10) -> QuasiFreeAlgebra:
    """``Λ(u, w)`` with ``d w = u³``: the minimal model of CP^2."""
    return QuasiFreeAlgebra(COM_COCHAIN, {"u": 2, "w": 5}, {"w": {("u", "u", "u"): 1}}, cutoff,
                            name="Lambda(u,w)")


def lambda_ace(cutoff: int = 10) -> QuasiFreeAlgebra:
    """``Λ(a, c, e)``, degrees 2, 3, 6, with ``d c = 0`` and ``d e = a²c``.

    Carries a non-trivial unipotent automorphism ``e ↦ e + t a³``.
    """
    return QuasiFreeAlgebra(COM_COCHAIN, {"a": 2, "c": 3, "e": 6}, {"e": {("a", "a", "c"): 1}}, cutoff,
                            name="Lambda(a,c,e)")


def cp2_cohomology() -> FiniteAlgebra:
    """``H*(CP^2) = Q[a]/a³`` with ``|a| = 2`` and zero differential."""
    return FiniteAlgebra(COM_COCHAIN, {2: ["a"], 4: ["b"]}, {}, {("a", "a"): {"b": 1}}, cutoff=4,
                         name="H(CP2)")


def nonsparse(cutoff: int = 9) -> QuasiFreeAlgebra:
    """Free Lie algebra on generators in the consecutive degrees 2 and 3."""
    return QuasiFreeAlgebra(LIE_CHAIN, {"y": 2, "z": 3}, {}, cutoff, name="nonsparse")


def cylinder(cutoff: int = 7) -> QuasiFreeAlgebra:
    """CP^2 model tensored with contractible pairs ``d z_k = y_k``; minimalizes to the CP^2 model."""
    return QuasiFreeAlgebra(
        LIE_CHAIN, {"x1": 1, "x2": 3, "y1": 1, "z1": 2, "y2": 3, "z2": 4},
        {"x2": {("x1", "x1"): 1}, "z1": {("y1",): 1}, "z2": {("y2",): 1}}, cutoff, name="cylinder")


def scaling(A: QuasiFreeAlgebra, lam, name: str = None) -> Morphism:
    """``x_k ↦ λ^k x_k`` on a CP^m model."""
    lam = Fraction(lam)
    return Morphism(A, A, {g: lam ** int(g[1:]) * A.gen(g) for g in A.gens if A.degree_of(g) <= A.cutoff},
                    name=name or f"lambda={lam}")
