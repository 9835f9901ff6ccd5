"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines inline;
they are also repeated in the terminal summary.
"""

import random
from contextlib import contextmanager
from fractions import Fraction

import pytest
import sympy

from quasifree import fixtures as fx
from quasifree.autalg import (RestrictedStructure, check_main_theorem, homotopic_to_identity, is_automorphism,
                              k_group_element, log_of_automorphism, solve_eta)
from quasifree.dga import Morphism, QuasiFreeAlgebra, is_isomorphism, truncate
from quasifree.errors import ChainMapError, ObstructionError, SparsenessError
from quasifree.homotopy import (Homotopy, build_homotopy, check_concentration, extend_homotopy, extend_map,
                                homotopic, identify_self_map_classes, image_within_truncation, verify_homotopy)
from quasifree.koszul import ce_cochains, check_finite_generation, find_isomorphism, minimalize, quillen_L

from conftest import record


@contextmanager
def criterion(number, title):
    ok = False
    try:
        yield
        ok = True
    finally:
        record(number, title, ok)


def random_betas(A, B, rng):
    return {v: [B.random_element(A.degree_of(v) - A.dsign, rng) for _ in range(rng.randint(1, 2))]
            for v in A.gens if A.degree_of(v) <= min(A.cutoff, B.cutoff)}


# 1 -------------------------------------------------------------------------


def _random_base_map(rng):
    kind = rng.randrange(4)
    lam = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2]))
    if kind == 0:
        return fx.scaling(fx.cp_model(2, 9), lam)
    if kind == 1:
        return fx.scaling(fx.cp_model(4, 9), lam)
    if kind == 2:
        U = fx.lambda_ace(10)
        mu = Fraction(rng.choice([-2, 1, 3]))
        return Morphism(U, U, {"a": lam * U.gen("a"), "c": mu * U.gen("c"), "e": lam ** 2 * mu * U.gen("e")})
    A, B = fx.cp_infinity(7), fx.cp_model(2, 9)
    c5 = B.free.bracket(B.gen("x1"), B.free.bracket(B.gen("x1"), B.gen("x2")))
    f5 = Morphism(truncate(A, 5), B, {"x1": B.zero(), "x2": B.zero(), "x3": lam * c5})
    return extend_map(f5, A, rng)


def test_criterion_1_homotopy_recursion():
    with criterion(1, "homotopy recursion: -(i+1) α_{i+1} = dβ_i + β_i d on 100 random homotopies"):
        rng = random.Random(20261019)
        for _ in range(100):
            f = _random_base_map(rng)
            A, B = f.source, f.target
            h = Homotopy.build(f, random_betas(A, B, rng))
            for v in h.domain:
                dv = A.d[v]
                for i in range(h.length + 1):
                    a_next = h.alphas[v][i + 1] if i + 1 < len(h.alphas[v]) else B.zero()
                    b_i = h.betas[v][i] if i < len(h.betas[v]) else B.zero()
                    b_dv = h.beta_of(dv, i) if dv.terms else B.zero()
                    assert -(i + 1) * a_next == B.diff(b_i) + b_dv
            f0, f1 = h.endpoints()          # raises unless both are chain maps
            assert f0 == f
            assert verify_homotopy(h) == (True, None)


# 2 -------------------------------------------------------------------------


def test_criterion_2_homotopy_extension():
    with criterion(2, "homotopy extension succeeds when H(B) is concentrated <= n; obstruction cocycle otherwise"):
        rng = random.Random(2)
        for A, B, n in ((fx.cp_infinity(7), fx.cp_model(2, 9), 4), (fx.cp_infinity(9), fx.cp_model(3, 10), 6)):
            check_concentration(B, n)
            An = truncate(A, n)
            zero = Morphism(An, B, {g: B.zero() for g in An.gens})
            for _ in range(10):
                h = Homotopy.build(zero, random_betas(An, B, rng))
                f0, f1 = h.endpoints()
                F, G = extend_map(f0, A, rng), extend_map(f1, A, rng)
                H = extend_homotopy(h, F, G)
                assert H.restrict(An).coefficients_equal(h)
                assert verify_homotopy(H)[0]
        # engineered: H_4(CP^2 model) ∋ [x1,x2], reached by a degree-4 generator
        B = fx.cp_model(2, 9)
        A = QuasiFreeAlgebra(fx.LIE_CHAIN, {"a": 1, "v": 4}, {}, 9)
        x1, x2 = B.gen("x1"), B.gen("x2")
        c = B.free.bracket(x1, x2)
        f = Morphism(A, B, {"a": x1, "v": B.zero()})
        g = Morphism(A, B, {"a": x1, "v": c})
        h = Homotopy.build(f.restrict(truncate(A, 3)), {"a": [B.free.bracket(x1, x1)]})
        with pytest.raises(ObstructionError) as err:
            extend_homotopy(h, f, g)
        assert err.value.cocycle == c and err.value.generator == "v"


# 3 -------------------------------------------------------------------------


def test_criterion_3_stabilization():
    with criterion(3, "stabilization: maps on A_5 extend to A_7 and extensions are homotopic (20 samples)"):
        A, B = fx.cp_infinity(7), fx.cp_model(2, 9)
        A5 = truncate(A, 5)
        check_concentration(B, 5)
        # every map A_5 -> B kills x1 (λ x1 with λ ≠ 0 would force λ³[x1,x2] to bound)
        for lam in (1, 2, -1):
            f3 = Morphism(truncate(A, 3), B, {"x1": lam * B.gen("x1"), "x2": lam ** 2 * B.gen("x2")})
            with pytest.raises(ObstructionError):
                extend_map(f3, A5)
        c5 = B.free.bracket(B.gen("x1"), B.free.bracket(B.gen("x1"), B.gen("x2")))
        rng = random.Random(3)
        for _ in range(20):
            mu, nu = Fraction(rng.randint(-5, 5)), Fraction(rng.randint(-5, 5))
            f5 = Morphism(A5, B, {"x1": B.zero(), "x2": B.zero(), "x3": mu * c5})
            g5 = Morphism(A5, B, {"x1": B.zero(), "x2": B.zero(), "x3": nu * c5})
            e1, e2 = extend_map(f5, A, rng), extend_map(f5, A, rng)
            v = homotopic(e1, e2, 4)
            assert v.value is True and verify_homotopy(v.certificate)[0]
            # injectivity: a homotopy on A_5 extends over A_7
            h5 = build_homotopy(f5, g5)
            F, G = extend_map(f5, A, rng), extend_map(g5, A, rng)
            H = extend_homotopy(h5, F, G)
            assert verify_homotopy(H)[0] and H.restrict(A5).coefficients_equal(h5)


# 4 -------------------------------------------------------------------------


def test_criterion_4_cp2_classification():
    with criterion(4, "CP^2 model: endomorphisms are x1 ↦ λx1, x2 ↦ λ²x2; classes ↔ λ; invertible iff λ ≠ 0"):
        A = fx.cp_model(2, 9)
        L = A.free
        assert L.dim(1) == 1 and L.dim(3) == 1
        # symbolic oracle: f(x1) = a x1, f(x2) = c x2, chain condition d f(x2) = f(d x2)
        a, c = sympy.symbols("a c")
        dx2 = A.coords(A.d["x2"], 2)
        lhs = {i: c * sympy.Rational(v.numerator, v.denominator) for i, v in dx2.items()}
        rhs = {i: a ** 2 * sympy.Rational(v.numerator, v.denominator) for i, v in dx2.items()}
        sol = sympy.solve([lhs[i] - rhs[i] for i in dx2], c, dict=True)
        assert sol == [{c: a ** 2}]
        # brute force over a grid of assignments
        grid = [Fraction(p, q) for p in range(-3, 4) for q in (1, 2)]
        for x in grid:
            for y in grid:
                try:
                    Morphism(A, A, {"x1": x * A.gen("x1"), "x2": y * A.gen("x2")})
                    assert y == x ** 2
                except ChainMapError:
                    assert y != x ** 2
        samples = [Fraction(0), Fraction(1), Fraction(-1), Fraction(2), Fraction(3), Fraction(1, 2)]
        maps = [fx.scaling(A, s) for s in samples]
        for s, f in zip(samples, maps):
            assert is_isomorphism(f) == (s != 0)
            for t, g in zip(samples, maps):
                assert homotopic(f, g, 4).value is (s == t)


# 5 -------------------------------------------------------------------------


def test_criterion_5_koszul_round_trip():
    with criterion(5, "Koszul round trip: Betti numbers of L(C*(g)) equal those of g in degrees <= D-2"):
        for g in (fx.cp_model(2, 9), fx.abelian_lie(2), fx.sphere_model(1), fx.sphere_model(2), fx.sphere_model(3)):
            C = ce_cochains(g)
            L = quillen_L(C)
            D = C.cutoff
            assert [L.homology_dim(k) for k in range(1, D - 1)] == [g.homology_dim(k) for k in range(1, D - 1)]


# 6 -------------------------------------------------------------------------


def test_criterion_6_quillen_of_k_q_2():
    with criterion(6, "L(Λ(u)) minimalizes to the CP^∞ model in degrees <= 7 with dx_m = ½Σ[x_i,x_j]"):
        L = quillen_L(fx.lambda_u(), 8)
        M, _, _ = minimalize(L)
        assert sorted(M.degree_of(g) for g in M.gens) == [1, 3, 5, 7]
        target = fx.cp_infinity(7)
        rename = {"x1": "x1", "x3": "x2", "x5": "x3", "x7": "x4"}
        for g in M.gens:
            moved = {tuple(rename[s] for s in w): c for w, c in M.d[g].terms.items()}
            assert moved == target.d[rename[g]].terms
        assert is_isomorphism(find_isomorphism(M, target))


# 7 -------------------------------------------------------------------------


def test_criterion_7_finite_generation():
    with criterion(7, "finite generation: H(CP^2) gives 2 generators (true); Λ(u) gives false"):
        rep = check_finite_generation(fx.cp2_cohomology())
        assert rep.value is True and rep.generators == 2
        assert check_finite_generation(fx.lambda_u()).value is False


# 8 -------------------------------------------------------------------------


def test_criterion_8_unipotent_subgroup():
    with criterion(8, "K(A) = exp(dη + ηd): automorphisms, unipotent, homotopic to id; logs realize the converse"):
        rng = random.Random(8)
        fixtures = [fx.cp_model(3, 8), fx.cp_model(4, 9), fx.lambda_ace(10), fx.cp_model(2, 9)]
        for A in fixtures:
            for _ in range(6):
                eta = {g: A.random_element(A.degree_of(g) - A.dsign, rng) for g in A.gens}
                M, phi = k_group_element(A, eta)
                assert is_automorphism(M, RestrictedStructure(A, M.level))[0]
                assert M.is_unipotent()
                assert homotopic_to_identity(phi).value is True
        for A in fixtures[:3]:
            for _ in range(5):
                phi = Homotopy.build(Morphism.identity(A), random_betas(A, A, rng)).endpoints()[1]
                assert homotopic_to_identity(phi).value is True
                eta = solve_eta(A, log_of_automorphism(phi))
                assert eta is not None
                _, again = k_group_element(A, eta)
                assert all(again.assignment[g] == phi.assignment[g] for g in phi.domain)


# 9 -------------------------------------------------------------------------


def test_criterion_9_main_theorem():
    with criterion(9, "main theorem desk check on the CP^2 pair, n = 4"):
        a = fx.cp_model(2, 9)
        _, unip = k_group_element(a, {"x1": a.free.bracket(a.gen("x1"), a.gen("x1"))})
        samples = [(f"lambda={l}", fx.scaling(a, l)) for l in (2, 3, -1, 1)] + [("unipotent", unip)]
        rep = check_main_theorem(a, 4, samples, A=fx.lambda_uw(10))
        print(rep.format())
        assert rep.ok
        assert len({r.com_class for r in rep.rows[:4]}) == 4
        assert len(rep.group_law) == 25 and all(v is True for _, _, v in rep.group_law)


# 10 ------------------------------------------------------------------------


def test_criterion_10_sparseness_gate():
    with criterion(10, "sparseness: truncation homotopies stay in A_n; non-sparse fixture is refused"):
        A = fx.cp_infinity(9)
        rng = random.Random(10)
        for n in (1, 3, 5, 7):
            An = truncate(A, n)
            for lam in (1, 2, -1):
                f = Morphism(An, A, {g: Fraction(lam) ** int(g[1:]) * A.gen(g) for g in An.gens})
                g = Homotopy.build(f, random_betas(An, A, rng)).endpoints()[1]
                h = build_homotopy(f, g)
                assert verify_homotopy(h)[0]
                assert image_within_truncation(h, n)
                assert identify_self_map_classes(A, n, h)
        with pytest.raises(SparsenessError, match="consecutive degrees 2 and 3"):
            identify_self_map_classes(fx.nonsparse(), 2)
