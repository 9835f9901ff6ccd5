import random

import pytest
from hypothesis import given, settings, strategies as st

from quasifree import fixtures as fx
from quasifree.autalg import (AutMatrix, KoszulContext, RestrictedStructure, check_main_theorem,
                              derivation_bracket_with_d, homotopic_to_identity, is_automorphism,
                              k_group_element, log_of_automorphism, solve_eta)
from quasifree.dga import Morphism
from quasifree.errors import CutoffError
from quasifree.homotopy import Homotopy

UNIPOTENT_FIXTURES = [fx.cp_model(3, 8), fx.cp_model(4, 9), fx.lambda_ace(10), fx.cp_model(2, 9)]


def random_eta(A, rng):
    return {g: A.random_element(A.degree_of(g) - A.dsign, rng) for g in A.gens}


@given(st.sampled_from(range(len(UNIPOTENT_FIXTURES))), st.integers(0, 10 ** 6))
@settings(max_examples=25)
def test_k_group_elements(which, seed):
    A = UNIPOTENT_FIXTURES[which]
    M, phi = k_group_element(A, random_eta(A, random.Random(seed)))
    ok, why = is_automorphism(M, RestrictedStructure(A, M.level))
    assert ok, why
    assert M.is_unipotent()
    assert homotopic_to_identity(phi).value is True


def test_known_unipotent_elements():
    B = fx.cp_model(3, 8)
    x1, x2, x3 = (B.gen(g) for g in ("x1", "x2", "x3"))
    br = B.free.bracket
    _, phi = k_group_element(B, {"x2": br(x1, x2), "x3": 2 * br(x1, x3)})
    assert phi.assignment["x3"] == x3 - 3 * br(x1, br(x1, x2))
    U = fx.lambda_ace()
    _, psi = k_group_element(U, {"c": 5 * U.gen("a")})
    a = U.gen("a")
    assert psi.assignment["e"] == U.gen("e") + 5 * a * a * a


def test_k_of_cp2_model_is_trivial():
    # every θ = dη + ηd vanishes on the CP^2 model
    A = fx.cp_model(2, 9)
    for seed in range(10):
        theta = derivation_bracket_with_d(A, random_eta(A, random.Random(seed)))
        assert all(not t.terms for t in theta.values())


@pytest.mark.parametrize("A", [fx.cp_model(3, 8), fx.cp_model(4, 9), fx.lambda_ace(10)], ids=lambda A: A.name)
def test_logarithm_of_homotopically_trivial_automorphisms(A):
    rng = random.Random(2)
    for _ in range(5):
        betas = {v: [A.random_element(A.degree_of(v) - A.dsign, rng)] for v in A.gens}
        phi = Homotopy.build(Morphism.identity(A), betas).endpoints()[1]
        eta = solve_eta(A, log_of_automorphism(phi))
        assert eta is not None
        _, again = k_group_element(A, eta)
        assert all(again.assignment[g] == phi.assignment[g] for g in phi.domain)


def test_non_automorphism_is_rejected():
    A = fx.cp_model(2, 9)
    S = RestrictedStructure(A, 3)
    bad = AutMatrix.from_morphism(Morphism(A, A, {"x1": 2 * A.gen("x1"), "x2": 5 * A.gen("x2")}, check=False), 3)
    assert is_automorphism(bad, S) == (False, "does not commute with d on degree 3")
    zero = AutMatrix.from_morphism(fx.scaling(A, 0), 3)
    assert is_automorphism(zero, S)[0] is False
    assert is_automorphism(AutMatrix.from_morphism(fx.scaling(A, 2), 3), S) == (True, "")


def test_product_violation_is_rejected():
    U = fx.lambda_uw(10)
    u = U.gen("u")
    # u ↦ u, w ↦ w  but u² ↦ 2u² at level 4
    phi = Morphism(U, U, {"u": u, "w": U.gen("w")})
    M = AutMatrix.from_morphism(phi, 4)
    M.blocks[4] = M.blocks[4].scaled(2)
    ok, why = is_automorphism(M, RestrictedStructure(U, 4))
    assert not ok and "product" in why


def test_restricted_structure_level():
    with pytest.raises(CutoffError):
        RestrictedStructure(fx.cp_model(2, 9), 12)


def test_scalings_are_not_homotopic_to_identity():
    A = fx.cp_model(2, 9)
    assert homotopic_to_identity(fx.scaling(A, 2)).value is False


# -- the ρ pipeline


@pytest.fixture(scope="module")
def cp2_context():
    return KoszulContext.build(fx.cp_model(2, 9), 4, fx.lambda_uw(10))


def test_rho_of_scaling(cp2_context):
    r = cp2_context.rho(fx.scaling(cp2_context.a, 2))
    # on H^2 the induced map is multiplication by ±2
    assert abs(r.induced_on_homology(2).to_dense()[0][0]) == 2


def test_preimage_round_trip(cp2_context):
    ctx = cp2_context
    for lam in (2, -1, 3):
        phi = fx.scaling(ctx.a, lam)
        pre = ctx.preimage(ctx.rho(phi))
        assert pre.induced_on_homology(1) == phi.induced_on_homology(1)
        assert pre.induced_on_homology(4) == phi.induced_on_homology(4)


def test_main_theorem_report(cp2_context):
    a = cp2_context.a
    samples = [(f"lambda={l}", fx.scaling(a, l)) for l in (2, -1)]
    rep = check_main_theorem(a, 4, samples, ctx=cp2_context)
    assert rep.ok, rep.format()
    assert rep.format().endswith("result: pass")
