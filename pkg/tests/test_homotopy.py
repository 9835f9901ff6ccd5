import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quasifree import fixtures as fx
from quasifree.dga import Morphism, QuasiFreeAlgebra, truncate
from quasifree.errors import (HypothesisError, MalformedHomotopyError, ObstructionError, PreconditionError,
                              SparsenessError)
from quasifree.homotopy import (Homotopy, build_homotopy, check_concentration, concentration_degree,
                                extend_homotopy, extend_map, homotopic, identify_self_map_classes,
                                image_within_truncation, verify_homotopy)


def scaled_uw(A, lam):
    lam = Fraction(lam)
    return Morphism(A, A, {"u": lam * A.gen("u"), "w": lam ** 3 * A.gen("w")})


def random_betas(h_source, B, rng):
    return {v: [B.random_element(h_source.degree_of(v) - h_source.dsign, rng)
                for _ in range(rng.randint(1, 2))] for v in h_source.gens
            if h_source.degree_of(v) <= min(h_source.cutoff, B.cutoff)}


def base_maps():
    cp2, cp4, uw = fx.cp_model(2, 9), fx.cp_model(4, 9), fx.lambda_uw(10)
    return [fx.scaling(cp2, 2), fx.scaling(cp2, -1), fx.scaling(cp4, 3), scaled_uw(uw, 2), scaled_uw(uw, 1)]


@given(st.sampled_from(range(5)), st.integers(0, 10 ** 6))
@settings(max_examples=40)
def test_recursion_holds_for_random_betas(which, seed):
    f = base_maps()[which]
    h = Homotopy.build(f, random_betas(f.source, f.target, random.Random(seed)))
    assert h.recursion_defects() == []
    f0, f1 = h.endpoints()          # both are checked chain maps
    assert f0 == f
    assert verify_homotopy(h) == (True, None)


def test_alpha_zero_and_betas_determine_homotopy():
    f = fx.scaling(fx.cp_model(2, 9), 2)
    betas = random_betas(f.source, f.target, random.Random(7))
    assert Homotopy.build(f, betas).coefficients_equal(Homotopy.build(f, betas))


def test_corrupted_alpha_is_detected():
    B = fx.cp_model(3, 8)
    f = Morphism.identity(B)
    x1, x2 = B.gen("x1"), B.gen("x2")
    h = Homotopy.build(f, {"x3": [B.free.bracket(x2, x2)]})
    bad = Homotopy(h.source, h.target, {g: list(a) for g, a in h.alphas.items()}, h.betas)
    bad.alphas["x3"].append(B.free.bracket(x1, B.free.bracket(x1, x2)))
    assert bad.recursion_defects()
    assert verify_homotopy(bad)[0] is False


def test_malformed_endpoint():
    B = fx.cp_model(2, 9)
    h = Homotopy(B, B, {"x1": [B.gen("x1")], "x2": [B.zero()]}, {})
    with pytest.raises(MalformedHomotopyError):
        h.endpoints()


# -- extension


def test_extension_restricts_back():
    A, B = fx.cp_infinity(7), fx.cp_model(2, 9)
    A4 = truncate(A, 4)
    zero = Morphism(A4, B, {g: B.zero() for g in A4.gens})
    rng = random.Random(3)
    h = Homotopy.build(zero, random_betas(A4, B, rng))
    f0, f1 = h.endpoints()
    F, G = extend_map(f0, A, rng), extend_map(f1, A, rng)
    H = extend_homotopy(h, F, G)
    assert verify_homotopy(H)[0]
    assert H.restrict(A4).coefficients_equal(h)
    assert H.endpoints()[0] == F and H.endpoints()[1] == G


def test_obstruction_carries_the_cocycle():
    # H_4 of the CP^2 model is spanned by [x1,x2]; a degree-4 generator sent to it
    B = fx.cp_model(2, 9)
    A = QuasiFreeAlgebra(fx.LIE_CHAIN, {"a": 1, "v": 4}, {}, 9)
    x1, x2 = B.gen("x1"), B.gen("x2")
    c = B.free.bracket(x1, x2)
    f = Morphism(A, B, {"a": x1, "v": B.zero()})
    g = Morphism(A, B, {"a": x1, "v": c})
    A3 = truncate(A, 3)
    h = Homotopy.build(f.restrict(A3), {"a": [B.free.bracket(x1, x1)]})
    with pytest.raises(ObstructionError) as err:
        extend_homotopy(h, f, g)
    assert err.value.generator == "v"
    assert err.value.cocycle == c


def test_extension_precondition():
    B = fx.cp_model(2, 9)
    h = Homotopy.constant(fx.scaling(B, 2).restrict(truncate(B, 1)))
    with pytest.raises(PreconditionError):
        extend_homotopy(h, fx.scaling(B, 3), fx.scaling(B, 3))


def test_extend_map_obstruction():
    # x2 needs a preimage of ½[x1,x1] under d, which L(x1) (d = 0) lacks
    src = fx.cp_model(2, 9)
    tgt = QuasiFreeAlgebra(fx.LIE_CHAIN, {"x1": 1}, {}, 9)
    f1 = Morphism(truncate(src, 1), tgt, {"x1": tgt.gen("x1")})
    with pytest.raises(ObstructionError) as err:
        extend_map(f1, src)
    assert err.value.generator == "x2"


# -- deciding homotopy


def test_homotopic_verdicts():
    B = fx.cp_model(2, 9)
    assert homotopic(fx.scaling(B, 2), fx.scaling(B, 3)).value is False
    assert homotopic(fx.scaling(B, 2), fx.scaling(B, 2)).value is True
    h = Homotopy.build(fx.scaling(B, 2), {"x2": [B.free.bracket(B.gen("x1"), B.gen("x2"))]})
    f0, f1 = h.endpoints()
    v = homotopic(f0, f1, 4)
    assert v.value is True and verify_homotopy(v.certificate)[0]


def test_concentration():
    B = fx.cp_model(2, 9)
    assert concentration_degree(B) == 4
    check_concentration(B, 4)
    with pytest.raises(HypothesisError):
        check_concentration(B, 3)


def test_unknown_is_three_valued():
    v = homotopic(fx.scaling(fx.cp_model(2, 9), 2), fx.scaling(fx.cp_model(2, 9), 2))
    with pytest.raises(TypeError):
        bool(v)
    assert v.exit_code == 0


# -- sparseness


def test_sparse_truncation_homotopies_stay_inside():
    A = fx.cp_infinity(9)
    rng = random.Random(11)
    for n in (1, 3, 5):
        An = truncate(A, n)
        for lam in (1, 2, -3):
            f = Morphism(An, A, {g: Fraction(lam) ** int(g[1:]) * A.gen(g) for g in An.gens})
            g = Homotopy.build(f, random_betas(An, A, rng)).endpoints()[1]
            h = build_homotopy(f, g)
            assert image_within_truncation(h, n)
            assert identify_self_map_classes(A, n, h)


def test_non_sparse_is_refused():
    with pytest.raises(SparsenessError, match="consecutive degrees 2 and 3"):
        identify_self_map_classes(fx.nonsparse(), 2)
