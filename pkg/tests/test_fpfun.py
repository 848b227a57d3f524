import random

import pytest

from ppcalc import fpfun, fpmod
from ppcalc import samples as S
from ppcalc.errors import DomainError, UnsupportedRingError
from ppcalc.fpfun import FpFunctor
from ppcalc.fpmod import FpModule, ModuleMorphism, morphism
from ppcalc.linalg import Ring
from ppcalc.pp import PpFormula as P, PpPair, pair_to_functor, solution_set

Z = Ring.integers()
Z4 = Ring.zmod(4)


def cyc(ring, *ds):
    return FpModule.diagonal(ring, list(ds))


def family(ring):
    return S.module_family(ring)


def same_values(F, G, mods):
    return all(F(M).invariant_factors == G(M).invariant_factors for M in mods)


# --- evaluation and defect ---------------------------------------------------


def test_evaluate_representable():
    assert fpfun.representable(cyc(Z, 2), "contra")(cyc(Z, 4)).order() == 2


def test_identity_presentation_is_zero_everywhere():
    F = FpFunctor("contra", cyc(Z, 2, 0).identity())
    assert F.is_zero()
    assert all(F(M).is_zero() for M in family(Z))


def test_covariant_evaluation_at_z_is_z():
    # Hom(Z, Z) / (Hom(Z/2, Z) o proj) = Z / 0
    F = FpFunctor("co", morphism(cyc(Z, 0), cyc(Z, 2), [[1]]))
    assert F(cyc(Z, 0)).invariant_factors == cyc(Z, 0).invariant_factors
    assert F(cyc(Z, 2)).order() == 1  # every map Z -> Z/2 factors through proj


def test_defect_examples():
    for A in (cyc(Z, 2, 0), cyc(Z4, 2)):
        assert fpfun.defect(fpfun.representable(A, "contra")).is_isomorphic(A)
    U = FpFunctor("co", ModuleMorphism.zero(cyc(Z, 0), FpModule.zero(Z)))
    assert fpfun.defect(U).is_isomorphic(cyc(Z, 0))
    F = FpFunctor("co", morphism(cyc(Z, 0), cyc(Z, 2), [[1]]))
    assert fpfun.defect(F).is_isomorphic(cyc(Z, 0))


# --- the recollement ---------------------------------------------------------


def test_sub0_examples():
    assert fpfun.sub0(fpfun.representable(cyc(Z, 2, 3), "contra"))[0].is_zero()
    F = pair_to_functor(PpPair(P.divisible(Z, 2), P.divisible(Z, 4)))
    F0, incl = fpfun.sub0(F)
    assert incl.is_iso() and not F.is_zero()
    F = FpFunctor("co", morphism(cyc(Z, 0), cyc(Z, 2), [[1]]))
    assert fpfun.sub0(F)[0].is_zero()


def test_quot0_examples():
    A = cyc(Z4, 2, 4)
    Fq = fpfun.quot0(fpfun.representable(A, "contra"))[0]
    stable = fpfun.stable_functor(A)
    mods = family(Z4)
    assert all(Fq(M).order() == fpmod.stable_hom(M, A).order() == stable(M).order() for M in mods)
    G = FpFunctor("contra", morphism(cyc(Z, 0), cyc(Z, 2), [[1]]))  # epi presentation
    assert same_values(fpfun.quot0(G)[0], G, family(Z))


def test_quot0_covariant_matches_pp_pair():
    phi, psi = P.torsion(Z4, 2), P.bottom(Z4)
    rho = P.divisible(Z4, 2)
    F0 = fpfun.quot0(pair_to_functor(PpPair(phi, psi)))[0]
    for M in (cyc(Z4, 4), cyc(Z4, 2), cyc(Z4, 2, 4)):
        expected = solution_set(phi, M)[0].order() // solution_set(rho, M)[0].order()
        assert F0(M).order() == expected
    assert F0(cyc(Z4, 2)).order() == 2 and F0(cyc(Z4, 4)).order() == 1


def test_quot0_covariant_over_z_is_unsupported():
    F = pair_to_functor(PpPair(P.top(Z), P.bottom(Z)))
    with pytest.raises(UnsupportedRingError):
        fpfun.quot0(F)


def test_l0y_examples():
    R2 = cyc(Z, 0, 0)
    assert same_values(fpfun.l0y(R2), fpfun.representable(R2, "contra"), family(Z))
    assert fpfun.l0y(cyc(Z, 2))(cyc(Z, 0)).order() == 2
    for A in family(Z4) + family(Z):
        assert fpfun.defect(fpfun.l0y(A)).is_isomorphic(A)


def test_norm_examples():
    assert fpfun.norm_at(cyc(Z4, 4, 4)).is_iso()
    I = fpfun.norm_image(cyc(Z4, 2))
    assert I(cyc(Z4, 2)).is_zero()
    assert I(cyc(Z4, 4)).order() == 2


def test_is_zero_decides_split_epis():
    g = morphism(cyc(Z4, 4), cyc(Z4, 2), [[1]])
    F = FpFunctor("contra", g)
    H = fpmod.hom_group(cyc(Z4, 2), cyc(Z4, 4))
    sections = [s for s in (H.to_morphism([c]) for c in range(4)) if (g @ s).equals(cyc(Z4, 2).identity())]
    assert not sections
    assert not F.is_zero() and F(cyc(Z4, 2)).order() == 2
    assert not fpfun.representable(cyc(Z, 2), "contra").is_zero()


# --- membership --------------------------------------------------------------


def test_membership_of_representable_free():
    F = fpfun.representable(cyc(Z, 0), "contra")
    assert not fpfun.in_fp0(F)
    assert fpfun.in_fp_bang(F) and fpfun.in_fp_bangstar(F)


def test_epi_presentation_is_in_fp0():
    assert fpfun.in_fp0(FpFunctor("contra", morphism(cyc(Z, 0), cyc(Z, 2), [[1]])))


def test_hereditary_fp_bang_iff_quot0_vanishes():
    rng = random.Random(11)
    for _ in range(30):
        F = S.random_functor(rng, Z)
        assert fpfun.in_fp_bang(F) == fpfun.quot0(F)[0].is_zero()


# --- Hom and Ext between functors --------------------------------------------


def test_yoneda_for_hom_functors():
    rng = random.Random(5)
    for ring in (Z, Z4):
        for _ in range(10):
            A = S.random_module(rng, ring)
            G = S.random_functor(rng, ring)
            lhs = fpfun.hom_functors(fpfun.representable(A, "contra"), G)
            assert lhs.invariant_factors == G(A).invariant_factors


def test_leftdef_isomorphism_instances():
    rng = random.Random(6)
    for _ in range(10):
        F, X = S.random_functor(rng, Z4), S.random_module(rng, Z4)
        iso = fpfun.leftdef_iso(F, X)
        assert iso.hom_module.is_isomorphic(iso.nat_module)
        assert fpfun.hom_functors(F, fpfun.representable(X, "contra")).is_isomorphic(
            fpmod.hom_group(fpfun.defect(F), X).module)


def test_pin_check_instances():
    rng = random.Random(7)
    exact_seen = 0
    for _ in range(15):
        F, A = S.random_functor(rng, Z4), S.random_module(rng, Z4)
        pc = fpfun.pin_check(F, A)
        assert pc.injective
        if pc.exact_hypothesis:
            exact_seen += 1
            assert pc.quotient_order == pc.hom_order
    assert exact_seen


def test_w_dual_examples():
    F = FpFunctor("co", morphism(cyc(Z, 0), cyc(Z, 0), [[2]]))  # Ext^1(Z/2, -)
    assert fpfun.in_fp0(F)
    W = fpfun.w_dual_fp0(F)
    assert W.variance == "contra" and W(cyc(Z, 2)).order() == 2
    assert same_values(W, fpfun.stable_functor(cyc(Z, 2)), family(Z))
    assert same_values(fpfun.w_dual_fp0(W), F, family(Z))
    zero = FpFunctor("contra", cyc(Z, 3).identity())
    assert fpfun.w_dual_fp0(zero).is_zero()
    with pytest.raises(DomainError):
        fpfun.w_dual_fp0(fpfun.representable(cyc(Z, 2), "contra"))


def test_w_dual_is_an_involution_on_samples():
    rng = random.Random(8)
    for ring in (Z, Z4):
        for _ in range(10):
            F = S.random_fp0_functor(rng, ring)
            assert same_values(fpfun.w_dual_fp0(fpfun.w_dual_fp0(F)), F, family(ring))


# --- derived functors of (-)^0 -----------------------------------------------


def test_derived_examples():
    rng = random.Random(9)
    for _ in range(10):
        F, M = S.random_functor(rng, Z4), S.random_module(rng, Z4)
        assert fpfun.derived_quot0_eval(F, 0, M).is_isomorphic(fpfun.quot0(F)[0](M))
    St = fpfun.stable_functor(cyc(Z4, 2))
    assert fpfun.derived_quot0_eval(St, 2, cyc(Z4, 2)).order() == 2
    assert fpmod.stable_hom(cyc(Z4, 2), fpmod.syzygy(cyc(Z4, 2))[0]).order() == 2
    for _ in range(10):
        F, M = S.random_functor(rng, Z), S.random_module(rng, Z)
        assert fpfun.derived_quot0_eval(F, 1, M).is_zero()


# --- natural transformations -------------------------------------------------


def test_nat_trans_and_defect_exactness_at_r():
    rng = random.Random(10)
    R = FpModule.free(Z4, 1)
    for _ in range(10):
        F = S.random_functor(rng, Z4)
        F0, incl = fpfun.sub0(F)
        _, proj = fpfun.cokernel_nat(incl)
        # 0 -> F_0 -> F -> F/F_0 -> 0 is exact, so the defects form an exact sequence
        a, b = fpfun.defect_map(incl), fpfun.defect_map(proj)
        assert (b @ a).is_zero()
        assert fpmod.module_homology(a, b).is_zero()
        assert (proj.at(R) @ incl.at(R)).is_zero()


def test_projective_replacement_on_fp_bang_members():
    rng = random.Random(12)
    done = 0
    for _ in range(30):
        F = S.random_functor(rng, Z4)
        if fpfun.in_fp_bang(F):
            fpfun.projective_replacement(F)
            done += 1
    assert done
