"""Product-construction oracles.  The D8 <= S4 instances reuse the hand-derived
fusion facts from test_fusion; the direct-product instance A4 x A4 provides a
genuine central product with nontrivial factors."""

import numpy as np
import pytest

from locality_lab.groups import FiniteGroup, indices_of, mask_of, popcount
from locality_lab.fusion import (
    GroupFusion, digest, fusion_of_group, fusion_of_subgroup, generate,
    normalizer_system, o_upper_p_system, restrict, same_system,
    saturation_report, trivial_system,
)
from locality_lab.products import (
    TheoremViolation, ac_subgroup, central_product, commutes,
    frattini_factorize, group_overgroup_pool, lemma_suite_products, n_f_t_e,
    product_ER, verify_central_product, verify_product_er,
)
from locality_lab.fusion import _compose_rows


@pytest.fixture(scope="module")
def s4_setup(cat):
    G = cat("s4")
    S = G.sylow_mask(2)
    F = fusion_of_group(G, S, 2)
    V4 = G.O_p_in(G.full_mask, 2)
    A4 = G.derived_mask()
    Z = G.center_mask(within=S)
    E = fusion_of_subgroup(G, V4, A4, 2)
    return G, S, F, V4, A4, Z, E


@pytest.fixture(scope="module")
def a4xa4():
    gens = [
        (1, 2, 0, 3, 4, 5, 6, 7), (0, 2, 3, 1, 4, 5, 6, 7),
        (0, 1, 2, 3, 5, 6, 4, 7), (0, 1, 2, 3, 4, 6, 7, 5),
    ]
    G = FiniteGroup.from_generators(gens, 8, name="a4xa4")
    assert G.n == 144
    left = mask_of([i for i in range(G.n)
                    if (G.perms[i, 4:] == np.arange(4, 8)).all()])
    right = mask_of([i for i in range(G.n)
                     if (G.perms[i, :4] == np.arange(4)).all()])
    F = fusion_of_group(G, p=2)
    F1 = fusion_of_subgroup(G, G.O_p_in(left, 2), left, 2)
    F2 = fusion_of_subgroup(G, G.O_p_in(right, 2), right, 2)
    return G, F, F1, F2


# ------------------------------------------------------------ commuting

def test_commutes_central_trivial_pair(cat):
    G = cat("d8")
    F = fusion_of_group(G, G.full_mask, 2)
    EZ = trivial_system(G, G.center_mask(), 2)
    assert commutes(F, EZ, EZ)


def test_commutes_factor_systems(a4xa4):
    G, F, F1, F2 = a4xa4
    assert commutes(F, F1, F2)


def test_commutes_rejects_noncentral_overlap(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    # Z(F_{V4}(A4)) = 1, so the overlap V4 is not central
    assert not commutes(F, E, E)


# ------------------------------------------------------------ central products

def test_central_product_with_trivial_factor(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    one = trivial_system(G, 1, 2)
    D = central_product(F, E, one)
    assert same_system(D, E)


def test_central_product_of_factors_is_whole(a4xa4):
    G, F, F1, F2 = a4xa4
    D = central_product(F, F1, F2)
    assert same_system(D, F)
    for cid, ok, witness in verify_central_product(F, F1, F2):
        assert ok, f"{cid}: {witness}"


def test_central_product_of_two_commuting_c2(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    # the two reflections of S outside V4 commute and intersect trivially
    t1, t2 = [int(i) for i in indices_of(S & ~V4, G.n)
              if G.order_of(int(i)) == 2][:2]
    E1, E2 = trivial_system(G, 1 | (1 << t1), 2), trivial_system(G, 1 | (1 << t2), 2)
    D = central_product(F, E1, E2)
    TT = G.product_mask(E1.over_mask, E2.over_mask)
    assert popcount(TT) == 4
    assert same_system(D, trivial_system(G, TT, 2))


def test_central_product_rejects_noncommuting(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    with pytest.raises(ValueError):
        central_product(F, E, E)


# ------------------------------------------------------------ Ac

def test_ac_recovers_odd_part(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    A, mask, rows = ac_subgroup(F, E, V4)
    assert A.n == 6 and popcount(mask) == 3


def test_ac_vacuous_at_top(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    A, mask, rows = ac_subgroup(F, F, S)
    # Aut_F(D8) is a 2-group, so the p'-part is trivial
    assert popcount(mask) == 1


def test_ac_trivial_on_disjoint_domain(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    EZ = trivial_system(G, Z, 2)
    x1 = next(int(i) for i in indices_of(V4 & ~Z & ~1, G.n))
    _, m1, _ = ac_subgroup(F, EZ, 1 | (1 << x1))
    assert popcount(m1) == 1
    _, m2, _ = ac_subgroup(F, EZ, V4)
    assert popcount(m2) == 1


# ------------------------------------------------------------ (E R)

def test_er_with_full_sylow_recovers_f(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    ER = product_ER(F, E, S)
    assert same_system(ER, F)


def test_er_with_t_recovers_e(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    assert same_system(product_ER(F, E, V4), E)


def test_er_of_trivial_system_is_inner(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    EZ = trivial_system(G, Z, 2)
    t = next(int(i) for i in indices_of(S, G.n)
             if G.order_of(int(i)) == 2 and not ((V4 >> int(i)) & 1))
    R = 1 | (1 << t)
    ER = product_ER(F, EZ, R)
    TR = G.product_mask(Z, R)
    assert popcount(TR) == 4
    assert same_system(ER, trivial_system(G, TR, 2))


def test_er_rejects_non_normalizing_r(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    x1 = next(int(i) for i in indices_of(V4 & ~Z & ~1, G.n))
    E0 = trivial_system(G, 1 | (1 << x1), 2)
    t = next(int(i) for i in indices_of(S, G.n)
             if G.order_of(int(i)) == 2 and not ((V4 >> int(i)) & 1))
    with pytest.raises(ValueError):
        product_ER(F, E0, 1 | (1 << t))


def test_er_postconditions_and_uniqueness(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    pool = group_overgroup_pool(F, S)
    assert len(pool) == 2  # F_{D8}(D8) and F_{D8}(S4)
    for cid, ok, witness in verify_product_er(F, E, S, pool=pool, e_normal=True):
        assert ok, f"{cid}: {witness}"


def test_er_centric_variant_matches(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    for R in (Z, S):
        assert same_system(product_ER(F, E, R), product_ER(F, E, R, crit="c"))


def test_alperin_generation_via_er(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    assert same_system(product_ER(F, F, S), F)


# ------------------------------------------------------------ N_F(T, E)

def test_nfte_at_top(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    assert same_system(n_f_t_e(F, F), normalizer_system(F, S))


def test_nfte_of_normal_subsystem_is_whole(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    assert same_system(n_f_t_e(F, E), F)


def test_nfte_over_non_normal_c2(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    t = next(int(i) for i in indices_of(S, G.n)
             if G.order_of(int(i)) == 2 and not ((V4 >> int(i)) & 1))
    E0 = trivial_system(G, 1 | (1 << t), 2)
    NTE = n_f_t_e(F, E0)
    assert popcount(NTE.over_mask) == 4
    assert same_system(NTE, trivial_system(G, NTE.over_mask, 2))


# ------------------------------------------------------------ Frattini

def test_frattini_factorizes_every_morphism(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    for m in F.morphisms():
        psi, alpha = frattini_factorize(F, E, m)
        assert (np.asarray(_compose_rows(psi.row, alpha.row)) == m.row).all()


def test_frattini_inclusion_stays_trivial(s4_setup):
    G, S, F, V4, A4, Z, E = s4_setup
    incl = next(h for h in F.injhoms_from(Z) if h.dom_mask == h.im_mask)
    psi, alpha = frattini_factorize(F, E, incl)
    assert psi.dom_mask == Z and alpha.im_mask == Z


# ------------------------------------------------------------ suite

@pytest.mark.parametrize("gid", ["s4", "d8", "a4", "sl23"])
def test_lemma_suite_products(cat, gid):
    G = cat(gid)
    for cid, ok, witness in lemma_suite_products(G, 2):
        assert ok, f"{cid}: {witness}"
