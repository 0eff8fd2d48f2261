"""Fusion-system oracles.  The D8 <= S4 numbers were derived by hand and by
brute force over the 24 conjugators; PSL(2,7) facts use the standard structure
of its 2-local subgroups (involution centralizer D8, N(V4) = S4)."""

import numpy as np
import pytest

from locality_lab.groups import indices_of, mask_of, popcount
from locality_lab.fusion import (
    Frame, GroupFusion, InjHom, TableFusion,
    aut_of_system, center_of, centralizer_system, conjugate_system, digest,
    focal_mask, fusion_of_group, fusion_of_subgroup, generate,
    group_subsystems, hyperfocal_mask, is_constrained, is_invariant,
    is_normal_in_system, is_normal_subsystem, is_subnormal_subsystem,
    is_subsystem, is_weakly_invariant, lemma_suite_fusion_core, models,
    n_s_of, normalizer_system, O_p_of, O_p_via_radicals, o_upper_p_system,
    p_power_index_subsystem, restrict, same_system, saturation_report,
    strongly_closed, subgroup_classes, trivial_system,
)


def _conj_hom(G, frame, T_mask, g):
    mapping = {int(x): G.conj(int(x), g) for x in indices_of(T_mask, G.n)}
    return InjHom.from_mapping(frame, mapping)


@pytest.fixture(scope="module")
def s4_setup(cat):
    G = cat("s4")
    S = G.sylow_mask(2)
    F = fusion_of_group(G, S, 2)
    V4 = G.O_p_in(G.full_mask, 2)
    A4 = G.derived_mask()
    Z = G.center_mask(within=S)
    return G, S, F, V4, A4, Z


# ------------------------------------------------------------ construction

def test_aut_v4_in_s4_is_s3(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    assert F.aut_order(V4) == 6
    A, _, _, _ = F.aut_group(V4)
    assert A.n == 6 and A.derived_mask() != 1  # nonabelian of order 6


def test_aut_v4_in_a4_is_c3(cat):
    G = cat("a4")
    F = fusion_of_group(G, p=2)
    V4 = G.O_p_in(G.full_mask, 2)
    assert F.over_mask == V4
    assert F.aut_order(V4) == 3
    A, _, _, _ = F.aut_group(V4)
    assert A.derived_mask() == 1


def test_inner_fusion_of_p_group(cat):
    G = cat("d8")
    F = fusion_of_group(G, G.full_mask, 2)
    # Aut_F(S) = Inn(S), of order |S/Z| = 4
    assert F.aut_order(G.full_mask) == 4
    assert saturation_report(F)["is_saturated"]


def test_fusion_of_group_rejects_non_sylow(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    with pytest.raises(ValueError):
        fusion_of_group(G, V4, 2)


# ------------------------------------------------------------ generation

def test_generate_empty_gives_inclusions_only(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    E = generate(G, S, 2, [])
    for P in E.subgroups():
        assert len(E.isos_from(P)) == 1  # just the identity iso


def test_generate_inner_maps_gives_inner_fusion(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    frame = Frame(G, S)
    inner = [_conj_hom(G, frame, S, int(s)) for s in indices_of(S, G.n)]
    E = generate(G, S, 2, inner)
    assert same_system(E, GroupFusion(G, S, S, 2))


def test_generate_order3_map_recovers_a4_fusion(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    g3 = next(int(i) for i in indices_of(A4, G.n) if G.order_of(int(i)) == 3)
    frame = Frame(G, V4)
    E = generate(G, V4, 2, [_conj_hom(G, frame, V4, g3)])
    assert same_system(E, GroupFusion(G, V4, A4, 2))


def test_closure_idempotent(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    assert same_system(generate(G, S, 2, F.morphisms()), F)


# ------------------------------------------------------------ restriction

def test_restrict_to_v4(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    R = restrict(F, V4)
    assert R.over_mask == V4
    assert R.aut_order(V4) == 6
    assert same_system(R, GroupFusion(G, V4, G.full_mask, 2))
    # Sylow axiom fails at V4: Aut_{V4}(V4) = 1 is not Sylow in S3
    assert not saturation_report(R)["is_saturated"]


def test_restrict_identity_and_trivial(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    assert same_system(restrict(F, S), F)
    R1 = restrict(F, 1)
    assert R1.over_mask == 1 and len(R1.isos_from(1)) == 1


# ------------------------------------------------------------ conjugation

def test_conjugate_system_moves_trivial_system(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    x1, x2 = (int(i) for i in indices_of(V4 & ~Z & ~1, G.n))
    T1, T2 = 1 | (1 << x1), 1 | (1 << x2)
    E = trivial_system(G, T1, 2)
    g = next(int(g) for g in range(G.n) if G.conj(x1, g) == x2)
    phi = _conj_hom(G, Frame(G, S), T1, g)
    Em = conjugate_system(E, phi)
    assert Em.over_mask == T2
    ident = _conj_hom(G, Frame(G, S), T1, 0)
    assert same_system(conjugate_system(E, ident), E)
    assert same_system(conjugate_system(Em, phi.inverse()), E)


def test_aut_of_inner_fusion_is_aut_of_group(cat):
    G = cat("d8")
    F = fusion_of_group(G, G.full_mask, 2)
    assert len(aut_of_system(F)) == 8  # |Aut(D8)| = 8


def test_n_s_of(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    E = fusion_of_subgroup(G, V4, A4, 2)
    assert n_s_of(F, E) == S
    x1 = next(int(i) for i in indices_of(V4 & ~Z & ~1, G.n))
    E0 = trivial_system(G, 1 | (1 << x1), 2)
    got = n_s_of(F, E0)
    assert got == G.centralizer_mask(E0.over_mask, within=S)
    assert popcount(got) == 4


# ------------------------------------------------------------ saturation

def test_saturation_report_s4(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    rep = saturation_report(F)
    assert rep["is_saturated"]
    assert len(rep["classes"]) == 7
    assert sum(len(c["members"]) for c in rep["classes"]) == 10


def test_saturation_trivial_over_c2(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    E = trivial_system(G, Z, 2)
    assert saturation_report(E)["is_saturated"]


# ------------------------------------------------------------ closed subgroups

def test_strongly_closed(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    assert strongly_closed(F, V4)
    assert strongly_closed(F, S)
    assert not strongly_closed(F, Z)  # the three double transpositions fuse


def test_invariance(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    E = GroupFusion(G, V4, A4, 2)
    assert is_weakly_invariant(F, E)
    assert is_invariant(F, E)
    E0 = trivial_system(G, Z, 2)
    assert not is_weakly_invariant(F, E0)
    assert not is_invariant(F, E0)


def test_normal_subsystem(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    assert is_normal_subsystem(F, F)
    assert is_normal_subsystem(F, GroupFusion(G, V4, A4, 2))
    assert not is_normal_subsystem(F, trivial_system(G, Z, 2))


def test_subnormal_chain_through_inner_v4(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    x1 = next(int(i) for i in indices_of(V4 & ~Z & ~1, G.n))
    E0 = trivial_system(G, 1 | (1 << x1), 2)
    ok, chain = is_subnormal_subsystem(F, E0)
    assert ok
    assert [c.over_mask for c in chain][0] == S
    assert chain[-1].over_mask == E0.over_mask
    assert len(chain) == 3 and chain[1].over_mask == V4
    # the middle term is the inner fusion of V4: no nontrivial automorphisms
    assert chain[1].aut_order(V4) == 1


def test_subnormal_rejects_non_subnormal(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    C4 = next(P for P in F.subgroups() if popcount(P) == 4 and P != V4
              and any(G.order_of(int(i)) == 4 for i in indices_of(P, G.n)))
    ok, chain = is_subnormal_subsystem(F, trivial_system(G, C4, 2))
    assert not ok and chain == []


# ------------------------------------------------------------ subgroup classes

def test_subgroup_classes_s4(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    cls = subgroup_classes(F)
    assert cls["O_p"] == V4 == O_p_of(F)
    assert O_p_via_radicals(F) == V4  # independent route
    assert cls["constrained"]
    assert cls["Z"] == 1
    assert set(cls["subcentric"]) == set(F.subgroups())
    assert set(cls["radical_centric"]) == {V4, S}
    centric = set(cls["centric"])
    assert S in centric and V4 in centric and Z not in centric and 1 not in centric
    assert len(centric) == 4


def test_subgroup_classes_inner_d8(cat):
    G = cat("d8")
    F = fusion_of_group(G, G.full_mask, 2)
    cls = subgroup_classes(F)
    assert cls["radical_centric"] == (G.full_mask,)
    assert set(cls["subcentric"]) == set(F.subgroups())
    assert cls["O_p"] == G.full_mask
    assert cls["Z"] == G.center_mask()


def test_subgroup_classes_psl27(cat):
    G = cat("psl27")
    F = fusion_of_group(G, p=2)
    cls = subgroup_classes(F)
    assert not cls["constrained"]
    assert cls["O_p"] == 1
    assert 1 not in cls["subcentric"]
    assert set(cls["subcentric"]) == set(F.subgroups()) - {1}
    assert sorted(popcount(R) for R in cls["radical_centric"]) == [4, 4, 8]
    assert saturation_report(F)["is_saturated"]


def test_is_normal_in_system_details(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    assert is_normal_in_system(F, V4)
    assert not is_normal_in_system(F, S)   # the order-3 map on V4 has no S-wide extension
    assert not is_normal_in_system(F, Z)   # not strongly closed


# ------------------------------------------------------------ focal machinery

def test_focal_hyperfocal_s4(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    assert focal_mask(F) == V4
    assert hyperfocal_mask(F) == V4
    FV = p_power_index_subsystem(F, V4)
    assert same_system(FV, GroupFusion(G, V4, A4, 2))
    assert same_system(o_upper_p_system(F), FV)
    assert same_system(p_power_index_subsystem(F, S), F)
    with pytest.raises(ValueError):
        p_power_index_subsystem(F, Z)


def test_focal_of_inner_fusion_is_derived(cat):
    G = cat("d8")
    F = fusion_of_group(G, G.full_mask, 2)
    assert focal_mask(F) == G.derived_mask()
    assert hyperfocal_mask(F) == 1  # no p'-automorphisms anywhere


# ------------------------------------------------------------ models

def test_models_identity_and_rejection(cat, s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    got = models(F, [G])
    assert len(got) == 1 and got[0][0] is G
    other = cat("a4xc2")
    assert models(F, [other]) == []


def test_models_of_inner_fusion(cat):
    G = cat("d8")
    F = fusion_of_group(G, G.full_mask, 2)
    assert len(models(F, [G])) == 1


# ------------------------------------------------------------ normalizers, centralizers

def test_normalizer_system_dual_route(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    NZ = normalizer_system(F, Z)
    assert isinstance(NZ, GroupFusion)
    assert NZ.over_mask == S
    # same computation through the generic extension-based definition
    FT = generate(G, S, 2, F.morphisms())
    NZ2 = normalizer_system(FT, Z)
    assert isinstance(NZ2, TableFusion)
    assert digest(NZ) == digest(NZ2)
    assert is_constrained(NZ)


def test_centralizer_system_dual_route(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    CV = centralizer_system(F, V4)
    assert CV.over_mask == V4
    assert CV.aut_order(V4) == 1
    FT = generate(G, S, 2, F.morphisms())
    assert digest(centralizer_system(FT, V4)) == digest(CV)


def test_group_subsystems_pool(s4_setup):
    G, S, F, V4, A4, Z = s4_setup
    pool = group_subsystems(F)
    assert len(pool) == 7
    for H, E in pool:
        assert is_subsystem(E, F)


def test_center_of_matches_fixed_elements(s4_setup, cat):
    G, S, F, V4, A4, Z = s4_setup
    assert center_of(F) == 1
    D = cat("d8")
    FD = fusion_of_group(D, D.full_mask, 2)
    assert center_of(FD) == D.center_mask()


# ------------------------------------------------------------ lemma suite

@pytest.mark.parametrize("gid", ["s4", "a4", "d8", "q8", "sl23"])
def test_lemma_suite_fusion(cat, gid):
    G = cat(gid)
    for check_id, ok, witness in lemma_suite_fusion_core(G, 2):
        assert ok, f"{check_id}: {witness}"
