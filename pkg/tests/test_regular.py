import pytest

from locality_lab.fusion import (
    fusion_of_group, fusion_of_subgroup, is_normal_subsystem, same_system,
)
from locality_lab.groups import (
    CapExceeded, FiniteGroup, indices_of, mask_of, popcount,
)
from locality_lab.partial import (
    Locality, enumerate_partial_subnormals, locality_from_group,
)
from locality_lab.regular import (
    E_of, O_p_of_locality, big_G, bootstrap_regular, centralizer_subsystem,
    components, conjugate_family, delta_set, fusion_of, is_linking_locality,
    is_regular_locality, layer_fusion, make_context, normalizer_subsystem,
    regular_normalizer, subcentric_set, tilde_T, verify_action,
    verify_bijection, verify_centralizer_theorems, verify_conjugation,
    verify_main_theorem_A, verify_normalizer_theorems,
)


def _elt(G, name):
    for g in range(G.n):
        if G.element_name(g) == name:
            return g
    raise AssertionError(f"no element named {name}")


def _gen_members(loc, *elts):
    """Members of the locality lying in the subgroup the elements generate."""
    G = loc.G
    sub = G.subgroup_closure(mask_of(list(elts)) | 1)
    idx = loc.lpos[indices_of(sub, G.n)]
    return mask_of(idx[idx >= 0])


def _fails(rep):
    return [(cid, wit) for cid, ok, wit in rep if not ok]


@pytest.fixture(scope="module")
def s4reg(cat):
    G = cat("s4")
    return G, bootstrap_regular(G, 2, name="s4")


@pytest.fixture(scope="module")
def s4ctx(s4reg):
    G, bs = s4reg
    g = _elt(G, "(1 2)(3 4)")
    assert (bs.loc.S_mask >> g) & 1
    return make_context(bs.loc, _gen_members(bs.loc, g))


@pytest.fixture(scope="module")
def s4ctx_fn(s4reg):
    G, bs = s4reg
    g = _elt(G, "(1 3)(2 4)")
    return make_context(bs.loc, _gen_members(bs.loc, g))


@pytest.fixture(scope="module")
def pslreg(cat):
    G = cat("psl27")
    return G, bootstrap_regular(G, 2, name="psl27")


@pytest.fixture(scope="module")
def pslctx(pslreg):
    _, bs = pslreg
    return make_context(bs.loc, (1 << bs.loc.m) - 1)


def test_bootstrap_s4_total_and_regular(s4reg):
    G, bs = s4reg
    assert bs.regular
    assert bs.loc.m == G.n
    assert len(bs.loc.delta_ambient) == 10
    # constrained host: delta(F) is the whole subcentric collection
    assert bs.loc is bs.provisional


def test_bootstrap_small_catalog(cat):
    for gid, p in [("c2", 2), ("c4", 2), ("v4", 2), ("d8", 2), ("q8", 2),
                   ("a4", 2), ("sl23", 2), ("a4xc2", 2), ("s3", 3)]:
        bs = bootstrap_regular(cat(gid), p, name=gid)
        assert bs.regular, gid


def test_bootstrap_dic3_is_not_regular(cat):
    # the 2'-core acts without being seen by S, so the total locality is
    # not even linking and the correspondence collapses two subnormals
    bs = bootstrap_regular(cat("dic3"), 2, name="dic3")
    assert not bs.regular
    assert not is_linking_locality(bs.loc)
    bad = _fails(verify_bijection(bs.loc))
    assert [cid for cid, _ in bad] == ["bijection/injective"]


def test_a5_object_locality_is_linking_not_regular():
    G = FiniteGroup.from_generators([(1, 2, 0, 3, 4), (1, 2, 3, 4, 0)], 5,
                                    name="a5")
    S = G.sylow_mask(2)
    delta = [P for P in G.all_subgroups_in(S, cap=64) if popcount(P) > 1]
    loc = locality_from_group(G, S, delta, 2, name="a5-v4")
    assert is_linking_locality(loc)
    # the trivial subgroup is subcentric here, so delta(F) is strictly larger
    assert not is_regular_locality(loc)


def test_s4_single_object_locality_is_not_regular(cat):
    G = cat("s4")
    S = G.sylow_mask(2)
    loc = Locality(G, S, frozenset({S}), 2, name="s4-d8-only")
    assert loc.m == popcount(S)
    assert is_linking_locality(loc)
    assert not is_regular_locality(loc)


def test_subcentric_and_delta_s4(s4reg):
    G, bs = s4reg
    fs = subcentric_set(bs.F)
    assert len(fs) == 10
    assert delta_set(bs.F, layer_fusion(bs.loc)) == fs


def test_delta_drops_trivial_subgroup_on_psl(pslreg):
    G, bs = pslreg
    assert bs.regular
    assert bs.loc.m == 104
    assert len(bs.loc.delta_ambient) == 9
    assert 1 not in bs.loc.delta_ambient


def test_components_and_layer(s4reg, pslreg, cat):
    _, bs = s4reg
    assert components(bs.loc) == []
    assert E_of(bs.loc) == 1
    assert layer_fusion(bs.loc) is None
    G, bp = pslreg
    whole = (1 << bp.loc.m) - 1
    assert components(bp.loc) == [whole]
    assert E_of(bp.loc) == whole
    lay = layer_fusion(bp.loc)
    assert lay is not None and lay.over_mask == bp.loc.S_mask


def test_tilde_t_and_total_group_psl(pslreg):
    G, bs = pslreg
    assert tilde_T(bs.loc) == bs.loc.S_mask
    gs = big_G(bs.loc)
    assert bs.loc.ambient_of_local(gs) == bs.loc.S_mask
    assert popcount(bs.loc.ambient_of_local(gs)) == 8


def test_o_p_of_locality(s4reg, cat):
    G, bs = s4reg
    assert O_p_of_locality(bs.loc) == G.O_p_in(G.full_mask, 2)
    assert popcount(O_p_of_locality(bs.loc)) == 4
    bq = bootstrap_regular(cat("sl23"), 2, name="sl23")
    assert O_p_of_locality(bq.loc) == bq.loc.S_mask


def test_verify_action_all_green(s4reg, pslreg):
    for _, bs in (s4reg, pslreg):
        rep = verify_action(bs.loc)
        assert not _fails(rep), _fails(rep)
    ids = [cid for cid, _, _ in verify_action(s4reg[1].loc)]
    assert "action/composition-law" in ids
    assert "action/fusion-matches-ambient-group" in ids


def test_context_oracle_not_fully_normalized(s4ctx):
    G = s4ctx.loc.G
    assert popcount(s4ctx.T) == 2
    assert popcount(s4ctx.NSH) == 4
    assert popcount(s4ctx.CSH) == 4
    assert popcount(s4ctx.NGH_amb) == 8
    assert popcount(s4ctx.S0) == 8
    assert len(s4ctx.chain) == 3
    assert s4ctx.E.over_mask == s4ctx.T
    assert s4ctx.EF is None and s4ctx.tildeT == 1


def test_context_oracle_fully_normalized(s4ctx_fn):
    # the central involution of S: its normalizer and centralizer in S are
    # all of S
    assert popcount(s4ctx_fn.NSH) == 8
    assert popcount(s4ctx_fn.CSH) == 8
    assert s4ctx_fn.NSH == s4ctx_fn.loc.S_mask


def test_family_has_three_members(s4ctx):
    fam = conjugate_family(s4ctx)
    assert len(fam) == 3
    assert sorted(popcount(c.NSH) for c in fam) == [4, 4, 8]
    assert len({c.T for c in fam}) == 3


def test_regular_normalizer_constrained_case(s4ctx):
    loc, G = s4ctx.loc, s4ctx.loc.G
    bn = regular_normalizer(s4ctx)
    # trivial layer: bN is exactly N_G(H)
    assert bn == s4ctx.NGH
    assert popcount(loc.ambient_of_local(bn)) == 8
    nfe = normalizer_subsystem(s4ctx)
    assert same_system(nfe, fusion_of_subgroup(G, s4ctx.NSH,
                                               s4ctx.NGH_amb, 2))


def test_centralizer_subsystem_group_route(s4ctx):
    G = s4ctx.loc.G
    cfe = centralizer_subsystem(s4ctx)
    camb = G.centralizer_mask(s4ctx.T)
    assert same_system(cfe, fusion_of_subgroup(G, s4ctx.CSH, camb, 2))


def test_theorem_a_s4(s4ctx):
    rep = verify_main_theorem_A(s4ctx)
    assert not _fails(rep), _fails(rep)
    assert len(rep) == 18


def test_theorem_a_fully_normalized(s4ctx_fn):
    assert not _fails(verify_main_theorem_A(s4ctx_fn))


def test_theorem_a_psl_whole(pslctx):
    rep = verify_main_theorem_A(pslctx)
    assert not _fails(rep), _fails(rep)


def test_conjugation_suites(s4ctx, s4ctx_fn, pslctx):
    for ctx in (s4ctx, s4ctx_fn, pslctx):
        rep = verify_conjugation(ctx)
        assert not _fails(rep), _fails(rep)


def test_normalizer_suite_s4(s4ctx):
    rep = verify_normalizer_theorems(s4ctx)
    assert not _fails(rep), _fails(rep)
    ids = [cid for cid, _, _ in rep]
    # not fully normalized: the saturation branch must stay out
    assert "normalizer/saturated-when-fully-normalized" not in ids
    assert "normalizer/constrained-model" in ids


def test_normalizer_suite_fully_normalized(s4ctx_fn):
    rep = verify_normalizer_theorems(s4ctx_fn)
    assert not _fails(rep), _fails(rep)
    ids = [cid for cid, _, _ in rep]
    assert "normalizer/saturated-when-fully-normalized" in ids
    assert "normalizer/e-normal-when-fully-normalized" in ids
    assert "normalizer/regular-over-n-s-e-with-host-layer" in ids


def test_normalizer_suite_psl_whole(pslctx):
    rep = verify_normalizer_theorems(pslctx)
    assert not _fails(rep), _fails(rep)
    nfe = normalizer_subsystem(pslctx)
    assert same_system(nfe, fusion_of(pslctx.loc))


def test_centralizer_suite_s4(s4ctx):
    rep = verify_centralizer_theorems(s4ctx)
    assert not _fails(rep), _fails(rep)
    ids = [cid for cid, _, _ in rep]
    # not fully centralized: the move map must be exercised
    assert "centralizer/move-to-fully-centralized" in ids
    assert "centralizer/saturated-when-fully-centralized" not in ids


def test_centralizer_suite_fully_normalized(s4ctx_fn):
    rep = verify_centralizer_theorems(s4ctx_fn)
    assert not _fails(rep), _fails(rep)
    ids = [cid for cid, _, _ in rep]
    assert "centralizer/fully-normalized-gives-fully-centralized" in ids
    assert "centralizer/o-p-generation-formula" in ids


def test_centralizer_suite_psl_whole(pslctx):
    rep = verify_centralizer_theorems(pslctx)
    assert not _fails(rep), _fails(rep)
    assert popcount(pslctx.CSH) == 1
    cfe = centralizer_subsystem(pslctx)
    assert cfe.over_mask == 1


def test_psl_trivial_subnormal(pslreg):
    _, bs = pslreg
    ctx = make_context(bs.loc, 1)
    assert ctx.CSH == bs.loc.S_mask
    assert same_system(centralizer_subsystem(ctx), fusion_of(bs.loc))
    assert not _fails(verify_normalizer_theorems(ctx))
    assert not _fails(verify_centralizer_theorems(ctx))


def test_bijection_s4(s4reg):
    _, bs = s4reg
    rep = verify_bijection(bs.loc)
    assert not _fails(rep), _fails(rep)
    assert len(enumerate_partial_subnormals(bs.loc)) == 7


def test_bijection_psl(pslreg):
    _, bs = pslreg
    rep = verify_bijection(bs.loc)
    assert not _fails(rep), _fails(rep)
    assert len(enumerate_partial_subnormals(bs.loc)) == 2
    ids = [cid for cid, _, _ in rep]
    # the member set is a proper subset of the group, so the group route
    # does not apply
    assert "bijection/surjective-onto-group-route" not in ids


def test_images_of_normals_are_normal(s4reg):
    G, bs = s4reg
    F = fusion_of(bs.loc)
    for H in (G.O_p_in(G.full_mask, 2),):
        ctx = make_context(bs.loc, _gen_members(bs.loc,
                                                *indices_of(H, G.n)))
        assert is_normal_subsystem(F, ctx.E)
        assert regular_normalizer(ctx) == (1 << bs.loc.m) - 1


def test_cap_threading_raises(pslreg):
    _, bs = pslreg
    with pytest.raises(CapExceeded):
        make_context(bs.loc, 1, cap=8)


def test_fusion_of_matches_group_fusion(s4reg):
    G, bs = s4reg
    assert same_system(fusion_of(bs.loc), fusion_of_group(G, bs.loc.S_mask, 2))
