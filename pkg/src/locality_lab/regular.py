"""Regular localities and the normalizers and centralizers they induce.

The objects here sit on top of the partial-group layer: the object set
delta(F) of a saturated fusion system, the linking/regular classification of
a locality, its components and layer E(L), the total subgroup G = N_L(tildeT)
acting on L by conjugation, the regular normalizer bN = E(L) N_G(H) of a
partial subnormal H, and the induced systems N_F(E) = F_{N_S(H)}(bN) and
C_F(E) = F_{C_S(H)}(C_L(H)).  Each verify_* function checks one theorem
package on one instance and returns a report of (check id, pass, witness)
lines; construction failures surface as failed lines, not as crashes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fusion import (
    Frame, FusionSystem, InjHom, O_p_of, center_of, centralizer_system,
    conjugate_system, digest, focal_mask, fusion_of_group, fusion_of_subgroup,
    generate, hyperfocal_mask, is_constrained, is_invariant,
    is_normal_subsystem, is_subsystem, is_weakly_invariant, n_s_of,
    normalizer_system, p_power_index_subsystem, same_system,
    saturation_report, subgroup_classes, _aut_rows_of, _preserves,
    _row_pairs_bytes,
)
from .groups import (
    CapExceeded, FiniteGroup, indices_of, mask_of, p_part, popcount,
)
from .partial import (
    C_L, Locality, N_L, Report, check_locality, enumerate_partial_normals,
    enumerate_partial_subnormals, fusion_of_partial_subgroup,
    is_partial_normal, is_partial_subgroup, is_partial_subnormal, is_subgroup,
    product_sets,
)
from .products import TheoremViolation, commutes, n_f_t_e, product_ER


def _entry(out: Report, check_id: str, fn) -> bool:
    """Run one check; exceptions from failed constructions become failed
    lines so a broken premise never aborts the rest of a suite."""
    try:
        got = fn()
        ok, wit = got if isinstance(got, tuple) else (got, "")
    except (AssertionError, ValueError, KeyError, CapExceeded) as e:
        ok, wit = False, str(e) or e.__class__.__name__
    out.append((check_id, bool(ok), wit))
    return bool(ok)


# ---------------------------------------------------------------------------
# fusion and internal structure of a locality

def fusion_of(loc: Locality) -> FusionSystem:
    """F_S(L), generated by the member conjugation maps; memoized."""
    got = getattr(loc, "_fusion_memo", None)
    if got is None:
        got = fusion_of_partial_subgroup(loc, (1 << loc.m) - 1,
                                         name=f"F_S({loc.name or 'L'})")
        loc._fusion_memo = got
    return got


def subcentric_set(F: FusionSystem) -> frozenset[int]:
    """F^s as ambient masks: the classes whose fully normalized
    representative has a constrained normalizer system."""
    return frozenset(subgroup_classes(F)["subcentric"])


def O_p_of_locality(loc: Locality, cap: int = 2000) -> int:
    """The largest partial normal p-subgroup, as an ambient subgroup mask."""
    G = loc.G
    normals = enumerate_partial_normals(loc, cap=cap)
    best = 1
    for N in normals:
        if N & ~loc.s_lmask:
            continue
        amb = loc.ambient_of_local(N)
        assert G.is_subgroup_mask(amb)
        if popcount(amb) > popcount(best):
            best = amb
    for N in normals:
        if not (N & ~loc.s_lmask):
            assert not (loc.ambient_of_local(N) & ~best), \
                "normal p-subgroups have no unique maximum"
    return best


def components(loc: Locality, cap: int = 2000) -> list[int]:
    """The quasisimple partial subnormals (local member masks, sorted):
    K with exactly two partial normals over its center and with no proper
    partial normal N satisfying N (K cap S) = K."""
    got = getattr(loc, "_comps_memo", None)
    if got is not None:
        return got
    out = []
    for K in sorted(enumerate_partial_subnormals(loc, cap=cap)):
        if K == 1:
            continue
        zk = C_L(loc, K) & K
        inner = enumerate_partial_normals(loc, within=K, cap=cap)
        if sum(1 for N in inner if not (zk & ~N)) != 2:
            continue
        ks = K & loc.s_lmask
        if any(N != K and product_sets(loc, N, ks) == K for N in inner):
            continue
        out.append(K)
    loc._comps_memo = out
    return out


def E_of(loc: Locality, cap: int = 2000) -> int:
    """E(L): the set product of the components (local member mask)."""
    comps = components(loc, cap=cap)
    out = 1
    for K in comps:
        out = product_sets(loc, out, K)
    rev = 1
    for K in reversed(comps):
        rev = product_sets(loc, rev, K)
    assert out == rev, "component product depends on the order"
    return out


def F_star_of(loc: Locality, cap: int = 2000) -> int:
    """F*(L) = E(L) O_p(L) (local member mask)."""
    op = O_p_of_locality(loc, cap=cap)
    return product_sets(loc, E_of(loc, cap=cap), loc.local_of_ambient(op))


def layer_fusion(loc: Locality, cap: int = 2000) -> FusionSystem | None:
    """The fusion system of E(L) over tildeT = E(L) cap S; None when the
    layer is trivial."""
    EL = E_of(loc, cap=cap)
    if EL == 1:
        return None
    got = getattr(loc, "_layer_memo", None)
    if got is None:
        got = fusion_of_partial_subgroup(loc, EL, name="E(F)")
        loc._layer_memo = got
    return got


def tilde_T(loc: Locality, cap: int = 2000) -> int:
    """tildeT = E(L) cap S as an ambient subgroup mask."""
    return loc.ambient_of_local(E_of(loc, cap=cap) & loc.s_lmask)


def big_G(loc: Locality, cap: int = 2000) -> int:
    """G = N_L(tildeT), the total subgroup acting on L (local mask)."""
    return N_L(loc, E_of(loc, cap=cap) & loc.s_lmask)


def global_conj(loc: Locality, g: int) -> np.ndarray:
    """The automorphism c_g of L for a member g acting on all of L."""
    assert loc.conj_dom_mask(g) == (1 << loc.m) - 1, \
        "conjugation is not defined on all of L"
    return loc.conj_images(g).copy()


# ---------------------------------------------------------------------------
# delta(F) and the linking / regular classification

def delta_set(F: FusionSystem, layer: FusionSystem | None) -> frozenset[int]:
    """delta(F) as ambient masks.  With a trivial layer this is F^s; else it
    is the set of P <= S with (P O_p(F)) cap tildeT subcentric in the layer.
    Violations of the bounding and trace constraints raise TheoremViolation:
    they disqualify the instance rather than mis-shape the object set."""
    G = F.G
    cls = subgroup_classes(F)
    fs = frozenset(cls["subcentric"])
    op = cls["O_p"]
    if layer is None:
        tilde = 1
        delta = fs
    else:
        tilde = layer.over_mask
        es = subcentric_set(layer)
        delta = frozenset(P for P in F.subgroups()
                          if (G.product_mask(P, op) & tilde) in es)
    fcr = frozenset(cls["radical_centric"])
    if not fcr <= delta:
        bad = min(fcr - delta)
        raise TheoremViolation(
            f"delta misses the centric radical subgroup {G.mask_name(bad)}")
    if not delta <= fs:
        bad = min(delta - fs)
        raise TheoremViolation(
            f"delta contains the non-subcentric subgroup {G.mask_name(bad)}")
    tstar = G.product_mask(tilde, op)
    for P in F.subgroups():
        if (P in delta) != ((P & tstar) in delta):
            raise TheoremViolation(
                f"delta is not determined by the T* trace at {G.mask_name(P)}")
    return delta


def is_linking_locality(loc: Locality, F: FusionSystem | None = None,
                        cap: int = 2000) -> bool:
    """F_S(L) saturated, F^cr <= Delta <= F^s, and every object normalizer
    N_L(P) a group of characteristic p."""
    if F is None:
        F = fusion_of(loc)
    cls = subgroup_classes(F)
    delta = frozenset(loc.delta_ambient)
    if not frozenset(cls["radical_centric"]) <= delta:
        return False
    if not delta <= frozenset(cls["subcentric"]):
        return False
    if not saturation_report(F)["is_saturated"]:
        return False
    G = loc.G
    for P in sorted(delta):
        amb = loc.ambient_of_local(N_L(loc, loc.local_of_ambient(P)))
        if not G.is_subgroup_mask(amb):
            return False
        if not G.is_characteristic_p_in(amb, loc.p):
            return False
    return True


def is_regular_locality(loc: Locality, F: FusionSystem | None = None,
                        cap: int = 2000) -> bool:
    """Linking with Delta equal to delta(F_S(L))."""
    if F is None:
        F = fusion_of(loc)
    if not is_linking_locality(loc, F, cap=cap):
        return False
    try:
        want = delta_set(F, layer_fusion(loc, cap=cap))
    except TheoremViolation:
        return False
    return frozenset(loc.delta_ambient) == want


# ---------------------------------------------------------------------------
# the action of the total subgroup

def verify_action(loc: Locality, cap: int = 2000,
                  with_fusion: bool = True) -> Report:
    """G = N_L(tildeT) is a total subgroup whose members act on all of L by
    automorphisms, composing along the partial product."""
    out: Report = []
    G = loc.G
    whole = (1 << loc.m) - 1
    EL = E_of(loc, cap=cap)
    tT = loc.ambient_of_local(EL & loc.s_lmask)
    _entry(out, "action/tilde-t-in-delta",
           lambda: (tT in loc.delta_ambient, G.mask_name(tT)))
    gs = N_L(loc, EL & loc.s_lmask)
    _entry(out, "action/total-subgroup",
           lambda: (is_subgroup(loc, gs) and not (loc.s_lmask & ~gs),
                    f"order {popcount(gs)}"))
    if EL == 1:
        _entry(out, "action/trivial-layer-total", lambda: (gs == whole, ""))

    def _dom():
        for g in indices_of(gs, loc.m):
            if loc.conj_dom_mask(int(g)) != whole:
                return False, f"member {int(g)} is not defined everywhere"
        return True, ""
    okdom = _entry(out, "action/defined-on-all-of-l", _dom)
    if okdom:
        def _auto():
            defined = loc.PROD >= 0
            for g in indices_of(gs, loc.m):
                img = loc.conj_images(int(g)).astype(np.int64)
                PI = loc.PROD[np.ix_(img, img)]
                if ((PI >= 0) != defined).any():
                    return False, f"member {int(g)} moves the pair domain"
                if (PI[defined] != img[loc.PROD[defined]]).any():
                    return False, f"member {int(g)} is not multiplicative"
                if (img[loc.INV] != loc.INV[img]).any():
                    return False, f"member {int(g)} breaks inversion"
            return True, ""
        _entry(out, "action/members-act-by-automorphisms", _auto)

        def _law():
            idx = indices_of(gs, loc.m).astype(np.int64)
            pos = {int(g): i for i, g in enumerate(idx)}
            IMG = np.stack([loc.conj_images(int(g))
                            for g in idx]).astype(np.int64)
            for i, f in enumerate(idx):
                for j, g in enumerate(idx):
                    fg = int(loc.PROD[int(f), int(g)])
                    if (IMG[j][IMG[i]] != IMG[pos[fg]]).any():
                        return False, f"members ({int(f)}, {int(g)})"
            return True, f"{idx.size} members compose"
        _entry(out, "action/composition-law", _law)
    if with_fusion and popcount(loc.S_mask) == p_part(G.n, loc.p):
        _entry(out, "action/fusion-matches-ambient-group",
               lambda: (same_system(fusion_of(loc),
                                    fusion_of_group(G, loc.S_mask, loc.p)),
                        ""))
    return out


# ---------------------------------------------------------------------------
# the working context for one partial subnormal

@dataclass
class RegularContext:
    """A partial subnormal H of a regular locality with the data every
    suite needs; masks are local (member positions) or ambient (group
    elements) as annotated."""
    loc: Locality
    H: int                       # local member mask
    chain: list[int]             # subnormal chain from L down to H (local)
    H_amb: int                   # ambient member-set mask of H
    T: int                       # H cap S (ambient subgroup)
    E: FusionSystem              # F_T(H)
    comps: list[int]             # components of L (local)
    comps_H: list[int]           # the components lying inside H
    E_L: int                     # layer of L (local)
    EH: int                      # E(H): product of the components in H
    M: int                       # product of the components outside H
    EF: FusionSystem | None      # fusion of the layer; None when trivial
    tildeT: int                  # E(L) cap S (ambient)
    T0: int                      # E(H) cap S (ambient)
    T0perp: int                  # M cap S (ambient)
    Gstar: int                   # N_L(tildeT) (local)
    Gstar_amb: int               # its ambient subgroup mask
    NGH: int                     # N_G(H): stabilizer of H in Gstar (local)
    NGH_amb: int
    S0: int                      # least Sylow p-subgroup of N_G(H) over T
    NLH: int                     # N_L(H) (local)
    CLH: int                     # C_L(H) (local)
    NSH: int                     # N_S(H) (ambient)
    CSH: int                     # C_S(H) (ambient)
    cap: int
    _cache: dict = field(default_factory=dict, repr=False)


def make_context(loc: Locality, H: int, cap: int = 2000) -> RegularContext:
    """Certify H partial subnormal and assemble the derived data."""
    G, p = loc.G, loc.p
    ok, chain = is_partial_subnormal(loc, H, cap=cap)
    assert ok, "H is not partial subnormal"
    H_amb = loc.ambient_of_local(H)
    T = loc.ambient_of_local(H & loc.s_lmask)
    E = fusion_of_partial_subgroup(loc, H, name="F_T(H)")
    assert E.over_mask == T
    comps = components(loc, cap=cap)
    E_L = E_of(loc, cap=cap)
    tT = loc.ambient_of_local(E_L & loc.s_lmask)
    assert tT in loc.delta_ambient, "tildeT left the object set"
    comps_H = [K for K in comps if not (K & ~H)]
    EH = 1
    for K in comps_H:
        EH = product_sets(loc, EH, K)
    M = 1
    for K in comps:
        if K not in comps_H:
            M = product_sets(loc, M, K)
    assert product_sets(loc, EH, M) == E_L, "components do not split over H"
    T0 = loc.ambient_of_local(EH & loc.s_lmask)
    T0perp = loc.ambient_of_local(M & loc.s_lmask)
    assert G.product_mask(T0, T0perp) == tT
    EF = layer_fusion(loc, cap=cap)
    Gstar = N_L(loc, E_L & loc.s_lmask)
    Gstar_amb = loc.ambient_of_local(Gstar)
    assert is_subgroup(loc, Gstar), "N_L(tildeT) is not a total subgroup"
    assert G.is_subgroup_mask(Gstar_amb)
    assert not (loc.S_mask & ~Gstar_amb), "S must normalize tildeT"
    hidx = indices_of(H, loc.m)
    NGH = 0
    for g in indices_of(Gstar, loc.m):
        g = int(g)
        img = loc.conj_images(g)
        assert (img >= 0).all(), "the total subgroup must act on all of L"
        if mask_of(img[hidx]) == H:
            NGH |= 1 << g
    NGH_amb = loc.ambient_of_local(NGH)
    assert G.is_subgroup_mask(NGH_amb)
    syl = [Sm for Sm in G.sylow_conjugates(p, within=NGH_amb)
           if not (T & ~Sm)]
    assert syl, "no Sylow subgroup of N_G(H) contains T"
    S0 = min(syl)
    NLH = N_L(loc, H)
    CLH = C_L(loc, H)
    NSH = loc.ambient_of_local(NLH & loc.s_lmask)
    CSH = loc.ambient_of_local(CLH & loc.s_lmask)
    return RegularContext(loc=loc, H=H, chain=chain, H_amb=H_amb, T=T, E=E,
                          comps=comps, comps_H=comps_H, E_L=E_L, EH=EH, M=M,
                          EF=EF, tildeT=tT, T0=T0, T0perp=T0perp,
                          Gstar=Gstar, Gstar_amb=Gstar_amb, NGH=NGH,
                          NGH_amb=NGH_amb, S0=S0, NLH=NLH, CLH=CLH,
                          NSH=NSH, CSH=CSH, cap=cap)


def regular_normalizer(ctx: RegularContext) -> int:
    """bN = E(L) N_G(H) as a local member mask, certified a partial
    subgroup; it is all of L exactly when H is partial normal."""
    got = ctx._cache.get("bn")
    if got is None:
        loc = ctx.loc
        got = product_sets(loc, ctx.E_L, ctx.NGH)
        assert is_partial_subgroup(loc, got), \
            "E(L) N_G(H) is not a partial subgroup"
        if is_partial_normal(loc, ctx.H):
            assert got == (1 << loc.m) - 1, \
                "the normalizer of a partial normal subgroup must be L"
        ctx._cache["bn"] = got
    return got


def normalizer_subsystem(ctx: RegularContext) -> FusionSystem:
    """N_F(E) := F_{N_S(H)}(bN)."""
    got = ctx._cache.get("nfe")
    if got is None:
        got = fusion_of_partial_subgroup(ctx.loc, regular_normalizer(ctx),
                                         name="N_F(E)")
        assert got.over_mask == ctx.NSH, "N_F(E) must sit over N_S(H)"
        ctx._cache["nfe"] = got
    return got


def centralizer_subsystem(ctx: RegularContext) -> FusionSystem:
    """C_F(E) := F_{C_S(H)}(C_L(H))."""
    got = ctx._cache.get("cfe")
    if got is None:
        got = fusion_of_partial_subgroup(ctx.loc, ctx.CLH, name="C_F(E)")
        assert got.over_mask == ctx.CSH, "C_F(E) must sit over C_S(H)"
        ctx._cache["cfe"] = got
    return got


def centralizer_in_S(ctx: RegularContext,
                     F: FusionSystem | None = None) -> int:
    """C_S(E) = C_S(H), certified the unique maximum of
    {R <= S : E <= C_F(R)} by exhausting the subgroups of S."""
    if F is None:
        F = fusion_of(ctx.loc)
    G = ctx.loc.G

    def member(R: int) -> bool:
        return is_subsystem(ctx.E, centralizer_system(F, R))

    assert member(ctx.CSH), "E does not centralize C_S(H)"
    for R in G.all_subgroups_in(ctx.loc.S_mask, cap=4096):
        assert (not member(R)) or not (R & ~ctx.CSH), \
            "a subgroup centralizing E escapes C_S(H)"
    return ctx.CSH


# ---------------------------------------------------------------------------
# conjugation of contexts

def conjugate_transport(ctx: RegularContext, g: int) -> RegularContext:
    """The context at H^g for a member g of N_L(tildeT) with T^g <= S; the
    transported normalizer, Sylow and fusion data are cross-checked."""
    loc, G = ctx.loc, ctx.loc.G
    assert (ctx.Gstar >> g) & 1, "g must normalize tildeT"
    amb_g = int(loc.elems[g])
    Tg = G.conj_mask(ctx.T, amb_g)
    if Tg & ~loc.S_mask:
        raise ValueError("T^g does not lie in S")
    Hg = mask_of(loc.conj_images(g)[indices_of(ctx.H, loc.m)])
    got = make_context(loc, Hg, cap=ctx.cap)
    assert got.T == Tg
    assert G.conj_mask(ctx.NGH_amb, amb_g) == got.NGH_amb, \
        "conjugation does not carry N_G(H) to N_G(H^g)"
    sylg = G.conj_mask(ctx.S0, amb_g)
    assert popcount(sylg) == popcount(got.S0) and not (sylg & ~got.NGH_amb), \
        "conjugation does not carry Sylow subgroups to Sylow subgroups"
    phi = InjHom.from_mapping(Frame(G, loc.S_mask),
                              {int(x): G.conj(int(x), amb_g)
                               for x in indices_of(ctx.T, G.n)})
    assert same_system(conjugate_system(ctx.E, phi), got.E), \
        "the transported fusion system differs"
    return got


def conjugate_family(ctx: RegularContext) -> list[RegularContext]:
    """One context per member of E^F: the transports of H along the total
    subgroup with T^g <= S, the base point included."""
    got = ctx._cache.get("family")
    if got is None:
        loc, G = ctx.loc, ctx.loc.G
        seen: dict[int, RegularContext] = {ctx.H: ctx}
        hidx = indices_of(ctx.H, loc.m)
        for g in indices_of(ctx.Gstar, loc.m):
            g = int(g)
            if G.conj_mask(ctx.T, int(loc.elems[g])) & ~loc.S_mask:
                continue
            Hg = mask_of(loc.conj_images(g)[hidx])
            if Hg not in seen:
                seen[Hg] = conjugate_transport(ctx, g)
        got = [seen[k] for k in sorted(seen)]
        ctx._cache["family"] = got
    return got


def _fully_normalized(ctx: RegularContext) -> bool:
    fam = conjugate_family(ctx)
    return popcount(ctx.NSH) == max(popcount(c.NSH) for c in fam)


def _fully_centralized(ctx: RegularContext) -> bool:
    fam = conjugate_family(ctx)
    return popcount(ctx.CSH) == max(popcount(c.CSH) for c in fam)


def _fully_automized(ctx: RegularContext, F: FusionSystem) -> bool:
    """Aut_S(T) cap Aut(E) is a Sylow p-subgroup of Aut_F(T) cap Aut(E)."""
    G, p = ctx.loc.G, ctx.loc.p
    full = 0
    for r in _aut_rows_of(F, ctx.T):
        d = np.nonzero(r >= 0)[0]
        phi = InjHom.from_mapping(ctx.E.frame,
                                  {int(a): int(b)
                                   for a, b in zip(F.frame.idx[d],
                                                   F.frame.idx[r[d]])})
        if _preserves(ctx.E, phi):
            full += 1
    tidx = indices_of(ctx.T, G.n)
    s_rows = set()
    for s in indices_of(G.normalizer_mask(ctx.T, within=ctx.loc.S_mask), G.n):
        s = int(s)
        phi = InjHom.from_mapping(ctx.E.frame,
                                  {int(x): G.conj(int(x), s) for x in tidx})
        if _preserves(ctx.E, phi):
            s_rows.add(phi.pairs())
    return len(s_rows) == p_part(full, p)


# ---------------------------------------------------------------------------
# the candidate pool shared by the maximality checks

def _saturated_pool(ctx: RegularContext, F: FusionSystem) -> list[FusionSystem]:
    """Saturated candidate systems inside F: the fusion systems of the
    partial subnormals, and on small instances the products E R for
    R <= N_S(E) and the inner systems F_R(R) for R <= S."""
    got = ctx._cache.get("pool")
    if got is None:
        loc, G, p = ctx.loc, ctx.loc.G, ctx.loc.p
        seen: set[bytes] = set()
        got = []

        def _add(D: FusionSystem) -> None:
            dg = digest(D)
            if dg not in seen:
                seen.add(dg)
                if saturation_report(D)["is_saturated"]:
                    got.append(D)

        whole = (1 << loc.m) - 1
        for Hm in sorted(enumerate_partial_subnormals(loc, cap=ctx.cap)):
            _add(F if Hm == whole else fusion_of_partial_subgroup(loc, Hm))
        if popcount(loc.S_mask) <= 32:
            for R in G.all_subgroups_in(ctx.NSH, cap=4096):
                try:
                    _add(product_ER(F, ctx.E, R))
                except (ValueError, TheoremViolation):
                    pass
            for R in G.all_subgroups_in(loc.S_mask, cap=4096):
                _add(fusion_of_subgroup(G, R, R, p))
        ctx._cache["pool"] = got
    return ctx._cache["pool"]


# ---------------------------------------------------------------------------
# theorem packages

def verify_main_theorem_A(ctx: RegularContext) -> Report:
    """The regular normalizer bN = E(L) N_G(H): a linking locality over S_0
    with objects Delta_0, its fusion F_0 saturated and regular over
    delta(F_0), H and E = F_T(H) normal inside, components preserved, and
    the centralizer bounds C_L(T) <= bN, C_L(H) = C_bN(H) normal in bN."""
    loc, G, p = ctx.loc, ctx.loc.G, ctx.loc.p
    out: Report = []
    bn = regular_normalizer(ctx)
    bn_amb_idx = loc.elems[indices_of(bn, loc.m)]
    es = frozenset({1}) if ctx.EF is None else subcentric_set(ctx.EF)
    delta0 = frozenset(P for P in G.all_subgroups_in(ctx.S0, cap=4096)
                       if (P & ctx.tildeT) in es)
    shared: dict = {}

    def _build():
        shared["bn_loc"] = Locality(G, ctx.S0, delta0, p,
                                    members=bn_amb_idx, name="bN")
        return True, (f"{popcount(bn)} members over a Sylow subgroup "
                      f"of order {popcount(ctx.S0)}")
    _entry(out, "theorem-a/bn-locality-structure", _build)
    bn_loc = shared.get("bn_loc")
    if bn_loc is None:
        return out

    def _f0():
        got = shared.get("F0")
        if got is None:
            got = shared["F0"] = fusion_of(bn_loc)
        return got

    def _delta_f0():
        got = shared.get("delta_f0")
        if got is None:
            op0 = O_p_of_locality(bn_loc, cap=ctx.cap)
            got = shared["delta_f0"] = frozenset(
                P for P in G.all_subgroups_in(ctx.S0, cap=4096)
                if G.product_mask(P, op0) in delta0)
        return got

    def _axioms():
        rep = check_locality(bn_loc, samples=200, deep=bn_loc.m <= 512)
        bad = [cid for cid, okk, _ in rep if not okk]
        return not bad, ", ".join(bad) if bad else f"{len(rep)} axiom checks"
    _entry(out, "theorem-a/bn-locality-axioms", _axioms)
    _entry(out, "theorem-a/f0-saturated",
           lambda: (saturation_report(_f0())["is_saturated"],
                    f"{len(delta0)} objects"))
    _entry(out, "theorem-a/bn-linking-locality",
           lambda: (is_linking_locality(bn_loc, _f0(), cap=ctx.cap), ""))

    def _routes():
        formula = delta_set(_f0(), layer_fusion(bn_loc, cap=ctx.cap))
        thm = _delta_f0()
        return thm == formula, f"{len(thm)} objects via the product rule"
    _entry(out, "theorem-a/delta-f0-two-routes", _routes)

    def _reg():
        bn_reg = Locality(G, ctx.S0, _delta_f0(), p, members=bn_loc.elems,
                          name="bN regular")
        # same members over the same S give the same conjugation data, so
        # the fusion system carries over
        assert (bn_reg.SCONJ == bn_loc.SCONJ).all()
        bn_reg._fusion_memo = _f0()
        return (is_regular_locality(bn_reg, _f0(), cap=ctx.cap),
                f"{len(_delta_f0())} objects")
    _entry(out, "theorem-a/bn-regular-over-delta-f0", _reg)

    def _h_normal():
        return is_partial_normal(bn_loc, bn_loc.local_of_ambient(ctx.H_amb)), ""
    _entry(out, "theorem-a/h-partial-normal-in-bn", _h_normal)
    _entry(out, "theorem-a/t-is-h-cap-s0",
           lambda: ((ctx.H_amb & ctx.S0) == ctx.T, G.mask_name(ctx.T)))
    _entry(out, "theorem-a/e-normal-in-f0",
           lambda: (is_normal_subsystem(_f0(), ctx.E), ""))

    def _comps():
        want = {loc.ambient_of_local(K) for K in ctx.comps}
        have = {bn_loc.ambient_of_local(K)
                for K in components(bn_loc, cap=ctx.cap)}
        return have == want, f"{len(want)} components"
    _entry(out, "theorem-a/components-preserved", _comps)
    _entry(out, "theorem-a/layer-preserved",
           lambda: (bn_loc.ambient_of_local(E_of(bn_loc, cap=ctx.cap))
                    == loc.ambient_of_local(ctx.E_L), ""))
    _entry(out, "theorem-a/tilde-t-from-bn",
           lambda: ((loc.ambient_of_local(ctx.E_L) & ctx.S0) == ctx.tildeT,
                    G.mask_name(ctx.tildeT)))
    _entry(out, "theorem-a/e-of-h-normal-in-bn",
           lambda: (is_partial_normal(
               bn_loc, bn_loc.local_of_ambient(loc.ambient_of_local(ctx.EH))),
               ""))
    _entry(out, "theorem-a/m-normal-in-bn",
           lambda: (is_partial_normal(
               bn_loc, bn_loc.local_of_ambient(loc.ambient_of_local(ctx.M))),
               ""))

    def _nbn():
        tloc0 = bn_loc.local_of_ambient(ctx.tildeT)
        got = bn_loc.ambient_of_local(N_L(bn_loc, tloc0))
        return got == loc.ambient_of_local(ctx.NGH), ""
    _entry(out, "theorem-a/n-bn-tilde-t-is-n-g-h", _nbn)
    _entry(out, "theorem-a/s-cap-bn-is-n-s-h",
           lambda: ((loc.ambient_of_local(bn) & loc.S_mask) == ctx.NSH,
                    G.mask_name(ctx.NSH)))
    _entry(out, "theorem-a/c-l-t-inside-bn",
           lambda: (not (C_L(loc, loc.local_of_ambient(ctx.T)) & ~bn), ""))

    def _clh():
        inner = C_L(bn_loc, bn_loc.local_of_ambient(ctx.H_amb))
        if bn_loc.ambient_of_local(inner) != loc.ambient_of_local(ctx.CLH):
            return False, "C_L(H) and C_bN(H) differ"
        return is_partial_normal(bn_loc, inner), ""
    _entry(out, "theorem-a/c-l-h-normal-in-bn", _clh)
    return out


def verify_normalizer_theorems(ctx: RegularContext,
                               F: FusionSystem | None = None) -> Report:
    """N_F(E) = F_{N_S(H)}(bN): generation from the product system and the
    T-normalizer system, invariance of E, maximality over the candidate
    pool, the values at T, the constrained model, the generation from the
    tildeT model, and the fully-normalized equivalences over the family."""
    loc, G, p = ctx.loc, ctx.loc.G, ctx.loc.p
    out: Report = []
    if F is None:
        F = fusion_of(loc)
    E, NS, T = ctx.E, ctx.NSH, ctx.T
    NFE = normalizer_subsystem(ctx)
    fam = conjugate_family(ctx)
    _entry(out, "normalizer/over-n-s-h",
           lambda: (NFE.over_mask == NS, G.mask_name(NS)))
    _entry(out, "normalizer/n-s-of-e-is-n-s-h",
           lambda: (n_s_of(F, E) == NS, ""))

    def _gen():
        gens = (list(product_ER(F, E, NS).morphisms())
                + list(n_f_t_e(F, E).morphisms()))
        return (same_system(NFE, generate(G, NS, p, gens)),
                f"{len(gens)} generators")
    _entry(out, "normalizer/generated-by-product-and-t-normalizer", _gen)
    _entry(out, "normalizer/e-invariant",
           lambda: (is_invariant(NFE, E), ""))

    def _pool():
        pool = _saturated_pool(ctx, F)
        for D in pool:
            if not (E.over_mask & ~D.over_mask) and is_normal_subsystem(D, E):
                if not is_subsystem(D, NFE):
                    return False, ("a normal oversystem over "
                                   f"{G.mask_name(D.over_mask)} escapes")
        return True, f"{len(pool)} candidates"
    _entry(out, "normalizer/contains-every-normal-oversystem", _pool)
    _entry(out, "normalizer/value-at-t",
           lambda: (same_system(normalizer_system(NFE, T), n_f_t_e(F, E)),
                    ""))
    _entry(out, "normalizer/centralizer-at-t",
           lambda: (same_system(centralizer_system(NFE, T),
                                centralizer_system(F, T)), ""))
    if is_constrained(F):
        _entry(out, "normalizer/constrained-model",
               lambda: (same_system(
                   NFE, fusion_of_subgroup(G, NS, ctx.NGH_amb, p)),
                   f"model of order {popcount(ctx.NGH_amb)}"))

    def _gen_thm():
        NFtT = normalizer_system(F, ctx.tildeT)
        if not is_constrained(NFtT):
            return False, "the tildeT normalizer is not constrained"
        if not same_system(NFtT,
                           fusion_of_subgroup(G, loc.S_mask, ctx.Gstar_amb, p)):
            return False, "N_L(tildeT) is not a model for it"
        Hstar_amb = loc.ambient_of_local(ctx.H & ctx.Gstar)
        oks, _ = G.is_subnormal_in(Hstar_amb, ctx.Gstar_amb)
        if not oks:
            return False, "N_H(tildeT) is not subnormal in the model"
        if G.normalizer_mask(Hstar_amb, within=loc.S_mask) != NS:
            return False, "N_S of the realizer differs from N_S(H)"
        NEt0 = normalizer_system(E, ctx.T0)
        if not same_system(NEt0, fusion_of_subgroup(G, NEt0.over_mask,
                                                    Hstar_amb, p)):
            return False, "the realizer misses the T0 normalizer of E"
        B = fusion_of_subgroup(G, NS, ctx.NGH_amb, p)
        gens = list(B.morphisms())
        if ctx.EF is not None:
            gens += list(product_ER(F, ctx.EF, NS).morphisms())
        return same_system(NFE, generate(G, NS, p, gens)), \
            f"realizer of order {popcount(Hstar_amb)}"
    _entry(out, "normalizer/generated-from-tilde-t-model", _gen_thm)

    if _fully_normalized(ctx):
        _entry(out, "normalizer/saturated-when-fully-normalized",
               lambda: (saturation_report(NFE)["is_saturated"], ""))
        _entry(out, "normalizer/e-normal-when-fully-normalized",
               lambda: (is_normal_subsystem(NFE, E), ""))
        _entry(out, "normalizer/sylow-in-n-g-h",
               lambda: (popcount(NS) == p_part(popcount(ctx.NGH_amb), p),
                        f"|N_S(H)| = {popcount(NS)}"))

        def _over_ns():
            opn = O_p_of(NFE)
            esn = (frozenset({1}) if ctx.EF is None
                   else subcentric_set(ctx.EF))
            dn = frozenset(P for P in G.all_subgroups_in(NS, cap=4096)
                           if (G.product_mask(P, opn) & ctx.tildeT) in esn)
            bl = Locality(G, NS, dn, p,
                          members=loc.elems[indices_of(regular_normalizer(ctx),
                                                       loc.m)],
                          name="bN over N_S(E)")
            # same member set over the same p-subgroup realizes the same
            # fusion system
            bl._fusion_memo = NFE
            shared_l = layer_fusion(bl, cap=ctx.cap)
            okreg = is_regular_locality(bl, NFE, cap=ctx.cap)
            if ctx.EF is None:
                return okreg and shared_l is None, "trivial layer"
            return (okreg and shared_l is not None
                    and same_system(shared_l, ctx.EF),
                    f"{len(dn)} objects")
        _entry(out, "normalizer/regular-over-n-s-e-with-host-layer", _over_ns)

    def _equiv():
        best = max(popcount(c.NSH) for c in fam)
        for c in fam:
            i = popcount(c.NSH) == best
            ii = popcount(c.NSH) == p_part(popcount(c.NGH_amb), p)
            iii = _fully_automized(c, F) and F.is_fully_centralized(c.T)
            if not (i == ii == iii):
                return False, (f"|N_S| = {popcount(c.NSH)} gives "
                               f"({i}, {ii}, {iii})")
        return True, f"family of {len(fam)}"
    _entry(out, "normalizer/fully-normalized-equivalences", _equiv)
    return out


def verify_centralizer_theorems(ctx: RegularContext,
                                F: FusionSystem | None = None) -> Report:
    """C_F(E) = F_{C_S(H)}(C_L(H)): commutes with E and is the largest such
    candidate, C_S(E) maximality by brute force, invariance inside N_F(E),
    the O^p generation formula, the fully-centralized equivalences, and the
    transport of centralizer hom-sets to a fully centralized conjugate."""
    loc, G, p = ctx.loc, ctx.loc.G, ctx.loc.p
    out: Report = []
    if F is None:
        F = fusion_of(loc)
    E, CFE = ctx.E, centralizer_subsystem(ctx)
    fam = conjugate_family(ctx)
    _entry(out, "centralizer/over-c-s-h",
           lambda: (CFE.over_mask == ctx.CSH, G.mask_name(ctx.CSH)))
    _entry(out, "centralizer/commutes-with-e",
           lambda: (commutes(F, E, CFE), ""))

    def _largest():
        for D in _saturated_pool(ctx, F):
            if commutes(F, E, D) and not is_subsystem(D, CFE):
                return False, ("a commuting system over "
                               f"{G.mask_name(D.over_mask)} escapes")
        return True, ""
    _entry(out, "centralizer/largest-commuting", _largest)
    if popcount(loc.S_mask) <= 32:
        _entry(out, "centralizer/c-s-maximal-brute-force",
               lambda: (centralizer_in_S(ctx, F) == ctx.CSH,
                        G.mask_name(ctx.CSH)))
    _entry(out, "centralizer/weakly-invariant-in-normalizer",
           lambda: (is_weakly_invariant(normalizer_subsystem(ctx), CFE), ""))
    isfc = _fully_centralized(ctx)
    if _fully_normalized(ctx):
        _entry(out, "centralizer/fully-normalized-gives-fully-centralized",
               lambda: (isfc, f"|C_S(H)| = {popcount(ctx.CSH)}"))
        _entry(out, "centralizer/normal-in-normalizer",
               lambda: (is_normal_subsystem(normalizer_subsystem(ctx), CFE),
                        ""))
    if isfc:
        _entry(out, "centralizer/saturated-when-fully-centralized",
               lambda: (saturation_report(CFE)["is_saturated"], ""))

        def _foc():
            CFT = centralizer_system(F, ctx.T)
            return (not (focal_mask(CFT) & ~ctx.CSH)
                    and not (hyperfocal_mask(CFT) & ~ctx.CSH),
                    G.mask_name(ctx.CSH))
        _entry(out, "centralizer/focal-inside-c-s", _foc)
        _entry(out, "centralizer/o-p-generation-formula",
               lambda: (same_system(CFE, p_power_index_subsystem(
                   centralizer_system(F, ctx.T), ctx.CSH)), ""))
    try:
        e_normal = is_normal_subsystem(F, E)
    except (AssertionError, ValueError):
        e_normal = False
    if e_normal:
        _entry(out, "centralizer/normal-e-gives-normal-centralizer",
               lambda: (is_normal_subsystem(F, CFE), ""))

    def _equivc():
        best = max(popcount(c.CSH) for c in fam)
        for c in fam:
            TC = G.product_mask(c.T, c.CSH)
            syl = [Sm for Sm in G.sylow_conjugates(p, within=c.NGH_amb)
                   if not (TC & ~Sm)]
            if not syl:
                return False, "no Sylow subgroup contains T C_S(H)"
            S0c = min(syl)
            i = popcount(c.CSH) == best
            ii = c.CSH == (loc.ambient_of_local(c.CLH) & S0c)
            iii = _maximal_p_in(loc, c.CLH, c.CSH)
            if not (i == ii == iii):
                return False, (f"|C_S| = {popcount(c.CSH)} gives "
                               f"({i}, {ii}, {iii})")
        return True, f"family of {len(fam)}"
    _entry(out, "centralizer/fully-centralized-equivalences", _equivc)
    if not isfc:
        def _move():
            best = max(popcount(c.CSH) for c in fam)
            tgts = {digest(c.E): c for c in fam if popcount(c.CSH) == best}
            TC = G.product_mask(ctx.T, ctx.CSH)
            for r in F.isos_from(TC).values():
                hom = InjHom(F.frame, r)
                tgt = tgts.get(digest(conjugate_system(E,
                                                       hom.restrict(ctx.T))))
                if tgt is None:
                    continue
                okm, wit = _move_identity(ctx, tgt, hom, F)
                if okm:
                    return True, wit
            return False, "no move map lands on a fully centralized conjugate"
        _entry(out, "centralizer/move-to-fully-centralized", _move)
    return out


def _maximal_p_in(loc: Locality, members: int, P_amb: int) -> bool:
    """No p-subgroup of the member set properly contains P."""
    G, p = loc.G, loc.p
    mem_amb = loc.ambient_of_local(members)
    for f in indices_of(members, loc.m):
        g = int(loc.elems[int(f)])
        if (P_amb >> g) & 1:
            continue
        o = G.order_of(g)
        if p_part(o, p) != o:
            continue
        grown = G.subgroup_closure(P_amb | (1 << g))
        if G.is_p_group_mask(grown, p) and not (grown & ~mem_amb):
            return False
    return True


def _move_identity(ctx: RegularContext, tgt: RegularContext,
                   alpha: InjHom, F: FusionSystem) -> tuple[bool, str]:
    """Centralizer hom-sets correspond along alpha: a morphism of F between
    subgroups of C_S(E) centralizes E exactly when its transport centralizes
    the image system."""
    G = ctx.loc.G
    CFE, CFE2 = centralizer_subsystem(ctx), centralizer_subsystem(tgt)
    amap = np.full(G.n, -1, dtype=np.int64)
    d = np.nonzero(alpha.row >= 0)[0]
    amap[alpha.frame.idx[d]] = alpha.frame.idx[alpha.row[d]]
    if mask_of(amap[indices_of(ctx.CSH, G.n)]) & ~tgt.CSH:
        return False, "C_S(E) does not land inside the target C_S"
    domains = G.all_subgroups_in(ctx.CSH, cap=4096)
    for P in domains:
        pidx = indices_of(P, G.n)
        Pa = mask_of(amap[pidx])
        lhs = CFE.pair_set(P)
        rhs2 = CFE2.pair_set(Pa)
        rhs = set()
        for r in F.isos_from(P).values():
            dpos = np.nonzero(r >= 0)[0]
            src = F.frame.idx[dpos].astype(np.int64)
            img = F.frame.idx[r[dpos]].astype(np.int64)
            if mask_of(img) & ~ctx.CSH:
                continue
            ts, ti = amap[src], amap[img]
            if (ts < 0).any() or (ti < 0).any():
                return False, "the move map misses a morphism"
            order = np.argsort(ts)
            arr = np.empty(2 * ts.size, dtype=np.uint16)
            arr[0::2] = ts[order]
            arr[1::2] = ti[order]
            if arr.tobytes() in rhs2:
                rhs.add(_row_pairs_bytes(F.frame, r))
        if lhs != rhs:
            return False, f"hom-sets differ at {G.mask_name(P)}"
    return True, f"hom-sets correspond over {len(domains)} domains"


def verify_conjugation(ctx: RegularContext,
                       F: FusionSystem | None = None) -> Report:
    """Transport of H along the total subgroup: the conjugate family agrees
    with the fusion route, T-normalizing members split as n g over the layer,
    membership in N_G(H) is detected by the restriction to T, and the
    layer decomposition over H holds."""
    loc, G, p = ctx.loc, ctx.loc.G, ctx.loc.p
    out: Report = []
    fam = conjugate_family(ctx)
    _entry(out, "conjugation/family-transported",
           lambda: (all(not (c.T & ~loc.S_mask) for c in fam),
                    f"{len(fam)} conjugates"))

    def _ef():
        Fh = F if F is not None else fusion_of(loc)
        want = {digest(c.E) for c in fam}
        have = {digest(conjugate_system(ctx.E, InjHom(Fh.frame, r)))
                for r in Fh.isos_from(ctx.T).values()}
        return have == want, f"{len(want)} systems in the family"
    _entry(out, "conjugation/family-two-routes", _ef)

    def _split():
        hidx = indices_of(ctx.H, loc.m)
        gidx = [int(g) for g in indices_of(ctx.Gstar, loc.m)]
        imgH = {g: mask_of(loc.conj_images(g)[hidx]) for g in gidx}
        checked = 0
        for f in indices_of(N_L(loc, loc.local_of_ambient(ctx.T)), loc.m):
            f = int(f)
            if (loc.conj_dom_mask(f) & ctx.H) != ctx.H:
                return False, "a T-normalizer misses H in its domain"
            imf = mask_of(loc.conj_images(f)[hidx])
            good = False
            for g in gidx:
                gi = int(loc.INV[g])
                n = int(loc.PROD[f, gi])
                if n < 0 or not ((ctx.E_L >> n) & 1):
                    continue
                if int(loc.PROD[n, g]) == f and imgH[g] == imf:
                    good = True
                    break
            if not good:
                return False, f"member {f} does not split as n g"
            checked += 1
        return True, f"{checked} T-normalizers split"
    _entry(out, "conjugation/t-normalizers-split", _split)

    def _mem():
        tidx = indices_of(ctx.T, G.n)
        for f in indices_of(ctx.Gstar, loc.m):
            f = int(f)
            amb_f = int(loc.elems[f])
            if G.conj_mask(ctx.T, amb_f) != ctx.T:
                continue
            phi = InjHom.from_mapping(ctx.E.frame,
                                      {int(x): G.conj(int(x), amb_f)
                                       for x in tidx})
            if bool((ctx.NGH >> f) & 1) != _preserves(ctx.E, phi):
                return False, G.element_name(amb_f)
        return True, ""
    _entry(out, "conjugation/n-g-h-detected-on-t", _mem)

    def _nse():
        got = 0
        tidx = indices_of(ctx.T, G.n)
        for s in indices_of(G.normalizer_mask(ctx.T, within=loc.S_mask), G.n):
            s = int(s)
            phi = InjHom.from_mapping(ctx.E.frame,
                                      {int(x): G.conj(int(x), s)
                                       for x in tidx})
            if _preserves(ctx.E, phi):
                got |= 1 << s
        return got == ctx.NSH, G.mask_name(ctx.NSH)
    _entry(out, "conjugation/n-s-e-is-n-s-h", _nse)
    _entry(out, "structure/layer-splits-over-h",
           lambda: (product_sets(loc, ctx.EH, ctx.M) == ctx.E_L,
                    f"{len(ctx.comps_H)} of {len(ctx.comps)} components in H"))

    def _compsplit():
        inM = {K for K in ctx.comps if not (K & ~ctx.M)}
        split = all(not (K & ~ctx.H) or not (K & ~ctx.M) for K in ctx.comps)
        return inM == set(ctx.comps) - set(ctx.comps_H) and split, ""
    _entry(out, "structure/components-split-h-m", _compsplit)
    _entry(out, "structure/h-centralizes-m",
           lambda: (not (ctx.M & ~ctx.CLH)
                    and not (ctx.H & ~C_L(loc, ctx.M)), ""))

    def _hm():
        HM = product_sets(loc, ctx.H, ctx.M)
        oks, _ = is_partial_subnormal(loc, HM, cap=ctx.cap)
        return (oks and is_partial_normal(loc, ctx.H, within=HM)
                and is_partial_normal(loc, ctx.M, within=HM)), ""
    _entry(out, "structure/h-m-product-subnormal", _hm)
    _entry(out, "structure/t0-t0perp-product",
           lambda: (G.product_mask(ctx.T0, ctx.T0perp) == ctx.tildeT,
                    G.mask_name(ctx.tildeT)))
    _entry(out, "structure/n-g-h-characteristic-p",
           lambda: (G.is_characteristic_p_in(ctx.NGH_amb, p),
                    f"order {popcount(ctx.NGH_amb)}"))

    def _nghn():
        Hstar = ctx.H & ctx.Gstar
        hsidx = indices_of(Hstar, loc.m)
        st = 0
        for g in indices_of(ctx.Gstar, loc.m):
            g = int(g)
            if mask_of(loc.conj_images(g)[hsidx]) == Hstar:
                st |= 1 << g
        return st == ctx.NGH, ""
    _entry(out, "structure/n-g-h-stabilizes-realizer", _nghn)

    def _hstar():
        Hstar_amb = loc.ambient_of_local(ctx.H & ctx.Gstar)
        oks, ch = G.is_subnormal_in(Hstar_amb, ctx.Gstar_amb)
        return oks, f"chain of length {len(ch)}"
    _entry(out, "structure/realizer-subnormal-in-model", _hstar)
    return out


# ---------------------------------------------------------------------------
# the correspondence between partial subnormals and subnormal subsystems

def verify_bijection(loc: Locality, cap: int = 2000,
                     F: FusionSystem | None = None) -> Report:
    """H -> F_{S cap H}(H) between the partial subnormals of L and the
    subnormal subsystems of F_S(L): injective, the images certified
    subnormal fusion-side, normality matching pointwise, components going
    to components, and surjectivity onto the group route when L is all of
    its ambient group."""
    out: Report = []
    G, p = loc.G, loc.p
    whole = (1 << loc.m) - 1
    if F is None:
        F = fusion_of(loc)
    subs = sorted(enumerate_partial_subnormals(loc, cap=cap))
    images: dict[int, FusionSystem] = {}

    def _build():
        for Hm in subs:
            images[Hm] = F if Hm == whole else fusion_of_partial_subgroup(
                loc, Hm)
        return True, f"{len(subs)} partial subnormals"
    _entry(out, "bijection/images-built", _build)
    if len(images) != len(subs):
        return out
    dgs = {Hm: digest(images[Hm]) for Hm in subs}

    def _inj():
        seen: dict[tuple, int] = {}
        for Hm in subs:
            key = (images[Hm].over_mask, dgs[Hm])
            if key in seen:
                return False, "two partial subnormals share a fusion system"
            seen[key] = Hm
        return True, f"{len(subs)} distinct systems"
    _entry(out, "bijection/injective", _inj)

    memo: dict[tuple, bool] = {}

    def _normal(a: int, b: int) -> bool:
        key = (dgs[a], dgs[b])
        got = memo.get(key)
        if got is None:
            got = memo[key] = (is_subsystem(images[b], images[a])
                               and is_normal_subsystem(images[a], images[b]))
        return got

    def _chain():
        reach = {whole}
        frontier = [whole]
        while frontier:
            nxt = []
            for A in frontier:
                for B in subs:
                    if B in reach:
                        continue
                    if images[B].over_mask & ~images[A].over_mask:
                        continue
                    if _normal(A, B):
                        reach.add(B)
                        nxt.append(B)
            frontier = nxt
        return (len(reach) == len(subs),
                f"{len(reach)} of {len(subs)} certified fusion-side")
    _entry(out, "bijection/images-subnormal", _chain)

    def _normals():
        for Hm in subs:
            if is_partial_normal(loc, Hm) != _normal(whole, Hm):
                return False, "normality differs across the correspondence"
        return True, f"{len(enumerate_partial_normals(loc, cap=cap))} normal"
    _entry(out, "bijection/normals-correspond", _normals)

    def _comps():
        comps = components(loc, cap=cap)
        for K in comps:
            D = images[K]
            if hyperfocal_mask(D) != D.over_mask:
                return False, ("a component image has a proper subsystem "
                               "of p-power index")
            cands = {}
            for N in enumerate_partial_normals(loc, within=K, cap=cap):
                C = fusion_of_partial_subgroup(loc, N)
                cands[digest(C)] = C
            z = center_of(D)
            over_z = [C for C in cands.values()
                      if not (z & ~C.over_mask) and is_normal_subsystem(D, C)]
            if len(over_z) != 2:
                return False, "a component image is not quasisimple"
        lay = layer_fusion(loc, cap=cap)
        EL = E_of(loc, cap=cap)
        if lay is None:
            return EL == 1, "no components"
        return (same_system(images[EL], lay),
                f"{len(comps)} components map over")
    _entry(out, "bijection/components-correspond", _comps)
    if loc.m == G.n:
        def _surj():
            from .fusion import group_subsystems
            gf = fusion_of_group(G, loc.S_mask, p)
            keys = {(images[Hm].over_mask, dgs[Hm]) for Hm in subs}
            extra = group_subsystems(gf)
            for _, D in extra:
                if (D.over_mask, digest(D)) not in keys:
                    return False, ("a subnormal group system over "
                                   f"{G.mask_name(D.over_mask)} "
                                   "has no preimage")
            return True, f"{len(extra)} group-route systems all hit"
        _entry(out, "bijection/surjective-onto-group-route", _surj)
    return out


# ---------------------------------------------------------------------------
# bootstrap: from a group to its regular locality

@dataclass
class BootstrapResult:
    G: FiniteGroup
    F: FusionSystem              # F_S(G) over the chosen Sylow subgroup
    provisional: Locality        # over F^s
    loc: Locality                # over delta(F)
    regular: bool


def bootstrap_regular(G: FiniteGroup, p: int, cap: int = 2000,
                      name: str = "") -> BootstrapResult:
    """group -> F -> F^s -> provisional locality -> components -> delta(F)
    -> final locality, with the regularity certificate computed on the
    final object."""
    F = fusion_of_group(G, None, p, name=name or G.name)
    S = F.over_mask
    fs = subcentric_set(F)
    prov = Locality(G, S, fs, p, name=(name or G.name) + " subcentric")
    layer = layer_fusion(prov, cap=cap)
    delta = delta_set(F, layer)
    loc = prov if delta == fs else Locality(G, S, delta, p,
                                            name=name or G.name)
    return BootstrapResult(G, F, prov, loc,
                           is_regular_locality(loc, cap=cap))
