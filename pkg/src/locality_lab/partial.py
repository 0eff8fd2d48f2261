"""Partial groups and localities: word domains, partial products, conjugation,
partial (sub)normal subgroups, normalizers/centralizers, the group-to-locality
construction, Frattini splitting, and the axiom checkers used for fuzzing.

Elements are local indices 0..m-1 with the identity at 0.  A partial group is
given by tables: INV (inversion), PROD (pair products, -1 undefined), SCONJ
(conjugation action on the positions of the distinguished p-subgroup S, -1
when the image leaves S), SLOC (local index of each S position), and the
object set `delta` as a frozenset of S-position masks.  A word lies in the
domain exactly when its iterated S-conjugation survivor subgroup S_w is in
delta; products of domain words are evaluated by left folding, which the
contraction axiom makes sound.

Member subsets (partial subgroups, normal sets) are Python-int bitmasks over
local indices.
"""

from __future__ import annotations

import numpy as np

from .groups import (
    CapExceeded, FiniteGroup, indices_of, mask_of, p_part, popcount,
)

Report = list[tuple[str, bool, str]]

# exhaustive word-check tiers; longer words and larger instances are sampled
TRIPLE_EXHAUSTIVE_MAX = 30
QUAD_EXHAUSTIVE_MAX = 8


def _pack_rows(alive: np.ndarray) -> list[int]:
    """Row-wise bitmasks (position p -> bit p) of a boolean matrix."""
    packed = np.packbits(alive, axis=1, bitorder="little")
    return [int.from_bytes(r.tobytes(), "little") for r in packed]


def _fold_pairs(PROD: np.ndarray, word) -> int:
    """Left fold of a word through the pair table; -1 once undefined."""
    acc = int(word[0])
    for x in word[1:]:
        if acc < 0:
            return -1
        acc = int(PROD[acc, int(x)])
    return acc


class TablePartialGroup:
    """Partial group described by explicit tables (see module docstring)."""

    def __init__(self, INV: np.ndarray, PROD: np.ndarray, SCONJ: np.ndarray,
                 SLOC: np.ndarray, delta: frozenset[int], p: int, name: str = ""):
        self.INV = INV
        self.PROD = PROD
        self.SCONJ = SCONJ
        self.SLOC = SLOC
        self.delta = delta
        self.p = p
        self.name = name
        self.m = int(INV.shape[0])
        self.s_size = int(SLOC.shape[0])
        self.s_lmask = mask_of(SLOC)
        self._dom_cache: dict[int, int] = {}
        self._img_cache: dict[int, np.ndarray] = {}

    def table_copy(self) -> "TablePartialGroup":
        return TablePartialGroup(self.INV.copy(), self.PROD.copy(),
                                 self.SCONJ.copy(), self.SLOC.copy(),
                                 self.delta, self.p, name=self.name)

    # -- word domain and products -------------------------------------------

    def s_word_mask(self, word) -> int:
        """S_w as a mask over S positions (survivors of prefix conjugation)."""
        cur = np.arange(self.s_size, dtype=np.int64)
        for f in word:
            alive = cur >= 0
            nxt = np.full(self.s_size, -1, dtype=np.int64)
            nxt[alive] = self.SCONJ[int(f)][cur[alive]]
            cur = nxt
        return mask_of(np.nonzero(cur >= 0)[0])

    def word_defined(self, word) -> bool:
        if len(word) == 0:
            return True
        return self.s_word_mask(word) in self.delta

    def word_product(self, word) -> int:
        if len(word) == 0:
            return 0
        if not self.word_defined(word):
            raise ValueError("word outside the domain")
        got = _fold_pairs(self.PROD, word)
        assert got >= 0, "domain word failed to fold"
        return got

    # -- conjugation ----------------------------------------------------------

    def _pair_suffix_masks(self, i: int) -> list[int]:
        """S_{(i, j)} masks over S positions, for all j at once."""
        si = self.SCONJ[int(i)].astype(np.int64)
        ok0 = si >= 0
        B = np.full((self.m, self.s_size), -1, dtype=np.int64)
        B[:, ok0] = self.SCONJ[:, si[ok0]].astype(np.int64)
        return _pack_rows(B >= 0)

    def conj_dom_mask(self, f: int) -> int:
        """D(f) = {x : (f^-1, x, f) in D} as a local bitmask."""
        got = self._dom_cache.get(f)
        if got is None:
            fi = int(self.INV[f])
            base = self.SCONJ[fi].astype(np.int64)
            ok0 = base >= 0
            A = np.full((self.m, self.s_size), -1, dtype=np.int64)
            A[:, ok0] = self.SCONJ[:, base[ok0]].astype(np.int64)
            ok1 = A >= 0
            B = np.full_like(A, -1)
            B[ok1] = self.SCONJ[f][A[ok1]]
            got = 0
            for x, mk in enumerate(_pack_rows(B >= 0)):
                if mk in self.delta:
                    got |= 1 << x
            self._dom_cache[f] = got
        return got

    def conj_images(self, f: int) -> np.ndarray:
        """x^f for x in D(f) (local indices; -1 outside the domain)."""
        got = self._img_cache.get(f)
        if got is None:
            dom = self.conj_dom_mask(f)
            xs = indices_of(dom, self.m)
            fi = int(self.INV[f])
            a = self.PROD[fi, xs]
            assert (a >= 0).all(), "conjugation word failed to fold"
            b = self.PROD[a, f]
            assert (b >= 0).all(), "conjugation word failed to fold"
            got = np.full(self.m, -1, dtype=np.int32)
            got[xs] = b
            self._img_cache[f] = got
        return got

    def conj(self, x: int, f: int) -> int:
        if not ((self.conj_dom_mask(f) >> x) & 1):
            raise ValueError("element outside D(f)")
        return int(self.conj_images(f)[x])

    def s_f_mask(self, f: int) -> int:
        """S_f over S positions: x in S with x^f back in S."""
        return mask_of(np.nonzero(self.SCONJ[f] >= 0)[0])


class Locality(TablePartialGroup):
    """L_Delta(G): the elements g with S_g in Delta, with partial product the
    group product on words whose S_w lies in Delta.

    With an explicit `members` iterable of ambient indices the element set is
    that subset instead of the maximal one; every listed element must still
    satisfy S_g in Delta, and the usual identity, inversion, and product
    closure requirements are asserted."""

    def __init__(self, G: FiniteGroup, S_mask: int, delta_ambient, p: int,
                 name: str = "", members=None):
        delta_ambient = frozenset(int(d) for d in delta_ambient)
        for P in delta_ambient:
            assert G.is_subgroup_mask(P) and not (P & ~S_mask)
        Sidx = indices_of(S_mask, G.n)
        spos = np.full(G.n, -1, dtype=np.int64)
        spos[Sidx] = np.arange(Sidx.size)
        # S_g for every group element, vectorized over the S coordinates
        C = G.conj_table(Sidx, np.arange(G.n, dtype=np.int64))
        dloc = frozenset(
            mask_of(spos[indices_of(P, G.n)]) for P in delta_ambient)
        sg = _pack_rows(spos[C] >= 0)
        if members is None:
            members = np.array([g for g in range(G.n) if sg[g] in dloc],
                               dtype=np.int64)
        else:
            members = np.unique(np.fromiter(
                (int(g) for g in members), dtype=np.int64))
            outside = [int(g) for g in members if sg[g] not in dloc]
            assert not outside, (
                f"member {G.element_name(outside[0])} has S_g outside delta")
        assert members.size and members[0] == 0, "identity must be a member"
        lpos = np.full(G.n, -1, dtype=np.int64)
        lpos[members] = np.arange(members.size)
        m = members.size
        INV = lpos[G.INV[members]].astype(np.int32)
        assert (INV >= 0).all(), "members must be closed under inversion"
        CM = C[members]
        SCONJ = np.where(spos[CM] >= 0, spos[CM], -1).astype(np.int16)
        SLOC = lpos[Sidx].astype(np.int32)
        assert (SLOC >= 0).all()
        # pair domain: x in S_g with x^g in S_h, tested against delta
        PROD = np.full((m, m), -1, dtype=np.int32)
        for i in range(m):
            si = SCONJ[i].astype(np.int64)
            ok0 = si >= 0
            B = np.full((m, Sidx.size), -1, dtype=np.int64)
            B[:, ok0] = SCONJ[:, si[ok0]].astype(np.int64)
            masks = _pack_rows(B >= 0)
            prods = lpos[G.MUL[members[i], members]]
            row = PROD[i]
            for j in range(m):
                if masks[j] in dloc:
                    assert prods[j] >= 0, "partial product left the locality"
                    row[j] = prods[j]
        super().__init__(INV, PROD, SCONJ, SLOC, dloc, p, name=name)
        self.G = G
        self.S_mask = S_mask
        self.delta_ambient = delta_ambient
        self.elems = members
        self.lpos = lpos

    def local_of_ambient(self, amask: int) -> int:
        idx = self.lpos[indices_of(amask, self.G.n)]
        assert (idx >= 0).all(), "subset leaves the locality"
        return mask_of(idx)

    def ambient_of_local(self, lmask: int) -> int:
        return mask_of(self.elems[indices_of(lmask, self.m)])


def locality_from_group(G: FiniteGroup, S_mask: int, delta, p: int,
                        name: str = "") -> Locality:
    """L_Delta(G) with the closure preconditions verified first."""
    delta = frozenset(int(d) for d in delta)
    if popcount(S_mask) != p_part(popcount(G.full_mask), p):
        raise ValueError("S is not a Sylow p-subgroup")
    allsubs = G.all_subgroups_in(S_mask, cap=4096)
    for P in delta:
        for Q in allsubs:
            if (P & ~Q) == 0 and Q not in delta:
                raise ValueError(
                    f"delta not overgroup-closed: {G.mask_name(P)} misses "
                    f"{G.mask_name(Q)}")
        tb = G.transporter_bits(indices_of(P, G.n), S_mask,
                                np.arange(G.n, dtype=np.int64))
        for g in np.nonzero(tb)[0]:
            Pg = G.conj_mask(P, int(g))
            if Pg not in delta:
                raise ValueError(
                    f"delta not conjugation-closed: {G.mask_name(P)} moves to "
                    f"{G.mask_name(Pg)}")
    return Locality(G, S_mask, delta, p, name=name)


def total_locality(G: FiniteGroup, p: int, name: str = "") -> Locality:
    """The group itself as a locality: Delta = all subgroups of S."""
    S = G.sylow_mask(p)
    delta = G.all_subgroups_in(S, cap=4096)
    return Locality(G, S, delta, p, name=name or f"{G.name} (total)")


# ---------------------------------------------------------------------------
# subgroup predicates

def is_partial_subgroup(pg: TablePartialGroup, H: int) -> bool:
    """Closed under inversion and under products of defined pairs; the
    contraction axiom then closes all defined words."""
    if not (H & 1):
        return False
    xs = indices_of(H, pg.m)
    if not all((H >> int(pg.INV[x])) & 1 for x in xs):
        return False
    sub = pg.PROD[np.ix_(xs, xs)]
    return all((H >> int(v)) & 1 for v in sub[sub >= 0])


def is_subgroup(pg: TablePartialGroup, H: int) -> bool:
    """Totally multipliable partial subgroup: every word from H is in the
    domain.  The survivor core over all of H certifies this in one step."""
    if not is_partial_subgroup(pg, H):
        return False
    xs = indices_of(H, pg.m)
    if (pg.PROD[np.ix_(xs, xs)] < 0).any():
        return False
    core = np.ones(pg.s_size, dtype=bool)
    for x in xs:
        core &= pg.SCONJ[int(x)] >= 0
    return mask_of(np.nonzero(core)[0]) in pg.delta


# below this member count the per-element loops win; above it the stacked
# conjugation matrix does
_BULK_MIN = 256


def _conj_matrix(pg: TablePartialGroup) -> np.ndarray:
    """IMG[f, x] = x^f, -1 when x is outside D(f); built once per partial
    group and kept, so bulk conjugation sweeps are numpy slices."""
    got = getattr(pg, "_img_matrix", None)
    if got is None:
        got = np.stack([pg.conj_images(f) for f in range(pg.m)])
        pg._img_matrix = got
    return got


def is_partial_normal(pg: TablePartialGroup, N: int, within: int | None = None,
                      _pre_checked: bool = False) -> bool:
    """x^f in N for all x in N cap D(f), f ranging over `within` (default L)."""
    if not _pre_checked and not is_partial_subgroup(pg, N):
        return False
    if pg.m > _BULK_MIN:
        fs = (np.arange(pg.m, dtype=np.int64) if within is None
              else indices_of(within, pg.m))
        nidx = indices_of(N, pg.m)
        inN = np.zeros(pg.m + 1, dtype=bool)
        inN[nidx] = True
        vals = _conj_matrix(pg)[np.ix_(fs, nidx)]
        return bool(((vals < 0) | inN[vals]).all())
    fs = range(pg.m) if within is None else indices_of(within, pg.m)
    for f in fs:
        f = int(f)
        hit = N & pg.conj_dom_mask(f)
        if hit:
            img = pg.conj_images(f)[indices_of(hit, pg.m)]
            if any(not ((N >> int(y)) & 1) for y in img):
                return False
    return True


def _normal_closure(pg: TablePartialGroup, seed: int,
                    within: int | None = None) -> int:
    """Smallest superset of the seed closed under inversion, defined pair
    products, and all defined conjugations from `within`."""
    N = seed | 1
    if pg.m > _BULK_MIN:
        IMG = _conj_matrix(pg)
        if within is not None:
            IMG = IMG[indices_of(within, pg.m)]
        while True:
            before = N
            xs = indices_of(N, pg.m)
            N |= mask_of(pg.INV[xs])
            sub = pg.PROD[np.ix_(xs, xs)]
            N |= mask_of(np.unique(sub[sub >= 0]))
            vals = IMG[:, xs]
            N |= mask_of(np.unique(vals[vals >= 0]))
            if N == before:
                return N
    fs = [int(f) for f in (range(pg.m) if within is None
                           else indices_of(within, pg.m))]
    while True:
        before = N
        xs = indices_of(N, pg.m)
        N |= mask_of(pg.INV[xs])
        sub = pg.PROD[np.ix_(xs, xs)]
        N |= mask_of(sub[sub >= 0])
        for f in fs:
            hit = N & pg.conj_dom_mask(f)
            if hit:
                N |= mask_of(pg.conj_images(f)[indices_of(hit, pg.m)])
        if N == before:
            return N


def product_sets(pg: TablePartialGroup, X: int, Y: int) -> int:
    """XY = {Pi(x, y) : (x, y) in D}."""
    xs = indices_of(X, pg.m)
    ys = indices_of(Y, pg.m)
    sub = pg.PROD[np.ix_(xs, ys)]
    return mask_of(sub[sub >= 0])


def N_L(pg: TablePartialGroup, X: int) -> int:
    """{f : X subset of D(f), X^f = X}."""
    xs = indices_of(X, pg.m)
    if pg.m > _BULK_MIN:
        vals = _conj_matrix(pg)[:, xs]
        okdom = (vals >= 0).all(axis=1)
        oks = np.zeros(pg.m, dtype=bool)
        oks[okdom] = (np.sort(vals[okdom], axis=1) == np.sort(xs)).all(axis=1)
        return mask_of(np.nonzero(oks)[0])
    out = 0
    for f in range(pg.m):
        if (pg.conj_dom_mask(f) & X) == X:
            if mask_of(pg.conj_images(f)[xs]) == X:
                out |= 1 << f
    return out


def C_L(pg: TablePartialGroup, X: int) -> int:
    """{f : X subset of D(f), x^f = x for all x in X}."""
    xs = indices_of(X, pg.m)
    if pg.m > _BULK_MIN:
        vals = _conj_matrix(pg)[:, xs]
        okdom = (vals >= 0).all(axis=1)
        oks = np.zeros(pg.m, dtype=bool)
        oks[okdom] = (vals[okdom] == xs).all(axis=1)
        return mask_of(np.nonzero(oks)[0])
    out = 0
    for f in range(pg.m):
        if (pg.conj_dom_mask(f) & X) == X:
            if (pg.conj_images(f)[xs] == xs).all():
                out |= 1 << f
    return out


def Z_L(pg: TablePartialGroup) -> int:
    return C_L(pg, (1 << pg.m) - 1)


# ---------------------------------------------------------------------------
# enumeration of partial normals and subnormals

def _s_subgroups(pg: TablePartialGroup, spositions) -> list[int]:
    """Subgroups of a product-closed subset of S, as masks over S positions."""
    k = len(spositions)
    loc = {int(pg.SLOC[q]): i for i, q in enumerate(spositions)}
    MUL = np.zeros((k, k), dtype=np.int16)
    for a, pa in enumerate(spositions):
        for b, pb in enumerate(spositions):
            v = int(pg.PROD[int(pg.SLOC[pa]), int(pg.SLOC[pb])])
            assert v in loc, "S positions must be closed under products"
            MUL[a, b] = loc[v]
    Sgrp = FiniteGroup.from_mul_table(MUL)
    subs = Sgrp.all_subgroups_in(Sgrp.full_mask, cap=4096)
    return [mask_of([spositions[i] for i in indices_of(sub, k)])
            for sub in subs]


def _normal_seeds(pg: TablePartialGroup, within: int | None) -> list[int]:
    """Seeds for the normal-closure enumeration: the cyclic subgroups of S
    inside `within`, and, for group-embedded localities, the traces of the
    normal subgroups of the ambient hull (these pick up the p'-normals that
    meet S trivially).  Cyclic seeds suffice for the fixed point: the closure
    of any S-subgroup is the iterated set product of the closures of its
    cyclic subgroups, and the enumeration queue closes under set products."""
    whole = (1 << pg.m) - 1 if within is None else within
    seeds = []
    seen: set[int] = set()
    for q in range(pg.s_size):
        x = int(pg.SLOC[q])
        if not ((whole >> x) & 1):
            continue
        cyc, cur = 0, x
        while not ((cyc >> cur) & 1):
            cyc |= 1 << cur
            cur = int(pg.PROD[cur, x])
            assert cur >= 0, "S is not totally multipliable"
        if cyc not in seen:
            seen.add(cyc)
            seeds.append(cyc | 1)
    if isinstance(pg, Locality):
        amb = pg.ambient_of_local(whole)
        G = pg.G
        hull = G.subgroup_closure(amb)
        for M in G.normal_subgroups_in(hull):
            idx = pg.lpos[indices_of(M & amb, G.n)]
            seeds.append(mask_of(idx[idx >= 0]) | 1)
    return seeds


def enumerate_partial_normals(pg: TablePartialGroup, within: int | None = None,
                              cap: int = 2000) -> list[int]:
    """Closure-seeded fixed points: seeds from subgroups of S and ambient
    normal traces, then intersections and set products of the finds.  Each
    result is certified partial normal; completeness is cross-certified by
    the callers on group-coincident instances."""
    if pg.m > cap:
        raise CapExceeded(f"locality with {pg.m} elements exceeds cap {cap}")
    whole = (1 << pg.m) - 1 if within is None else within
    memo = getattr(pg, "_pnorm_memo", None)
    if memo is None:
        memo = pg._pnorm_memo = {}
    if whole in memo:
        return memo[whole]
    found: dict[int, bool] = {}
    queue = _normal_seeds(pg, within)
    while queue:
        seed = queue.pop()
        N = _normal_closure(pg, seed, within=within)
        if (N & ~whole) or N in found:
            continue
        if not is_partial_normal(pg, N, within=within):
            continue
        for M in list(found):
            inter = M & N
            if inter not in found:
                queue.append(inter)
            for A, B in ((M, N), (N, M)):
                P = product_sets(pg, A, B)
                if P not in found:
                    queue.append(P)
        found[N] = True
    memo[whole] = sorted(found)
    return memo[whole]


def is_partial_subnormal(pg: TablePartialGroup, H: int,
                         within: int | None = None,
                         cap: int = 2000) -> tuple[bool, list[int]]:
    """Chain search through iterated partial-normal enumeration (BFS)."""
    whole = (1 << pg.m) - 1 if within is None else within
    if H == whole:
        return True, [whole]
    if not is_partial_subgroup(pg, H):
        return False, []
    from collections import deque
    parent: dict[int, int | None] = {whole: None}
    dq = deque([whole])
    while dq:
        cur = dq.popleft()
        for N in enumerate_partial_normals(pg, within=cur, cap=cap):
            if N == cur or N in parent:
                continue
            if (H & ~N) == 0:
                parent[N] = cur
                if N == H:
                    chain = [N]
                    while parent[chain[-1]] is not None:
                        chain.append(parent[chain[-1]])
                    return True, chain[::-1]
                dq.append(N)
    return False, []


def enumerate_partial_subnormals(pg: TablePartialGroup,
                                 cap: int = 2000) -> dict[int, int]:
    """All partial subnormals reached by iterated normal enumeration,
    mapping each to a parent it is partial normal in."""
    whole = (1 << pg.m) - 1
    out: dict[int, int] = {whole: whole}
    frontier = [whole]
    while frontier:
        nxt = []
        for Hm in frontier:
            for N in enumerate_partial_normals(pg, within=Hm, cap=cap):
                if N not in out:
                    out[N] = Hm
                    nxt.append(N)
        frontier = nxt
    return out


# ---------------------------------------------------------------------------
# fusion of a partial subgroup, Frattini splitting, transport

def fusion_of_partial_subgroup(loc: Locality, H: int, name: str = ""):
    """F_{S cap H}(H), generated by the maps c_h restricted to S_h cap H."""
    from .fusion import Frame, InjHom, generate
    G = loc.G
    T_local = H & loc.s_lmask
    T = loc.ambient_of_local(T_local)
    frame = Frame(G, T)
    homs = []
    seen: set[tuple] = set()
    for h in indices_of(H, loc.m):
        sc = loc.SCONJ[int(h)]
        mapping = {}
        for q in range(loc.s_size):
            if sc[q] >= 0 and (T_local >> int(loc.SLOC[q])) & 1:
                src = int(loc.elems[int(loc.SLOC[q])])
                dst = int(loc.elems[int(loc.SLOC[sc[q]])])
                mapping[src] = dst
        key = tuple(sorted(mapping.items()))
        if not mapping or key in seen:
            continue
        seen.add(key)
        homs.append(InjHom.from_mapping(frame, mapping))
    return generate(G, T, loc.p, homs, name=name)


def frattini_split(pg: TablePartialGroup, N: int, g: int) -> tuple[int, int]:
    """g = Pi(n, f) with n in N, f in N_L(N cap S) and S_g = S_{(n,f)}."""
    T_local = N & pg.s_lmask
    nt = N_L(pg, T_local)
    sg = pg.s_word_mask((g,))
    for f in indices_of(nt, pg.m):
        f = int(f)
        fi = int(pg.INV[f])
        if not pg.word_defined((g, fi)):
            continue
        n = int(pg.PROD[g, fi])
        if n < 0 or not ((N >> n) & 1):
            continue
        if int(pg.PROD[n, f]) == g and pg.s_word_mask((n, f)) == sg:
            return n, f
    raise AssertionError("Frattini splitting failed")


def transport_fusion(loc1: Locality, loc2: Locality, amap: np.ndarray,
                     H: int) -> tuple[bool, str]:
    """Check that the ambient bijection amap is an isomorphism of the two
    localities carrying F_{S cap H}(H) onto the fusion of the image."""
    from .fusion import Frame, InjHom, conjugate_system, same_system
    G = loc1.G
    assert loc2.G is G, "transport is supported within one ambient group"
    if loc1.m != loc2.m:
        return False, "member counts differ"
    im = amap[loc1.elems]
    if sorted(int(x) for x in im) != sorted(int(x) for x in loc2.elems):
        return False, "member sets do not correspond"
    lm = loc2.lpos[im]
    P2 = loc2.PROD[np.ix_(lm, lm)]
    if ((loc1.PROD >= 0) != (P2 >= 0)).any():
        return False, "pair domains do not correspond"
    d = loc1.PROD >= 0
    if (lm[loc1.PROD[d]] != P2[d]).any():
        return False, "pair products do not correspond"
    if mask_of(amap[indices_of(loc1.S_mask, G.n)]) != loc2.S_mask:
        return False, "S does not correspond"
    H2 = mask_of(lm[indices_of(H, loc1.m)])
    T1 = loc1.ambient_of_local(H & loc1.s_lmask)
    T2 = loc2.ambient_of_local(H2 & loc2.s_lmask)
    if mask_of(amap[indices_of(T1, G.n)]) != T2:
        return False, "S cap H does not correspond"
    F1 = fusion_of_partial_subgroup(loc1, H)
    F2 = fusion_of_partial_subgroup(loc2, H2)
    big = G.subgroup_closure(T1 | T2)
    phi = InjHom.from_mapping(Frame(G, big),
                              {int(x): int(amap[x])
                               for x in indices_of(T1, G.n)})
    ok = same_system(conjugate_system(F1, phi), F2)
    return ok, "" if ok else "fusion systems do not correspond"


# ---------------------------------------------------------------------------
# axiom checkers

def _pair_domain_witness(pg: TablePartialGroup) -> str:
    """First pair where PROD definedness disagrees with the S_w rule."""
    for i in range(pg.m):
        defined = pg.PROD[i] >= 0
        masks = pg._pair_suffix_masks(i)
        for j in range(pg.m):
            if (masks[j] in pg.delta) != bool(defined[j]):
                return f"pair ({i},{j})"
    return ""


def _word_contract_witness(pg: TablePartialGroup, w: tuple[int, ...]) -> str:
    """All axioms instantiated on one domain word; empty string when fine."""
    if not pg.word_defined(w):
        return ""
    prod = _fold_pairs(pg.PROD, w)
    if prod < 0:
        return f"fold undefined on {w}"
    for cut in range(1, len(w)):
        if not (pg.word_defined(w[:cut]) and pg.word_defined(w[cut:])):
            return f"split {cut} of {w} leaves the domain"
    for a in range(len(w)):
        for b in range(a + 1, len(w) + 1):
            mid = _fold_pairs(pg.PROD, w[a:b])
            if mid < 0:
                return f"segment {w[a:b]} of {w} fails to fold"
            w2 = w[:a] + (mid,) + w[b:]
            if not pg.word_defined(w2):
                return f"contraction {w2} of {w} leaves the domain"
            if _fold_pairs(pg.PROD, w2) != prod:
                return f"contraction {w2} of {w} changes the product"
    winv = tuple(int(pg.INV[x]) for x in reversed(w))
    if not pg.word_defined(winv + w):
        return f"inverse word of {w} leaves the domain"
    if _fold_pairs(pg.PROD, winv + w) != 0:
        return f"inverse word of {w} misses One"
    return ""


def _check_triples(pg) -> tuple[bool, str]:
    d = np.nonzero(pg.PROD >= 0)
    for i, j in zip(d[0].tolist(), d[1].tolist()):
        base = pg.s_word_mask((i, j))
        pos = indices_of(base, pg.s_size)
        for k in range(pg.m):
            img = pg.SCONJ[k][pos]
            if mask_of(pos[img >= 0]) not in pg.delta:
                continue
            wit = _word_contract_witness(pg, (i, j, k))
            if wit:
                return False, wit
    return True, ""


def _check_quads(pg) -> tuple[bool, str]:
    m = pg.m
    for i in range(m):
        for j in range(m):
            if pg.PROD[i, j] < 0:
                continue
            for k in range(m):
                if pg.PROD[j, k] < 0:
                    continue
                for l in range(m):
                    w = (i, j, k, l)
                    if pg.word_defined(w):
                        wit = _word_contract_witness(pg, w)
                        if wit:
                            return False, wit
    return True, ""


def _check_sampled(pg, rng, length: int, count: int) -> tuple[bool, str]:
    for _ in range(count):
        w = tuple(int(x) for x in rng.integers(0, pg.m, size=length))
        wit = _word_contract_witness(pg, w)
        if wit:
            return False, wit
    return True, ""


def check_partial_group(pg: TablePartialGroup, seed: int = 0,
                        samples: int = 300, deep: bool = True) -> Report:
    """Axiom verification.  The pair-level identities run exhaustively and
    vectorized; with `deep` the word axioms run exhaustively up to the size
    tiers and sampled beyond them."""
    out: Report = []
    m, P, INV = pg.m, pg.PROD, pg.INV.astype(np.int64)
    ar = np.arange(m)

    ok = (P[0] == ar).all() and (P[:, 0] == ar).all()
    out.append(("partial/identity", bool(ok), "" if ok else "identity row/col"))

    ok = bool((INV[INV] == ar).all() and INV[0] == 0)
    wit = "" if ok else f"element {int(np.nonzero(INV[INV] != ar)[0][0]) if (INV[INV] != ar).any() else 0}"
    out.append(("partial/inversion-involutory", ok, wit))

    ok = bool((P[INV, ar] == 0).all())
    out.append(("partial/inverse-product", ok,
                "" if ok else "some (f^-1, f) misses One"))

    d = np.nonzero(P >= 0)
    pij = P[d].astype(np.int64)
    left = P[INV[d[0]], pij]
    right = P[pij, INV[d[1]]]
    okl = (left == d[1]).all()
    okr = (right == d[0]).all()
    wit = ""
    if not (okl and okr):
        k = int(np.nonzero((left != d[1]) | (right != d[0]))[0][0])
        wit = f"pair ({int(d[0][k])},{int(d[1][k])})"
    out.append(("partial/cancellation", bool(okl and okr), wit))

    # fold of (j^-1, i^-1, i, j) must be One for every defined pair
    q = P[INV[d[1]], INV[d[0]]].astype(np.int64)
    bad = q < 0
    q = P[np.where(bad, 0, q), d[0]].astype(np.int64)
    bad |= q < 0
    q = P[np.where(bad, 0, q), d[1]].astype(np.int64)
    bad |= q < 0
    ok = bool((~bad & (q == 0)).all())
    wit = ""
    if not ok:
        k = int(np.nonzero(bad | (q != 0))[0][0])
        wit = f"pair ({int(d[0][k])},{int(d[1][k])})"
    out.append(("partial/four-fold-inverse", ok, wit))

    wit = _pair_domain_witness(pg)
    out.append(("partial/pair-domain-coherent", not wit, wit))

    # exhaustive associativity over chained defined pairs (size-gated)
    if m <= 150:
        ok, wit = True, ""
        dL = np.nonzero(P >= 0)
        for i, j in zip(dL[0].tolist(), dL[1].tolist()):
            v = int(P[i, j])
            rowj = P[j].astype(np.int64)
            ks = np.nonzero(rowj >= 0)[0]
            lhs = P[v, ks]
            rhs = P[i, rowj[ks]]
            both = (lhs >= 0) & (rhs >= 0)
            if (lhs[both] != rhs[both]).any():
                k = int(ks[both][np.nonzero(lhs[both] != rhs[both])[0][0]])
                ok, wit = False, f"triple ({i},{j},{k})"
                break
        out.append(("partial/associativity-grid", ok, wit))

    if deep:
        rng = np.random.default_rng(seed)
        if m <= TRIPLE_EXHAUSTIVE_MAX:
            ok3, wit3 = _check_triples(pg)
        else:
            ok3, wit3 = _check_sampled(pg, rng, 3, samples)
        out.append(("partial/assoc-contraction", ok3, wit3))
        if m <= QUAD_EXHAUSTIVE_MAX:
            ok4, wit4 = _check_quads(pg)
        else:
            ok4, wit4 = _check_sampled(pg, rng, 4, samples)
        out.append(("partial/split-coherence", ok4, wit4))
        okl, witl = True, ""
        for ln in (5, 6):
            o, w = _check_sampled(pg, rng, ln, samples // 2)
            if not o and okl:
                okl, witl = o, w
        out.append(("partial/sampled-long-words", okl, witl))
    return out


def check_locality(loc: TablePartialGroup, seed: int = 0,
                   samples: int = 300, deep: bool = True) -> Report:
    """Partial-group axioms plus the locality-specific coherence checks."""
    out = check_partial_group(loc, seed=seed, samples=samples, deep=deep)
    m = loc.m
    SL = loc.SLOC.astype(np.int64)

    ok, wit = True, ""
    try:
        ssubs = _s_subgroups(loc, list(range(loc.s_size)))
    except (AssertionError, ValueError):
        ok, wit, ssubs = False, "S tables violate the group laws", []
    if ok and p_part(loc.s_size, loc.p) != loc.s_size:
        ok, wit = False, "S order is not a p-power"
    out.append(("locality/s-is-p-group", ok, wit))

    okov = all(Q in loc.delta
               for Pm in loc.delta for Q in ssubs if not (Pm & ~Q))
    out.append(("locality/delta-overgroup-closed", bool(okov), ""))

    okfus, witf = True, ""
    for Pm in loc.delta:
        pp = indices_of(Pm, loc.s_size)
        for f in range(m):
            img = loc.SCONJ[f][pp]
            if (img >= 0).all() and mask_of(img) not in loc.delta:
                okfus, witf = False, f"element {f} moves an object out"
                break
        if not okfus:
            break
    out.append(("locality/delta-conjugation-closed", okfus, witf))

    # conjugation into S agrees with folded products both ways, is injective,
    # and is a homomorphism on S_f
    badc = ""
    pos_of_local = np.full(m, -1, dtype=np.int64)
    pos_of_local[SL] = np.arange(loc.s_size)
    for f in range(m):
        sc = loc.SCONJ[f].astype(np.int64)
        dom = np.nonzero(sc >= 0)[0]
        a = loc.PROD[int(loc.INV[f]), SL].astype(np.int64)
        good = a >= 0
        b = np.full(loc.s_size, -1, dtype=np.int64)
        b[good] = loc.PROD[a[good], f]
        fold_in_s = (b >= 0) & (pos_of_local[np.clip(b, 0, None)] >= 0)
        if (b[dom] != SL[sc[dom]]).any():
            badc = f"element {f}: conjugation disagrees with products"
            break
        if (fold_in_s & (sc < 0)).any():
            badc = f"element {f}: S_f omits a position the products keep in S"
            break
        if np.unique(sc[dom]).size != dom.size:
            badc = f"element {f}: conjugation not injective"
            break
        sub = loc.PROD[np.ix_(SL[dom], SL[dom])].astype(np.int64)
        t = np.full(sub.shape, -1, dtype=np.int64)
        okp = sub >= 0
        t[okp] = pos_of_local[sub[okp]]
        indom = (t >= 0) & np.isin(t, dom)
        if indom.any():
            lhs = SL[sc[t[indom]]]
            rhs = loc.PROD[np.ix_(SL[sc[dom]], SL[sc[dom]])][indom]
            if (lhs != rhs).any():
                badc = f"element {f}: not a homomorphism on S_f"
                break
    out.append(("locality/conj-injective-hom", not badc, badc))

    if isinstance(loc, Locality):
        G = loc.G
        okmax = True
        nl = N_L(loc, loc.s_lmask)
        for f in indices_of(nl & ~loc.s_lmask, m):
            g = int(loc.elems[int(f)])
            og = G.order_of(g)
            if og == p_part(og, loc.p):
                grown = G.subgroup_closure(loc.S_mask | (1 << g))
                inside = all(loc.lpos[int(x)] >= 0
                             for x in indices_of(grown, G.n))
                if inside and G.is_p_group_mask(grown, loc.p):
                    okmax = False
                    break
        out.append(("locality/s-maximal-p", okmax, ""))
    return out


def report_passes(report: Report) -> bool:
    return all(ok for _, ok, _ in report)


# ---------------------------------------------------------------------------
# mutants for fuzzing

MUTANT_KINDS = ("prod-entry", "prod-swap", "inv-break", "sconj-entry",
                "domain-drop", "domain-add")


def mutate_tables(loc: TablePartialGroup, rng,
                  kind: str | None = None) -> tuple[TablePartialGroup, str]:
    """One semantically effective corruption of a copied table bundle."""
    t = loc.table_copy()
    m = t.m
    if kind is None:
        kind = MUTANT_KINDS[int(rng.integers(0, len(MUTANT_KINDS)))]
    if kind == "prod-entry":
        d = np.nonzero(t.PROD >= 0)
        k = int(rng.integers(0, d[0].size))
        i, j = int(d[0][k]), int(d[1][k])
        new = int(rng.integers(0, m))
        while new == int(t.PROD[i, j]):
            new = int(rng.integers(0, m))
        t.PROD[i, j] = new
    elif kind == "prod-swap":
        d = np.nonzero(t.PROD >= 0)
        while True:
            k1, k2 = (int(x) for x in rng.integers(0, d[0].size, size=2))
            a = (int(d[0][k1]), int(d[1][k1]))
            b = (int(d[0][k2]), int(d[1][k2]))
            if t.PROD[a] != t.PROD[b]:
                t.PROD[a], t.PROD[b] = int(t.PROD[b]), int(t.PROD[a])
                break
    elif kind == "inv-break":
        a = int(rng.integers(1, m))
        new = int(rng.integers(0, m))
        while new == int(t.INV[a]):
            new = int(rng.integers(0, m))
        t.INV[a] = new
    elif kind == "sconj-entry":
        f = int(rng.integers(0, m))
        q = int(rng.integers(0, t.s_size))
        new = int(rng.integers(-1, t.s_size))
        while new == int(t.SCONJ[f, q]):
            new = int(rng.integers(-1, t.s_size))
        t.SCONJ[f, q] = new
    elif kind == "domain-drop":
        d = np.nonzero(t.PROD >= 0)
        k = int(rng.integers(0, d[0].size))
        t.PROD[int(d[0][k]), int(d[1][k])] = -1
    elif kind == "domain-add":
        u = np.nonzero(t.PROD < 0)
        if u[0].size == 0:
            return mutate_tables(loc, rng, "prod-entry")
        k = int(rng.integers(0, u[0].size))
        t.PROD[int(u[0][k]), int(u[1][k])] = int(rng.integers(0, m))
    else:
        raise ValueError(f"unknown mutant kind {kind!r}")
    return t, kind


# ---------------------------------------------------------------------------
# check suite

def lemma_suite_partial(G: FiniteGroup, p: int) -> Report:
    """Partial-group layer checks on the total locality of G, where every
    operation must coincide with its group counterpart."""
    checks: Report = []
    loc = total_locality(G, p)
    rep = check_locality(loc)
    checks.append(("partial/total-locality-axioms", report_passes(rep),
                   "; ".join(w for _, ok, w in rep if not ok)))

    whole = (1 << loc.m) - 1
    wantn = set(G.normal_subgroups_in(G.full_mask))
    gotn = {loc.ambient_of_local(N) for N in enumerate_partial_normals(loc)}
    checks.append(("partial/normals-match-group", gotn == wantn,
                   f"{len(gotn)} vs {len(wantn)}"))

    wants = set(G.subnormal_subgroups_in(G.full_mask))
    gots = {loc.ambient_of_local(N) for N in enumerate_partial_subnormals(loc)}
    checks.append(("partial/subnormals-match-group", gots == wants,
                   f"{len(gots)} vs {len(wants)}"))

    S = G.sylow_mask(p)
    okc = C_L(loc, loc.local_of_ambient(S)) == \
        loc.local_of_ambient(G.centralizer_mask(S))
    okn = N_L(loc, loc.local_of_ambient(S)) == \
        loc.local_of_ambient(G.normalizer_mask(S))
    okz = Z_L(loc) == loc.local_of_ambient(G.center_mask())
    checks.append(("partial/normalizer-centralizer-match-group",
                   okc and okn and okz, ""))

    from .fusion import GroupFusion, same_system
    FH = fusion_of_partial_subgroup(loc, whole)
    checks.append(("partial/fusion-matches-group",
                   same_system(FH, GroupFusion(G, S, None, p)), ""))

    okf, witf = True, ""
    for N in enumerate_partial_normals(loc):
        for g in range(loc.m):
            try:
                frattini_split(loc, N, g)
            except AssertionError:
                okf, witf = False, f"|N|={popcount(N)} g={g}"
                break
        if not okf:
            break
    checks.append(("partial/frattini-splits", okf, witf))

    subn = list(enumerate_partial_subnormals(loc))
    oki, witi = True, ""
    for H in subn:
        for M in subn:
            got, _ = is_partial_subnormal(loc, H & M, within=M)
            if not got:
                oki, witi = False, f"|H|={popcount(H)} |M|={popcount(M)}"
                break
        if not oki:
            break
    checks.append(("partial/subnormal-induces", oki, witi))
    return checks


def serialize_locality(loc: Locality) -> str:
    """Canonical text form: members as group elements, then the objects."""
    lines = [f"locality p={loc.p} |L|={loc.m} |S|={loc.s_size}"]
    for i in range(loc.m):
        lines.append(f"element {i}: {loc.G.element_name(int(loc.elems[i]))}")
    for k, P in enumerate(sorted(loc.delta_ambient)):
        names = ",".join(loc.G.element_name(int(x))
                         for x in indices_of(P, loc.G.n))
        lines.append(f"object {k}: {{{names}}}")
    return "\n".join(lines) + "\n"
