"""Fusion systems over a p-subgroup of a concrete ambient group.

Every system lives on the subgroups of one "over" group R inside a fixed
ambient FiniteGroup.  A morphism is stored as an int8 row of length |R| whose
i-th entry is the position (in R's sorted element list) of the image of the
i-th element, and -1 outside the domain.  Only isomorphisms onto their images
are stored; a general morphism P -> Q is an iso from P followed by an
inclusion, so hom-sets are synthesized on demand.  Conventions match
groups.py: right action, x^g = g^-1 x g, maps compose left to right.
"""
from __future__ import annotations

import hashlib
from collections import Counter

import numpy as np

from .groups import (
    CapExceeded,
    FiniteGroup,
    indices_of,
    mask_of,
    p_part,
    popcount,
)


class Frame:
    """Position bookkeeping for the over-group of one fusion system."""

    def __init__(self, G: FiniteGroup, mask: int):
        assert G.is_subgroup_mask(mask), "over-group mask is not a subgroup"
        self.G = G
        self.mask = mask
        self.idx = indices_of(mask, G.n)
        self.size = int(self.idx.size)
        self.pos = np.full(G.n, -1, dtype=np.int16)
        self.pos[self.idx] = np.arange(self.size, dtype=np.int16)

    def positions(self, mask: int) -> np.ndarray:
        return self.pos[indices_of(mask & self.mask, self.G.n)].astype(np.int64)

    def mask_of_positions(self, posarr) -> int:
        return mask_of(self.idx[np.asarray(posarr, dtype=np.int64)])


# ---------------------------------------------------------------------------
# row arithmetic

def _dom_positions(row: np.ndarray) -> np.ndarray:
    return np.nonzero(row >= 0)[0]


def _identity_row(size: int, dompos: np.ndarray) -> np.ndarray:
    row = np.full(size, -1, dtype=np.int8)
    row[dompos] = dompos.astype(np.int8)
    return row


def _compose_rows(r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    """Apply r1 then r2; the image of r1 must lie inside the domain of r2."""
    out = np.full(r1.shape, -1, dtype=np.int8)
    d = r1 >= 0
    out[d] = r2[r1[d]]
    assert (out[d] >= 0).all(), "composition undefined"
    return out


def _invert_row(row: np.ndarray) -> np.ndarray:
    out = np.full(row.shape, -1, dtype=np.int8)
    d = _dom_positions(row)
    out[row[d]] = d.astype(np.int8)
    return out


def _restrict_row(row: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """keep: boolean over positions; entries outside keep are dropped."""
    out = row.copy()
    out[~keep] = -1
    return out


def _reframe_row(src: Frame, row: np.ndarray, dst: Frame) -> np.ndarray:
    dpos = _dom_positions(row)
    xs = src.idx[dpos]
    ys = src.idx[row[dpos]]
    px = dst.pos[xs]
    py = dst.pos[ys]
    assert (px >= 0).all() and (py >= 0).all(), "row does not fit in target frame"
    out = np.full(dst.size, -1, dtype=np.int8)
    out[px] = py.astype(np.int8)
    return out


def _row_pairs_bytes(frame: Frame, row: np.ndarray) -> bytes:
    """Frame-independent form: interleaved (source, image) ambient indices."""
    dpos = _dom_positions(row)
    arr = np.empty(2 * dpos.size, dtype=np.uint16)
    arr[0::2] = frame.idx[dpos]
    arr[1::2] = frame.idx[row[dpos]]
    return arr.tobytes()


class InjHom:
    """An injective homomorphism between subgroups of a frame's over-group."""

    def __init__(self, frame: Frame, row: np.ndarray, cod_mask: int | None = None):
        self.frame = frame
        self.row = np.asarray(row, dtype=np.int8)
        im = self.im_mask
        if cod_mask is None:
            cod_mask = im
        assert (cod_mask & im) == im, "image escapes codomain"
        self.cod_mask = cod_mask

    @classmethod
    def from_mapping(cls, frame: Frame, mapping: dict[int, int],
                     cod_mask: int | None = None) -> "InjHom":
        """mapping: ambient element index -> ambient element index."""
        row = np.full(frame.size, -1, dtype=np.int8)
        for x, y in mapping.items():
            px, py = int(frame.pos[x]), int(frame.pos[y])
            assert px >= 0 and py >= 0, "mapping leaves the over-group"
            row[px] = py
        h = cls(frame, row, cod_mask)
        assert h.is_homomorphism(), "mapping is not a homomorphism"
        return h

    @property
    def dom_mask(self) -> int:
        return self.frame.mask_of_positions(_dom_positions(self.row))

    @property
    def im_mask(self) -> int:
        d = _dom_positions(self.row)
        return self.frame.mask_of_positions(self.row[d])

    def is_homomorphism(self) -> bool:
        f = self.frame
        d = _dom_positions(self.row)
        if not f.G.is_subgroup_mask(self.dom_mask):
            return False
        img = self.row[d].astype(np.int64)
        if len(set(img.tolist())) != d.size:
            return False
        lhs = self.row[f.pos[f.G.MUL[np.ix_(f.idx[d], f.idx[d])]]]
        rhs = f.pos[f.G.MUL[np.ix_(f.idx[img], f.idx[img])]]
        return bool((lhs == rhs).all())

    def __call__(self, g: int) -> int:
        p = int(self.frame.pos[g])
        q = int(self.row[p])
        assert p >= 0 and q >= 0, "element outside domain"
        return int(self.frame.idx[q])

    def restrict(self, sub_mask: int) -> "InjHom":
        keep = np.zeros(self.frame.size, dtype=bool)
        keep[self.frame.positions(sub_mask)] = True
        return InjHom(self.frame, _restrict_row(self.row, keep), self.cod_mask)

    def then(self, other: "InjHom") -> "InjHom":
        assert other.frame is self.frame
        return InjHom(self.frame, _compose_rows(self.row, other.row), other.cod_mask)

    def inverse(self) -> "InjHom":
        return InjHom(self.frame, _invert_row(self.row))

    def pairs(self) -> bytes:
        return _row_pairs_bytes(self.frame, self.row)

    def __eq__(self, other) -> bool:
        return (isinstance(other, InjHom) and self.frame.G is other.frame.G
                and self.pairs() == other.pairs())

    def __hash__(self) -> int:
        return hash(self.pairs())

    def __repr__(self) -> str:
        f = self.frame
        return f"InjHom({f.G.mask_name(self.dom_mask)} -> {f.G.mask_name(self.im_mask)})"


# ---------------------------------------------------------------------------
# fusion systems

class FusionSystem:
    """Shared interface: the stored isomorphisms are closed under restriction,
    composition and inversion; hom-sets are iso-then-inclusion."""

    def __init__(self, frame: Frame, p: int, name: str = ""):
        self.frame = frame
        self.p = p
        self.name = name
        self._isos: dict[int, dict[bytes, np.ndarray]] = {}
        self._pairs_cache: dict[int, frozenset[bytes]] = {}
        self._conj_cache: dict[int, tuple[int, ...]] = {}
        self._aut_cache: dict[int, tuple] = {}
        self._nsys_cache: dict[int, "FusionSystem"] = {}
        self._csys_cache: dict[int, "FusionSystem"] = {}
        self._subs: tuple[int, ...] | None = None
        self._eclasses: list[int] | None = None
        self._op_mask: int | None = None

    # -- basic accessors ------------------------------------------------------

    @property
    def G(self) -> FiniteGroup:
        return self.frame.G

    @property
    def over_mask(self) -> int:
        return self.frame.mask

    def subgroups(self) -> tuple[int, ...]:
        if self._subs is None:
            self._subs = tuple(self.G.all_subgroups_in(self.frame.mask, cap=4096))
        return self._subs

    def isos_from(self, P_mask: int) -> dict[bytes, np.ndarray]:
        raise NotImplementedError

    def injhoms_from(self, P_mask: int) -> list[InjHom]:
        return [InjHom(self.frame, r) for r in self.isos_from(P_mask).values()]

    def morphisms(self) -> list[InjHom]:
        out = []
        for P in self.subgroups():
            out.extend(self.injhoms_from(P))
        return out

    def hom_rows(self, P_mask: int, Q_mask: int) -> list[np.ndarray]:
        """Representatives of Hom(P, Q): isos from P whose image lies in Q."""
        f = self.frame
        out = []
        for r in self.isos_from(P_mask).values():
            d = _dom_positions(r)
            if (f.mask_of_positions(r[d]) & ~Q_mask) == 0:
                out.append(r)
        return out

    def pair_set(self, P_mask: int) -> frozenset[bytes]:
        got = self._pairs_cache.get(P_mask)
        if got is None:
            got = frozenset(_row_pairs_bytes(self.frame, r)
                            for r in self.isos_from(P_mask).values())
            self._pairs_cache[P_mask] = got
        return got

    # -- conjugacy of subgroups and elements -----------------------------------

    def conjugates(self, P_mask: int) -> tuple[int, ...]:
        got = self._conj_cache.get(P_mask)
        if got is None:
            f = self.frame
            seen = {P_mask}
            queue = [P_mask]
            while queue:
                Q = queue.pop()
                for r in self.isos_from(Q).values():
                    d = _dom_positions(r)
                    R = f.mask_of_positions(r[d])
                    if R not in seen:
                        seen.add(R)
                        queue.append(R)
            got = tuple(sorted(seen))
            for Q in got:
                self._conj_cache[Q] = got
        return got

    def classes(self) -> list[tuple[int, ...]]:
        done = set()
        out = []
        for P in self.subgroups():
            if P not in done:
                cls = self.conjugates(P)
                done.update(cls)
                out.append(cls)
        return out

    def element_classes(self) -> list[int]:
        """Orbits of over-group elements under the morphisms, as ambient masks."""
        if self._eclasses is None:
            G, f = self.G, self.frame
            seen = set()
            out = []
            for x in f.idx:
                x = int(x)
                if x in seen:
                    continue
                orbit = {x}
                queue = [x]
                while queue:
                    y = queue.pop()
                    cyc = G.subgroup_closure(1 | (1 << y))
                    py = int(f.pos[y])
                    for r in self.isos_from(cyc).values():
                        z = int(f.idx[r[py]])
                        if z not in orbit:
                            orbit.add(z)
                            queue.append(z)
                seen |= orbit
                out.append(mask_of(sorted(orbit)))
            self._eclasses = out
        return self._eclasses

    # -- normalized / centralized / automized ----------------------------------

    def n_s(self, P_mask: int) -> int:
        return self.G.normalizer_mask(P_mask, within=self.frame.mask)

    def c_s(self, P_mask: int) -> int:
        return self.G.centralizer_mask(P_mask, within=self.frame.mask)

    def is_fully_normalized(self, P_mask: int) -> bool:
        n = popcount(self.n_s(P_mask))
        return all(popcount(self.n_s(Q)) <= n for Q in self.conjugates(P_mask))

    def is_fully_centralized(self, P_mask: int) -> bool:
        c = popcount(self.c_s(P_mask))
        return all(popcount(self.c_s(Q)) <= c for Q in self.conjugates(P_mask))

    def fully_normalized_rep(self, P_mask: int) -> int:
        best = None
        for Q in self.conjugates(P_mask):
            key = (-popcount(self.n_s(Q)), Q)
            if best is None or key < best:
                best = key
        return best[1]

    def aut_order(self, P_mask: int) -> int:
        cnt = 0
        for r in self.isos_from(P_mask).values():
            d = _dom_positions(r)
            if self.frame.mask_of_positions(r[d]) == P_mask:
                cnt += 1
        return cnt

    def aut_s_local(self, P_mask: int) -> set[bytes]:
        """{c_s|_P : s in N_S(P)} as local permutations of P's positions."""
        G, f = self.G, self.frame
        Pidx = indices_of(P_mask, G.n)
        ns = indices_of(self.n_s(P_mask), G.n)
        B = f.pos[G.conj_table(Pidx, ns)]
        lp = np.full(f.size, -1, dtype=np.int16)
        dpos = f.pos[Pidx]
        lp[dpos] = np.arange(dpos.size, dtype=np.int16)
        local = lp[B].astype(np.int8)
        return {r.tobytes() for r in local}

    def is_fully_automized(self, P_mask: int) -> bool:
        return len(self.aut_s_local(P_mask)) == p_part(self.aut_order(P_mask), self.p)

    def aut_group(self, P_mask: int):
        """Aut_F(P) as (FiniteGroup on P's positions, row per element)."""
        got = self._aut_cache.get(P_mask)
        if got is None:
            f = self.frame
            Pidx = indices_of(P_mask, self.G.n)
            dpos = f.pos[Pidx]
            lp = np.full(f.size, -1, dtype=np.int16)
            lp[dpos] = np.arange(dpos.size, dtype=np.int16)
            rows = [r for r in self.isos_from(P_mask).values()
                    if f.mask_of_positions(r[_dom_positions(r)]) == P_mask]
            perms = np.array([lp[r[dpos]] for r in rows], dtype=np.int16)
            order = np.lexsort(perms.T[::-1])
            perms = perms[order]
            rows = [rows[i] for i in order]
            index = {p.tobytes(): i for i, p in enumerate(perms)}
            m = len(rows)
            MUL = np.empty((m, m), dtype=np.int16)
            for a in range(m):
                prod = perms[:, perms[a]]  # apply a then b, rowwise over b
                MUL[a] = [index[q.tobytes()] for q in prod]
            A = FiniteGroup.from_mul_table(MUL, name=f"Aut_F({self.G.mask_name(P_mask)})")
            pb = f.pos[self.G.conj_table(Pidx, Pidx)]
            inner = {lp[pb[j]].astype(np.int16).tobytes() for j in range(pb.shape[0])}
            inn_mask = mask_of([index[b] for b in inner])
            got = (A, rows, index, inn_mask)
            self._aut_cache[P_mask] = got
        return got

    # -- extension axiom machinery ---------------------------------------------

    def n_phi(self, Q_mask: int, row: np.ndarray) -> int:
        """N_phi for the iso row: Q -> P, as an ambient mask."""
        G, f = self.G, self.frame
        Qidx = indices_of(Q_mask, G.n)
        qd = f.pos[Qidx]
        target = row[qd]
        P_mask = f.mask_of_positions(target)
        Pidx = indices_of(P_mask, G.n)
        dposP = f.pos[Pidx]
        lp = np.full(f.size, -1, dtype=np.int16)
        lp[dposP] = np.arange(dposP.size, dtype=np.int16)
        auts = self.aut_s_local(P_mask)
        nsq = indices_of(self.n_s(Q_mask), G.n)
        PB = f.pos[G.conj_table(Qidx, nsq)]
        tloc = lp[target]
        vals = lp[row[PB]]
        member = []
        psi = np.empty(tloc.size, dtype=np.int8)
        for j in range(PB.shape[0]):
            psi[tloc] = vals[j]
            member.append(psi.tobytes() in auts)
        return mask_of(nsq[np.array(member, dtype=bool)])

    def extends_over(self, Q_mask: int, row: np.ndarray, R_mask: int) -> bool:
        """Does some F-morphism on R restrict to the given iso on Q <= R?"""
        qd = self.frame.positions(Q_mask)
        target = row[qd]
        for r2 in self.isos_from(R_mask).values():
            if (r2[qd] == target).all():
                return True
        return False

    def is_receptive(self, P_mask: int):
        for Q in self.conjugates(P_mask):
            for r in self.isos_from(Q).values():
                d = _dom_positions(r)
                if self.frame.mask_of_positions(r[d]) != P_mask:
                    continue
                N = self.n_phi(Q, r)
                assert self.G.is_subgroup_mask(N)
                if not self.extends_over(Q, r, N):
                    return False, (Q, r, N)
        return True, None


class GroupFusion(FusionSystem):
    """F_R(A): all conjugation maps c_a (a in the acting subgroup A) between
    subgroups of R, computed lazily from transporters."""

    def __init__(self, G: FiniteGroup, over_mask: int, actors_mask: int | None = None,
                 p: int | None = None, name: str = ""):
        super().__init__(Frame(G, over_mask), p, name)
        self.actors_mask = G.full_mask if actors_mask is None else actors_mask
        assert G.is_subgroup_mask(self.actors_mask)
        assert (over_mask & ~self.actors_mask) == 0, "over-group must sit inside the actors"
        self._actors_idx = indices_of(self.actors_mask, G.n)

    def isos_from(self, P_mask: int) -> dict[bytes, np.ndarray]:
        got = self._isos.get(P_mask)
        if got is None:
            G, f = self.G, self.frame
            Pidx = indices_of(P_mask, G.n)
            tb = G.transporter_bits(Pidx, f.mask, self._actors_idx)
            acts = self._actors_idx[tb]
            prows = f.pos[G.conj_table(Pidx, acts)].astype(np.int8)
            uniq = np.unique(prows, axis=0)
            dpos = f.pos[Pidx]
            R = np.full((uniq.shape[0], f.size), -1, dtype=np.int8)
            R[:, dpos] = uniq
            got = {r.tobytes(): r for r in R}
            self._isos[P_mask] = got
        return got


class TableFusion(FusionSystem):
    """Fusion system given by an explicit table of isomorphism rows."""

    def __init__(self, frame: Frame, p: int, isos_by_dom: dict[int, dict[bytes, np.ndarray]],
                 name: str = ""):
        super().__init__(frame, p, name)
        self._isos = isos_by_dom

    def isos_from(self, P_mask: int) -> dict[bytes, np.ndarray]:
        got = self._isos.get(P_mask)
        if got is None:
            row = _identity_row(self.frame.size, self.frame.positions(P_mask))
            got = {row.tobytes(): row}
            self._isos[P_mask] = got
        return got


# ---------------------------------------------------------------------------
# constructors

def fusion_of_group(G: FiniteGroup, S_mask: int | None = None, p: int | None = None,
                    name: str = "") -> GroupFusion:
    if p is None:
        p = getattr(G, "spec_prime", None)
        if p is None:
            raise ValueError("no prime given and none recorded on the group")
    if S_mask is None:
        S_mask = G.sylow_mask(p)
    if p_part(G.n, p) != popcount(S_mask) or not G.is_p_group_mask(S_mask, p):
        raise ValueError("S is not a Sylow p-subgroup of G")
    return GroupFusion(G, S_mask, None, p, name=name or f"F_S({G.name})")


def fusion_of_subgroup(G: FiniteGroup, over_mask: int, actors_mask: int,
                       p: int) -> GroupFusion:
    """F_T(H) for a subgroup H of the ambient group, T = over_mask <= H."""
    assert (over_mask & ~actors_mask) == 0
    return GroupFusion(G, over_mask, actors_mask, p)


def generate(G: FiniteGroup, over_mask: int, p: int, homs,
             name: str = "", cap: int = 500_000) -> TableFusion:
    """Least fixpoint containing the given maps and all inclusions, closed
    under restriction, composition, and inversion of isos onto images."""
    frame = Frame(G, over_mask)
    subs = G.all_subgroups_in(over_mask, cap=4096)
    below: dict[int, list[int]] = {}

    def maximals(P: int) -> list[int]:
        got = below.get(P)
        if got is None:
            inside = [M for M in subs if M != P and (M & ~P) == 0]
            got = [M for M in inside
                   if not any(M != M2 and (M & ~M2) == 0 for M2 in inside)]
            below[P] = got
        return got

    all_rows: dict[bytes, tuple[np.ndarray, int, int]] = {}
    by_dom: dict[int, set[bytes]] = {}
    by_im: dict[int, set[bytes]] = {}
    queue: list[bytes] = []

    def add(row: np.ndarray):
        b = row.tobytes()
        if b in all_rows:
            return
        if len(all_rows) >= cap:
            raise CapExceeded(f"generated fusion system exceeds {cap} morphisms")
        d = _dom_positions(row)
        dom = frame.mask_of_positions(d)
        im = frame.mask_of_positions(row[d])
        all_rows[b] = (row, dom, im)
        by_dom.setdefault(dom, set()).add(b)
        by_im.setdefault(im, set()).add(b)
        queue.append(b)

    for P in subs:
        add(_identity_row(frame.size, frame.positions(P)))
    for h in homs:
        if isinstance(h, InjHom):
            row = h.row if h.frame.idx.shape == frame.idx.shape and (h.frame.idx == frame.idx).all() \
                else _reframe_row(h.frame, h.row, frame)
        else:
            row = np.asarray(h, dtype=np.int8)
        hom = InjHom(frame, row)
        assert hom.is_homomorphism(), "generator is not an injective homomorphism"
        add(row)

    keepbuf = np.zeros(frame.size, dtype=bool)
    while queue:
        b = queue.pop()
        row, dom, im = all_rows[b]
        add(_invert_row(row))
        for M in maximals(dom):
            keepbuf[:] = False
            keepbuf[frame.positions(M)] = True
            add(_restrict_row(row, keepbuf))
        for c in list(by_dom.get(im, ())):
            add(_compose_rows(row, all_rows[c][0]))
        for c in list(by_im.get(dom, ())):
            add(_compose_rows(all_rows[c][0], row))

    isos: dict[int, dict[bytes, np.ndarray]] = {}
    for b, (row, dom, _) in all_rows.items():
        isos.setdefault(dom, {})[b] = row
    return TableFusion(frame, p, isos, name=name)


def trivial_system(G: FiniteGroup, T_mask: int, p: int) -> TableFusion:
    return generate(G, T_mask, p, [])


# ---------------------------------------------------------------------------
# system-level operations

def same_system(F1: FusionSystem, F2: FusionSystem) -> bool:
    if F1.G is not F2.G or F1.over_mask != F2.over_mask:
        return False
    for P in F1.subgroups():
        if set(F1.isos_from(P).keys()) != set(F2.isos_from(P).keys()):
            return False
    return True


def is_subsystem(E: FusionSystem, F: FusionSystem) -> bool:
    if E.G is not F.G or (E.over_mask & ~F.over_mask):
        return False
    for P in E.subgroups():
        if not E.pair_set(P) <= F.pair_set(P):
            return False
    return True


def digest(F: FusionSystem) -> str:
    h = hashlib.sha256()
    h.update(F.over_mask.to_bytes((F.G.n + 7) // 8, "little"))
    for P in F.subgroups():
        for b in sorted(F.pair_set(P)):
            h.update(b)
    return h.hexdigest()


def restrict(F: FusionSystem, T_mask: int) -> FusionSystem:
    """Full subcategory on the subgroups of T."""
    assert (T_mask & ~F.over_mask) == 0
    if isinstance(F, GroupFusion):
        return GroupFusion(F.G, T_mask, F.actors_mask, F.p,
                           name=f"{F.name}|T" if F.name else "")
    frame = Frame(F.G, T_mask)
    isos: dict[int, dict[bytes, np.ndarray]] = {}
    for P in F.G.all_subgroups_in(T_mask, cap=4096):
        sub = {}
        for r in F.isos_from(P).values():
            d = _dom_positions(r)
            if (F.frame.mask_of_positions(r[d]) & ~T_mask) == 0:
                r2 = _reframe_row(F.frame, r, frame)
                sub[r2.tobytes()] = r2
        isos[P] = sub
    return TableFusion(frame, F.p, isos)


def conjugate_system(E: FusionSystem, phi: InjHom) -> TableFusion:
    """E^phi over the image of phi; morphism sets transported through phi."""
    assert phi.frame.G is E.G and phi.dom_mask == E.over_mask
    G = E.G
    amb = np.full(G.n, -1, dtype=np.int64)
    dpos = _dom_positions(phi.row)
    amb[phi.frame.idx[dpos]] = phi.frame.idx[phi.row[dpos]]
    frame2 = Frame(G, phi.im_mask)
    isos: dict[int, dict[bytes, np.ndarray]] = {}
    for P in E.subgroups():
        P2 = mask_of(amb[indices_of(P, G.n)])
        sub = {}
        for r in E.isos_from(P).values():
            d = _dom_positions(r)
            xs = amb[E.frame.idx[d]]
            ys = amb[E.frame.idx[r[d]]]
            row = np.full(frame2.size, -1, dtype=np.int8)
            row[frame2.pos[xs]] = frame2.pos[ys].astype(np.int8)
            sub[row.tobytes()] = row
        isos[P2] = sub
    return TableFusion(frame2, E.p, isos, name=f"{E.name}^phi" if E.name else "")


def _group_isos(G1: FiniteGroup, m1: int, G2: FiniteGroup, m2: int,
                limit: int | None = None) -> list[np.ndarray]:
    """Group isomorphisms m1 -> m2 as arrays over G1.n (-1 outside m1)."""
    idx1 = indices_of(m1, G1.n)
    idx2 = indices_of(m2, G2.n)
    if idx1.size != idx2.size:
        return []
    o1, o2 = G1.orders(), G2.orders()
    if Counter(o1[idx1].tolist()) != Counter(o2[idx2].tolist()):
        return []
    gens = G1.gens_of_mask(m1)
    results: list[np.ndarray] = []

    def propagate(fmap: dict[int, int]):
        fmap = dict(fmap)
        queue = list(fmap.items())
        while queue:
            a, fa = queue.pop()
            for b, fb in list(fmap.items()):
                for x, y in ((G1.mul(a, b), G2.mul(fa, fb)),
                             (G1.mul(b, a), G2.mul(fb, fa))):
                    got = fmap.get(x)
                    if got is None:
                        if o1[x] != o2[y]:
                            return None
                        fmap[x] = y
                        queue.append((x, y))
                    elif got != y:
                        return None
        if len(set(fmap.values())) != len(fmap):
            return None
        return fmap

    def rec(i: int, fmap: dict[int, int]):
        if limit is not None and len(results) >= limit:
            return
        if i == len(gens):
            assert len(fmap) == idx1.size, "generators did not span the subgroup"
            f = np.full(G1.n, -1, dtype=np.int64)
            for a, fa in fmap.items():
                f[a] = fa
            results.append(f)
            return
        g = gens[i]
        for c in idx2[o2[idx2] == o1[g]]:
            nf = propagate({**fmap, g: int(c)})
            if nf is not None:
                rec(i + 1, nf)

    rec(0, {0: 0})
    return results


def aut_of_system(F: FusionSystem) -> list[InjHom]:
    """Automorphisms alpha of the over-group with F^alpha = F."""
    out = []
    for f in _group_isos(F.G, F.over_mask, F.G, F.over_mask):
        phi = InjHom.from_mapping(F.frame, {int(x): int(f[x]) for x in F.frame.idx})
        if _preserves(F, phi):
            out.append(phi)
    return out


def _preserves(F: FusionSystem, phi: InjHom) -> bool:
    G = F.G
    amb = np.full(G.n, -1, dtype=np.int64)
    dpos = _dom_positions(phi.row)
    amb[F.frame.idx[dpos]] = F.frame.idx[phi.row[dpos]]
    for P in F.subgroups():
        P2 = mask_of(amb[indices_of(P, G.n)])
        want = set()
        for r in F.isos_from(P).values():
            d = _dom_positions(r)
            xs = amb[F.frame.idx[d]]
            ys = amb[F.frame.idx[r[d]]]
            row = np.full(F.frame.size, -1, dtype=np.int8)
            row[F.frame.pos[xs]] = F.frame.pos[ys].astype(np.int8)
            want.add(row.tobytes())
        if want != set(F.isos_from(P2).keys()):
            return False
    return True


def n_s_of(F: FusionSystem, E: FusionSystem) -> int:
    """N_S(E) = {s in N_S(T) : c_s|_T is an automorphism of E}."""
    T = E.over_mask
    G = F.G
    out = []
    for s in indices_of(F.n_s(T), G.n):
        s = int(s)
        mapping = {int(x): G.conj(int(x), s) for x in indices_of(T, G.n)}
        phi = InjHom.from_mapping(E.frame, mapping)
        if _preserves(E, phi):
            out.append(s)
    mask = mask_of(out)
    assert G.is_subgroup_mask(mask), "N_S(E) failed to be a subgroup"
    return mask


# ---------------------------------------------------------------------------
# saturation

def saturation_report(F: FusionSystem) -> dict:
    classes = []
    ok_all = True
    for cls in F.classes():
        fn = tuple(P for P in cls if F.is_fully_normalized(P))
        fc = tuple(P for P in cls if F.is_fully_centralized(P))
        fa = tuple(P for P in cls if F.is_fully_automized(P))
        member = None
        witnesses = []
        for P in fa:
            rec, w = F.is_receptive(P)
            if rec:
                member = P
                break
            witnesses.append((P, w[0], w[2]))
        if member is None:
            ok_all = False
        classes.append({
            "members": cls,
            "fully_normalized": fn,
            "fully_centralized": fc,
            "fully_automized": fa,
            "automized_receptive_member": member,
            "extension_witnesses": witnesses,
        })
    return {"is_saturated": ok_all, "classes": classes}


# ---------------------------------------------------------------------------
# closed subgroups, invariance, normality

def strongly_closed(F: FusionSystem, T_mask: int) -> bool:
    assert (T_mask & ~F.over_mask) == 0
    for cls in F.element_classes():
        if (cls & T_mask) and (cls & ~T_mask):
            return False
    return True


def _aut_rows_of(F: FusionSystem, T_mask: int) -> list[np.ndarray]:
    f = F.frame
    return [r for r in F.isos_from(T_mask).values()
            if f.mask_of_positions(r[_dom_positions(r)]) == T_mask]


def _sub_pairsets(E: FusionSystem) -> dict[int, frozenset[bytes]]:
    return {P: E.pair_set(P) for P in E.subgroups()}


def is_weakly_invariant(F: FusionSystem, E: FusionSystem) -> bool:
    T = E.over_mask
    if (T & ~F.over_mask) or not is_subsystem(E, F):
        return False
    if not strongly_closed(F, T):
        return False
    ep = _sub_pairsets(E)
    G = F.G
    for a in _aut_rows_of(F, T):
        amb = np.full(G.n, -1, dtype=np.int64)
        d = _dom_positions(a)
        amb[F.frame.idx[d]] = F.frame.idx[a[d]]
        for P, pairs in ep.items():
            P2 = mask_of(amb[indices_of(P, G.n)])
            moved = set()
            for b in pairs:
                arr = np.frombuffer(b, dtype=np.uint16).astype(np.int64)
                src, img = amb[arr[0::2]], amb[arr[1::2]]
                order = np.argsort(src)  # restore the canonical source order
                out = np.empty_like(arr)
                out[0::2] = src[order]
                out[1::2] = img[order]
                moved.add(out.astype(np.uint16).tobytes())
            if moved != set(ep.get(P2, frozenset())):
                return False
    return True


def is_invariant(F: FusionSystem, E: FusionSystem) -> bool:
    """Strong closure + stability under Aut_F(T) + the Frattini factorization."""
    T = E.over_mask
    if not is_weakly_invariant(F, E):
        return False
    auts = _aut_rows_of(F, T)
    tkeep = np.zeros(F.frame.size, dtype=bool)
    tkeep[F.frame.positions(T)] = True
    ep = _sub_pairsets(E)
    for P in F.G.all_subgroups_in(T, cap=4096):
        target = ep[P]
        for r in F.isos_from(P).values():
            d = _dom_positions(r)
            if F.frame.mask_of_positions(r[d]) & ~T:
                continue
            if not any(_row_pairs_bytes(F.frame, _compose_rows(r, _invert_row(a))) in target
                       for a in auts):
                return False
    return True


def is_normal_subsystem(F: FusionSystem, E: FusionSystem) -> bool:
    T = E.over_mask
    if not saturation_report(E)["is_saturated"]:
        return False
    if not is_invariant(F, E):
        return False
    # extension condition: every alpha in Aut_E(T) has an extension to T C_S(T)
    # that acts on C_S(T) with commutators inside Z(T)
    G = F.G
    CS = F.c_s(T)
    TCS = G.product_mask(T, CS)
    assert G.is_subgroup_mask(TCS)
    Z = G.center_mask(within=T)
    tpos = F.frame.positions(T)
    cs_pos = F.frame.positions(CS)
    cs_idx = F.frame.idx[cs_pos]
    for a in _aut_rows_of(E, T):
        aF = _reframe_row(E.frame, a, F.frame)
        found = False
        for r in F.isos_from(TCS).values():
            d = _dom_positions(r)
            if F.frame.mask_of_positions(r[d]) != TCS:
                continue
            if not (r[tpos] == aF[tpos]).all():
                continue
            imgs = F.frame.idx[r[cs_pos]]
            comm = G.MUL[G.INV[cs_idx], imgs]
            if all((Z >> int(c)) & 1 for c in comm):
                found = True
                break
        if not found:
            return False
    return True


def group_subsystems(F: GroupFusion) -> list[tuple[int, GroupFusion]]:
    """F_{S cap H}(H) for every H subnormal in the acting group."""
    out = []
    G = F.G
    for H in sorted(G.subnormal_subgroups_in(F.actors_mask)):
        T = F.over_mask & H
        assert popcount(T) == p_part(popcount(H), F.p), "S cap H is not Sylow in H"
        out.append((H, GroupFusion(G, T, H, F.p)))
    return out


def is_subnormal_subsystem(F: FusionSystem, E: FusionSystem, pool=()):
    """Chain search through a finite candidate pool (harvested realizer
    subsystems plus any supplied extras); completeness is not claimed."""
    if same_system(E, F):
        return True, [F]
    candidates: list[FusionSystem] = [F, E]
    if isinstance(F, GroupFusion):
        candidates.extend(sys for _, sys in group_subsystems(F))
    candidates.extend(pool)
    nodes: list[FusionSystem] = []
    seen: set[str] = set()
    for X in candidates:
        dg = digest(X)
        if dg not in seen:
            seen.add(dg)
            nodes.append(X)
    target = digest(E)
    start = digest(F)
    frontier = [(start, [F])]
    visited = {start}
    while frontier:
        dg, chain = frontier.pop(0)
        X = chain[-1]
        for Y in nodes:
            dy = digest(Y)
            if dy in visited or popcount(Y.over_mask) > popcount(X.over_mask):
                continue
            if not is_subsystem(Y, X):
                continue
            if is_normal_subsystem(X, Y):
                nc = chain + [Y]
                if dy == target:
                    return True, nc
                visited.add(dy)
                frontier.append((dy, nc))
    return False, []


# ---------------------------------------------------------------------------
# normal subgroups of a system, classes record

def is_normal_in_system(F: FusionSystem, Q_mask: int) -> bool:
    """Q normal in F: strongly closed and every iso extends Q-stably."""
    G, f = F.G, F.frame
    if G.normalizer_mask(Q_mask, within=F.over_mask) != F.over_mask:
        return False
    if not strongly_closed(F, Q_mask):
        return False
    qpos = f.positions(Q_mask)
    qset = set(qpos.tolist())
    for P in F.subgroups():
        PQ = G.product_mask(P, Q_mask)
        exts = []
        for r in F.isos_from(PQ).values():
            if set(r[qpos].tolist()) == qset:
                exts.append(r)
        ppos = f.positions(P)
        have = {r2[ppos].tobytes() for r2 in exts}
        for r in F.isos_from(P).values():
            if r[ppos].tobytes() not in have:
                return False
    return True


def O_p_of(F: FusionSystem) -> int:
    if F._op_mask is None:
        best = 1
        for N in sorted(F.G.normal_subgroups_in(F.over_mask), key=popcount, reverse=True):
            if popcount(N) <= popcount(best):
                continue
            if strongly_closed(F, N) and is_normal_in_system(F, N):
                best = N
                break
        F._op_mask = best
    return F._op_mask


def center_of(F: FusionSystem) -> int:
    """Z(F): elements whose fusion class is a singleton."""
    fixed = [cls for cls in F.element_classes() if popcount(cls) == 1]
    mask = 1
    for cls in fixed:
        mask |= cls
    if F.G.is_subgroup_mask(mask):
        return mask
    best = 1
    for P in F.subgroups():
        if (P & ~mask) == 0 and popcount(P) > popcount(best):
            best = P
    return best


def normalizer_system(F: FusionSystem, Q_mask: int) -> FusionSystem:
    """N_F(Q): maps that extend to Q-stabilizing maps on PQ."""
    got = F._nsys_cache.get(Q_mask)
    if got is not None:
        return got
    G = F.G
    NS = F.n_s(Q_mask)
    if isinstance(F, GroupFusion):
        NA = G.normalizer_mask(Q_mask, within=F.actors_mask)
        got = GroupFusion(G, NS, NA, F.p)
    else:
        frame = Frame(G, NS)
        qpos = F.frame.positions(Q_mask)
        qset = set(qpos.tolist())
        isos: dict[int, dict[bytes, np.ndarray]] = {}
        for P in G.all_subgroups_in(NS, cap=4096):
            PQ = G.product_mask(P, Q_mask)
            ppos = F.frame.positions(P)
            sub = {}
            for r in F.isos_from(PQ).values():
                if set(r[qpos].tolist()) != qset:
                    continue
                keep = np.zeros(F.frame.size, dtype=bool)
                keep[ppos] = True
                r2 = _reframe_row(F.frame, _restrict_row(r, keep), frame)
                sub[r2.tobytes()] = r2
            isos[P] = sub
        got = TableFusion(frame, F.p, isos)
    F._nsys_cache[Q_mask] = got
    return got


def centralizer_system(F: FusionSystem, Q_mask: int) -> FusionSystem:
    """C_F(Q): maps that extend to maps on PQ fixing Q pointwise."""
    got = F._csys_cache.get(Q_mask)
    if got is not None:
        return got
    G = F.G
    CS = F.c_s(Q_mask)
    if isinstance(F, GroupFusion):
        CA = G.centralizer_mask(Q_mask, within=F.actors_mask)
        got = GroupFusion(G, CS, CA, F.p)
    else:
        frame = Frame(G, CS)
        qpos = F.frame.positions(Q_mask)
        isos: dict[int, dict[bytes, np.ndarray]] = {}
        for P in G.all_subgroups_in(CS, cap=4096):
            PQ = G.product_mask(P, Q_mask)
            assert G.is_subgroup_mask(PQ)
            ppos = F.frame.positions(P)
            sub = {}
            for r in F.isos_from(PQ).values():
                if not (r[qpos] == qpos).all():
                    continue
                keep = np.zeros(F.frame.size, dtype=bool)
                keep[ppos] = True
                r2 = _reframe_row(F.frame, _restrict_row(r, keep), frame)
                sub[r2.tobytes()] = r2
            isos[P] = sub
        got = TableFusion(frame, F.p, isos)
    F._csys_cache[Q_mask] = got
    return got


def is_constrained(F: FusionSystem) -> bool:
    if (isinstance(F, GroupFusion)
            and popcount(F.over_mask) == p_part(popcount(F.actors_mask), F.p)
            and F.G.is_characteristic_p_in(F.actors_mask, F.p)):
        # O_p of the acting group is normal in F and already swallows its
        # centralizer, so the centric test below would succeed
        return True
    Q = O_p_of(F)
    return (F.c_s(Q) & ~Q) == 0


def subgroup_classes(F: FusionSystem) -> dict:
    centric = []
    radical_centric = []
    subcentric = []
    for cls in F.classes():
        if all((F.c_s(Q) & ~Q) == 0 for Q in cls):
            centric.extend(cls)
            rep = F.fully_normalized_rep(cls[0])
            A, _, _, inn_mask = F.aut_group(rep)
            if A.O_p_in(A.full_mask, F.p) == inn_mask:
                radical_centric.extend(cls)
        rep = F.fully_normalized_rep(cls[0])
        if is_constrained(normalizer_system(F, rep)):
            subcentric.extend(cls)
    op = O_p_of(F)
    return {
        "centric": tuple(sorted(centric)),
        "radical_centric": tuple(sorted(radical_centric)),
        "subcentric": tuple(sorted(subcentric)),
        "constrained": (F.c_s(op) & ~op) == 0,
        "O_p": op,
        "Z": center_of(F),
    }


def O_p_via_radicals(F: FusionSystem) -> int:
    """Independent route: intersection of the centric radical subgroups."""
    out = None
    for R in subgroup_classes(F)["radical_centric"]:
        out = R if out is None else out & R
    assert out is not None
    return out


# ---------------------------------------------------------------------------
# focal machinery

def focal_mask(F: FusionSystem) -> int:
    G = F.G
    gens = set()
    for cls in F.element_classes():
        idx = indices_of(cls, G.n)
        x0 = int(idx[0])
        for y in idx:
            gens.add(G.mul(G.inv(x0), int(y)))
    return G.subgroup_closure(mask_of(gens) | 1)


def hyperfocal_mask(F: FusionSystem) -> int:
    G = F.G
    gens = set()
    for P in F.subgroups():
        A, rows, _, _ = F.aut_group(P)
        op = A.O_upper_p_in(A.full_mask, F.p)
        dpos = _dom_positions(rows[0]) if rows else np.empty(0, dtype=np.int64)
        for e in indices_of(op, A.n):
            r = rows[int(e)]
            for d in dpos:
                x = int(F.frame.idx[d])
                y = int(F.frame.idx[r[d]])
                gens.add(G.mul(G.inv(x), y))
    return G.subgroup_closure(mask_of(gens) | 1)


def p_power_index_subsystem(F: FusionSystem, R_mask: int) -> TableFusion:
    """The subsystem over R generated by the O^p(Aut_F(P)) together with the
    conjugation maps of R itself."""
    hyp = hyperfocal_mask(F)
    if (hyp & ~R_mask) or (R_mask & ~F.over_mask):
        raise ValueError("R must sit between hyp(F) and S")
    G = F.G
    gens: list[np.ndarray] = []
    frame = Frame(G, R_mask)
    for P in G.all_subgroups_in(R_mask, cap=4096):
        A, rows, _, _ = F.aut_group(P)
        op = A.O_upper_p_in(A.full_mask, F.p)
        for e in indices_of(op, A.n):
            gens.append(_reframe_row(F.frame, rows[int(e)], frame))
    Ridx = indices_of(R_mask, G.n)
    prows = frame.pos[G.conj_table(Ridx, Ridx)].astype(np.int8)
    for j in range(prows.shape[0]):
        row = np.full(frame.size, -1, dtype=np.int8)
        row[frame.pos[Ridx]] = prows[j]
        gens.append(row)
    return generate(G, R_mask, F.p, gens)


def o_upper_p_system(F: FusionSystem) -> TableFusion:
    return p_power_index_subsystem(F, hyperfocal_mask(F))


# ---------------------------------------------------------------------------
# models

def _transported_equal(FH: GroupFusion, f: np.ndarray, F: FusionSystem) -> bool:
    """Does the identification f (candidate ambient -> F ambient) carry FH to F?"""
    G2 = F.G
    finv = np.full(G2.n, -1, dtype=np.int64)
    dom = np.nonzero(f >= 0)[0]
    finv[f[dom]] = dom
    for P2 in F.subgroups():
        P1 = mask_of(finv[indices_of(P2, G2.n)])
        want = set()
        for r in FH.isos_from(P1).values():
            d = _dom_positions(r)
            xs = f[FH.frame.idx[d]]
            ys = f[FH.frame.idx[r[d]]]
            row = np.full(F.frame.size, -1, dtype=np.int8)
            row[F.frame.pos[xs]] = F.frame.pos[ys].astype(np.int8)
            want.add(row.tobytes())
        if want != set(F.isos_from(P2).keys()):
            return False
    return True


def models(F: FusionSystem, candidates) -> list[tuple[FiniteGroup, np.ndarray]]:
    """Candidate groups of characteristic p realizing F, with identifications
    (arrays mapping the candidate's Sylow elements into F's ambient group)."""
    out = []
    for H in candidates:
        if not H.is_characteristic_p_in(H.full_mask, F.p):
            continue
        if isinstance(F, GroupFusion) and H is F.G and F.actors_mask == F.G.full_mask:
            ident = np.full(H.n, -1, dtype=np.int64)
            sidx = F.frame.idx
            ident[sidx] = sidx
            out.append((H, ident))
            continue
        SH = H.sylow_mask(F.p)
        FH = GroupFusion(H, SH, None, F.p)
        for f in _group_isos(H, SH, F.G, F.over_mask):
            if _transported_equal(FH, f, F):
                out.append((H, f))
                break
    return out


# ---------------------------------------------------------------------------
# check suite

def _relabeled_copy(G: FiniteGroup) -> FiniteGroup:
    """The same abstract group on cyclically shifted points."""
    d = G.degree
    shift = np.roll(np.arange(d), 1)
    inv = np.argsort(shift)
    perms = [tuple(int(shift[g[inv[i]]]) for i in range(d))
             for g in (tuple(G.perms[j]) for j in G.gen_idx)]
    return FiniteGroup.from_generators(perms, d, name=f"{G.name}~")


def lemma_suite_fusion_core(G: FiniteGroup, p: int) -> list[tuple[str, bool, str]]:
    checks: list[tuple[str, bool, str]] = []
    S = G.sylow_mask(p)
    F = fusion_of_group(G, S, p)
    subs = group_subsystems(F)

    rep = saturation_report(F)
    checks.append(("fusion/group-fusion-saturated", rep["is_saturated"],
                   f"|S|={popcount(S)} classes={len(rep['classes'])}"))

    regen = generate(G, S, p, F.morphisms())
    checks.append(("fusion/closure-idempotent", same_system(regen, F),
                   f"morphisms={sum(len(F.isos_from(P)) for P in F.subgroups())}"))

    ok_a = True
    wit_a = ""
    ok_b = True
    wit_b = ""
    for H, E in subs:
        inv = is_invariant(F, E)
        winv = is_weakly_invariant(F, E)
        if inv and not winv:
            ok_a = False
            wit_a = f"H={G.mask_name(H)}"
        T = E.over_mask
        if strongly_closed(F, T) and winv:
            gen = generate(G, T, p,
                           E.morphisms() + [InjHom(F.frame, a) for a in _aut_rows_of(F, T)])
            if inv != same_system(restrict(F, T), gen):
                ok_b = False
                wit_b = f"H={G.mask_name(H)}"
    checks.append(("fusion/invariant-implies-weakly", ok_a, wit_a or f"{len(subs)} subsystems"))
    checks.append(("fusion/invariant-vs-generated", ok_b, wit_b or f"{len(subs)} subsystems"))

    cls = subgroup_classes(F)
    dual = O_p_via_radicals(F)
    checks.append(("fusion/op-equals-radical-intersection", cls["O_p"] == dual,
                   f"O_p={G.mask_name(cls['O_p'])}"))

    ok_cr = True
    wit_cr = ""
    for H, E in subs:
        sub_ok, _ = is_subnormal_subsystem(F, E)
        if not sub_ok:
            continue
        ecr = subgroup_classes(E)["radical_centric"]
        for R in cls["radical_centric"]:
            if (R & E.over_mask) not in ecr:
                ok_cr = False
                wit_cr = f"R={G.mask_name(R)} H={G.mask_name(H)}"
    checks.append(("fusion/centric-radical-meets-subnormal", ok_cr,
                   wit_cr or f"{len(cls['radical_centric'])} radicals"))

    ok_m = True
    wit_m = ""
    if is_constrained(F):
        G2 = _relabeled_copy(G)
        found = models(F, [G2])
        if not found:
            ok_m = False
            wit_m = "no identification found for the relabeled copy"
        else:
            H2, ident = found[0]
            inv_map = np.full(F.G.n, -1, dtype=np.int64)
            dom = np.nonzero(ident >= 0)[0]
            inv_map[ident[dom]] = dom
            S2 = mask_of(dom)
            for Hm, E in subs:
                T = E.over_mask
                NS = G.normalizer_mask(Hm, within=S)
                NG = G.normalizer_mask(Hm)
                lhs = GroupFusion(G, NS, NG, p)
                # matched realizer on the relabeled side
                T2 = mask_of(inv_map[indices_of(T, G.n)])
                match = None
                for Hq in sorted(H2.subnormal_subgroups_in(H2.full_mask)):
                    Tq = Hq & S2
                    if Tq != T2:
                        continue
                    Eq = GroupFusion(H2, Tq, Hq, p)
                    if _transported_equal(Eq, ident, E):
                        match = Hq
                        break
                if match is None:
                    ok_m = False
                    wit_m = f"no matched realizer for H={G.mask_name(Hm)}"
                    break
                NS2 = H2.normalizer_mask(match, within=S2)
                NG2 = H2.normalizer_mask(match)
                rhs = GroupFusion(H2, NS2, NG2, p)
                if not _transported_equal(rhs, ident, lhs):
                    ok_m = False
                    wit_m = f"normalizer fusion differs at H={G.mask_name(Hm)}"
                    break
    checks.append(("fusion/normalizer-model-agreement", ok_m, wit_m or "constrained path"))
    return checks
