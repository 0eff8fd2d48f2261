"""Finite permutation groups with dense multiplication tables.

Everything downstream (fusion systems, partial groups, localities) works over a
fixed ambient group: elements are indices 0..n-1 (identity is always index 0),
subgroups and subsets are Python-int bitmasks over those indices, and the hot
loops are numpy gathers over the n x n multiplication table.  The table fits
comfortably for every catalog instance (caps keep n <= 5040).

Conventions:
  * permutations act on the right; mul(a, b) means "apply a, then b",
    so as image tuples (a*b)[i] = b[a[i]].
  * conjugation x^g = g^-1 x g.
  * element order is lexicographic on permutation image tuples, which puts the
    identity at index 0.
"""

from __future__ import annotations

import numpy as np

DEGREE_CAP = 64
ORDER_CAP_DEFAULT = 5040


class GroupSpecError(ValueError):
    """Malformed group-spec text."""


class CapExceeded(RuntimeError):
    """A configured size cap (order, degree, lattice, locality) was exceeded."""


# ---------------------------------------------------------------------------
# bitmask helpers (subgroups/subsets are Python ints, bit i = element index i)

def mask_from_bits(bits: np.ndarray) -> int:
    return int.from_bytes(np.packbits(bits.astype(bool), bitorder="little").tobytes(), "little")


def bits_from_mask(mask: int, n: int) -> np.ndarray:
    nbytes = (n + 7) // 8
    raw = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


def indices_of(mask: int, n: int) -> np.ndarray:
    return np.nonzero(bits_from_mask(mask, n))[0]


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def _membership(indices: np.ndarray, n: int) -> np.ndarray:
    bits = np.zeros(n, dtype=bool)
    bits[indices] = True
    return bits


# ---------------------------------------------------------------------------
# group-spec parsing

def parse_group_spec(text: str):
    """Parse group-spec text -> (degree, prime-or-None, list of 0-based image tuples).

    Grammar: line 1 `degree N`; optional line `prime p`; every other non-empty,
    non-comment line is one generator given as N space-separated images of 1..N.
    `#` starts a comment.
    """
    degree = None
    prime = None
    perms: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if degree is None:
            if parts[0] != "degree" or len(parts) != 2 or not parts[1].isdigit():
                raise GroupSpecError(f"line {lineno}: expected 'degree N'")
            degree = int(parts[1])
            if degree < 1:
                raise GroupSpecError(f"line {lineno}: degree must be positive")
            if degree > DEGREE_CAP:
                raise CapExceeded(f"degree {degree} exceeds cap {DEGREE_CAP}")
            continue
        if parts[0] == "prime":
            if prime is not None or len(parts) != 2 or not parts[1].isdigit():
                raise GroupSpecError(f"line {lineno}: bad 'prime p' line")
            prime = int(parts[1])
            if prime < 2 or any(prime % d == 0 for d in range(2, int(prime ** 0.5) + 1)):
                raise GroupSpecError(f"line {lineno}: {prime} is not prime")
            continue
        if len(parts) != degree:
            raise GroupSpecError(f"line {lineno}: expected {degree} images, got {len(parts)}")
        try:
            images = tuple(int(x) - 1 for x in parts)
        except ValueError:
            raise GroupSpecError(f"line {lineno}: non-integer image") from None
        if sorted(images) != list(range(degree)):
            raise GroupSpecError(f"line {lineno}: not a permutation of 1..{degree}")
        perms.append(images)
    if degree is None:
        raise GroupSpecError("empty spec: missing 'degree N' line")
    return degree, prime, perms


# ---------------------------------------------------------------------------

class FiniteGroup:
    """A finite group as a dense Cayley table, optionally carrying a permutation
    representation (used for canonical element order and readable reports).
    """

    def __init__(self, mul_table: np.ndarray, perms: np.ndarray | None = None,
                 degree: int = 0, gen_idx: list[int] | None = None, name: str = ""):
        self.MUL = mul_table
        self.n = mul_table.shape[0]
        self.perms = perms
        self.degree = degree
        self.gen_idx = list(gen_idx) if gen_idx else []
        self.name = name
        self.INV = np.argmax(self.MUL == 0, axis=1).astype(self.MUL.dtype)
        self._orders: np.ndarray | None = None
        self._normals_cache: dict[int, tuple[int, ...]] = {}
        self._subnormal_cache: dict[int, dict[int, int | None]] = {}
        self._gens_cache: dict[int, list[int]] = {}
        self._allsub_cache: dict[int, list[int]] = {}

    # -- construction -------------------------------------------------------

    @classmethod
    def from_generators(cls, perms, degree: int, cap: int = ORDER_CAP_DEFAULT,
                        name: str = "") -> "FiniteGroup":
        if degree > DEGREE_CAP:
            raise CapExceeded(f"degree {degree} exceeds cap {DEGREE_CAP}")
        ident = tuple(range(degree))
        for p in perms:
            if len(p) != degree or sorted(p) != list(ident):
                raise GroupSpecError(f"not a permutation of degree {degree}: {p}")
        elems = {ident}
        frontier = [ident]
        gens = [tuple(p) for p in perms]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = tuple(g[i] for i in x)
                    if y not in elems:
                        elems.add(y)
                        nxt.append(y)
                        if len(elems) > cap:
                            raise CapExceeded(f"group order exceeds cap {cap}")
            frontier = nxt
        ordered = sorted(elems)  # identity is lexicographically least -> index 0
        n = len(ordered)
        P = np.array(ordered, dtype=np.int8 if degree <= 127 else np.int16)
        index = {bytes(bytearray(int(v) for v in row)): i for i, row in enumerate(ordered)}

        def col_of(perm: tuple) -> np.ndarray:
            g = np.array(perm)
            comp = g[P]  # comp[a] = row of a*perm
            return np.array([index[comp[a].astype(np.uint8).tobytes()] for a in range(n)])

        dtype = np.int16 if n <= 32767 else np.int32
        MUL = np.empty((n, n), dtype=dtype)
        MUL[:, 0] = np.arange(n, dtype=dtype)
        gen_idx = []
        gen_cols = {}
        for g in gens:
            gi = index[bytes(bytearray(g))]
            if gi not in gen_cols:
                gen_cols[gi] = col_of(g)
            if gi not in gen_idx:
                gen_idx.append(gi)
        done = np.zeros(n, dtype=bool)
        done[0] = True
        queue = [0]
        while queue:
            b = queue.pop()
            colb = MUL[:, b]
            for gi, colg in gen_cols.items():
                c = int(colg[b])  # c = b*g
                if not done[c]:
                    MUL[:, c] = colg[colb]
                    done[c] = True
                    queue.append(c)
        assert done.all()
        return cls(MUL, perms=P, degree=degree, gen_idx=gen_idx, name=name)

    @classmethod
    def from_spec(cls, text: str, cap: int = ORDER_CAP_DEFAULT, name: str = "") -> "FiniteGroup":
        degree, prime, perms = parse_group_spec(text)
        G = cls.from_generators(perms, degree, cap=cap, name=name)
        G.spec_prime = prime
        return G

    @classmethod
    def from_mul_table(cls, table: np.ndarray, name: str = "") -> "FiniteGroup":
        table = np.asarray(table)
        n = table.shape[0]
        if not (table[0] == np.arange(n)).all() or not (table[:, 0] == np.arange(n)).all():
            raise ValueError("index 0 must be the identity")
        return cls(table.astype(np.int16 if n <= 32767 else np.int32), name=name)

    # -- scalar/elementwise basics -------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.MUL[a, b])

    def inv(self, a: int) -> int:
        return int(self.INV[a])

    def conj(self, x: int, g: int) -> int:
        return int(self.MUL[self.MUL[self.INV[g], x], g])

    def orders(self) -> np.ndarray:
        if self._orders is None:
            n = self.n
            ar = np.arange(n)
            cur = ar.copy()
            out = np.zeros(n, dtype=np.int32)
            k = 1
            while (out == 0).any():
                hit = (cur == 0) & (out == 0)
                out[hit] = k
                cur = self.MUL[cur, ar]
                k += 1
                if k > n + 1:
                    raise RuntimeError("order computation did not terminate")
            self._orders = out
        return self._orders

    def order_of(self, a: int) -> int:
        return int(self.orders()[a])

    def primes(self) -> list[int]:
        return sorted(_factorize(self.n))

    def element_name(self, i: int) -> str:
        if self.perms is None:
            return f"g{i}"
        img = self.perms[i]
        seen = [False] * self.degree
        parts = []
        for s in range(self.degree):
            if seen[s] or img[s] == s:
                seen[s] = True
                continue
            cyc = [s]
            seen[s] = True
            t = int(img[s])
            while t != s:
                cyc.append(t)
                seen[t] = True
                t = int(img[t])
            parts.append("(" + " ".join(str(c + 1) for c in cyc) + ")")
        return "".join(parts) if parts else "()"

    def mask_name(self, mask: int, limit: int = 6) -> str:
        idx = indices_of(mask, self.n)
        shown = ",".join(self.element_name(int(i)) for i in idx[:limit])
        more = "" if len(idx) <= limit else f",..[{len(idx)}]"
        return "{" + shown + more + "}"

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    # -- conjugation tables ---------------------------------------------------

    def conj_table(self, targets: np.ndarray, actors: np.ndarray | None = None) -> np.ndarray:
        """Matrix B with B[j, i] = targets[i] ^ actors[j] (always defined in a group)."""
        if actors is None:
            actors = np.arange(self.n)
        A = self.MUL[self.INV[actors][:, None], targets[None, :]]
        return self.MUL[A, actors[:, None]]

    def conj_mask(self, mask: int, g: int) -> int:
        idx = indices_of(mask, self.n)
        img = self.MUL[self.MUL[self.INV[g], idx], g]
        return mask_of(img)

    # -- subgroup machinery ---------------------------------------------------

    def subgroup_closure(self, mask: int) -> int:
        # frontier rounds: each round multiplies the newly added elements
        # against everything present, both ways; one unique() per round
        member = bits_from_mask(mask | 1, self.n)
        frontier = np.nonzero(member)[0]
        while frontier.size:
            cur = np.nonzero(member)[0]
            prods = np.unique(np.concatenate([
                self.MUL[np.ix_(frontier, cur)].ravel(),
                self.MUL[np.ix_(cur, frontier)].ravel(),
            ]))
            new = prods[~member[prods]]
            member[new] = True
            frontier = new
        return mask_from_bits(member)

    def product_mask(self, m1: int, m2: int) -> int:
        """The product set {a*b}; a subgroup whenever one factor normalizes the other."""
        i1 = indices_of(m1, self.n)
        i2 = indices_of(m2, self.n)
        return mask_from_bits(_membership(self.MUL[np.ix_(i1, i2)].ravel(), self.n))

    def is_subgroup_mask(self, mask: int) -> bool:
        if not (mask & 1):
            return False
        idx = indices_of(mask, self.n)
        member = bits_from_mask(mask, self.n)
        return bool(member[self.MUL[np.ix_(idx, idx)]].all())

    def gens_of_mask(self, mask: int) -> list[int]:
        if mask in self._gens_cache:
            return self._gens_cache[mask]
        gens: list[int] = []
        cur = 1
        # known generators first, then candidates of large order: few steps
        idx = indices_of(mask, self.n)
        by_order = idx[np.lexsort((idx, -self.orders()[idx]))]
        order = list(self.gen_idx) + [int(i) for i in by_order]
        for i in order:
            i = int(i)
            if not (mask >> i) & 1 or (cur >> i) & 1:
                continue
            gens.append(i)
            cur = self.subgroup_closure(cur | (1 << i))
            if cur == mask:
                break
        assert cur == mask, "mask is not a subgroup"
        self._gens_cache[mask] = gens
        return gens

    def normalizer_mask(self, mask: int, within: int | None = None) -> int:
        W = self.full_mask if within is None else within
        cand = indices_of(W, self.n)
        idx = indices_of(mask, self.n)
        B = self.conj_table(idx, cand)
        ok = bits_from_mask(mask, self.n)[B].all(axis=1)
        return mask_of(cand[ok])

    def centralizer_mask(self, mask: int, within: int | None = None) -> int:
        W = self.full_mask if within is None else within
        cand = indices_of(W, self.n)
        idx = indices_of(mask, self.n)
        B = self.conj_table(idx, cand)
        ok = (B == idx[None, :]).all(axis=1)
        return mask_of(cand[ok])

    def transporter_bits(self, sub_idx: np.ndarray, into_mask: int,
                         actors: np.ndarray | None = None) -> np.ndarray:
        """Boolean array over actors: conjugates every element of sub_idx into into_mask."""
        B = self.conj_table(sub_idx, actors)
        return bits_from_mask(into_mask, self.n)[B].all(axis=1)

    def center_mask(self, within: int | None = None) -> int:
        W = self.full_mask if within is None else within
        return self.centralizer_mask(W, within=W)

    def derived_mask(self, within: int | None = None) -> int:
        W = self.full_mask if within is None else within
        gens = self.gens_of_mask(W)
        comms = set()
        for a in gens:
            for b in gens:
                ab = self.mul(a, b)
                ba = self.mul(b, a)
                comms.add(self.mul(self.inv(ba), ab))  # [a,b] = (ba)^-1 (ab)
        return self.normal_closure_in(mask_of(comms) | 1, W)

    def normal_closure_in(self, amask: int, hmask: int) -> int:
        X = self.subgroup_closure(amask | 1)
        hgens = self.gens_of_mask(hmask)
        while True:
            idx = indices_of(X, self.n)
            new = 0
            for h in hgens:
                img = self.MUL[self.MUL[self.INV[h], idx], h]
                m = mask_of(img)
                new |= m & ~X
            if not new:
                return X
            X = self.subgroup_closure(X | new)

    def conj_classes_in(self, hmask: int) -> list[int]:
        """Element conjugacy classes of the subgroup H, as masks."""
        hgens = self.gens_of_mask(hmask)
        idx = indices_of(hmask, self.n)
        seen = np.zeros(self.n, dtype=bool)
        classes = []
        for x in idx:
            x = int(x)
            if seen[x]:
                continue
            inorb = np.zeros(self.n, dtype=bool)
            inorb[x] = True
            frontier = np.array([x])
            while frontier.size and hgens:
                imgs = np.unique(np.concatenate(
                    [self.MUL[self.MUL[self.INV[h], frontier], h] for h in hgens]))
                frontier = imgs[~inorb[imgs]]
                inorb[frontier] = True
            seen |= inorb
            classes.append(mask_from_bits(inorb))
        return classes

    def normal_subgroups_in(self, hmask: int) -> tuple[int, ...]:
        if hmask in self._normals_cache:
            return self._normals_cache[hmask]
        atoms = []
        for cls_mask in self.conj_classes_in(hmask):
            a = self.subgroup_closure(cls_mask | 1)
            if a not in atoms:
                atoms.append(a)
        # every normal subgroup is a join of class closures, so the join
        # closure of the atoms is the complete list; joins of normal
        # subgroups are plain product sets, no closure iteration needed
        normals = {1}
        queue = [1]
        while queue:
            N = queue.pop()
            for a in atoms:
                if a & ~N:
                    J = self.product_mask(N, a)
                    if J not in normals:
                        normals.add(J)
                        queue.append(J)
        result = tuple(sorted(normals))
        self._normals_cache[hmask] = result
        return result

    def subnormal_subgroups_in(self, hmask: int) -> dict[int, int | None]:
        """All K subnormal in H, as {mask: parent mask} (parent = next term of a chain)."""
        if hmask in self._subnormal_cache:
            return self._subnormal_cache[hmask]
        parent: dict[int, int | None] = {hmask: None}
        queue = [hmask]
        while queue:
            X = queue.pop()
            for N in self.normal_subgroups_in(X):
                if N not in parent:
                    parent[N] = X
                    queue.append(N)
        self._subnormal_cache[hmask] = parent
        return parent

    def is_subnormal_in(self, kmask: int, hmask: int) -> tuple[bool, list[int]]:
        parents = self.subnormal_subgroups_in(hmask)
        if kmask not in parents:
            return False, []
        chain = [kmask]
        while parents[chain[-1]] is not None:
            chain.append(parents[chain[-1]])
        return True, chain

    # -- Sylow / characteristic-p layer --------------------------------------

    def sylow_mask(self, p: int, within: int | None = None) -> int:
        W = self.full_mask if within is None else within
        target = p_part(popcount(W), p)
        P = 1
        orders = self.orders()
        while popcount(P) < target:
            N = self.normalizer_mask(P, within=W)
            grown = False
            for g in indices_of(N & ~P, self.n):
                g = int(g)
                o = int(orders[g])
                if o % p == 0 and p_part(o, p) == o:
                    P = self.subgroup_closure(P | (1 << g))
                    grown = True
                    break
            assert grown, "Sylow growth stalled"
        # deterministic representative: least bitmask among the conjugates in W
        best = P
        seen = {P}
        queue = [P]
        wgens = self.gens_of_mask(W)
        while queue:
            Q = queue.pop()
            for h in wgens:
                R = self.conj_mask(Q, h)
                if R not in seen:
                    seen.add(R)
                    queue.append(R)
                    if R < best:
                        best = R
        return best

    def sylow_conjugates(self, p: int, within: int | None = None) -> list[int]:
        W = self.full_mask if within is None else within
        P = self.sylow_mask(p, within)
        seen = {P}
        queue = [P]
        wgens = self.gens_of_mask(W)
        while queue:
            Q = queue.pop()
            for h in wgens:
                R = self.conj_mask(Q, h)
                if R not in seen:
                    seen.add(R)
                    queue.append(R)
        return sorted(seen)

    def O_p_in(self, hmask: int, p: int) -> int:
        out = None
        for Q in self.sylow_conjugates(p, within=hmask):
            out = Q if out is None else out & Q
        assert out is not None and self.is_subgroup_mask(out)
        return out

    def O_upper_p_in(self, hmask: int, p: int) -> int:
        """O^p(H): generated by all p'-elements of H (equals the intersection of
        normal subgroups of p-power index)."""
        idx = indices_of(hmask, self.n)
        orders = self.orders()[idx]
        pprime = idx[orders % p != 0]
        return self.subgroup_closure(mask_of(pprime) | 1)

    def is_characteristic_p_in(self, hmask: int, p: int) -> bool:
        O = self.O_p_in(hmask, p)
        C = self.centralizer_mask(O, within=hmask)
        return not (C & ~O)

    def is_p_group_mask(self, mask: int, p: int) -> bool:
        k = popcount(mask)
        return p_part(k, p) == k

    # -- components / generalized Fitting -------------------------------------

    def components_in(self, hmask: int) -> list[int]:
        comps = []
        for K in self.subnormal_subgroups_in(hmask):
            if K == 1:
                continue
            if self.derived_mask(K) != K:
                continue  # not perfect
            Z = self.center_mask(within=K)
            if Z == K:
                continue
            above_Z = [N for N in self.normal_subgroups_in(K) if (N & Z) == Z]
            if len(above_Z) == 2:  # exactly Z and K itself: K/Z simple
                comps.append(K)
        return sorted(comps)

    def layer_in(self, hmask: int) -> int:
        E = 1
        for K in self.components_in(hmask):
            E = self.subgroup_closure(E | K)
        return E

    def fitting_star_in(self, hmask: int) -> int:
        F = 1
        for p in sorted(_factorize(popcount(hmask))):
            F = self.subgroup_closure(F | self.O_p_in(hmask, p))
        return self.subgroup_closure(F | self.layer_in(hmask))

    # -- quotients (needed for p'-reduction when hunting models) ---------------

    def quotient_in(self, hmask: int, nmask: int) -> tuple["FiniteGroup", dict[int, int]]:
        """H/N for N normal in H. Returns the quotient as a table group together
        with the map H-element-index -> quotient index."""
        assert self.normal_closure_in(nmask, hmask) == nmask, "N not normal in H"
        hidx = indices_of(hmask, self.n)
        nidx = indices_of(nmask, self.n)
        reps = self.MUL[nidx[:, None], hidx[None, :]].min(axis=0)  # min of coset Ng
        uniq = np.unique(reps)
        pos = {int(r): i for i, r in enumerate(uniq)}
        label = {int(g): pos[int(r)] for g, r in zip(hidx, reps)}
        k = len(uniq)
        table = np.empty((k, k), dtype=np.int16)
        for i, a in enumerate(uniq):
            row = self.MUL[int(a), uniq]
            table[i] = [label[int(x)] for x in row]
        Q = FiniteGroup.from_mul_table(table, name=f"{self.name}/N" if self.name else "")
        return Q, label

    # -- subgroup enumeration --------------------------------------------------

    def all_subgroups_in(self, hmask: int, cap: int = 300) -> list[int]:
        k = popcount(hmask)
        fac = _factorize(k)
        if len(fac) == 1:
            if hmask not in self._allsub_cache:
                self._allsub_cache[hmask] = self._subgroups_p_group(hmask, next(iter(fac)))
            return self._allsub_cache[hmask]
        if k > cap:
            raise CapExceeded(f"subgroup lattice of order-{k} group exceeds cap {cap}")
        if hmask in self._allsub_cache:
            return self._allsub_cache[hmask]
        atoms = []
        for x in indices_of(hmask, self.n):
            a = self.subgroup_closure(1 | (1 << int(x)))
            if a not in atoms:
                atoms.append(a)
        subs = {1}
        queue = [1]
        while queue:
            H = queue.pop()
            for a in atoms:
                if a & ~H:
                    J = self.subgroup_closure(H | a)
                    if J not in subs:
                        subs.add(J)
                        queue.append(J)
        self._allsub_cache[hmask] = sorted(subs)
        return self._allsub_cache[hmask]

    def _subgroups_p_group(self, smask: int, p: int) -> list[int]:
        # cyclic extension: every subgroup of a p-group sits index-p inside its
        # normalizer closure, so layer-by-layer extension is complete.
        levels = {1}
        out = {1}
        while levels:
            nxt = set()
            for H in levels:
                N = self.normalizer_mask(H, within=smask)
                for g in indices_of(N & ~H, self.n):
                    g = int(g)
                    gp = g
                    for _ in range(p - 1):
                        gp = self.mul(gp, g)
                    if (H >> gp) & 1:  # g^p in H -> H<g> has order p*|H|
                        acc = H
                        cur = indices_of(H, self.n)
                        for _ in range(p - 1):
                            cur = self.MUL[cur, g]
                            acc |= mask_of(cur)
                        assert popcount(acc) == p * popcount(H)
                        if acc not in out:
                            nxt.add(acc)
            out |= nxt
            levels = nxt
        return sorted(out)


# ---------------------------------------------------------------------------
# group-spec convenience

def load_group(text: str, cap: int = ORDER_CAP_DEFAULT, name: str = "") -> FiniteGroup:
    return FiniteGroup.from_spec(text, cap=cap, name=name)


# ---------------------------------------------------------------------------
# characteristic-p lemma suite (runs over one group at its designated prime)

def lemma_suite_group_core(G: FiniteGroup, p: int) -> list[tuple[str, bool, str]]:
    """The group-theoretic lemmas the whole development leans on, checked
    literally: O_p(G) normalizes O^p(H) for subnormal H; groups of
    characteristic p pass it to p-local subgroups, subnormal subgroups and
    overgroups of O_p(G); normalizers of subnormal subgroups keep it; and the
    subnormal relation is conjugation-closed and induces on overgroups.
    """
    out = []
    full = G.full_mask
    subnormals = sorted(G.subnormal_subgroups_in(full))
    Op = G.O_p_in(full, p)
    charp = G.is_characteristic_p_in(full, p)

    bad = None
    for H in subnormals:
        T = G.O_upper_p_in(H, p)
        NT = G.normalizer_mask(T)
        if Op & ~NT:
            bad = f"H={G.mask_name(H)} O^p(H)={G.mask_name(T)}"
            break
    out.append(("groups/op-normalizes-opower-of-subnormal", bad is None, bad or ""))

    if charp:
        bad = None
        S = G.sylow_mask(p)
        for P in G.all_subgroups_in(S):
            if P == 1:
                continue
            seen = {P}
            queue = [P]
            while queue:
                Q = queue.pop()
                for h in G.gens_of_mask(full):
                    R = G.conj_mask(Q, h)
                    if R not in seen:
                        seen.add(R)
                        queue.append(R)
            for Q in seen:
                NQ = G.normalizer_mask(Q)
                if not G.is_characteristic_p_in(NQ, p):
                    bad = f"P={G.mask_name(Q)} N_G(P) not char {p}"
                    break
            if bad:
                break
        out.append(("groups/charp-local-subgroups", bad is None, bad or ""))

        bad = None
        for H in subnormals:
            if not G.is_characteristic_p_in(H, p):
                bad = f"H={G.mask_name(H)}"
                break
        out.append(("groups/charp-subnormal-subgroups", bad is None, bad or ""))

        bad = None
        if G.n <= 300:
            for H in G.all_subgroups_in(full):
                if (H & Op) == Op and not G.is_characteristic_p_in(H, p):
                    bad = f"H={G.mask_name(H)}"
                    break
            out.append(("groups/charp-overgroups-of-core", bad is None, bad or ""))

        bad = None
        for H in subnormals:
            NH = G.normalizer_mask(H)
            if not G.is_characteristic_p_in(NH, p):
                bad = f"H={G.mask_name(H)}"
                break
        out.append(("groups/charp-normalizer-of-subnormal", bad is None, bad or ""))

    bad = None
    sub_set = set(subnormals)
    for H in subnormals:
        for g in G.gens_of_mask(full):
            if G.conj_mask(H, int(g)) not in sub_set:
                bad = f"H={G.mask_name(H)} g={G.element_name(int(g))}"
                break
        if bad:
            break
    out.append(("groups/subnormal-conjugation-closed", bad is None, bad or ""))

    bad = None
    for H in subnormals:
        for K in subnormals:
            if H != K and (H & K) == H:  # H <= K
                ok, _ = G.is_subnormal_in(H, K)
                if not ok:
                    bad = f"H={G.mask_name(H)} K={G.mask_name(K)}"
                    break
        if bad:
            break
    out.append(("groups/subnormal-induces-on-overgroups", bad is None, bad or ""))
    return out
