import numpy as np
import pytest

from locality_lab.groups import (
    FiniteGroup, GroupSpecError, CapExceeded, load_group,
    parse_group_spec, indices_of, mask_of, popcount, lemma_suite_group_core,
)

D8_SPEC = """
degree 4
2 3 4 1
3 2 1 4
"""

S4_SPEC = """
degree 4
2 3 4 1
2 1 3 4
"""

A5_SPEC = """
degree 5
2 3 1 4 5
1 2 4 5 3
"""


def _mask_by_name(G, *names):
    lookup = {G.element_name(i): i for i in range(G.n)}
    return mask_of([lookup[nm] for nm in names]) | 1


# ---------------------------------------------------------------- parsing

def test_parse_rejects_garbage():
    with pytest.raises(GroupSpecError):
        parse_group_spec("degree x\n")
    with pytest.raises(GroupSpecError):
        parse_group_spec("degree 3\n1 2\n")
    with pytest.raises(GroupSpecError):
        parse_group_spec("degree 3\n1 1 2\n")
    with pytest.raises(GroupSpecError):
        parse_group_spec("")
    with pytest.raises(GroupSpecError):
        parse_group_spec("degree 2\nprime 4\n2 1\n")


def test_parse_caps():
    with pytest.raises(CapExceeded):
        parse_group_spec("degree 65\n")
    with pytest.raises(CapExceeded):
        load_group(S4_SPEC, cap=10)


def test_trivial_group():
    G = load_group("degree 1\n")
    assert G.n == 1
    assert G.element_name(0) == "()"


def test_comments_and_prime_line():
    G = load_group("# a comment\ndegree 2\nprime 2\n2 1  # swap\n")
    assert G.n == 2 and G.spec_prime == 2


# ---------------------------------------------------------------- construction

def test_d8_and_s4_orders():
    assert load_group(D8_SPEC).n == 8
    assert load_group(S4_SPEC).n == 24


def test_identity_is_index_zero_and_order_lex():
    G = load_group(S4_SPEC)
    assert (G.perms[0] == np.arange(4)).all()
    rows = [tuple(r) for r in G.perms]
    assert rows == sorted(rows)


def test_mul_table_is_a_group():
    G = load_group(D8_SPEC)
    n = G.n
    # exhaustive associativity for this small group
    for a in range(n):
        left = G.MUL[G.MUL[a], :]
        right = G.MUL[a, G.MUL]
        assert (left == right).all()
    for a in range(n):
        assert G.mul(a, G.inv(a)) == 0 and G.mul(G.inv(a), a) == 0


def test_orders():
    G = load_group(S4_SPEC)
    order_counts = np.bincount(G.orders())
    # S4: 1 identity, 9 involutions, 8 three-cycles, 6 four-cycles
    assert list(order_counts[1:5]) == [1, 9, 8, 6]


# ---------------------------------------------------------------- lattice ops

def test_subgroup_counts():
    assert len(load_group(D8_SPEC).all_subgroups_in(load_group(D8_SPEC).full_mask)) == 10
    G = load_group(S4_SPEC)
    assert len(G.all_subgroups_in(G.full_mask)) == 30
    C3 = load_group("degree 3\n2 3 1\n")
    assert len(C3.all_subgroups_in(C3.full_mask)) == 2


def test_sylow():
    G = load_group(S4_SPEC)
    assert popcount(G.sylow_mask(2)) == 8
    assert popcount(G.sylow_mask(3)) == 3
    C2 = load_group("degree 2\n2 1\n")
    assert C2.sylow_mask(3) == 1  # p does not divide |G|
    # determinism: least bitmask among conjugates
    syl = G.sylow_mask(2)
    assert syl == min(G.sylow_conjugates(2))


def test_normalizer_centralizer():
    G = load_group(S4_SPEC)
    H = _mask_by_name(G, "(1 2)(3 4)")
    assert popcount(G.normalizer_mask(H)) == 8
    D8 = load_group(D8_SPEC)
    Z = D8.center_mask()
    assert popcount(Z) == 2
    assert D8.centralizer_mask(Z) == D8.full_mask
    V4 = load_group("degree 4\n2 1 4 3\n3 4 1 2\n")
    assert V4.centralizer_mask(V4.full_mask) == V4.full_mask  # abelian


def test_subnormal_subgroups_s4():
    G = load_group(S4_SPEC)
    subs = G.subnormal_subgroups_in(G.full_mask)
    assert len(subs) == 7
    sizes = sorted(popcount(H) for H in subs)
    assert sizes == [1, 2, 2, 2, 4, 12, 24]
    # chains reconstruct: <(1 2)(3 4)> through V4
    H = _mask_by_name(G, "(1 2)(3 4)")
    ok, chain = G.is_subnormal_in(H, G.full_mask)
    assert ok and popcount(chain[1]) == 4 and chain[-1] == G.full_mask


def test_subnormal_trivial_cases():
    V4 = load_group("degree 4\n2 1 4 3\n3 4 1 2\n")
    assert len(V4.subnormal_subgroups_in(V4.full_mask)) == 5  # abelian: all subgroups
    A5 = load_group(A5_SPEC)
    assert A5.n == 60
    assert sorted(map(popcount, A5.subnormal_subgroups_in(A5.full_mask))) == [1, 60]


def test_O_p_and_characteristic():
    G = load_group(S4_SPEC)
    V4 = G.O_p_in(G.full_mask, 2)
    assert popcount(V4) == 4
    assert G.is_characteristic_p_in(G.full_mask, 2)
    P = load_group(D8_SPEC)
    assert P.O_p_in(P.full_mask, 2) == P.full_mask  # p-group
    assert P.is_characteristic_p_in(P.full_mask, 2)
    C3xS4 = load_group("degree 7\n2 3 1 4 5 6 7\n1 2 3 5 6 7 4\n1 2 3 5 4 6 7\n")
    assert C3xS4.n == 72
    assert not C3xS4.is_characteristic_p_in(C3xS4.full_mask, 2)


def test_O_upper_p_two_routes():
    # generated-by-p'-elements must agree with intersection of normal
    # subgroups of p-power index
    for spec, p in [(S4_SPEC, 2), (D8_SPEC, 2), (A5_SPEC, 2),
                    ("degree 3\n2 3 1\n2 1 3\n", 3)]:
        G = load_group(spec)
        K = G.O_upper_p_in(G.full_mask, p)
        meet = G.full_mask
        for N in G.normal_subgroups_in(G.full_mask):
            index = G.n // popcount(N)
            if index == 1 or set(_prime_factors(index)) == {p}:
                meet &= N
        assert K == meet


def _prime_factors(k):
    out = set()
    d = 2
    while d * d <= k:
        while k % d == 0:
            out.add(d)
            k //= d
        d += 1
    if k > 1:
        out.add(k)
    return out


def test_O_upper_2_values():
    S4 = load_group(S4_SPEC)
    assert popcount(S4.O_upper_p_in(S4.full_mask, 2)) == 12  # A4
    D8 = load_group(D8_SPEC)
    assert D8.O_upper_p_in(D8.full_mask, 2) == 1


def test_components():
    S4 = load_group(S4_SPEC)
    assert S4.components_in(S4.full_mask) == []
    assert popcount(S4.fitting_star_in(S4.full_mask)) == 4  # V4
    A5 = load_group(A5_SPEC)
    assert A5.components_in(A5.full_mask) == [A5.full_mask]
    A5xA5 = load_group(
        "degree 10\n"
        "2 3 1 4 5 6 7 8 9 10\n"
        "1 2 4 5 3 6 7 8 9 10\n"
        "1 2 3 4 5 7 8 6 9 10\n"
        "1 2 3 4 5 6 7 9 10 8\n")
    assert A5xA5.n == 3600
    comps = A5xA5.components_in(A5xA5.full_mask)
    assert len(comps) == 2 and all(popcount(K) == 60 for K in comps)


def test_quotient():
    S4 = load_group(S4_SPEC)
    V4 = S4.O_p_in(S4.full_mask, 2)
    Q, label = S4.quotient_in(S4.full_mask, V4)
    assert Q.n == 6
    assert any(Q.mul(a, b) != Q.mul(b, a) for a in range(6) for b in range(6))  # S3
    assert label[0] == 0


def test_group_lemma_suite_s4():
    G = load_group(S4_SPEC)
    for check_id, ok, witness in lemma_suite_group_core(G, 2):
        assert ok, f"{check_id}: {witness}"


def test_catalog_loads(cat):
    expected = {
        "c2": 2, "c4": 4, "v4": 4, "d8": 8, "q8": 8, "a4": 12, "s4": 24,
        "sl23": 24, "a4xc2": 24, "s3": 6, "dic3": 12, "psl27": 168,
    }
    for iid, order in expected.items():
        assert cat(iid).n == order, iid


def test_q8_structure(cat):
    Q8 = cat("q8")
    counts = np.bincount(Q8.orders(), minlength=5)
    assert list(counts[1:5]) == [1, 1, 0, 6]  # unique involution


def test_sl23_structure(cat):
    G = cat("sl23")
    O2 = G.O_p_in(G.full_mask, 2)
    assert popcount(O2) == 8
    inv_count = int((G.orders()[indices_of(O2, G.n)] == 2).sum())
    assert inv_count == 1  # O_2(SL(2,3)) is Q8
    assert G.is_characteristic_p_in(G.full_mask, 2)


def test_dic3_structure(cat):
    G = cat("dic3")
    assert popcount(G.sylow_mask(2)) == 4
    assert popcount(G.O_p_in(G.full_mask, 2)) == 2
    assert not G.is_characteristic_p_in(G.full_mask, 2)


def test_psl27_structure(cat):
    G = cat("psl27")
    S = G.sylow_mask(2)
    assert popcount(S) == 8
    invols = int((G.orders()[indices_of(S, G.n)] == 2).sum())
    assert invols == 5  # dihedral, not quaternion
    assert G.O_p_in(G.full_mask, 2) == 1


def test_flagship_smoke(cat):
    G = cat("psl27xs4")
    assert G.n == 4032
    assert popcount(G.sylow_mask(2)) == 64
    comps = G.components_in(G.full_mask)
    assert len(comps) == 1 and popcount(comps[0]) == 168
    assert len(G.subnormal_subgroups_in(G.full_mask)) == 14
