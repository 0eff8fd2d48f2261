"""Batch verification driver: catalog listing, artifact construction behind
a content-addressed cache, theorem suites, and line-oriented reports.

Report grammar, one record per check:

    ok|not ok <seq> <check-path> anchor="<check-id>" time_ms=<int>

followed by four-space-indented witness lines when a witness exists. The
check path prefixes the check id with the instance id (and a sub-instance
label for designated-subgroup suites), so a grep for a bare check id finds
every instance that ran it. Reports are deterministic except for time_ms;
records emitted by one suite call share that call's wall time.

Exit codes: 0 all checks passed, 2 usage, 3 missing file, 4 parse error,
5 cap exceeded, 6 at least one check failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .catalog import catalog_dir
from .fusion import (
    Frame, TableFusion, _row_pairs_bytes, digest, fusion_of_group,
    fusion_of_subgroup, is_constrained, lemma_suite_fusion_core, same_system,
)
from .groups import (
    CapExceeded, FiniteGroup, GroupSpecError, ORDER_CAP_DEFAULT,
    lemma_suite_group_core, load_group, mask_of, popcount,
)
from .partial import (
    Locality, check_locality, enumerate_partial_subnormals,
    lemma_suite_partial, locality_from_group, mutate_tables, total_locality,
)
from .products import lemma_suite_products
from .regular import (
    O_p_of_locality, bootstrap_regular, fusion_of, is_regular_locality,
    make_context, normalizer_subsystem, verify_action, verify_bijection,
    verify_centralizer_theorems, verify_conjugation, verify_main_theorem_A,
    verify_normalizer_theorems,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_PARSE_ERROR = 4
EXIT_CAP_EXCEEDED = 5
EXIT_CHECK_FAILED = 6

# one verification record: check path, anchor, passed, witness, wall ms
Rec = tuple[str, str, bool, str, int]

FUZZ_PER_HOST = 2500
FUZZ_SEED = 2024


# ---------------------------------------------------------------------------
# instance registry

_SMALL_SUITES = ("groups", "fusion", "products", "partial",
                 "normalizer", "centralizer", "bijection")
SUITE_NAMES = _SMALL_SUITES + ("fuzz",)

# designated subnormal kinds: "op" picks O_p(L); "whole" picks all of L;
# "gens" closes the listed permutations (1-based image rows) inside L;
# "all" expands to every partial subnormal of L.
_OP = (("o-p", "op", None),)


@dataclass(frozen=True)
class Instance:
    id: str
    file: str | None = None            # defaults to "<id>.grp"
    designated: tuple = _OP
    suites: tuple[str, ...] = _SMALL_SUITES
    expect_regular: bool | None = True
    cap_order: int = ORDER_CAP_DEFAULT
    cap_locality: int = 2000

    @property
    def grp_file(self) -> str | None:
        if self.suites == ("fuzz",):
            return None
        return self.file or (self.id + ".grp")


INSTANCES: dict[str, Instance] = {}


def _reg(inst: Instance) -> None:
    INSTANCES[inst.id] = inst


_reg(Instance("trivial-group"))
_reg(Instance("c2"))
_reg(Instance("c4"))
_reg(Instance("v4"))
_reg(Instance("d8"))
_reg(Instance("q8"))
_reg(Instance("a4"))
_reg(Instance("s4", designated=_OP + (("c2-ntl", "gens", ((2, 1, 4, 3),)),)))
_reg(Instance("s4-all", file="s4.grp", designated=(("all", "all", None),),
              suites=("normalizer", "centralizer")))
_reg(Instance("sl23"))
_reg(Instance("a4xc2"))
_reg(Instance("s3"))
_reg(Instance("dic3", suites=("groups", "fusion", "products", "partial"),
              expect_regular=False))
_reg(Instance("psl27", designated=_OP + (("whole", "whole", None),)))
_reg(Instance("psl27xs4",
              designated=(
                  ("c2-h1", "gens", ((1, 2, 3, 4, 5, 6, 7, 8, 10, 9, 12, 11),)),
                  ("component", "gens",
                   ((2, 3, 4, 5, 6, 7, 1, 8, 9, 10, 11, 12),
                    (8, 7, 4, 3, 6, 5, 2, 1, 9, 10, 11, 12))),
              ),
              suites=("groups", "normalizer", "centralizer", "bijection"),
              cap_order=6000, cap_locality=6000))
_reg(Instance("fuzz", designated=(), suites=("fuzz",), expect_regular=None))


# ---------------------------------------------------------------------------
# cache: content-addressed by the group-spec text and the prime; stores the
# subgroup lattice of S and the fusion closure of the bootstrapped locality

def _cache_root(override: str | None = None) -> str:
    return (override or os.environ.get("LOCALITY_LAB_CACHE")
            or os.path.join(os.path.expanduser("~"), ".cache", "locality-lab"))


def _cache_path(root: str, text: str, p: int) -> str:
    h = hashlib.sha256()
    h.update(text.encode())
    h.update(f"\nprime={p}\n".encode())
    return os.path.join(root, h.hexdigest() + ".json")


def _save_cache(path: str, G: FiniteGroup, p: int, loc: Locality) -> None:
    frame = Frame(G, loc.S_mask)
    F = fusion_of(loc)
    fus = {}
    for dom, rows in F._isos.items():
        fus[format(dom, "x")] = sorted(
            _row_pairs_bytes(frame, r).hex() for r in rows.values())
    payload = {
        "format": 1,
        "order": G.n,
        "prime": p,
        "sylow": format(loc.S_mask, "x"),
        "lattice": [format(m, "x") for m in G.all_subgroups_in(loc.S_mask)],
        "delta": sorted(format(m, "x") for m in loc.delta_ambient),
        "fusion": fus,
        "digest": digest(F),
    }
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


def _load_cache(path: str, G: FiniteGroup, p: int) -> Locality | None:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    if payload.get("format") != 1 or payload.get("order") != G.n \
            or payload.get("prime") != p:
        return None
    S = int(payload["sylow"], 16)
    if S != G.sylow_mask(p):
        return None
    G._allsub_cache[S] = [int(h, 16) for h in payload["lattice"]]
    delta = frozenset(int(h, 16) for h in payload["delta"])
    loc = Locality(G, S, delta, p, name=G.name)
    frame = Frame(G, S)
    isos: dict[int, dict[bytes, np.ndarray]] = {}
    for domhex, rows in payload["fusion"].items():
        sub: dict[bytes, np.ndarray] = {}
        for rh in rows:
            arr = np.frombuffer(bytes.fromhex(rh), dtype=np.uint16)
            row = np.full(frame.size, -1, dtype=np.int8)
            row[frame.pos[arr[0::2].astype(np.int64)]] = \
                frame.pos[arr[1::2].astype(np.int64)].astype(np.int8)
            sub[row.tobytes()] = row
        isos[int(domhex, 16)] = sub
    F = TableFusion(frame, p, isos, name=G.name)
    if digest(F) != payload["digest"]:
        return None
    loc._fusion_memo = F
    return loc


@dataclass
class Built:
    G: FiniteGroup
    F: object                   # host fusion system F_S(G)
    loc: Locality
    regular: bool
    cache_state: str            # "hit", "miss", or "off"


def build_artifacts(G: FiniteGroup, p: int, cap: int,
                    use_cache: bool, cache_root: str,
                    spec: str = "") -> Built:
    """Bootstrap the regular-locality candidate, reusing the cached subgroup
    lattice and fusion closure when available. The regularity certificate is
    recomputed either way, so cache state never changes a report."""
    path = _cache_path(cache_root, spec, p) if use_cache and spec else None
    if path is not None:
        loc = _load_cache(path, G, p)
        if loc is not None:
            F = fusion_of_group(G, loc.S_mask, p, name=G.name)
            return Built(G, F, loc, is_regular_locality(loc, cap=cap), "hit")
    bs = bootstrap_regular(G, p, cap=cap, name=G.name)
    if path is not None:
        _save_cache(path, G, p, bs.loc)
        return Built(G, bs.F, bs.loc, bs.regular, "miss")
    return Built(G, bs.F, bs.loc, bs.regular, "off")


# ---------------------------------------------------------------------------
# designated subnormals

def _designated_mask(loc: Locality, kind: str, payload) -> int:
    G = loc.G
    if kind == "op":
        return loc.local_of_ambient(O_p_of_locality(loc))
    if kind == "whole":
        return (1 << loc.m) - 1
    assert kind == "gens"
    where = {tuple(int(v) for v in perm): i for i, perm in enumerate(G.perms)}
    gmask = 1
    for images in payload:
        gmask |= 1 << where[tuple(v - 1 for v in images)]
    amb = G.subgroup_closure(gmask) & mask_of(loc.elems)
    return loc.local_of_ambient(amb)


def _subinstances(inst: Instance, loc: Locality,
                  cap: int) -> list[tuple[str, int]]:
    out: list[tuple[str, int]] = []
    for label, kind, payload in inst.designated:
        if kind == "all":
            subs = sorted(enumerate_partial_subnormals(loc, cap=cap),
                          key=lambda h: (popcount(h), h))
            out.extend((f"sub{i:02d}-o{popcount(h)}", h)
                       for i, h in enumerate(subs, 1))
        else:
            out.append((label, _designated_mask(loc, kind, payload)))
    seen: set[int] = set()
    uniq = []
    for label, h in out:
        if h not in seen:
            seen.add(h)
            uniq.append((label, h))
    return uniq


# ---------------------------------------------------------------------------
# suite execution

def _records_of(rep, prefix: str, ms: int) -> list[Rec]:
    return [(prefix + cid, cid, bool(ok), str(wit), ms)
            for cid, ok, wit in rep]


def _run_block(out: list[Rec], prefix: str, fn) -> None:
    t0 = time.perf_counter()
    rep = fn()
    ms = int(round((time.perf_counter() - t0) * 1000))
    out.extend(_records_of(rep, prefix, ms))


def _one(out: list[Rec], path: str, anchor: str, fn) -> None:
    t0 = time.perf_counter()
    try:
        got = fn()
        ok, wit = got if isinstance(got, tuple) else (got, "")
    except (AssertionError, ValueError, KeyError, CapExceeded) as e:
        ok, wit = False, str(e) or e.__class__.__name__
    ms = int(round((time.perf_counter() - t0) * 1000))
    out.append((path, anchor, bool(ok), str(wit), ms))


def _contexts(loc: Locality, subs: list[tuple[str, int]], cap: int,
              out: list[Rec], iid: str) -> dict[str, object]:
    ctxs: dict[str, object] = {}
    for label, H in subs:
        try:
            ctxs[label] = make_context(loc, H, cap=cap)
        except (AssertionError, ValueError) as e:
            out.append((f"{iid}/{label}/context-construction",
                        "context-construction", False,
                        str(e) or e.__class__.__name__, 0))
    return ctxs


def _constrained_sweep(out: list[Rec], iid: str, built: Built,
                       cap: int) -> None:
    """Every subnormal of a constrained instance must satisfy the group-route
    reduction F_{N_S(H)}(bN) = F_{N_S(H)}(N_G(H))."""
    G, p = built.G, built.loc.p
    subs = sorted(enumerate_partial_subnormals(built.loc, cap=cap),
                  key=lambda h: (popcount(h), h))
    for i, H in enumerate(subs, 1):
        label = f"sub{i:02d}-o{popcount(H)}"

        def _reduce(H=H):
            ctx = make_context(built.loc, H, cap=cap)
            NFE = normalizer_subsystem(ctx)
            want = fusion_of_subgroup(G, ctx.NSH, ctx.NGH_amb, p)
            return same_system(NFE, want), f"over {G.mask_name(ctx.NSH)}"

        _one(out, f"{iid}/normalizer/constrained-reduction/{label}",
             "normalizer/constrained-reduction", _reduce)


def _fuzz_host(name: str, catalog: str) -> Locality:
    if name == "a5-v4":
        G = FiniteGroup.from_generators([(1, 2, 0, 3, 4), (1, 2, 3, 4, 0)],
                                        5, name="a5")
        S = G.sylow_mask(2)
        delta = [P for P in G.all_subgroups_in(S, cap=64) if popcount(P) > 1]
        return locality_from_group(G, S, delta, 2, name="a5-v4")
    gid = name.split("-", 1)[0]
    G = load_group(_read_spec(catalog, gid + ".grp"), name=gid)
    if name.endswith("-total"):
        return total_locality(G, 2, name=name)
    assert name == "s4-d8-object"
    S = G.sylow_mask(2)
    return Locality(G, S, frozenset({S}), 2, name=name)


FUZZ_HOSTS = ("d8-total", "a5-v4", "s4-total", "s4-d8-object")


def _run_fuzz(out: list[Rec], catalog: str,
              per_host: int = FUZZ_PER_HOST) -> None:
    """Corrupt valid localities and require every mutant to be rejected with
    a witness: no false accepts across the campaign."""
    for hi, name in enumerate(FUZZ_HOSTS):
        t0 = time.perf_counter()
        loc = _fuzz_host(name, catalog)
        rng = np.random.default_rng(FUZZ_SEED + hi)
        accepted: list[str] = []
        unwitnessed = 0
        for _ in range(per_host):
            mut, kind = mutate_tables(loc, rng)
            bad = [r for r in check_locality(mut, deep=False) if not r[1]]
            if not bad:
                accepted.append(kind)
            elif not any(w for _, _, w in bad):
                unwitnessed += 1
        ok = not accepted and unwitnessed == 0
        if ok:
            wit = f"{per_host}/{per_host} mutants rejected, each with a witness"
        else:
            wit = (f"false accepts: {sorted(set(accepted))}; "
                   f"{unwitnessed} rejections lacked a witness")
        ms = int(round((time.perf_counter() - t0) * 1000))
        out.append((f"fuzz/{name}/all-mutants-rejected",
                    "fuzz/all-mutants-rejected", ok, wit, ms))


_LOCALITY_SUITES = ("normalizer", "centralizer", "bijection")


def verify_instance(inst: Instance, catalog: str, prime: int | None,
                    suites: tuple[str, ...] | None, use_cache: bool,
                    cache_root: str, cap_order: int | None,
                    cap_locality: int | None,
                    fuzz_per_host: int = FUZZ_PER_HOST) -> list[Rec]:
    """Run the selected suites for one instance and return its records."""
    out: list[Rec] = []
    wanted = suites or inst.suites
    if inst.grp_file is None:
        if "fuzz" in wanted:
            _run_fuzz(out, catalog, per_host=fuzz_per_host)
        return out
    wanted = tuple(s for s in wanted if s != "fuzz")
    if not wanted:
        return out

    text = _read_spec(catalog, inst.grp_file)
    G = load_group(text, cap=cap_order or inst.cap_order, name=inst.id)
    p = prime or G.spec_prime
    if p is None:
        raise GroupSpecError(
            f"{inst.id}: no prime in the group file and --prime not given")
    cap = cap_locality or inst.cap_locality
    iid = inst.id

    need_loc = (inst.expect_regular is not None
                or any(s in ("partial",) + _LOCALITY_SUITES for s in wanted))
    built = None
    if need_loc:
        built = build_artifacts(G, p, cap, use_cache, cache_root, spec=text)
        if inst.expect_regular is not None:
            exp = inst.expect_regular
            out.append((f"{iid}/build/regular-certificate",
                        "build/regular-certificate", built.regular == exp,
                        f"regular={built.regular} expected={exp}", 0))

    subs: list[tuple[str, int]] = []
    ctxs: dict[str, object] = {}
    if built is not None and any(s in _LOCALITY_SUITES[:2] for s in wanted):
        subs = _subinstances(inst, built.loc, cap)
        ctxs = _contexts(built.loc, subs, cap, out, iid)

    for suite in wanted:
        if suite == "groups":
            _run_block(out, f"{iid}/", lambda: lemma_suite_group_core(G, p))
        elif suite == "fusion":
            _run_block(out, f"{iid}/", lambda: lemma_suite_fusion_core(G, p))
        elif suite == "products":
            _run_block(out, f"{iid}/", lambda: lemma_suite_products(G, p))
        elif suite == "partial":
            _run_block(out, f"{iid}/", lambda: lemma_suite_partial(G, p))
            _run_block(out, f"{iid}/",
                       lambda: verify_action(built.loc, cap=cap))
        elif suite == "normalizer":
            for label, _ in subs:
                ctx = ctxs.get(label)
                if ctx is None:
                    continue
                pre = f"{iid}/{label}/"
                _run_block(out, pre, lambda c=ctx: verify_main_theorem_A(c))
                _run_block(out, pre,
                           lambda c=ctx: verify_conjugation(c, built.F))
                _run_block(out, pre,
                           lambda c=ctx: verify_normalizer_theorems(c, built.F))
            if is_constrained(built.F):
                _constrained_sweep(out, iid, built, cap)
        elif suite == "centralizer":
            for label, _ in subs:
                ctx = ctxs.get(label)
                if ctx is None:
                    continue
                _run_block(out, f"{iid}/{label}/",
                           lambda c=ctx: verify_centralizer_theorems(c, built.F))
        elif suite == "bijection":
            _run_block(out, f"{iid}/",
                       lambda: verify_bijection(built.loc, cap=cap, F=built.F))
    return out


# ---------------------------------------------------------------------------
# report rendering

def render_lines(records: list[Rec]) -> str:
    lines = []
    for seq, (path, anchor, ok, wit, ms) in enumerate(records, 1):
        word = "ok" if ok else "not ok"
        lines.append(f'{word} {seq} {path} anchor="{anchor}" time_ms={ms}')
        if wit:
            lines.extend("    " + w for w in str(wit).splitlines())
    lines.append(f"1..{len(records)}")
    return "\n".join(lines) + "\n"


def render_text(records: list[Rec]) -> str:
    by_inst: dict[str, list[Rec]] = {}
    for rec in records:
        by_inst.setdefault(rec[0].split("/", 1)[0], []).append(rec)
    lines = []
    nbad = 0
    for iid, recs in by_inst.items():
        bad = [r for r in recs if not r[2]]
        nbad += len(bad)
        ms = sum(r[4] for r in recs)
        lines.append(f"instance {iid}: {len(recs)} checks, "
                     f"{len(bad)} failed, {ms} ms")
        for path, _, _, wit, _ in bad:
            lines.append(f"  not ok {path}")
            if wit:
                lines.extend("      " + w for w in str(wit).splitlines())
    lines.append(f"total: {len(records)} checks, {nbad} failed")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands

def _read_spec(catalog: str, fname: str) -> str:
    path = os.path.join(catalog, fname)
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path) as fh:
        return fh.read()


def _resolve_ids(args_ids: list[str], include_fuzz: bool = True) -> list[str]:
    if args_ids:
        unknown = [i for i in args_ids if i not in INSTANCES]
        if unknown:
            print(f"unknown instance id(s): {', '.join(unknown)}; "
                  f"known: {', '.join(INSTANCES)}", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
        return args_ids
    ids = list(INSTANCES)
    if not include_fuzz:
        ids = [i for i in ids if INSTANCES[i].suites != ("fuzz",)]
    return ids


def cmd_catalog_list(args) -> int:
    catalog = args.catalog or catalog_dir()
    rows = [("id", "degree", "order", "prime", "regular", "suites")]
    for iid in _resolve_ids(args.instance):
        inst = INSTANCES[iid]
        if inst.grp_file is None:
            rows.append((iid, "-", "-", "-", "-", ",".join(inst.suites)))
            continue
        G = load_group(_read_spec(catalog, inst.grp_file),
                       cap=inst.cap_order, name=iid)
        exp = {True: "yes", False: "no", None: "?"}[inst.expect_regular]
        rows.append((iid, str(G.degree), str(G.n),
                     str(args.prime or G.spec_prime or "-"), exp,
                     ",".join(inst.suites)))
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    for r in rows:
        print("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return EXIT_OK


def cmd_build(args) -> int:
    catalog = args.catalog or catalog_dir()
    cache_root = _cache_root(getattr(args, "cache_dir", None))
    for iid in _resolve_ids(args.instance, include_fuzz=False):
        inst = INSTANCES[iid]
        text = _read_spec(catalog, inst.grp_file)
        G = load_group(text, cap=args.cap_order or inst.cap_order, name=iid)
        p = args.prime or G.spec_prime
        if p is None:
            raise GroupSpecError(f"{iid}: no prime available")
        t0 = time.perf_counter()
        built = build_artifacts(G, p, args.cap_locality or inst.cap_locality,
                                not args.no_cache, cache_root, spec=text)
        ms = int(round((time.perf_counter() - t0) * 1000))
        print(f"{iid}: |G|={G.n} |S|={popcount(built.loc.S_mask)} "
              f"|Delta|={len(built.loc.delta_ambient)} |L|={built.loc.m} "
              f"regular={built.regular} cache={built.cache_state} "
              f"time_ms={ms}")
    return EXIT_OK


def _verify_payload(payload) -> tuple[str, str, object]:
    """Run one instance in a worker process; exceptions travel as codes."""
    (iid, catalog, prime, suites, use_cache, cache_root,
     cap_order, cap_locality, fuzz_per_host) = payload
    try:
        recs = verify_instance(INSTANCES[iid], catalog, prime, suites,
                               use_cache, cache_root, cap_order, cap_locality,
                               fuzz_per_host=fuzz_per_host)
        return iid, "ok", recs
    except FileNotFoundError as e:
        return iid, "missing", str(e)
    except CapExceeded as e:
        return iid, "cap", str(e)
    except GroupSpecError as e:
        return iid, "parse", str(e)


def cmd_verify(args) -> int:
    catalog = args.catalog or catalog_dir()
    cache_root = _cache_root(getattr(args, "cache_dir", None))
    suites = tuple(args.suite.split(",")) if args.suite else None
    if suites:
        unknown = [s for s in suites if s not in SUITE_NAMES]
        if unknown:
            print(f"unknown suite(s): {', '.join(unknown)}; "
                  f"known: {', '.join(SUITE_NAMES)}", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
    ids = _resolve_ids(args.instance)
    payloads = [(iid, catalog, args.prime, suites, not args.no_cache,
                 cache_root, args.cap_order, args.cap_locality,
                 args.fuzz_per_host) for iid in ids]
    results: list[tuple[str, str, object]] = []
    if args.jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_payload, payloads))
    else:
        results = [_verify_payload(pl) for pl in payloads]

    records: list[Rec] = []
    for iid, status, body in results:
        if status == "ok":
            records.extend(body)
            continue
        print(f"{iid}: {status} error: {body}", file=sys.stderr)
        return {"missing": EXIT_MISSING_FILE, "parse": EXIT_PARSE_ERROR,
                "cap": EXIT_CAP_EXCEEDED}[status]
    render = render_text if args.format == "text" else render_lines
    sys.stdout.write(render(records))
    failed = sum(1 for r in records if not r[2])
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--catalog", metavar="DIR",
                        help="directory of .grp files (default: bundled)")
    shared.add_argument("--prime", type=int, metavar="P",
                        help="override the prime from the group files")
    shared.add_argument("--cap-order", type=int, metavar="N",
                        help="group order cap")
    shared.add_argument("--cap-locality", type=int, metavar="N",
                        help="partial-subgroup enumeration cap")
    shared.add_argument("--no-cache", action="store_true",
                        help="bypass the artifact cache")
    shared.add_argument("--cache-dir", metavar="DIR",
                        help="cache directory (default: $LOCALITY_LAB_CACHE)")

    ap = argparse.ArgumentParser(
        prog="locality-lab",
        description="verify normalizer and centralizer theorems for "
                    "subnormal subsystems over a catalog of finite groups")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p_list = sub.add_parser("list", parents=[shared],
                            help="show the instance catalog")
    p_list.add_argument("instance", nargs="*")
    p_list.set_defaults(fn=cmd_catalog_list)

    p_build = sub.add_parser("build", parents=[shared],
                             help="construct and cache artifacts")
    p_build.add_argument("instance", nargs="*")
    p_build.set_defaults(fn=cmd_build)

    p_verify = sub.add_parser("verify", parents=[shared],
                              help="run verification suites")
    p_verify.add_argument("instance", nargs="*")
    p_verify.add_argument("--suite", metavar="NAME[,NAME...]",
                          help="override the per-instance suite selection; "
                               "names: " + ", ".join(SUITE_NAMES))
    p_verify.add_argument("--jobs", type=int, default=1, metavar="N",
                          help="verify instances in N worker processes")
    p_verify.add_argument("--format", choices=("text", "lines"),
                          default="lines", help="report format")
    p_verify.add_argument("--fuzz-per-host", type=int, default=FUZZ_PER_HOST,
                          metavar="N", help="mutants per fuzz host")
    p_verify.set_defaults(fn=cmd_verify)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except FileNotFoundError as e:
        print(f"missing file: {e}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP_EXCEEDED
    except GroupSpecError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
