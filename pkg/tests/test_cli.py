import os
import re

import pytest

from locality_lab.cli import (
    EXIT_CAP_EXCEEDED, EXIT_CHECK_FAILED, EXIT_MISSING_FILE,
    EXIT_PARSE_ERROR, EXIT_USAGE, FUZZ_HOSTS, INSTANCES,
    _subinstances, build_artifacts, main, render_lines,
)
from locality_lab.groups import popcount
from locality_lab.regular import bootstrap_regular

LINE = re.compile(r'^(ok|not ok) \d+ \S+ anchor="[\w/-]+" time_ms=\d+$')


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def _strip_times(text):
    return re.sub(r"time_ms=\d+", "time_ms=X", text)


# ------------------------------------------------------------------ verify

def test_verify_trivial_group_is_vacuously_green(capsys):
    code, out = _run(capsys, "verify", "trivial-group", "--no-cache")
    assert code == 0
    assert "not ok" not in out
    assert out.count("\nok ") + out.startswith("ok ") >= 20


def test_report_line_grammar(capsys):
    code, out = _run(capsys, "verify", "v4", "--no-cache")
    assert code == 0
    lines = out.splitlines()
    assert lines[-1] == f"1..{sum(1 for l in lines if LINE.match(l))}"
    for line in lines[:-1]:
        assert LINE.match(line) or line.startswith("    "), line


def test_reports_are_deterministic_modulo_wall_time(capsys):
    _, out1 = _run(capsys, "verify", "v4", "--no-cache")
    _, out2 = _run(capsys, "verify", "v4", "--no-cache")
    assert _strip_times(out1) == _strip_times(out2)


def test_cache_and_no_cache_reports_agree(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LOCALITY_LAB_CACHE", str(tmp_path))
    code, cold = _run(capsys, "verify", "c4")
    assert code == 0
    assert any(f.endswith(".json") for f in os.listdir(tmp_path))
    _, warm = _run(capsys, "verify", "c4")
    _, off = _run(capsys, "verify", "c4", "--no-cache")
    assert _strip_times(cold) == _strip_times(warm) == _strip_times(off)


def test_text_format_summarizes(capsys):
    code, out = _run(capsys, "verify", "v4", "--no-cache", "--format", "text")
    assert code == 0
    assert out.splitlines()[0].startswith("instance v4: ")
    assert "0 failed" in out


def test_jobs_match_serial_run(capsys):
    _, serial = _run(capsys, "verify", "c2", "v4", "--no-cache")
    _, parallel = _run(capsys, "verify", "c2", "v4", "--no-cache",
                       "--jobs", "2")
    assert _strip_times(serial) == _strip_times(parallel)


def test_forced_bijection_suite_fails_honestly_on_dic3(capsys):
    # dic3 is not of characteristic 2, so the locality route collapses two
    # subnormals onto one subsystem; the forced suite must say so and exit 6
    code, out = _run(capsys, "verify", "dic3", "--no-cache",
                     "--suite", "bijection")
    assert code == EXIT_CHECK_FAILED
    assert "not ok" in out
    bad = [l for l in out.splitlines() if l.startswith("not ok")]
    assert any("bijection/injective" in l for l in bad)


def test_fuzz_campaign_small(capsys):
    code, out = _run(capsys, "verify", "fuzz", "--fuzz-per-host", "25",
                     "--no-cache")
    assert code == 0
    for host in FUZZ_HOSTS:
        assert f"fuzz/{host}/all-mutants-rejected" in out
    assert "25/25 mutants rejected" in out


# ------------------------------------------------------------- exit codes

def test_corrupted_group_file_exits_parse_error(tmp_path, capsys):
    (tmp_path / "d8.grp").write_text("degree 3\nprime 2\n9 9 9\n")
    code, _ = _run(capsys, "verify", "d8", "--catalog", str(tmp_path),
                   "--no-cache")
    assert code == EXIT_PARSE_ERROR


def test_missing_group_file_exits_missing(tmp_path, capsys):
    code, _ = _run(capsys, "verify", "d8", "--catalog", str(tmp_path),
                   "--no-cache")
    assert code == EXIT_MISSING_FILE


def test_order_cap_exits_cap_code(capsys):
    code, _ = _run(capsys, "verify", "s4", "--cap-order", "10", "--no-cache")
    assert code == EXIT_CAP_EXCEEDED


def test_unknown_instance_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["verify", "nope"])
    assert ei.value.code == EXIT_USAGE


def test_unknown_suite_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["verify", "v4", "--suite", "frobnicate"])
    assert ei.value.code == EXIT_USAGE


# ------------------------------------------------------------- list, build

def test_list_shows_catalog(capsys):
    code, out = _run(capsys, "list")
    assert code == 0
    assert "psl27xs4" in out and "trivial-group" in out
    row = [l for l in out.splitlines() if l.startswith("s4 ")][0]
    assert " 24 " in row


def test_build_reports_artifact_stats(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LOCALITY_LAB_CACHE", str(tmp_path))
    code, out = _run(capsys, "build", "d8")
    assert code == 0
    assert re.search(r"d8: \|G\|=8 \|S\|=8 \|Delta\|=\d+ \|L\|=8 "
                     r"regular=True cache=miss", out)
    code, out = _run(capsys, "build", "d8")
    assert "cache=hit" in out


# ------------------------------------------------------- designated expansion

def test_s4_all_expands_to_the_seven_subnormals(cat):
    bs = bootstrap_regular(cat("s4"), 2)
    subs = _subinstances(INSTANCES["s4-all"], bs.loc, 2000)
    assert len(subs) == 7
    assert [popcount(h) for _, h in subs] == [1, 2, 2, 2, 4, 12, 24]
    assert subs[0][0] == "sub01-o1"


def test_flagship_designates_component_and_c2(cat):
    inst = INSTANCES["psl27xs4"]
    labels = [d[0] for d in inst.designated]
    assert labels == ["c2-h1", "component"]
    assert inst.cap_locality == 6000


def test_cached_artifacts_reproduce_fusion_closure(tmp_path, cat):
    from locality_lab.fusion import digest
    from locality_lab.regular import fusion_of

    G = cat("s4")
    spec = "degree 4\nprime 2\n2 3 4 1\n2 1 3 4\n"
    cold = build_artifacts(G, 2, 2000, True, str(tmp_path), spec=spec)
    warm = build_artifacts(G, 2, 2000, True, str(tmp_path), spec=spec)
    assert cold.cache_state == "miss" and warm.cache_state == "hit"
    assert warm.loc.delta_ambient == cold.loc.delta_ambient
    assert digest(fusion_of(warm.loc)) == digest(fusion_of(cold.loc))
    assert warm.regular is cold.regular is True


def test_render_lines_numbers_and_indents():
    recs = [("x/a", "a", True, "w1\nw2", 3), ("x/b", "b", False, "boom", 1)]
    text = render_lines(recs)
    assert text.splitlines() == [
        'ok 1 x/a anchor="a" time_ms=3', "    w1", "    w2",
        'not ok 2 x/b anchor="b" time_ms=1', "    boom", "1..2",
    ]
