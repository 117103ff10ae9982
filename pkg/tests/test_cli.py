import json

import pytest

from fusionkit import cli
from fusionkit.cli import FAIL, PASS, SKIPPED, ReportEntry, SuiteConfig, emit_report, main, render, summarize
from fusionkit.errors import ConfigError, ResourceError

FAST = ["--suite", "extensions", "--group", "builtin:dihedral:4", "--group", "builtin:dihedral:8"]


def run(tmp_path, argv, name="r.json"):
    out = tmp_path / name
    code = main(["verify", *argv, "--out", str(out)])
    return code, out


# -- config ------------------------------------------------------------------------

def test_unknown_suite_rejected():
    with pytest.raises(ConfigError):
        SuiteConfig(suite="nope")
    assert main(["verify", "--suite", "nope"]) == 2


@pytest.mark.parametrize("kw", [{"budget_elements": 0}, {"budget_closure": -1}, {"prime": 4},
                                {"format": "xml"}, {"jobs": 0}])
def test_bad_config_values(kw):
    with pytest.raises(ConfigError):
        SuiteConfig(suite="lemmas", **kw)


def test_missing_suite_is_config_error(capsys):
    assert main(["verify"]) == 2
    assert "no suite" in capsys.readouterr().err


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# extension counts\nsuite = extensions\ngroup = builtin:dihedral:4\n"
                   "format = text\nbudget_elements = 1_000\n")
    values = cli.read_config(cfg)
    assert values == {"suite": "extensions", "groups": ["builtin:dihedral:4"], "format": "text",
                      "budget-elements": 1000}
    code, out = run(tmp_path, ["--config", str(cfg), "--format", "json"])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["config-echo"]["budget-elements"] == 1000
    assert doc["config-echo"]["format"] == "json"


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["verify", "--config", str(bad)]) == 2
    assert main(["verify", "--config", str(tmp_path / "absent.cfg")]) == 2
    bad.write_text("suite = lemmas\nprime = two\n")
    with pytest.raises(ConfigError):
        cli.read_config(bad)


def test_expand_groups_selectors():
    g = cli.expand_groups(["catalog-upto:8", "builtin:dihedral:8", "builtin:dihedral:8"])
    assert g[:2] == ["builtin:catalog-id:1.1", "builtin:catalog-id:2.1"]
    assert len(g) == 1 + 1 + 2 + 5 + 1 and g[-1] == "builtin:dihedral:8"
    assert len(cli.expand_groups(["extras:lemmas"])) == 4


# -- reports ---------------------------------------------------------------------------

def test_empty_report_summary_zero():
    doc = json.loads(render([], "json", SuiteConfig(suite="lemmas")))
    assert set(doc) == {"version", "config-echo", "entries", "summary"}
    assert doc["summary"] == {"pass": 0, "fail": 0, "skipped": 0}
    assert render([], "text").strip() == "summary pass=0 fail=0 skipped=0"


def test_summary_counts_precondition_as_skipped():
    es = [ReportEntry("a", "x", PASS), ReportEntry("a", "y", FAIL),
          ReportEntry("b", "x", "precondition-violated"), ReportEntry("c", "x", SKIPPED)]
    assert summarize(es) == {"pass": 1, "fail": 1, "skipped": 2}


def test_text_format_one_line_per_entry(tmp_path):
    es = [ReportEntry("a", "op1", PASS, {"n": 1}), ReportEntry("b", "op2", FAIL, {})]
    text = emit_report(es, tmp_path / "r.txt", "text")
    lines = text.splitlines()
    assert len(lines) == 3
    assert lines[0].split() == ["pass", "a", "op1", "n=1"]
    assert (tmp_path / "r.txt").read_text() == text


def test_emit_report_io_error(tmp_path):
    with pytest.raises(OSError):
        emit_report([], tmp_path / "no" / "such" / "dir.json")


def test_json_is_byte_identical_across_runs(tmp_path):
    # the output path is part of the echoed config, so both runs write to the same file
    c1, out = run(tmp_path, FAST)
    first = out.read_bytes()
    c2, out = run(tmp_path, FAST + ["--jobs", "2"])
    assert c1 == c2 == 0
    assert out.read_bytes() == first
    doc = json.loads(first)
    keys = [(e["systemId"], e["operation"]) for e in doc["entries"]]
    assert keys == sorted(keys)
    assert all("elapsedMillis" not in e for e in doc["entries"])
    assert doc["summary"]["fail"] == 0 and doc["summary"]["pass"] == len(keys)


def test_timings_flag_adds_elapsed(tmp_path):
    code, out = run(tmp_path, FAST + ["--timings"])
    assert code == 0
    assert all(isinstance(e["elapsedMillis"], int) for e in json.loads(out.read_text())["entries"])


def test_budget_gives_skipped_verdict(tmp_path):
    code, out = run(tmp_path, ["--suite", "fusion", "--group", "builtin:psl3:4",
                               "--budget-elements", "1000"])
    assert code == 0
    doc = json.loads(out.read_text())
    assert [e["verdict"] for e in doc["entries"]] == [SKIPPED]
    assert doc["summary"] == {"pass": 0, "fail": 0, "skipped": 1}


def test_fail_entry_gives_exit_one(tmp_path, monkeypatch):
    monkeypatch.setitem(cli.SUITE_RUNNERS, "extensions", lambda sid, cfg: [(sid, "forced", FAIL, {})])
    code, out = run(tmp_path, ["--suite", "extensions", "--group", "builtin:dihedral:4"])
    assert code == 1
    assert json.loads(out.read_text())["summary"]["fail"] == 1


def test_resource_error_gives_exit_three(tmp_path, monkeypatch):
    def boom(cfg):
        raise ResourceError("out of memory")
    monkeypatch.setattr(cli, "run_suite", boom)
    assert run(tmp_path, FAST)[0] == 3


def test_missing_fixture_directory(tmp_path, monkeypatch):
    monkeypatch.setenv("FUSIONKIT_FIXTURES", str(tmp_path / "empty"))
    assert run(tmp_path, ["--suite", "gg", "--group", "file:2x2.psl3_4.perm"])[0] == 2


def test_fixture_env_var_is_honoured(tmp_path, monkeypatch):
    from fusionkit.catalog import fixture_dir
    src = fixture_dir() / "2x2.psl3_4.perm"
    (tmp_path / "copy.perm").write_bytes(src.read_bytes())
    monkeypatch.setenv("FUSIONKIT_FIXTURES", str(tmp_path))
    assert cli.group_order("file:copy.perm", 10**7) == 4 * 20160


# -- suites ------------------------------------------------------------------------------

def test_gg_suite_small(tmp_path):
    code, out = run(tmp_path, ["--suite", "gg", "--group", "builtin:psl2:8", "--group", "builtin:psl3:2"])
    assert code == 0
    ents = json.loads(out.read_text())["entries"]
    assert {e["systemId"] for e in ents} == {"builtin:psl2:8", "builtin:psl3:2"}
    assert all(e["verdict"] == PASS for e in ents)


def test_lemmas_suite_order16(tmp_path):
    code, out = run(tmp_path, ["--suite", "lemmas", "--group", "catalog-upto:16"])
    doc = json.loads(out.read_text())
    assert code == 0 and doc["summary"]["fail"] == 0 and doc["summary"]["pass"] > 0


def test_lemmas_wrong_prime_is_precondition(tmp_path):
    code, out = run(tmp_path, ["--suite", "lemmas", "--group", "builtin:dihedral:8", "--prime", "3"])
    assert code == 0
    assert [e["verdict"] for e in json.loads(out.read_text())["entries"]] == ["precondition-violated"]
