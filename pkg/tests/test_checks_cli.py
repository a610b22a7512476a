import json
import subprocess
import sys
from pathlib import Path

import pytest

from kahlercheck import checks as ck
from kahlercheck import report
from kahlercheck.catalog import RunOptions
from kahlercheck.cli import main
from kahlercheck.conventions import MANIFEST, manifest_hash


def test_registry_shape():
    assert len(ck.REGISTRY) > 40
    suites = {d.suite for d in ck.REGISTRY.values()}
    assert suites == set(ck.SUITES)
    for d in ck.REGISTRY.values():
        assert d.tolerance > 0
        assert d.fixtures


def test_run_check_pass_and_fail_gating():
    r = ck.run_check("ID-SHARP", "FLAT2", 0)
    assert r.status == "pass"
    assert r.residual_sup <= r.tolerance
    assert r.manifest_hash == manifest_hash()
    tight = ck.run_check("ID-DIV-TR", "PERT2", 0,
                         RunOptions(tolerance_scale=1e-12, node_count=40))
    assert tight.status == "fail"


def test_skipped_checks_carry_reasons():
    r = ck.run_check("V-KUR1", "FS", 0, RunOptions(node_count=20))
    assert r.status == "skipped-with-reason"
    assert r.reason


def test_report_roundtrip(tmp_path):
    recs = [ck.run_check("ID-SHARP", "FLAT2", 0).to_record(),
            ck.run_check("ID-CONTR", "FLAT2", 0).to_record()]
    rep = report.write_json(recs, tmp_path / "report.json")
    assert rep["schema_version"] == report.SCHEMA_VERSION
    loaded = json.loads((tmp_path / "report.json").read_text())
    assert loaded["summary"]["pass"] == 2
    report.write_csv(recs, tmp_path / "summary.csv")
    lines = (tmp_path / "summary.csv").read_text().strip().splitlines()
    assert lines[0].startswith("check_id,fixture,seed,status")
    assert len(lines) == 3
    table = report.format_table(recs)
    assert "ID-SHARP" in table and "pass" in table


def _strip_runtime(rep):
    for r in rep["results"]:
        r.pop("runtime_ms", None)
    return rep


def test_cli_run_deterministic(tmp_path):
    argv = ["run", "--check", "ID-SHARP,ID-CONTR,S-PERELMAN", "--fixture",
            "FLAT2", "--out", str(tmp_path / "a"), "--quiet"]
    assert main(argv) == 0
    argv[argv.index(str(tmp_path / "a"))] = str(tmp_path / "b")
    assert main(argv) == 0
    a = _strip_runtime(json.loads((tmp_path / "a" / "report.json").read_text()))
    b = _strip_runtime(json.loads((tmp_path / "b" / "report.json").read_text()))
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_cli_tolerance_scale_forces_failures(tmp_path):
    code = main(["run", "--check", "ID-DIV-TR", "--fixture", "PERT2",
                 "--tolerance-scale", "1e-12", "--out", str(tmp_path), "--quiet"])
    assert code == 1


def test_cli_config_file_and_errors(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"suites": ["identity"], "fixtures": ["FLAT2"],
                               "checks": ["ID-SHARP"], "out": str(tmp_path / "r")}))
    assert main(["run", "--config", str(cfg), "--quiet"]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["run", "--config", str(bad), "--quiet"]) == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"frobnicate": 1}))
    assert main(["run", "--config", str(unknown), "--quiet"]) == 2
    assert main(["run", "--check", "NOPE", "--quiet"]) == 2
    assert main(["run", "--suite", "bogus", "--quiet"]) == 2


def test_cli_explain_and_list(capsys):
    assert main(["explain", "V-ADJ"]) == 0
    out = capsys.readouterr().out
    assert "var-adjDer" in out
    assert main(["explain", "ID-DIV-TR"]) == 0
    out = capsys.readouterr().out
    assert "div-Tr" in out
    assert main(["explain", "nope"]) == 2
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for suite in ck.SUITES:
        assert f"[{suite}]" in out


def test_cli_conventions(capsys):
    assert main(["conventions"]) == 0
    out = capsys.readouterr().out
    data = json.loads(out)
    assert data == MANIFEST


def test_repo_conventions_copy_matches():
    root = Path(__file__).resolve().parents[1]
    data = json.loads((root / "conventions.json").read_text())
    assert data == MANIFEST


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kahlercheck", "list"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "ID-DIV-TR" in proc.stdout


def test_cli_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = main(["run", "--check", "ID-SHARP", "--fixture", "FLAT2",
                 "--out", str(blocker / "sub"), "--quiet"])
    assert code == 2
