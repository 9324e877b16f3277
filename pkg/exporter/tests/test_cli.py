"""CLI argument handling and error reporting."""

import json

import pytest

import gridcase_export.cli as cli
from gridcase_export import ExportManifest


def test_requires_all_or_names(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["--out", str(tmp_path)])
    assert excinfo.value.code == 2


def test_rejects_all_combined_with_names(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["case9", "--all", "--out", str(tmp_path)])
    assert excinfo.value.code == 2


def test_unavailable_catalog_reports_json_error(tmp_path, capsys, monkeypatch):
    monkeypatch.setitem(__import__("sys").modules, "pandapower", None)
    code = cli.main(["case9", "--out", str(tmp_path)])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "CatalogUnavailableError"
    assert "pandapower" in err["detail"]


def test_unknown_case_reports_json_error(tmp_path, capsys):
    code = cli.main(["case99", "--out", str(tmp_path)])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "UnknownCaseError"


def test_success_summary_counts_flagged_rows(tmp_path, capsys, monkeypatch):
    rows = {
        "case9": ExportManifest(name="case9", status="ok", n=9, m=9, n_gen=2),
        "case5": ExportManifest(name="case5", status="mismatch: details"),
    }
    monkeypatch.setattr(
        cli, "export_topology", lambda name, out: rows[name]
    )
    code = cli.main(["case9", "case5", "--out", str(tmp_path)])
    assert code == 0
    out = json.loads(capsys.readouterr().out.strip())
    assert out["exported"] == 1
    assert out["flagged"] == [{"name": "case5", "status": "mismatch: details"}]
