"""Scenario runner: loading, validation, exit codes, reports."""

import json

import pytest

from eulerchar.cli import (
    ScenarioError,
    bundled_scenarios,
    load_scenario,
    main,
    run_scenario,
    validate_scenario,
)


def write_scenario(tmp_path, obj, name="sc.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_at_least_ten_bundled_scenarios():
    assert len(bundled_scenarios()) >= 10


def test_every_bundled_scenario_validates():
    for name in bundled_scenarios():
        sc = load_scenario(name)
        assert sc["name"] == name


def test_list_command(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "s2-rotation" in out
    assert "disk-constant-field" in out


def test_list_json_and_filter(capsys):
    assert main(["list", "--json"]) == 0
    listing = json.loads(capsys.readouterr().out)
    assert len(listing["scenarios"]) >= 10
    assert main(["list", "--filter", "boundary"]) == 0
    out = capsys.readouterr().out
    names = [ln.split()[0] for ln in out.splitlines()
             if ln.startswith("  ")]
    assert names and all(
        "boundary-theorem" in json.loads(
            (bundled_scenarios()[n]).read_text())["methods"]
        for n in names if n in bundled_scenarios()
    )
    assert "annulus-hedgehog" not in out


def test_run_s2_rotation(tmp_path, capsys):
    code = main(["run", "s2-rotation", "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "s2-rotation.report.json").read_text())
    rows = {r["method"]: r for r in report["summary"]}
    assert rows["index-sum"]["rounded"] == 2
    assert rows["index-sum"]["oracle"] == 2
    assert rows["gbc-integral"]["rounded"] == 2
    assert all(r["agree"] for r in report["summary"])


def test_run_disk_constant_field(tmp_path):
    code = main(["run", "disk-constant-field", "--out", str(tmp_path)])
    assert code == 0
    report = json.loads(
        (tmp_path / "disk-constant-field.report.json").read_text())
    payload = report["methods"]["boundary-theorem"]
    assert payload["chi_morse"] == 1
    assert payload["chi_paper"] == 0.0
    assert payload["flags"] == ["paper-halfsum-not-endorsed"]
    assert report["summary"][0]["agree"] is True


def test_assert_paper_boundary_flips_exit_code():
    assert main(["run", "disk-constant-field"]) == 0
    assert main(["run", "disk-constant-field", "--assert-paper-boundary"]) == 2
    # endorsed scenarios keep passing under the strict flag
    assert main(["run", "disk-outward-radial", "--assert-paper-boundary"]) == 0


def test_missing_file_exit_one(capsys):
    assert main(["run", "/no/such/scenario.json"]) == 1
    assert "error" in capsys.readouterr().err


def test_malformed_json_reports_line_and_column(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text('{"schema": 1,\n "name": oops}')
    assert main(["run", str(p)]) == 1
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_unknown_field_rejected(tmp_path, capsys):
    path = write_scenario(tmp_path, {
        "schema": 1, "name": "x", "methods": ["index-sum"],
        "domain": {"kind": "torus"},
        "field": {"kind": "builtin", "name": "constant", "components": [1, 1]},
        "surprise": True,
    })
    assert main(["run", path]) == 1
    assert "surprise" in capsys.readouterr().err


def test_schema_version_enforced(tmp_path):
    with pytest.raises(ScenarioError):
        validate_scenario({"schema": 2, "name": "x", "methods": ["index-sum"],
                           "domain": {}}, "test")
    with pytest.raises(ScenarioError):
        validate_scenario({"name": "x", "methods": ["index-sum"],
                           "domain": {}}, "test")


def test_unknown_method_rejected(tmp_path):
    with pytest.raises(ScenarioError):
        validate_scenario({"schema": 1, "name": "x",
                           "methods": ["frobnicate"], "domain": {}}, "test")


def test_json_output_equals_report_file(tmp_path, capsys):
    code = main(["run", "torus-constant", "--json", "--out", str(tmp_path)])
    assert code == 0
    printed = capsys.readouterr().out
    on_disk = (tmp_path / "torus-constant.report.json").read_text()
    assert printed == on_disk


def test_reports_byte_identical_across_runs(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        assert main(["run", "plane-three-zeros", "--out", str(out)]) == 0
    ra = (a / "plane-three-zeros.report.json").read_bytes()
    rb = (b / "plane-three-zeros.report.json").read_bytes()
    assert ra == rb


def test_resolution_scale_threads_through(capsys):
    assert main(["run", "s2-gbc-small", "--resolution-scale", "0.5"]) == 0
    assert main(["run", "s2-gbc-small", "--resolution-scale", "-1"]) == 1


def test_custom_scenario_file(tmp_path):
    path = write_scenario(tmp_path, {
        "schema": 1,
        "name": "custom-disk",
        "methods": ["boundary-theorem"],
        "domain": {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0},
        "field": {"kind": "builtin", "name": "identity", "dimension": 2},
    })
    assert main(["run", path, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "custom-disk.report.json").read_text())
    assert report["methods"]["boundary-theorem"]["chi_morse"] == 1


def test_scenario_resolutions_override(tmp_path):
    path = write_scenario(tmp_path, {
        "schema": 1,
        "name": "coarse-three-zeros",
        "methods": ["index-sum"],
        "domain": {"kind": "ball", "center": [0.0, 0.0], "radius": 2.0},
        "field": {"kind": "complex-product",
                  "roots": [[-0.6, 0.1]], "conj_roots": [[0.2, 0.6]]},
        "resolutions": {"grid": 16, "scale": 1.5},
    })
    assert main(["run", path]) == 0
    bad = write_scenario(tmp_path, {
        "schema": 1, "name": "y", "methods": ["index-sum"],
        "domain": {"kind": "torus"},
        "field": {"kind": "builtin", "name": "torus-sines"},
        "resolutions": {"bogus": 1},
    }, name="bad.json")
    assert main(["run", bad]) == 1


def test_run_scenario_programmatic():
    sc = load_scenario("annulus-hedgehog")
    report, rows, ok = run_scenario(sc)
    assert ok and rows[0]["method"] == "flatness-scan"
    assert report["methods"]["flatness-scan"]["flux"]["quantum_rounded"] == 1
