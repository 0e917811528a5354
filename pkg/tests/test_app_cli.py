"""Batch runner and CLI tests."""

import json

import pytest
from click.testing import CliRunner

from cellgrid.app import run_script
from cellgrid.cli import main
from cellgrid.errors import ScriptError

from conftest import CORPUS, DATA, read_corpus

TECH = str(CORPUS / "abs3ml.tech.json")
NAND2_SP = str(CORPUS / "nand2.sp")
NAND2_CMDS = str(CORPUS / "nand2.cmds")


@pytest.fixture
def runner():
    return CliRunner()


# --- run_script ------------------------------------------------------------------


def test_run_script_writes_all_artifacts(tmp_path):
    report, code = run_script(TECH, NAND2_SP, NAND2_CMDS, tmp_path / "out")
    assert code == 0
    assert report.design == "NAND2"
    assert report.commands_executed == 11
    assert report.drc_violations == 0
    assert report.lvs_verdict == "MATCH"
    assert report.total_wirelength == 14

    out = tmp_path / "out"
    assert (out / "layout.json").read_bytes() == (DATA / "nand2_layout.json").read_bytes()
    assert (out / "layout.svg").read_text().startswith("<svg ")
    saved = json.loads((out / "report.json").read_text())
    assert saved["lvs"]["verdict"] == "MATCH"
    assert saved["wirelength"]["total"] == 14
    assert set(report.artifacts) == {"layout", "svg", "report"}


def test_run_script_strict_flags_incomplete_routing(tmp_path):
    script = tmp_path / "partial.cmds"
    script.write_text("place_rows\nroute net ZN auto\n")
    report, code = run_script(TECH, NAND2_SP, str(script), tmp_path / "out")
    assert report.lvs_verdict == "MISMATCH"
    assert code == 1
    # artifacts still written so the failure can be inspected
    assert (tmp_path / "out" / "layout.json").exists()


def test_run_script_non_strict_always_exits_zero(tmp_path):
    script = tmp_path / "partial.cmds"
    script.write_text("place_rows\n")
    _, code = run_script(TECH, NAND2_SP, str(script), tmp_path / "out", strict=False)
    assert code == 0


def test_run_script_failure_carries_line_number(tmp_path):
    script = tmp_path / "bad.cmds"
    script.write_text("place_rows\n\n# comment\nroute net NOPE auto\n")
    with pytest.raises(ScriptError) as exc:
        run_script(TECH, NAND2_SP, str(script), tmp_path / "out")
    assert exc.value.fields["line"] == 4
    assert "route net NOPE auto" in str(exc.value)
    # nothing written for an aborted run
    assert not (tmp_path / "out").exists()


def test_run_script_report_json_round_trip(tmp_path):
    report, _ = run_script(TECH, NAND2_SP, NAND2_CMDS, tmp_path / "out")
    doc = report.to_json()
    assert doc["design"] == "NAND2"
    assert doc["artifacts"]["layout"].endswith("layout.json")


# --- cellgrid run ----------------------------------------------------------------


def test_cli_run_happy_path(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(main, [
        "run", "--tech", TECH, "--netlist", NAND2_SP,
        "--script", NAND2_CMDS, "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "design: NAND2" in result.output
    assert "drc violations: 0" in result.output
    assert "lvs: MATCH" in result.output
    assert "wirelength: 14" in result.output
    assert "wrote layout:" in result.output
    assert (out / "layout.svg").exists()


def test_cli_run_strict_failure_exits_one(runner, tmp_path):
    script = tmp_path / "partial.cmds"
    script.write_text("place_rows\n")
    result = runner.invoke(main, [
        "run", "--tech", TECH, "--netlist", NAND2_SP,
        "--script", str(script), "--out", str(tmp_path / "out")])
    assert result.exit_code == 1
    assert "lvs: MISMATCH" in result.output


def test_cli_run_engine_error_is_json_on_stderr(runner, tmp_path):
    script = tmp_path / "bad.cmds"
    script.write_text("route net NOPE auto\n")
    result = runner.invoke(main, [
        "run", "--tech", TECH, "--netlist", NAND2_SP,
        "--script", str(script), "--out", str(tmp_path / "out")])
    assert result.exit_code == 2
    err = json.loads(result.stderr)
    assert err["error"]["type"] == "ScriptError"
    assert err["error"]["line"] == 1


def test_cli_run_missing_file_is_usage_error(runner, tmp_path):
    result = runner.invoke(main, [
        "run", "--tech", TECH, "--netlist", str(tmp_path / "nope.sp"),
        "--script", NAND2_CMDS, "--out", str(tmp_path / "out")])
    assert result.exit_code == 2
    assert "does not exist" in result.output


# --- cellgrid check --------------------------------------------------------------


def test_cli_check_prints_netlist_summary(runner):
    result = runner.invoke(main, ["check", "--tech", TECH, "--netlist", NAND2_SP])
    assert result.exit_code == 0
    assert ".SUBCKT NAND2 A B ZN VDD VSS" in result.output
    assert "* NAND2: 4 devices, 4 signal nets" in result.output


def test_cli_check_bad_spice_exits_two(runner, tmp_path):
    bad = tmp_path / "bad.sp"
    bad.write_text(".SUBCKT X A\nMN1 A\n.ENDS\n")
    result = runner.invoke(main, ["check", "--tech", TECH, "--netlist", str(bad)])
    assert result.exit_code == 2
    assert json.loads(result.stderr)["error"]["type"] == "MalformedDeviceLine"


# --- cellgrid render -------------------------------------------------------------


def test_cli_render_layout_json(runner, tmp_path):
    out = tmp_path / "pic.svg"
    result = runner.invoke(main, [
        "render", "--layout", str(DATA / "nand2_layout.json"),
        "--tech", TECH, "--out", str(out)])
    assert result.exit_code == 0, result.output
    text = out.read_text()
    assert text.startswith("<svg ")
    assert ">ZN</text>" in text


def test_cli_render_rejects_garbage(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    result = runner.invoke(main, [
        "render", "--layout", str(bad), "--tech", TECH,
        "--out", str(tmp_path / "x.svg")])
    assert result.exit_code == 2
    assert json.loads(result.stderr)["error"]["type"] == "LayoutError"


# --- cellgrid serve (config handling only, no socket) ----------------------------


def test_cli_serve_reads_llm_config(runner, tmp_path, monkeypatch):
    captured = {}

    def fake_run(app, **kw):
        captured["app"] = app
        captured.update(kw)

    import uvicorn
    monkeypatch.setattr(uvicorn, "run", fake_run)
    cfg = tmp_path / "llm.json"
    cfg.write_text(json.dumps({"endpoint_url": "http://x/v1",
                               "model_id": "m", "api_key_env": "KEY"}))
    result = runner.invoke(main, [
        "serve", "--tech", TECH, "--port", "8123", "--llm-config", str(cfg)])
    assert result.exit_code == 0, result.output
    assert captured["port"] == 8123
    assert captured["app"].title == "cellgrid"


def test_cli_serve_bad_tech_exits_two(runner, tmp_path):
    bad = tmp_path / "bad.tech.json"
    bad.write_text("{}")
    result = runner.invoke(main, ["serve", "--tech", str(bad)])
    assert result.exit_code == 2
    assert json.loads(result.stderr)["error"]["type"] == "SchemaError"
