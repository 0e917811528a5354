"""Batch entry point: run a command script against a netlist and tech.

run_script drives a Session exactly like the HTTP layer does, then
writes the three artifacts (layout.json, layout.svg, report.json) and
summarizes the outcome.  In strict mode any DRC violation or LVS
mismatch makes the exit code nonzero; a failing command always does,
strict or not, and aborts the run with its line number.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import dsl
from .errors import EngineError, ScriptError
from .layout import to_canonical_json, to_svg
from .tech import load_tech_file
from .verify import verification_report


@dataclass(frozen=True)
class RunReport:
    design: str
    commands_executed: int
    drc_violations: int
    lvs_verdict: str
    total_wirelength: int
    artifacts: dict[str, str]

    def to_json(self) -> dict:
        return {
            "design": self.design,
            "commands_executed": self.commands_executed,
            "drc_violations": self.drc_violations,
            "lvs_verdict": self.lvs_verdict,
            "total_wirelength": self.total_wirelength,
            "artifacts": dict(self.artifacts),
        }


def run_script(tech_path, netlist_path, script_path, out_dir,
               strict: bool = True, top: str | None = None) -> tuple[RunReport, int]:
    """Execute a script; returns (report, exit_code).

    exit_code is 0 when every command ran and, in strict mode, DRC is
    clean and LVS says MATCH.  Artifacts are written only when the
    script itself completes.
    """
    tech = load_tech_file(tech_path)
    netlist_text = Path(netlist_path).read_text(encoding="utf-8")
    script_text = Path(script_path).read_text(encoding="utf-8")

    session = dsl.new_session(tech, netlist_text, top=top)
    commands = dsl.parse_script(script_text)
    executed = 0
    for line_no, cmd in commands:
        try:
            session, _ = dsl.apply(session, cmd)
        except EngineError as exc:
            raise ScriptError(
                f"line {line_no}: {dsl.print_command(cmd)}: {exc}",
                line=line_no, cause=exc)
        executed += 1

    report = verification_report(session.current, session.netlist, tech)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    layout_path = out / "layout.json"
    svg_path = out / "layout.svg"
    report_path = out / "report.json"
    layout_path.write_bytes(to_canonical_json(session.current))
    svg_path.write_text(to_svg(session.current, tech), encoding="utf-8")
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                           encoding="utf-8")

    drc_count = len(report["drc"])
    verdict = report["lvs"]["verdict"]
    run = RunReport(
        design=session.netlist.name,
        commands_executed=executed,
        drc_violations=drc_count,
        lvs_verdict=verdict,
        total_wirelength=report["wirelength"]["total"],
        artifacts={
            "layout": str(layout_path),
            "svg": str(svg_path),
            "report": str(report_path),
        },
    )
    exit_code = 0
    if strict and (drc_count > 0 or verdict != "MATCH"):
        exit_code = 1
    return run, exit_code
