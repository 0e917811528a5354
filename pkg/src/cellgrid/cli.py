"""Command line entry points.

Four subcommands: run a script end to end, serve the HTTP API, check a
netlist without touching a layout, and render a saved layout to SVG.
Engine errors print as one JSON object on stderr and exit 2; a strict
run that completes but fails verification exits 1.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import llm_bridge
from .app import run_script
from .errors import EngineError
from .layout import from_canonical_json, to_svg
from .netlist import parse_spice, print_netlist, signal_nets
from .tech import load_tech_file


def _fail(exc: EngineError):
    click.echo(json.dumps({"error": exc.payload()}, sort_keys=True), err=True)
    sys.exit(2)


@click.group()
def main():
    """Grid layout engine for small standard cells."""


@main.command()
@click.option("--tech", "tech_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--netlist", "netlist_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--script", "script_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--top", default=None, help="Subcircuit to lay out.")
@click.option("--strict/--no-strict", default=True,
              help="Fail the run on DRC violations or an LVS mismatch.")
def run(tech_path, netlist_path, script_path, out_dir, top, strict):
    """Run a command script and write layout, SVG, and report."""
    try:
        report, exit_code = run_script(tech_path, netlist_path, script_path,
                                       out_dir, strict=strict, top=top)
    except EngineError as exc:
        _fail(exc)
    click.echo(f"design: {report.design}")
    click.echo(f"commands: {report.commands_executed}")
    click.echo(f"drc violations: {report.drc_violations}")
    click.echo(f"lvs: {report.lvs_verdict}")
    click.echo(f"wirelength: {report.total_wirelength}")
    for name, path in sorted(report.artifacts.items()):
        click.echo(f"wrote {name}: {path}")
    sys.exit(exit_code)


@main.command()
@click.option("--tech", "tech_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--llm-config", "llm_config_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON file with endpoint_url, model_id, api_key_env.")
@click.option("--static", "static_dir", default=None,
              type=click.Path(exists=True, file_okay=False),
              help="Directory of built viewer assets to serve under /ui.")
def serve(tech_path, host, port, llm_config_path, static_dir):
    """Serve the session API over HTTP."""
    import uvicorn

    from .server import make_app

    try:
        tech = load_tech_file(tech_path)
    except EngineError as exc:
        _fail(exc)
    config = None
    if llm_config_path is not None:
        doc = json.loads(Path(llm_config_path).read_text(encoding="utf-8"))
        config = llm_bridge.BridgeConfig(**doc)
    app = make_app(tech, llm_config=config, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--tech", "tech_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--netlist", "netlist_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def check(tech_path, netlist_path):
    """Parse a netlist against a tech and print what was understood."""
    try:
        tech = load_tech_file(tech_path)
        text = Path(netlist_path).read_text(encoding="utf-8")
        netlists = parse_spice(text, supply_names=tech.supply_names)
    except EngineError as exc:
        _fail(exc)
    for netlist in netlists:
        click.echo(print_netlist(netlist), nl=False)
        click.echo(f"* {netlist.name}: {len(netlist.devices)} devices, "
                   f"{len(signal_nets(netlist))} signal nets")


@main.command()
@click.option("--layout", "layout_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--tech", "tech_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Tech the layout was built against; fixes layer order.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def render(layout_path, tech_path, out_path):
    """Render a saved layout JSON to SVG."""
    try:
        tech = load_tech_file(tech_path)
        db = from_canonical_json(Path(layout_path).read_bytes())
        svg = to_svg(db, tech)
    except EngineError as exc:
        _fail(exc)
    Path(out_path).write_text(svg, encoding="utf-8")
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
