"""Shared fixtures: the bundled technology, example designs, helpers."""

from pathlib import Path

import pytest

from cellgrid.dsl import apply, new_session, parse_script
from cellgrid.tech import load_tech_file

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
DATA = Path(__file__).resolve().parent / "data"

INV_SP = """\
.SUBCKT INV1 A ZN VDD VSS
MP1 ZN A VDD VDD pmos_lv W=2 L=1
MN1 ZN A VSS VSS nmos_lv W=2 L=1
.ENDS
"""

CHAIN_SP = """\
.SUBCKT INV A ZN
.ENDS
.SUBCKT BUF A Z
.ENDS
.SUBCKT CHAIN3 IN OUT
X1 IN N1 INV
X2 N1 N2 BUF
X3 N2 OUT INV
.ENDS
"""


@pytest.fixture(scope="session")
def tech():
    return load_tech_file(CORPUS / "abs3ml.tech.json")


@pytest.fixture(scope="session")
def corpus_dir():
    return CORPUS


def read_corpus(name: str) -> str:
    return (CORPUS / name).read_text()


def run_commands(tech, spice: str, script: str, top=None):
    """Apply a command script to a fresh session; returns (session, events)."""
    session = new_session(tech, spice, top=top)
    events = []
    for _, cmd in parse_script(script):
        session, evts = apply(session, cmd)
        events.extend(evts)
    return session, events


def run_corpus(tech, sp_name: str, cmds_name: str):
    return run_commands(tech, read_corpus(sp_name), read_corpus(cmds_name))


@pytest.fixture(scope="session")
def nand2_session(tech):
    session, _ = run_corpus(tech, "nand2.sp", "nand2.cmds")
    return session


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance scorecard collected by test_acceptance."""
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in results:
        terminalreporter.write_line(f"{label}: {status}")
