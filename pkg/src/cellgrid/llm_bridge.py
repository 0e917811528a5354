"""Natural-language front end: prompt building and strict reply checking.

The bridge never trusts the model.  Replies must contain a fenced code
block of DSL commands; every line goes through the regular parser, and
a line that fails sends the parser's own complaint back as a correction
prompt.  After max_retries attempts the translation fails loudly.
Translated commands are returned for review, never applied here.

Transports are plain callables (prompt_text, config) -> reply_text so
tests can run entirely offline with canned replies.  The HTTP transport
reads its API key from the environment variable named in the config and
never logs it.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .dsl import Command, Session, parse_command, print_command
from .errors import DslSyntaxError, TranslationFailed, TransportError
from .route import routed_wirelength

Transport = Callable[[str, "BridgeConfig"], str]

GRAMMAR_HELP = """\
One command per line.  # starts a comment.

place <inst> [template <name>] at (<x>,<y>) [orient R0|MX|MY|R180]
place_rows
place_row [order <name>,<name>,...]
optimize_order [fix <name> left|right]...
move <inst> to (<x>,<y>)
swap <inst> <inst>
route net <net> auto
route net <net> trunk <layer> track <n>
route pins <inst>.<pin>,<inst>.<pin>[,...] trunk <layer> track <n>
unroute net <net>
label <net> at (<x>,<y>) layer <layer>
report wirelength|drc|lvs
undo
checkpoint <name>
"""


@dataclass(frozen=True)
class BridgeConfig:
    endpoint_url: str = ""
    model_id: str = ""
    api_key_env: str = ""
    max_retries: int = 3
    temperature: float = 0.0


@dataclass
class Transcript:
    turns: list[tuple[str, str]] = field(default_factory=list)
    attempts: int = 0


def _tech_summary(session: Session) -> str:
    tech = session.tech
    lines = [f"Technology {tech.name}:"]
    for layer in tech.layers:
        lines.append(f"  layer {layer.name}: direction {layer.direction}, "
                     f"pitch {layer.pitch}, offset {layer.offset}")
    for tmpl in sorted(tech.templates.values(), key=lambda t: t.name):
        pins = ", ".join(sorted(tmpl.pins))
        lines.append(f"  template {tmpl.name} ({tmpl.kind}, "
                     f"{tmpl.width}x{tmpl.height}): pins {pins}")
    return "\n".join(lines)


def _layout_summary(session: Session) -> str:
    db = session.current
    lines = []
    if not db.instances:
        lines.append("No instances placed yet.")
    else:
        lines.append("Placed instances:")
        for name in sorted(db.instances):
            inst = db.instances[name]
            lines.append(f"  {name}: {inst.template} at "
                         f"({inst.origin[0]},{inst.origin[1]}) {inst.orient}")
    routed = routed_wirelength(db, session.tech)
    if routed.per_net:
        lines.append("Routed nets (length, vias):")
        for net in sorted(routed.per_net):
            lines.append(f"  {net}: {routed.per_net[net]}, "
                         f"{routed.per_net_vias.get(net, 0)}")
    else:
        lines.append("No nets routed yet.")
    if session.last_report is not None:
        lines.append(f"Last report ({session.last_report['kind']}): "
                     f"{session.last_report['payload']}")
    return "\n".join(lines)


def build_prompt(session: Session, instruction: str) -> str:
    """The full context the model sees, most stable sections first."""
    from .netlist import print_netlist

    sections = [
        "You drive a grid-based layout tool through a command language.",
        "Command grammar:\n" + GRAMMAR_HELP,
        _tech_summary(session),
        "Netlist:\n" + print_netlist(session.netlist),
        "Current layout state:\n" + _layout_summary(session),
        "Instruction:\n" + instruction,
        "Respond with exactly one fenced code block (```) containing only "
        "DSL commands, one per line.  No prose inside the block.",
    ]
    return "\n\n".join(sections)


_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


def _extract_block(reply: str) -> str | None:
    match = _FENCE.search(reply)
    if match is None:
        return None
    return match.group(1)


def _render_conversation(turns: list[tuple[str, str]]) -> str:
    return "\n\n".join(f"[{role}]\n{text}" for role, text in turns)


def translate(session: Session, instruction: str, transport: Transport,
              config: BridgeConfig) -> tuple[list[Command], Transcript]:
    """Turn an instruction into parsed commands via the transport.

    Proposes commands only; applying them is the caller's decision.
    Parse failures are retried with the parser's hint quoted back at
    the model; transport failures are not retried.
    """
    transcript = Transcript()
    transcript.turns.append(("user", build_prompt(session, instruction)))
    last_error = "no attempts made"
    while transcript.attempts < config.max_retries:
        transcript.attempts += 1
        reply = transport(_render_conversation(transcript.turns), config)
        transcript.turns.append(("assistant", reply))
        block = _extract_block(reply)
        if block is None:
            last_error = "reply has no fenced command block"
            transcript.turns.append((
                "user",
                "Your reply had no fenced code block.  Respond with exactly "
                "one fenced block (```) of DSL commands."))
            continue
        commands: list[Command] = []
        problem: str | None = None
        for raw in block.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                commands.append(parse_command(line))
            except DslSyntaxError as exc:
                problem = (f"The line {line!r} is invalid: {exc} ({exc.hint}). "
                           "Resend the whole fenced block, corrected.")
                last_error = f"{line!r}: {exc}"
                break
        if problem is not None:
            transcript.turns.append(("user", problem))
            continue
        return commands, transcript
    raise TranslationFailed(
        f"no valid command block after {transcript.attempts} attempts",
        attempts=transcript.attempts, last_error=last_error)


# --- transports ------------------------------------------------------------------


def fixture_transport(replies: Sequence[str]) -> Transport:
    """Deterministic transport for tests: returns canned replies in order."""
    queue = list(replies)

    def send(prompt: str, config: BridgeConfig) -> str:
        if not queue:
            raise TransportError("fixture transport exhausted")
        return queue.pop(0)

    return send


def http_transport(prompt: str, config: BridgeConfig) -> str:
    """POST a chat completion request to config.endpoint_url."""
    import requests

    headers = {"Content-Type": "application/json"}
    if config.api_key_env:
        key = os.environ.get(config.api_key_env)
        if not key:
            raise TransportError(
                f"environment variable {config.api_key_env} is not set")
        headers["Authorization"] = f"Bearer {key}"
    body = {
        "model": config.model_id,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": config.temperature,
    }
    try:
        resp = requests.post(config.endpoint_url, json=body, headers=headers,
                             timeout=60)
    except requests.RequestException as exc:
        raise TransportError(f"request failed: {exc}")
    if resp.status_code != 200:
        raise TransportError(f"endpoint returned {resp.status_code}")
    try:
        return resp.json()["choices"][0]["message"]["content"]
    except (KeyError, IndexError, ValueError) as exc:
        raise TransportError(f"malformed completion response: {exc!r}")
