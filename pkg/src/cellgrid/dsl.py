"""Line-oriented command language and the interactive session it drives.

One line is one command; `#` starts a comment.  Keywords are
case-insensitive, identifiers keep the case they were written in and
are matched case-insensitively against the netlist.  parse_command and
print_command are inverses over the command dataclasses, which is what
the replay and LLM layers rely on.

A Session is immutable: apply() returns a new session and a list of
JSON-shaped events.  Commands that change state push (command,
snapshot) onto an undo stack; everything executed lands in command_log
so a session can be replayed from scratch.  A failed command raises and
leaves the session untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .errors import (
    CommandError,
    DslSyntaxError,
    EngineError,
    NothingToUndo,
    SpiceError,
)
from .layout import LayoutDb, add_label, empty_db, move_instance, net_pins, place_instance, swap_instances
from .netlist import DeviceKind, Netlist, parse_spice
from .place import (
    OrderResult,
    PlacementConstraints,
    bound_pins,
    device_template,
    optimize_order,
    place_gate_row,
    place_transistor_rows,
)
from .route import auto_route_net, route_via_track, routed_wirelength, unroute_net
from .tech import ORIENTS, Technology
from .verify import run_drc, run_lvs

REPORT_KINDS = ("wirelength", "drc", "lvs")


# --- commands ---------------------------------------------------------------


@dataclass(frozen=True)
class Place:
    inst: str
    xy: tuple[int, int]
    template: str | None = None
    orient: str | None = None


@dataclass(frozen=True)
class PlaceRows:
    pass


@dataclass(frozen=True)
class PlaceRow:
    # None = reuse the last optimize_order result, else netlist order
    order: tuple[str, ...] | None = None


@dataclass(frozen=True)
class OptimizeOrder:
    fixes: tuple[tuple[str, str], ...] = ()  # (device, "left" | "right")


@dataclass(frozen=True)
class Move:
    inst: str
    xy: tuple[int, int]


@dataclass(frozen=True)
class Swap:
    a: str
    b: str


@dataclass(frozen=True)
class RouteNet:
    net: str
    trunk: str | None = None  # None means automatic trunk selection
    track: int | None = None


@dataclass(frozen=True)
class RoutePins:
    pins: tuple[tuple[str, str], ...]
    trunk: str
    track: int


@dataclass(frozen=True)
class UnrouteNet:
    net: str


@dataclass(frozen=True)
class LabelNet:
    net: str
    xy: tuple[int, int]
    layer: str


@dataclass(frozen=True)
class Report:
    kind: str


@dataclass(frozen=True)
class Undo:
    pass


@dataclass(frozen=True)
class Checkpoint:
    name: str


Command = (Place | PlaceRows | PlaceRow | OptimizeOrder | Move | Swap | RouteNet
           | RoutePins | UnrouteNet | LabelNet | Report | Undo | Checkpoint)


# --- tokenizer ----------------------------------------------------------------


_PUNCT = "(),."


def _tokenize(line: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch == "#":
            break
        if ch.isspace():
            i += 1
            continue
        if ch in _PUNCT:
            tokens.append((ch, i))
            i += 1
            continue
        if ch == "-" or ch.isdigit():
            j = i + 1
            while j < n and line[j].isdigit():
                j += 1
            if line[i:j] == "-":
                raise DslSyntaxError(f"stray '-' at column {i}", position=i,
                                     hint="expected an integer")
            tokens.append((line[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (line[j].isalnum() or line[j] in "_!"):
                j += 1
            tokens.append((line[i:j], i))
            i = j
            continue
        raise DslSyntaxError(f"unexpected character {ch!r} at column {i}",
                             position=i, hint="expected a command")
    return tokens


class _Parser:
    def __init__(self, line: str):
        self.line = line
        self.tokens = _tokenize(line)
        self.pos = 0

    def _fail(self, hint: str):
        if self.pos < len(self.tokens):
            text, col = self.tokens[self.pos]
            raise DslSyntaxError(f"unexpected {text!r} at column {col}",
                                 position=col, hint=hint)
        raise DslSyntaxError("unexpected end of command",
                             position=len(self.line), hint=hint)

    def peek(self) -> str | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            self._fail("expected more input")
        self.pos += 1
        return tok

    def keyword(self, *names: str) -> str:
        tok = self.peek()
        if tok is not None and tok.casefold() in names:
            self.pos += 1
            return tok.casefold()
        self._fail("expected " + " or ".join(f'"{n}"' for n in names))

    def match(self, name: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.casefold() == name:
            self.pos += 1
            return True
        return False

    def ident(self, what: str = "a name") -> str:
        tok = self.peek()
        if tok is not None and (tok[0].isalpha() or tok[0] == "_"):
            self.pos += 1
            return tok
        self._fail(f"expected {what}")

    def integer(self) -> int:
        tok = self.peek()
        if tok is not None and (tok.lstrip("-").isdigit()):
            self.pos += 1
            return int(tok)
        self._fail("expected an integer")

    def punct(self, ch: str) -> None:
        tok = self.peek()
        if tok == ch:
            self.pos += 1
            return
        self._fail(f'expected "{ch}"')

    def point(self) -> tuple[int, int]:
        self.punct("(")
        x = self.integer()
        self.punct(",")
        y = self.integer()
        self.punct(")")
        return (x, y)

    def orient(self) -> str:
        tok = self.peek()
        if tok is not None and tok.upper() in ORIENTS:
            self.pos += 1
            return tok.upper()
        self._fail('expected an orientation: "R0", "MX", "MY" or "R180"')

    def pin(self) -> tuple[str, str]:
        inst = self.ident("an instance name")
        self.punct(".")
        pin = self.ident("a pin name")
        return (inst, pin)

    def end(self) -> None:
        if self.pos != len(self.tokens):
            self._fail("expected end of command")


def parse_command(line: str) -> Command:
    """Parse one command line; comments and surrounding blanks are fine."""
    p = _Parser(line)
    head = p.peek()
    if head is None:
        raise DslSyntaxError("empty command", position=0, hint="expected a command")
    head = head.casefold()

    if head == "place":
        p.take()
        inst = p.ident("an instance name")
        template = None
        if p.match("template"):
            template = p.ident("a template name")
        p.keyword("at")
        xy = p.point()
        orient = None
        if p.match("orient"):
            orient = p.orient()
        p.end()
        return Place(inst=inst, xy=xy, template=template, orient=orient)

    if head == "place_rows":
        p.take()
        p.end()
        return PlaceRows()

    if head == "place_row":
        p.take()
        order = None
        if p.match("order"):
            names = [p.ident("a device name")]
            while p.match(","):
                names.append(p.ident("a device name"))
            order = tuple(names)
        p.end()
        return PlaceRow(order=order)

    if head == "optimize_order":
        p.take()
        fixes = []
        while p.match("fix"):
            name = p.ident("a device name")
            side = p.keyword("left", "right")
            fixes.append((name, side))
        p.end()
        return OptimizeOrder(fixes=tuple(fixes))

    if head == "move":
        p.take()
        inst = p.ident("an instance name")
        p.keyword("to")
        xy = p.point()
        p.end()
        return Move(inst=inst, xy=xy)

    if head == "swap":
        p.take()
        a = p.ident("an instance name")
        b = p.ident("an instance name")
        p.end()
        return Swap(a=a, b=b)

    if head == "route":
        p.take()
        what = p.keyword("net", "pins")
        if what == "net":
            net = p.ident("a net name")
            if p.match("auto"):
                p.end()
                return RouteNet(net=net)
            p.keyword("trunk")
            layer = p.ident("a layer name")
            p.keyword("track")
            track = p.integer()
            p.end()
            return RouteNet(net=net, trunk=layer, track=track)
        pins = [p.pin()]
        p.punct(",")
        pins.append(p.pin())
        while p.match(","):
            pins.append(p.pin())
        p.keyword("trunk")
        layer = p.ident("a layer name")
        p.keyword("track")
        track = p.integer()
        p.end()
        return RoutePins(pins=tuple(pins), trunk=layer, track=track)

    if head == "unroute":
        p.take()
        p.keyword("net")
        net = p.ident("a net name")
        p.end()
        return UnrouteNet(net=net)

    if head == "label":
        p.take()
        net = p.ident("a net name")
        p.keyword("at")
        xy = p.point()
        p.keyword("layer")
        layer = p.ident("a layer name")
        p.end()
        return LabelNet(net=net, xy=xy, layer=layer)

    if head == "report":
        p.take()
        kind = p.keyword(*REPORT_KINDS)
        p.end()
        return Report(kind=kind)

    if head == "undo":
        p.take()
        p.end()
        return Undo()

    if head == "checkpoint":
        p.take()
        name = p.ident("a checkpoint name")
        p.end()
        return Checkpoint(name=name)

    raise DslSyntaxError(f"unknown command {head!r}", position=p.tokens[0][1],
                         hint="expected a command keyword")


def print_command(cmd: Command) -> str:
    """Canonical text of a command; parse_command inverts it."""
    if isinstance(cmd, Place):
        out = f"place {cmd.inst}"
        if cmd.template is not None:
            out += f" template {cmd.template}"
        out += f" at ({cmd.xy[0]},{cmd.xy[1]})"
        if cmd.orient is not None:
            out += f" orient {cmd.orient}"
        return out
    if isinstance(cmd, PlaceRows):
        return "place_rows"
    if isinstance(cmd, PlaceRow):
        if cmd.order is None:
            return "place_row"
        return "place_row order " + ",".join(cmd.order)
    if isinstance(cmd, OptimizeOrder):
        out = "optimize_order"
        for name, side in cmd.fixes:
            out += f" fix {name} {side}"
        return out
    if isinstance(cmd, Move):
        return f"move {cmd.inst} to ({cmd.xy[0]},{cmd.xy[1]})"
    if isinstance(cmd, Swap):
        return f"swap {cmd.a} {cmd.b}"
    if isinstance(cmd, RouteNet):
        if cmd.trunk is None:
            return f"route net {cmd.net} auto"
        return f"route net {cmd.net} trunk {cmd.trunk} track {cmd.track}"
    if isinstance(cmd, RoutePins):
        pins = ",".join(f"{inst}.{pin}" for inst, pin in cmd.pins)
        return f"route pins {pins} trunk {cmd.trunk} track {cmd.track}"
    if isinstance(cmd, UnrouteNet):
        return f"unroute net {cmd.net}"
    if isinstance(cmd, LabelNet):
        return f"label {cmd.net} at ({cmd.xy[0]},{cmd.xy[1]}) layer {cmd.layer}"
    if isinstance(cmd, Report):
        return f"report {cmd.kind}"
    if isinstance(cmd, Undo):
        return "undo"
    if isinstance(cmd, Checkpoint):
        return f"checkpoint {cmd.name}"
    raise TypeError(f"not a command: {cmd!r}")


def parse_script(text: str) -> list[tuple[int, Command]]:
    """All commands in a script with their 1-based line numbers."""
    out = []
    for no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            out.append((no, parse_command(stripped)))
        except DslSyntaxError as exc:
            raise DslSyntaxError(f"line {no}: {exc}", position=exc.position,
                                 hint=exc.hint)
    return out


# --- session -------------------------------------------------------------------


@dataclass(frozen=True)
class Session:
    tech: Technology
    netlists: tuple[Netlist, ...]
    netlist: Netlist  # the design being laid out
    current: LayoutDb
    history: tuple[tuple[Command, LayoutDb, OrderResult | None], ...] = ()
    command_log: tuple[Command, ...] = ()
    checkpoints: Mapping[str, int] = field(default_factory=dict)
    last_order: OrderResult | None = None
    last_report: dict | None = None


def new_session(tech: Technology, source: str | Sequence[Netlist],
                top: str | None = None) -> Session:
    """Start an empty layout for a design.

    source is SPICE text or pre-parsed netlists; top picks the design
    by name, defaulting to the last subcircuit in the file (leaf cells
    first, design last, is the usual ordering).
    """
    if isinstance(source, str):
        netlists = tuple(parse_spice(source, supply_names=tech.supply_names))
    else:
        netlists = tuple(source)
    if not netlists:
        raise SpiceError("no subcircuits in the netlist")
    if top is None:
        netlist = netlists[-1]
    else:
        want = top.casefold()
        matches = [n for n in netlists if n.name.casefold() == want]
        if not matches:
            raise CommandError(f"no subcircuit named {top}")
        netlist = matches[0]
    return Session(tech=tech, netlists=netlists, netlist=netlist,
                   current=empty_db(tech, netlist.name))


def _resolve_net(session: Session, name: str) -> str:
    want = name.casefold()
    for net in session.netlist.nets:
        if net.casefold() == want:
            return net
    raise CommandError(f"unknown net {name}")


def _require_empty(session: Session) -> None:
    if session.current.instances:
        raise CommandError("row placement needs an empty layout; undo first")


def _geometry_delta(before: LayoutDb, after: LayoutDb, net: str) -> dict:
    old_wires = set(before.wires)
    old_vias = set(before.vias)
    segs = [w for w in after.wires if w not in old_wires and w.net == net]
    vias = [v for v in after.vias if v not in old_vias and v.net == net]
    return {
        "segments": len(segs),
        "vias": len(vias),
        "length": sum(w.length for w in segs),
    }


def apply(session: Session, cmd: Command) -> tuple[Session, list[dict]]:
    """Execute one command; returns the new session and its events.

    Raises on failure without touching the session.  State-changing
    commands push an undo snapshot; every command lands in command_log.
    """
    tech = session.tech
    netlist = session.netlist
    db = session.current
    events: list[dict] = []
    new_db = db
    new_order = session.last_order
    new_report = session.last_report
    checkpoints = session.checkpoints

    if isinstance(cmd, Place):
        dev = netlist.device(cmd.inst)
        if dev is None:
            raise CommandError(f"no device named {cmd.inst} in {netlist.name}")
        if cmd.template is not None:
            tmpl = tech.templates.get(cmd.template)
            if tmpl is None:
                raise CommandError(f"unknown template {cmd.template}")
        else:
            tmpl = device_template(netlist, tech, dev)
        pin_nets = dict(bound_pins(dev, tmpl))
        orient = cmd.orient or "R0"
        new_db = place_instance(db, tech, dev.name, tmpl.name, cmd.xy, orient, pin_nets)
        events.append({"type": "instances_placed", "instances": [dev.name]})

    elif isinstance(cmd, PlaceRows):
        _require_empty(session)
        new_db = place_transistor_rows(netlist, tech)
        events.append({"type": "instances_placed",
                       "instances": sorted(new_db.instances)})

    elif isinstance(cmd, PlaceRow):
        _require_empty(session)
        if cmd.order is not None:
            order = cmd.order
        elif session.last_order is not None:
            order = session.last_order.order
        else:
            order = tuple(d.name for d in netlist.devices)
        new_db = place_gate_row(netlist, tech, order)
        events.append({"type": "instances_placed",
                       "instances": sorted(new_db.instances)})

    elif isinstance(cmd, OptimizeOrder):
        fixed_left = tuple(name for name, side in cmd.fixes if side == "left")
        fixed_right = tuple(name for name, side in cmd.fixes if side == "right")
        result = optimize_order(netlist, tech, PlacementConstraints(
            fixed_left=fixed_left, fixed_right=fixed_right))
        new_order = result
        events.append({
            "type": "order_result",
            "order": list(result.order),
            "hpwl_before": result.hpwl_before,
            "hpwl_after": result.hpwl_after,
            "method": result.method.value,
        })

    elif isinstance(cmd, Move):
        if cmd.inst not in db.instances:
            raise CommandError(f"no placed instance named {cmd.inst}")
        new_db = move_instance(db, tech, cmd.inst, cmd.xy)
        events.append({"type": "instance_moved", "instance": cmd.inst,
                       "origin": list(cmd.xy)})

    elif isinstance(cmd, Swap):
        new_db = swap_instances(db, tech, cmd.a, cmd.b)
        events.append({"type": "instances_swapped", "a": cmd.a, "b": cmd.b})

    elif isinstance(cmd, RouteNet):
        net = _resolve_net(session, cmd.net)
        if len(net_pins(db, tech, net)) < 2:
            events.append({"type": "warning",
                           "message": f"net {net} has fewer than two pins; nothing to route"})
        elif cmd.trunk is None:
            new_db = auto_route_net(db, tech, net)
            events.append({"type": "net_routed", "net": net,
                           **_geometry_delta(db, new_db, net)})
        else:
            new_db = route_via_track(db, tech, net, cmd.trunk, cmd.track)
            events.append({"type": "net_routed", "net": net,
                           **_geometry_delta(db, new_db, net)})

    elif isinstance(cmd, RoutePins):
        nets = set()
        for inst_name, pin in cmd.pins:
            inst = db.instances.get(inst_name)
            if inst is None:
                raise CommandError(f"no placed instance named {inst_name}")
            bound = inst.pin_nets.get(pin)
            if bound is None:
                raise CommandError(f"instance {inst_name} has no pin {pin}")
            nets.add(bound)
        if len(nets) != 1:
            raise CommandError(
                f"pins span nets {sorted(nets)}; route pins needs one net")
        net = nets.pop()
        new_db = route_via_track(db, tech, net, cmd.trunk, cmd.track,
                                 pins=list(cmd.pins))
        events.append({"type": "net_routed", "net": net,
                       **_geometry_delta(db, new_db, net)})

    elif isinstance(cmd, UnrouteNet):
        net = _resolve_net(session, cmd.net)
        removed_segs = sum(1 for w in db.wires if w.net == net)
        removed_vias = sum(1 for v in db.vias if v.net == net)
        new_db = unroute_net(db, net)
        events.append({"type": "net_unrouted", "net": net,
                       "segments_removed": removed_segs,
                       "vias_removed": removed_vias})

    elif isinstance(cmd, LabelNet):
        net = _resolve_net(session, cmd.net)
        if tech.layer(cmd.layer) is None:
            raise CommandError(f"unknown layer {cmd.layer}")
        new_db = add_label(db, net, cmd.layer, cmd.xy[0], cmd.xy[1])
        events.append({"type": "label_added", "net": net, "layer": cmd.layer,
                       "x": cmd.xy[0], "y": cmd.xy[1]})

    elif isinstance(cmd, Report):
        if cmd.kind == "wirelength":
            payload = routed_wirelength(db, tech).to_json()
        elif cmd.kind == "drc":
            payload = [v.to_json() for v in run_drc(db, tech)]
        elif cmd.kind == "lvs":
            payload = run_lvs(db, netlist, tech).to_json()
        else:
            raise CommandError(f"unknown report kind {cmd.kind}")
        new_report = {"kind": cmd.kind, "payload": payload}
        events.append({"type": "report", "kind": cmd.kind, "payload": payload})

    elif isinstance(cmd, Undo):
        undone = undo(session)
        popped, _, _ = session.history[-1]
        events.append({"type": "undone", "command": print_command(popped)})
        return replace(undone, command_log=undone.command_log + (cmd,)), events

    elif isinstance(cmd, Checkpoint):
        checkpoints = dict(session.checkpoints)
        checkpoints[cmd.name] = len(session.history)
        events.append({"type": "checkpoint", "name": cmd.name,
                       "index": checkpoints[cmd.name]})

    else:
        raise CommandError(f"unsupported command {cmd!r}")

    changed = new_db is not db or new_order is not session.last_order
    history = session.history
    if changed:
        history = history + ((cmd, db, session.last_order),)
    new_session_state = replace(
        session,
        current=new_db,
        history=history,
        command_log=session.command_log + (cmd,),
        checkpoints=checkpoints,
        last_order=new_order,
        last_report=new_report,
    )
    return new_session_state, events


def undo(session: Session) -> Session:
    """Revert the most recent state-changing command."""
    if not session.history:
        raise NothingToUndo("nothing to undo")
    cmd, db, order = session.history[-1]
    return replace(session, current=db, last_order=order,
                   history=session.history[:-1])


def replay(tech: Technology, source: str | Sequence[Netlist],
           commands: Sequence[Command], top: str | None = None) -> Session:
    """Rebuild a session by running a command log from scratch."""
    session = new_session(tech, source, top=top)
    for cmd in commands:
        session, _ = apply(session, cmd)
    return session
