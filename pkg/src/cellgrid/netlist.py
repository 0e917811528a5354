"""SPICE subset parser and schematic connectivity queries.

Accepted input: `.SUBCKT name ports...` / `.ENDS` blocks containing
MOSFET cards (`Mname drain gate source bulk model [k=v ...]`) and
subcircuit instance cards (`Xname net... refname`), full-line `*`
comments, and `+` continuation lines.  Keywords and identifiers are
case-insensitive; the first spelling seen for an identifier is kept and
reused everywhere, so `vdd` and `VDD` are one net.

MOS polarity comes from the model name: a model containing `pmos` is a
PMOS, `nmos` an NMOS, anything else is rejected.  A `nf=k` parameter
with k > 1 expands the card into k unit devices named `<name>_f0` ..
`<name>_f<k-1>`; `nf=1` is dropped without renaming.

X cards are resolved against other blocks in the same file (forward
references allowed).  Unresolved references are kept and flagged in
`Netlist.unresolved_refs`, with positional terminal names P0..Pn-1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import (
    DuplicateDeviceName,
    MalformedDeviceLine,
    NotTransistorLevel,
    SpiceError,
    UnterminatedSubckt,
)

# Used when a tech does not override them; compared casefolded.
DEFAULT_SUPPLY_NAMES = frozenset({"vdd", "vss", "vdd!", "vss!", "gnd"})

MOS_TERMINALS = ("D", "G", "S", "B")


class DeviceKind(enum.Enum):
    PMOS = "PMOS"
    NMOS = "NMOS"
    SUBCKT = "SUBCKT"


@dataclass(frozen=True)
class Device:
    """One instantiated element of a subcircuit.

    `model` holds the MOS model name for transistors and the referenced
    subcircuit name for SUBCKT devices.  `terminals` pairs terminal
    names (D/G/S/B for MOS, port names or P0..Pn-1 for SUBCKT) with net
    names, in card order.
    """

    name: str
    kind: DeviceKind
    model: str
    terminals: tuple[tuple[str, str], ...]
    params: tuple[tuple[str, float], ...] = ()

    def net(self, terminal: str) -> str:
        for term, net in self.terminals:
            if term == terminal:
                return net
        raise KeyError(terminal)

    @property
    def gate_net(self) -> str:
        return self.net("G")

    @property
    def drain_net(self) -> str:
        return self.net("D")


@dataclass(frozen=True)
class Netlist:
    name: str
    ports: tuple[str, ...]
    devices: tuple[Device, ...]
    nets: frozenset[str]
    supply_names: frozenset[str]  # stored casefolded
    unresolved_refs: tuple[str, ...] = ()

    def device(self, name: str) -> Device | None:
        """Case-insensitive device lookup."""
        want = name.casefold()
        for dev in self.devices:
            if dev.name.casefold() == want:
                return dev
        return None

    def is_supply(self, net: str) -> bool:
        return net.casefold() in self.supply_names


def signal_nets(netlist: Netlist) -> list[str]:
    """All nets except supplies, sorted by raw string."""
    return sorted(n for n in netlist.nets if not netlist.is_supply(n))


# --- parsing -----------------------------------------------------------------


def _logical_lines(text: str):
    """Yield (line_number, tokens) with continuations joined and comments gone.

    line_number is the 1-based number of the first physical line of each
    logical line.
    """
    pending: list[str] | None = None
    pending_no = 0
    for no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("+"):
            if pending is None:
                raise SpiceError("continuation line with nothing to continue", line=no)
            pending.extend(stripped[1:].split())
            continue
        if pending is not None:
            yield pending_no, pending
            pending = None
        if not stripped or stripped.startswith("*"):
            continue
        pending = stripped.split()
        pending_no = no
    if pending is not None:
        yield pending_no, pending


class _Names:
    """Case-insensitive identifier registry preserving first-seen spelling."""

    def __init__(self):
        self._seen: dict[str, str] = {}

    def intern(self, ident: str) -> str:
        return self._seen.setdefault(ident.casefold(), ident)


@dataclass
class _RawBlock:
    name: str
    ports: tuple[str, ...]
    devices: list[Device]
    device_lines: dict[str, int]
    names: _Names


def _parse_params(tokens: list[str], line: int) -> dict[str, float]:
    params: dict[str, float] = {}
    for tok in tokens:
        if "=" not in tok:
            raise MalformedDeviceLine(f"expected parameter assignment, got {tok!r}", line=line)
        key, _, value = tok.partition("=")
        try:
            params[key.casefold()] = float(value)
        except ValueError:
            raise MalformedDeviceLine(f"parameter {key}={value!r} is not numeric", line=line)
    return params


def _expand_fingers(name: str, params: dict[str, float], line: int) -> tuple[list[str], dict[str, float]]:
    """Apply nf=k finger expansion to a device name."""
    if "nf" not in params:
        return [name], params
    nf = params["nf"]
    if nf != int(nf) or int(nf) < 1:
        raise MalformedDeviceLine(f"nf={nf} is not a positive integer", line=line)
    rest = {k: v for k, v in params.items() if k != "nf"}
    k = int(nf)
    if k == 1:
        return [name], rest
    return [f"{name}_f{i}" for i in range(k)], rest


def parse_spice(text: str, supply_names: frozenset[str] | None = None) -> list[Netlist]:
    """Parse all .SUBCKT blocks in a file, in order of appearance.

    supply_names (casefolded or not) overrides DEFAULT_SUPPLY_NAMES for
    every returned netlist.
    """
    supplies = frozenset(s.casefold() for s in (supply_names or DEFAULT_SUPPLY_NAMES))
    blocks: list[_RawBlock] = []
    block: _RawBlock | None = None
    block_line = 0
    seen_blocks: set[str] = set()

    for no, tokens in _logical_lines(text):
        head = tokens[0].casefold()
        if head == ".subckt":
            if block is not None:
                raise SpiceError("nested .SUBCKT", line=no)
            if len(tokens) < 2:
                raise SpiceError(".SUBCKT needs a name", line=no)
            names = _Names()
            name = names.intern(tokens[1])
            if name.casefold() in seen_blocks:
                raise SpiceError(f"duplicate subcircuit {name}", line=no)
            seen_blocks.add(name.casefold())
            ports = tuple(names.intern(t) for t in tokens[2:])
            if len(set(p.casefold() for p in ports)) != len(ports):
                raise SpiceError("duplicate port name", line=no)
            block = _RawBlock(name, ports, [], {}, names)
            block_line = no
            continue
        if head == ".ends":
            if block is None:
                raise SpiceError(".ENDS without .SUBCKT", line=no)
            blocks.append(block)
            block = None
            continue
        if head == ".end":
            continue
        if block is None:
            raise SpiceError(f"{tokens[0]!r} outside .SUBCKT", line=no)
        if head.startswith("m"):
            _parse_mos_card(block, tokens, no)
        elif head.startswith("x"):
            _parse_x_card(block, tokens, no)
        else:
            raise SpiceError(f"unsupported card {tokens[0]!r}", line=no)

    if block is not None:
        raise UnterminatedSubckt(f".SUBCKT {block.name} never closed", line=block_line)

    return _resolve(blocks, supplies)


def _check_device_name(block: _RawBlock, name: str, line: int) -> None:
    key = name.casefold()
    if key in block.device_lines:
        raise DuplicateDeviceName(
            f"device {name} already defined at line {block.device_lines[key]}", line=line)
    block.device_lines[key] = line


def _parse_mos_card(block: _RawBlock, tokens: list[str], line: int) -> None:
    # Mname D G S B model [k=v ...]
    if len(tokens) < 6:
        raise MalformedDeviceLine("MOS card needs 4 nets and a model", line=line)
    raw_name = tokens[0]
    nets = [block.names.intern(t) for t in tokens[1:5]]
    model = tokens[5]
    if "=" in model:
        raise MalformedDeviceLine("MOS card needs 4 nets and a model", line=line)
    folded = model.casefold()
    if "pmos" in folded:
        kind = DeviceKind.PMOS
    elif "nmos" in folded:
        kind = DeviceKind.NMOS
    else:
        raise MalformedDeviceLine(
            f"cannot infer polarity from model {model!r}", line=line)
    params = _parse_params(tokens[6:], line)
    names, params = _expand_fingers(raw_name, params, line)
    terminals = tuple(zip(MOS_TERMINALS, nets))
    frozen = tuple(sorted(params.items()))
    for unit in names:
        unit = block.names.intern(unit)
        _check_device_name(block, unit, line)
        block.devices.append(Device(unit, kind, model, terminals, frozen))


def _parse_x_card(block: _RawBlock, tokens: list[str], line: int) -> None:
    # Xname net... refname
    if len(tokens) < 2:
        raise MalformedDeviceLine("X card needs a reference name", line=line)
    name = block.names.intern(tokens[0])
    _check_device_name(block, name, line)
    nets = tuple(block.names.intern(t) for t in tokens[1:-1])
    ref = tokens[-1]
    # terminal names filled in by _resolve
    terminals = tuple((f"P{i}", net) for i, net in enumerate(nets))
    block.devices.append(Device(name, DeviceKind.SUBCKT, ref, terminals))


def _resolve(blocks: list[_RawBlock], supplies: frozenset[str]) -> list[Netlist]:
    by_name = {b.name.casefold(): b for b in blocks}
    out: list[Netlist] = []
    for block in blocks:
        devices: list[Device] = []
        unresolved: list[str] = []
        for dev in block.devices:
            if dev.kind is DeviceKind.SUBCKT:
                target = by_name.get(dev.model.casefold())
                if target is None:
                    if dev.model.casefold() not in (u.casefold() for u in unresolved):
                        unresolved.append(dev.model)
                else:
                    nets = tuple(net for _, net in dev.terminals)
                    if len(nets) != len(target.ports):
                        raise MalformedDeviceLine(
                            f"{dev.name} connects {len(nets)} nets but "
                            f"{target.name} has {len(target.ports)} ports",
                            line=block.device_lines[dev.name.casefold()])
                    dev = Device(dev.name, dev.kind, target.name,
                                 tuple(zip(target.ports, nets)), dev.params)
            devices.append(dev)
        nets = set(block.ports)
        for dev in devices:
            nets.update(net for _, net in dev.terminals)
        out.append(Netlist(
            name=block.name,
            ports=block.ports,
            devices=tuple(devices),
            nets=frozenset(nets),
            supply_names=supplies,
            unresolved_refs=tuple(sorted(unresolved)),
        ))
    return out


# --- printing ----------------------------------------------------------------


def _format_param(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(value)


def print_netlist(netlist: Netlist) -> str:
    """Canonical text form; parse_spice(print_netlist(n)) round-trips."""
    lines = [f".SUBCKT {netlist.name} {' '.join(netlist.ports)}".rstrip()]
    for dev in netlist.devices:
        parts = [dev.name]
        parts.extend(net for _, net in dev.terminals)
        parts.append(dev.model)
        parts.extend(f"{k}={_format_param(v)}" for k, v in dev.params)
        lines.append(" ".join(parts))
    lines.append(".ENDS")
    return "\n".join(lines) + "\n"


# --- connectivity queries ------------------------------------------------------


def complementary_pairs(netlist: Netlist) -> tuple[tuple[tuple[str, str], ...], tuple[str, ...]]:
    """Greedy PMOS/NMOS pairing by shared gate net.

    PMOS devices are considered in lexicographic name order; candidates
    sharing the drain net win over those that do not, remaining ties go
    to the lexicographically smaller NMOS name.  Returns (pairs,
    unpaired) with pairs as (pmos, nmos) name tuples and unpaired names
    in netlist device order.
    """
    for dev in netlist.devices:
        if dev.kind is DeviceKind.SUBCKT:
            raise NotTransistorLevel(
                f"{netlist.name} contains subcircuit instance {dev.name}")
    pmos = sorted((d for d in netlist.devices if d.kind is DeviceKind.PMOS),
                  key=lambda d: d.name)
    nmos = [d for d in netlist.devices if d.kind is DeviceKind.NMOS]
    taken: set[str] = set()
    pairs: list[tuple[str, str]] = []
    for p in pmos:
        cands = [n for n in nmos if n.name not in taken and n.gate_net == p.gate_net]
        if not cands:
            continue
        drain = [n for n in cands if n.drain_net == p.drain_net]
        if drain:
            cands = drain
        pick = min(cands, key=lambda d: d.name)
        taken.add(pick.name)
        pairs.append((p.name, pick.name))
    paired = taken | {p for p, _ in pairs}
    unpaired = tuple(d.name for d in netlist.devices if d.name not in paired)
    return tuple(pairs), unpaired
