"""Grid-level DRC and connectivity-based LVS.

DRC rules:

  R1_OFFGRID    wire track not on its layer's grid, or inverted span
  R2_DIRECTION  wire on a layer whose direction is unknown (the track
                and span representation cannot express a wrongly
                oriented segment on a known layer, so on well-formed
                input this rule only fires for unknown layers)
  R3_SPACING    geometry of different nets touching or closer than one
                grid unit on the same (layer, track); pins and via pads
                participate exactly as in routing occupancy, so a
                conflict-free routing session cannot produce R3
  R4_VIA        via between non-adjacent layers, without a via rule, or
                off-track on either layer
  R5_OVERLAP    instance bounding boxes sharing positive area

LVS extracts geometric nets by union-find over occupied grid points
(wire contiguity, vias, and multi-point pins join them), then compares
against the schematic: a net whose placed pins land in more than one
component is an open, a component touching two or more nets is a
short.  Nets with fewer than two placed pins cannot be verified and are
listed as unresolved rather than silently passed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NetlistBindingError
from .layout import LayoutDb, instance_bbox, pin_access_points
from .netlist import Netlist
from .route import Occupancy, routed_wirelength
from .tech import Technology


@dataclass(frozen=True)
class DrcViolation:
    rule: str
    detail: str
    layer: str | None = None
    x: int | None = None
    y: int | None = None

    def to_json(self) -> dict:
        return {"rule": self.rule, "detail": self.detail, "layer": self.layer,
                "x": self.x, "y": self.y}


def _sort_key(v: DrcViolation):
    return (v.rule, v.layer or "", v.x if v.x is not None else 0,
            v.y if v.y is not None else 0, v.detail)


def run_drc(db: LayoutDb, tech: Technology) -> list[DrcViolation]:
    """All violations, sorted by (rule, location); empty means clean."""
    out: list[DrcViolation] = []

    for w in db.wires:
        layer = tech.layer(w.layer)
        if layer is None:
            out.append(DrcViolation(
                "R2_DIRECTION", f"segment on unknown layer {w.layer}",
                layer=w.layer))
            continue
        a, b = w.span
        bad_track = not layer.on_track(w.track)
        if bad_track or a > b:
            what = "off-grid track" if bad_track else "inverted span"
            x, y = (w.track, a) if layer.direction == "V" else (a, w.track)
            out.append(DrcViolation(
                "R1_OFFGRID", f"net {w.net}: {what} on {w.layer}",
                layer=w.layer, x=x, y=y))

    occ = Occupancy.from_db(db, tech)
    seen_pairs: set[tuple] = set()
    for layer_name, track in occ.tracks():
        layer = tech.layer(layer_name)
        claims = occ.claims_on(layer_name, track)
        for i in range(len(claims)):
            a1, b1, n1 = claims[i]
            for j in range(i + 1, len(claims)):
                a2, b2, n2 = claims[j]
                if n1 == n2:
                    continue
                if a2 <= b1 and a1 <= b2:
                    pos = max(a1, a2)
                    x, y = (track, pos) if layer.direction == "V" else (pos, track)
                    key = (layer_name, track, pos, frozenset((n1, n2)))
                    if key in seen_pairs:
                        continue
                    seen_pairs.add(key)
                    lo, hi = sorted((n1, n2))
                    out.append(DrcViolation(
                        "R3_SPACING",
                        f"nets {lo} and {hi} touch on {layer_name} track {track}",
                        layer=layer_name, x=x, y=y))

    for v in db.vias:
        lo = tech.layer(v.lower)
        hi = tech.layer(v.upper)
        if lo is None or hi is None or tech.via_between(v.lower, v.upper) is None:
            out.append(DrcViolation(
                "R4_VIA", f"net {v.net}: no via rule for {v.lower}/{v.upper}",
                layer=v.lower, x=v.x, y=v.y))
            continue
        for layer in (lo, hi):
            track = v.x if layer.direction == "V" else v.y
            if not layer.on_track(track):
                out.append(DrcViolation(
                    "R4_VIA",
                    f"net {v.net}: via off-track on {layer.name}",
                    layer=layer.name, x=v.x, y=v.y))

    names = sorted(db.instances)
    for i in range(len(names)):
        box_i = instance_bbox(tech, db.instances[names[i]])
        for j in range(i + 1, len(names)):
            box_j = instance_bbox(tech, db.instances[names[j]])
            if (box_i[0] < box_j[2] and box_j[0] < box_i[2]
                    and box_i[1] < box_j[3] and box_j[1] < box_i[3]):
                out.append(DrcViolation(
                    "R5_OVERLAP", f"instances {names[i]} and {names[j]} overlap",
                    x=max(box_i[0], box_j[0]), y=max(box_i[1], box_j[1])))

    return sorted(out, key=_sort_key)


# --- connectivity extraction -----------------------------------------------------


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, item):
        parent = self.parent.setdefault(item, item)
        if parent == item:
            return item
        root = self.find(parent)
        self.parent[item] = root
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


@dataclass(frozen=True)
class Component:
    """One electrically contiguous blob of geometry."""

    points: frozenset[tuple[str, int, int]]
    nets: frozenset[str]
    pins: tuple[tuple[str, str, str], ...]  # (instance, pin, net)


@dataclass(frozen=True)
class Connectivity:
    components: tuple[Component, ...]

    def component_of(self, point: tuple[str, int, int]) -> int | None:
        for i, comp in enumerate(self.components):
            if point in comp.points:
                return i
        return None


def extract_connectivity(db: LayoutDb, tech: Technology) -> Connectivity:
    """Partition occupied grid points into geometric nets.

    Wires contribute every integer point along their span, vias join
    their two layer points, and the access points of one pin are tied
    together (they are one piece of metal inside the template).  Wires
    on unknown layers are skipped; DRC reports them.
    """
    uf = _UnionFind()
    tags: list[tuple[tuple[str, int, int], str]] = []

    for w in db.wires:
        layer = tech.layer(w.layer)
        if layer is None:
            continue
        a, b = w.span
        prev = None
        for pos in range(min(a, b), max(a, b) + 1):
            x, y = (w.track, pos) if layer.direction == "V" else (pos, w.track)
            node = (w.layer, x, y)
            uf.find(node)
            if prev is not None:
                uf.union(prev, node)
            prev = node
        first = (w.layer, w.track, min(a, b)) if layer.direction == "V" \
            else (w.layer, min(a, b), w.track)
        tags.append((first, w.net))

    for v in db.vias:
        lo = (v.lower, v.x, v.y)
        hi = (v.upper, v.x, v.y)
        uf.union(lo, hi)
        tags.append((lo, v.net))

    pin_nodes: list[tuple[tuple[str, int, int], str, str, str]] = []
    for name in sorted(db.instances):
        inst = db.instances[name]
        for pin in sorted(inst.pin_nets):
            aps = pin_access_points(tech, inst, pin)
            nodes = [(layer, x, y) for layer, x, y in aps]
            for node in nodes:
                uf.find(node)
            for a, b in zip(nodes, nodes[1:]):
                uf.union(a, b)
            for node in nodes:
                pin_nodes.append((node, name, pin, inst.pin_nets[pin]))

    groups: dict = {}
    for node in uf.parent:
        groups.setdefault(uf.find(node), set()).add(node)

    comp_list = sorted(groups.values(), key=lambda pts: min(pts))
    index_of = {}
    for i, pts in enumerate(comp_list):
        for p in pts:
            index_of[p] = i

    nets: list[set[str]] = [set() for _ in comp_list]
    pins: list[set[tuple[str, str, str]]] = [set() for _ in comp_list]
    for node, net in tags:
        nets[index_of[node]].add(net)
    for node, inst, pin, net in pin_nodes:
        idx = index_of[node]
        nets[idx].add(net)
        pins[idx].add((inst, pin, net))

    components = tuple(
        Component(points=frozenset(pts), nets=frozenset(nets[i]),
                  pins=tuple(sorted(pins[i])))
        for i, pts in enumerate(comp_list))
    return Connectivity(components=components)


# --- LVS -----------------------------------------------------------------------


@dataclass(frozen=True)
class LvsReport:
    verdict: str  # "MATCH" or "MISMATCH"
    opens: tuple[tuple[str, int], ...]       # (net, component count)
    shorts: tuple[tuple[str, ...], ...]      # each a sorted net tuple
    unresolved: tuple[str, ...]              # nets with fewer than two pins

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "opens": [[net, count] for net, count in self.opens],
            "shorts": [list(nets) for nets in self.shorts],
            "unresolved": list(self.unresolved),
        }


def _check_bindings(db: LayoutDb, netlist: Netlist) -> None:
    for name in sorted(db.instances):
        inst = db.instances[name]
        dev = netlist.device(name)
        if dev is None:
            raise NetlistBindingError(
                f"instance {name} has no device in {netlist.name}")
        terms = {t.casefold(): net for t, net in dev.terminals}
        for pin, net in inst.pin_nets.items():
            expected = terms.get(pin.casefold())
            if expected is None:
                raise NetlistBindingError(
                    f"{name}.{pin} has no terminal on device {dev.name}")
            if net.casefold() != expected.casefold():
                raise NetlistBindingError(
                    f"{name}.{pin} is bound to {net} but the schematic says {expected}")


def run_lvs(db: LayoutDb, netlist: Netlist, tech: Technology) -> LvsReport:
    """Compare extracted geometry against the schematic.

    MATCH means no opens and no shorts; unverifiable nets are listed in
    unresolved, never counted as passing.  Raises NetlistBindingError
    when the layout disagrees with the schematic about what is placed.
    """
    _check_bindings(db, netlist)
    conn = extract_connectivity(db, tech)

    # keyed casefolded so odd spellings in hand-placed layouts still count
    pin_comps: dict[str, set[int]] = {}
    pin_counts: dict[str, int] = {}
    for i, comp in enumerate(conn.components):
        for inst, pin, net in comp.pins:
            pin_comps.setdefault(net.casefold(), set()).add(i)
    for inst_name in db.instances:
        inst = db.instances[inst_name]
        for pin, net in inst.pin_nets.items():
            key = net.casefold()
            pin_counts[key] = pin_counts.get(key, 0) + 1

    opens: list[tuple[str, int]] = []
    unresolved: list[str] = []
    for net in sorted(netlist.nets):
        count = pin_counts.get(net.casefold(), 0)
        if count < 2:
            unresolved.append(net)
            continue
        comps = pin_comps.get(net.casefold(), set())
        if len(comps) > 1:
            opens.append((net, len(comps)))

    shorts_set: set[tuple[str, ...]] = set()
    for comp in conn.components:
        if len(comp.nets) >= 2:
            shorts_set.add(tuple(sorted(comp.nets)))
    shorts = tuple(sorted(shorts_set))

    verdict = "MATCH" if not opens and not shorts else "MISMATCH"
    return LvsReport(verdict=verdict, opens=tuple(opens), shorts=shorts,
                     unresolved=tuple(unresolved))


def verification_report(db: LayoutDb, netlist: Netlist, tech: Technology) -> dict:
    """Combined DRC + LVS + wirelength document, JSON-shaped."""
    drc = run_drc(db, tech)
    lvs = run_lvs(db, netlist, tech)
    wl = routed_wirelength(db, tech)
    return {
        "drc": [v.to_json() for v in drc],
        "lvs": lvs.to_json(),
        "wirelength": wl.to_json(),
    }
