"""Track-based Manhattan routing: trunk plus perpendicular branches.

A route for a set of pins is one trunk segment on a chosen (layer,
track) plus one branch per pin running perpendicular from the pin to
the trunk line, with vias at every layer transition.  Pins on the trunk
layer within two layers of it are all reachable: same layer means a
direct tap or a detour through a neighboring layer, one layer away is
the ordinary branch-plus-via, two layers away stacks a second via at
the pin.  Anything farther is rejected as NotPerpendicular.

Conflicts follow a single occupancy rule shared with the design-rule
checker: on one (layer, track), geometry of different nets must be
separated by at least one empty grid unit, i.e. their closed integer
intervals must not touch.  Same-net geometry merges freely, which is
how multi-trunk nets are built by repeated calls.

auto_route_net scores candidate trunks (tracks of layers perpendicular
to the pins inside the pin bounding box, widened step by step to +-6,
plus the degenerate single-track solution when all pins already share
one) by trunk length + branch lengths + via count, and takes the
feasible candidate with the lowest score, breaking ties toward lower
layer index then lower track.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .errors import (
    Conflict,
    NotPerpendicular,
    OffGridTrack,
    PinNetMismatch,
    RouteError,
    UnknownInstance,
    UnknownNet,
    UnknownPin,
    Unroutable,
)
from .layout import (
    LayoutDb,
    Via,
    WireSegment,
    _with_geometry,
    net_pins,
    pin_access_points,
)
from .tech import Layer, Technology


@dataclass(frozen=True)
class PinPoint:
    inst: str
    pin: str
    layer: str
    x: int
    y: int


@dataclass(frozen=True)
class RoutePlan:
    net: str
    trunk: WireSegment
    branches: tuple[WireSegment, ...]
    vias: tuple[Via, ...]

    @property
    def score(self) -> int:
        return (self.trunk.length
                + sum(b.length for b in self.branches)
                + len(self.vias))


class Occupancy:
    """Interval claims per (layer, track), including pins and vias."""

    def __init__(self):
        self._claims: dict[tuple[str, int], list[tuple[int, int, str]]] = {}

    @classmethod
    def from_db(cls, db: LayoutDb, tech: Technology) -> "Occupancy":
        occ = cls()
        for w in db.wires:
            layer = tech.layer(w.layer)
            if layer is None:
                continue
            occ.add(w.layer, w.track, w.span[0], w.span[1], w.net)
        for v in db.vias:
            occ.add_point_on(tech, v.lower, v.x, v.y, v.net)
            occ.add_point_on(tech, v.upper, v.x, v.y, v.net)
        for name in db.instances:
            inst = db.instances[name]
            for pin in inst.pin_nets:
                for layer_name, x, y in pin_access_points(tech, inst, pin):
                    occ.add_point_on(tech, layer_name, x, y, inst.pin_nets[pin])
        return occ

    def add(self, layer: str, track: int, a: int, b: int, net: str) -> None:
        self._claims.setdefault((layer, track), []).append((a, b, net))

    def add_point_on(self, tech: Technology, layer_name: str, x: int, y: int,
                     net: str) -> None:
        layer = tech.layer(layer_name)
        if layer is None:
            return
        track, pos = (x, y) if layer.direction == "V" else (y, x)
        self.add(layer_name, track, pos, pos, net)

    def conflict(self, layer: str, track: int, a: int, b: int,
                 net: str) -> tuple[int, int, str] | None:
        """First foreign claim whose closed interval touches [a, b]."""
        for ca, cb, cnet in sorted(self._claims.get((layer, track), ())):
            if cnet == net:
                continue
            if ca <= b and a <= cb:
                return (ca, cb, cnet)
        return None

    def claims_on(self, layer: str, track: int) -> list[tuple[int, int, str]]:
        return sorted(self._claims.get((layer, track), ()))

    def tracks(self) -> list[tuple[str, int]]:
        return sorted(self._claims)


# --- pin resolution ------------------------------------------------------------


def _resolve_points(db: LayoutDb, tech: Technology, net: str,
                    pins: Sequence | None) -> list[PinPoint]:
    if pins is None:
        bindings: list[tuple[str, str, int]] = [
            (inst, pin, 0) for inst, pin in net_pins(db, tech, net)]
        if not bindings:
            raise UnknownNet(f"net {net} has no pins in the layout")
    else:
        bindings = []
        for item in pins:
            if len(item) == 2:
                inst, pin = item
                index = 0
            else:
                inst, pin, index = item
            bindings.append((inst, pin, index))

    points: list[PinPoint] = []
    for inst_name, pin, index in bindings:
        inst = db.instances.get(inst_name)
        if inst is None:
            raise UnknownInstance(f"no instance named {inst_name}")
        bound = inst.pin_nets.get(pin)
        if bound is None:
            raise UnknownPin(f"instance {inst_name} has no pin {pin}")
        if bound != net:
            raise PinNetMismatch(
                f"{inst_name}.{pin} carries {bound}, not {net}")
        aps = pin_access_points(tech, inst, pin)
        if not 0 <= index < len(aps):
            raise RouteError(f"{inst_name}.{pin} has no access point {index}")
        layer, x, y = aps[index]
        points.append(PinPoint(inst_name, pin, layer, x, y))
    return points


# --- planning -------------------------------------------------------------------


def _along_perp(direction: str, x: int, y: int) -> tuple[int, int]:
    """Split a point into (along, perpendicular) for a layer direction."""
    return (x, y) if direction == "H" else (y, x)


def _point(direction: str, along: int, perp: int) -> tuple[int, int]:
    return (along, perp) if direction == "H" else (perp, along)


def _branch_layer(tech: Technology, pin_idx: int, trunk_idx: int,
                  point: PinPoint) -> int:
    d = pin_idx - trunk_idx
    if abs(d) > 2:
        raise NotPerpendicular(
            f"pin {point.inst}.{point.pin} on {point.layer} is too far from "
            f"trunk layer {tech.layers[trunk_idx].name}")
    if abs(d) == 1:
        return pin_idx
    if abs(d) == 2:
        return (pin_idx + trunk_idx) // 2
    # same layer, off the trunk line: detour through a neighbor
    if trunk_idx > 0:
        return trunk_idx - 1
    if trunk_idx + 1 < len(tech.layers):
        return trunk_idx + 1
    raise NotPerpendicular(
        f"pin {point.inst}.{point.pin}: single-layer technology cannot detour")


def plan_route(db: LayoutDb, tech: Technology, net: str, trunk_layer: str,
               track: int, points: list[PinPoint]) -> RoutePlan:
    """Geometry for one trunk-and-branches route; no occupancy checks."""
    layer = tech.layer(trunk_layer)
    if layer is None:
        raise RouteError(f"unknown layer {trunk_layer}")
    if not layer.on_track(track):
        raise OffGridTrack(f"{track} is not a {trunk_layer} track")
    trunk_idx = tech.layer_index(trunk_layer)

    branches: list[WireSegment] = []
    vias: dict[tuple[str, str, int, int], Via] = {}
    alongs: list[int] = []

    def add_via(idx_a: int, idx_b: int, x: int, y: int) -> None:
        lo, hi = sorted((idx_a, idx_b))
        rule = tech.via_between(tech.layers[lo].name, tech.layers[hi].name)
        if rule is None:
            raise RouteError(
                f"no via rule between {tech.layers[lo].name} and {tech.layers[hi].name}")
        vias.setdefault((rule.lower, rule.upper, x, y), Via(rule.lower, rule.upper, x, y, net))

    for point in points:
        pin_idx = tech.layer_index(point.layer)
        along, perp = _along_perp(layer.direction, point.x, point.y)
        alongs.append(along)
        if pin_idx == trunk_idx and perp == track:
            continue  # pin sits on the trunk line
        b_idx = _branch_layer(tech, pin_idx, trunk_idx, point)
        b_layer = tech.layers[b_idx]
        junction = _point(layer.direction, along, track)
        if b_layer.direction == "V":
            b_track = point.x
            b_span = (min(point.y, junction[1]), max(point.y, junction[1]))
        else:
            b_track = point.y
            b_span = (min(point.x, junction[0]), max(point.x, junction[0]))
        if b_span[0] != b_span[1]:
            branches.append(WireSegment(net, b_layer.name, b_track, b_span))
        add_via(b_idx, trunk_idx, junction[0], junction[1])
        if b_idx != pin_idx:
            add_via(pin_idx, b_idx, point.x, point.y)

    span = (min(alongs), max(alongs))
    trunk = WireSegment(net, trunk_layer, track, span)
    return RoutePlan(net=net, trunk=trunk, branches=tuple(branches),
                     vias=tuple(sorted(vias.values(),
                                       key=lambda v: (v.lower, v.upper, v.x, v.y))))


def _plan_claims(plan: RoutePlan, tech: Technology) -> list[tuple[str, int, int, int]]:
    claims: list[tuple[str, int, int, int]] = []
    for seg in (plan.trunk, *plan.branches):
        claims.append((seg.layer, seg.track, seg.span[0], seg.span[1]))
    for via in plan.vias:
        for name in (via.lower, via.upper):
            layer = tech.layer(name)
            track, pos = (via.x, via.y) if layer.direction == "V" else (via.y, via.x)
            claims.append((name, track, pos, pos))
    return claims


def _check_plan(plan: RoutePlan, occ: Occupancy, tech: Technology) -> None:
    for layer, track, a, b in _plan_claims(plan, tech):
        hit = occ.conflict(layer, track, a, b, plan.net)
        if hit is not None:
            raise Conflict(
                f"net {plan.net} on {layer} track {track} [{a},{b}] is too "
                f"close to net {hit[2]} [{hit[0]},{hit[1]}]",
                layer=layer, track=track, span=(a, b), other_net=hit[2])


def _apply_plan(db: LayoutDb, plan: RoutePlan) -> LayoutDb:
    existing_wires = set(db.wires)
    existing_vias = {(v.lower, v.upper, v.x, v.y, v.net) for v in db.vias}
    wires = list(db.wires)
    for seg in (plan.trunk, *plan.branches):
        if seg not in existing_wires:
            wires.append(seg)
            existing_wires.add(seg)
    vias = list(db.vias)
    for via in plan.vias:
        key = (via.lower, via.upper, via.x, via.y, via.net)
        if key not in existing_vias:
            vias.append(via)
            existing_vias.add(key)
    return _with_geometry(db, wires, vias, db.labels)


def route_via_track(db: LayoutDb, tech: Technology, net: str, trunk_layer: str,
                    track: int, pins: Sequence | None = None) -> LayoutDb:
    """Route pins of a net onto one trunk track.

    pins defaults to every (instance, pin) bound to the net; explicit
    entries are (inst, pin) or (inst, pin, access_point_index) tuples.
    Fewer than two pins is a no-op: there is nothing to connect yet and
    the command layer reports it as a warning.
    """
    points = _resolve_points(db, tech, net, pins)
    if len(points) < 2:
        return db
    plan = plan_route(db, tech, net, trunk_layer, track, points)
    _check_plan(plan, Occupancy.from_db(db, tech), tech)
    return _apply_plan(db, plan)


def unroute_net(db: LayoutDb, net: str) -> LayoutDb:
    """Remove every wire and via tagged with the net; labels stay."""
    wires = [w for w in db.wires if w.net != net]
    vias = [v for v in db.vias if v.net != net]
    return _with_geometry(db, wires, vias, db.labels)


# --- automatic trunk selection ---------------------------------------------------


_WINDOW_STEPS = (2, 3, 4, 5, 6)


def _candidate_tracks(tech: Technology, points: list[PinPoint],
                      window: int) -> list[tuple[str, int]]:
    pin_layers = {p.layer for p in points}
    pin_dirs = {tech.layer(l).direction for l in pin_layers}
    pin_indices = [tech.layer_index(p.layer) for p in points]
    cands: list[tuple[str, int]] = []
    for idx, layer in enumerate(tech.layers):
        if any(abs(idx - pi) > 2 for pi in pin_indices):
            continue
        if layer.direction not in pin_dirs:
            # perpendicular to every pin: scan tracks across the pin bbox
            perps = [_along_perp(layer.direction, p.x, p.y)[1] for p in points]
            for t in range(min(perps) - window, max(perps) + window + 1):
                if layer.on_track(t):
                    cands.append((layer.name, t))
        else:
            # parallel to the pins: only the degenerate shared-track case
            if pin_layers == {layer.name}:
                perps = {_along_perp(layer.direction, p.x, p.y)[1] for p in points}
                if len(perps) == 1:
                    t = perps.pop()
                    if layer.on_track(t):
                        cands.append((layer.name, t))
    return cands


def auto_route_net(db: LayoutDb, tech: Technology, net: str) -> LayoutDb:
    """Pick the cheapest conflict-free trunk for a net and route it.

    Score is trunk length + branch lengths + via count; ties prefer the
    lower layer, then the lower track.  The search window around the
    pin bounding box grows from 2 to 6 grid units before giving up.
    """
    points = _resolve_points(db, tech, net, None)
    if len(points) < 2:
        return db
    occ = Occupancy.from_db(db, tech)
    for window in _WINDOW_STEPS:
        best = None
        for layer_name, track in _candidate_tracks(tech, points, window):
            layer_idx = tech.layer_index(layer_name)
            try:
                plan = plan_route(db, tech, net, layer_name, track, points)
                _check_plan(plan, occ, tech)
            except RouteError:
                continue
            key = (plan.score, layer_idx, track)
            if best is None or key < best[0]:
                best = (key, plan)
        if best is not None:
            return _apply_plan(db, best[1])
    raise Unroutable(f"no conflict-free trunk found for net {net}")


# --- wirelength ------------------------------------------------------------------


@dataclass(frozen=True)
class WirelengthReport:
    per_net: dict[str, int]
    per_net_vias: dict[str, int]
    total: int
    via_count: int

    def to_json(self) -> dict:
        return {
            "per_net": dict(sorted(self.per_net.items())),
            "per_net_vias": dict(sorted(self.per_net_vias.items())),
            "total": self.total,
            "via_count": self.via_count,
        }


def routed_wirelength(db: LayoutDb, tech: Technology) -> WirelengthReport:
    """Sum of inclusive span lengths per net; vias counted separately.

    per_net covers every routed net including supplies; total and
    via_count cover signal nets only.
    """
    per_net: dict[str, int] = {}
    per_vias: dict[str, int] = {}
    for w in db.wires:
        per_net[w.net] = per_net.get(w.net, 0) + w.length
        per_vias.setdefault(w.net, 0)
    for v in db.vias:
        per_vias[v.net] = per_vias.get(v.net, 0) + 1
        per_net.setdefault(v.net, 0)
    total = sum(length for net, length in per_net.items() if not tech.is_supply(net))
    via_count = sum(count for net, count in per_vias.items() if not tech.is_supply(net))
    return WirelengthReport(per_net=per_net, per_net_vias=per_vias,
                            total=total, via_count=via_count)
