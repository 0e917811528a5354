"""Layout database: placed instances, wires, vias, and labels on the grid.

All mutators return a new LayoutDb; existing snapshots are never
touched, which is what makes undo in the command layer a matter of
keeping old references.  Wires, vias, and labels are kept canonically
sorted inside the db so that structural equality and the serialized
form agree regardless of the order in which geometry was created.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .errors import (
    DuplicateInstance,
    LayoutError,
    Overlap,
    UnknownInstance,
    UnknownTemplate,
)
from .tech import ORIENTS, Technology, Template, resolve_pin


@dataclass(frozen=True)
class PlacedInstance:
    name: str
    template: str
    origin: tuple[int, int]
    orient: str
    # pin name -> net name; keys always equal the template's pin names
    pin_nets: Mapping[str, str]


@dataclass(frozen=True)
class WireSegment:
    """Axis-aligned segment: track is the perpendicular coordinate, span
    the inclusive [a, b] range along the layer direction."""

    net: str
    layer: str
    track: int
    span: tuple[int, int]

    @property
    def length(self) -> int:
        return self.span[1] - self.span[0]


@dataclass(frozen=True)
class Via:
    lower: str
    upper: str
    x: int
    y: int
    net: str


@dataclass(frozen=True)
class NetLabel:
    net: str
    layer: str
    x: int
    y: int


@dataclass(frozen=True)
class LayoutDb:
    tech_name: str
    cell_name: str
    instances: Mapping[str, PlacedInstance]
    wires: tuple[WireSegment, ...]
    vias: tuple[Via, ...]
    labels: tuple[NetLabel, ...]


def empty_db(tech: Technology, cell_name: str) -> LayoutDb:
    return LayoutDb(tech.name, cell_name, {}, (), (), ())


def _wire_key(w: WireSegment):
    return (w.layer, w.track, w.span[0], w.net, w.span[1])


def _via_key(v: Via):
    return (v.lower, v.upper, v.x, v.y, v.net)


def _label_key(l: NetLabel):
    return (l.net, l.layer, l.x, l.y)


def _with_geometry(db: LayoutDb, wires: Iterable[WireSegment],
                   vias: Iterable[Via], labels: Iterable[NetLabel]) -> LayoutDb:
    return replace(
        db,
        wires=tuple(sorted(wires, key=_wire_key)),
        vias=tuple(sorted(vias, key=_via_key)),
        labels=tuple(sorted(labels, key=_label_key)),
    )


def get_template(tech: Technology, db: LayoutDb, name: str) -> Template:
    tmpl = tech.templates.get(name)
    if tmpl is None:
        raise UnknownTemplate(f"technology {tech.name} has no template {name}")
    return tmpl


def instance_bbox(tech: Technology, inst: PlacedInstance) -> tuple[int, int, int, int]:
    """(x1, y1, x2, y2); orientation never changes the footprint."""
    tmpl = tech.templates.get(inst.template)
    if tmpl is None:
        raise UnknownTemplate(f"technology {tech.name} has no template {inst.template}")
    x, y = inst.origin
    return (x, y, x + tmpl.width, y + tmpl.height)


def _boxes_overlap(a: tuple[int, int, int, int], b: tuple[int, int, int, int]) -> bool:
    # shared edges and corners are legal; only positive area counts
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def _check_overlap(tech: Technology, db: LayoutDb, inst: PlacedInstance,
                   ignore: frozenset[str] = frozenset()) -> None:
    box = instance_bbox(tech, inst)
    for name in sorted(db.instances):
        if name == inst.name or name in ignore:
            continue
        if _boxes_overlap(box, instance_bbox(tech, db.instances[name])):
            raise Overlap(f"instance {inst.name} overlaps {name}", existing=name)


def place_instance(db: LayoutDb, tech: Technology, name: str, template: str,
                   origin: tuple[int, int], orient: str,
                   pin_nets: Mapping[str, str]) -> LayoutDb:
    if name in db.instances:
        raise DuplicateInstance(f"instance {name} already placed")
    tmpl = get_template(tech, db, template)
    if orient not in ORIENTS:
        raise LayoutError(f"unknown orientation {orient!r}")
    if set(pin_nets) != set(tmpl.pins):
        raise LayoutError(
            f"instance {name}: pin bindings {sorted(pin_nets)} do not match "
            f"template pins {sorted(tmpl.pins)}")
    inst = PlacedInstance(name, template, tuple(origin), orient, dict(pin_nets))
    _check_overlap(tech, db, inst)
    instances = dict(db.instances)
    instances[name] = inst
    return replace(db, instances=instances)


def move_instance(db: LayoutDb, tech: Technology, name: str,
                  origin: tuple[int, int]) -> LayoutDb:
    old = db.instances.get(name)
    if old is None:
        raise UnknownInstance(f"no instance named {name}")
    moved = replace(old, origin=tuple(origin))
    _check_overlap(tech, db, moved)
    instances = dict(db.instances)
    instances[name] = moved
    return replace(db, instances=instances)


def swap_instances(db: LayoutDb, tech: Technology, a: str, b: str) -> LayoutDb:
    one = db.instances.get(a)
    two = db.instances.get(b)
    if one is None:
        raise UnknownInstance(f"no instance named {a}")
    if two is None:
        raise UnknownInstance(f"no instance named {b}")
    moved_a = replace(one, origin=two.origin, orient=two.orient)
    moved_b = replace(two, origin=one.origin, orient=one.orient)
    instances = dict(db.instances)
    instances[a] = moved_a
    instances[b] = moved_b
    swapped = replace(db, instances=instances)
    _check_overlap(tech, swapped, moved_a)
    _check_overlap(tech, swapped, moved_b)
    return swapped


def add_label(db: LayoutDb, net: str, layer: str, x: int, y: int) -> LayoutDb:
    labels = db.labels + (NetLabel(net, layer, x, y),)
    return _with_geometry(db, db.wires, db.vias, labels)


def pin_access_points(tech: Technology, inst: PlacedInstance,
                      pin: str) -> list[tuple[str, int, int]]:
    tmpl = tech.templates.get(inst.template)
    if tmpl is None:
        raise UnknownTemplate(f"technology {tech.name} has no template {inst.template}")
    return resolve_pin(tmpl, pin, inst.origin, inst.orient)


def net_pins(db: LayoutDb, tech: Technology, net: str) -> list[tuple[str, str]]:
    """(instance, pin) bindings carrying a net, sorted for determinism."""
    found = []
    for name in sorted(db.instances):
        inst = db.instances[name]
        for pin in sorted(inst.pin_nets):
            if inst.pin_nets[pin] == net:
                found.append((name, pin))
    return found


def nets_in_layout(db: LayoutDb) -> set[str]:
    nets: set[str] = set()
    for inst in db.instances.values():
        nets.update(inst.pin_nets.values())
    nets.update(w.net for w in db.wires)
    nets.update(v.net for v in db.vias)
    return nets


# --- serialization -----------------------------------------------------------


def to_canonical_json(db: LayoutDb) -> bytes:
    """Stable byte encoding: sorted keys, sorted geometry, two-space indent.

    Equal databases serialize to identical bytes regardless of the
    command order that produced them.
    """
    doc = {
        "tech_name": db.tech_name,
        "cell_name": db.cell_name,
        "instances": {
            name: {
                "template": inst.template,
                "origin": list(inst.origin),
                "orient": inst.orient,
                "pin_nets": dict(sorted(inst.pin_nets.items())),
            }
            for name, inst in sorted(db.instances.items())
        },
        "wires": [
            {"net": w.net, "layer": w.layer, "track": w.track, "span": list(w.span)}
            for w in sorted(db.wires, key=_wire_key)
        ],
        "vias": [
            {"lower": v.lower, "upper": v.upper, "x": v.x, "y": v.y, "net": v.net}
            for v in sorted(db.vias, key=_via_key)
        ],
        "labels": [
            {"net": l.net, "layer": l.layer, "x": l.x, "y": l.y}
            for l in sorted(db.labels, key=_label_key)
        ],
    }
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _bad(msg: str) -> LayoutError:
    return LayoutError(f"malformed layout document: {msg}")


def from_canonical_json(data: bytes | str) -> LayoutDb:
    """Inverse of to_canonical_json; validates shape, not design rules."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise _bad(str(exc))
    if not isinstance(doc, dict):
        raise _bad("top level must be an object")
    try:
        instances = {}
        for name, item in doc["instances"].items():
            origin = item["origin"]
            if not (isinstance(origin, list) and len(origin) == 2):
                raise _bad(f"instance {name} origin")
            instances[name] = PlacedInstance(
                name=name,
                template=item["template"],
                origin=(int(origin[0]), int(origin[1])),
                orient=item["orient"],
                pin_nets=dict(item["pin_nets"]),
            )
        wires = [
            WireSegment(net=w["net"], layer=w["layer"], track=int(w["track"]),
                        span=(int(w["span"][0]), int(w["span"][1])))
            for w in doc["wires"]
        ]
        vias = [
            Via(lower=v["lower"], upper=v["upper"], x=int(v["x"]), y=int(v["y"]),
                net=v["net"])
            for v in doc["vias"]
        ]
        labels = [
            NetLabel(net=l["net"], layer=l["layer"], x=int(l["x"]), y=int(l["y"]))
            for l in doc["labels"]
        ]
        db = LayoutDb(
            tech_name=doc["tech_name"],
            cell_name=doc["cell_name"],
            instances=instances,
            wires=(),
            vias=(),
            labels=(),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise _bad(repr(exc))
    return _with_geometry(db, wires, vias, labels)


def db_bbox(db: LayoutDb, tech: Technology) -> tuple[int, int, int, int] | None:
    """Extent of all geometry, or None for an empty database."""
    xs: list[int] = []
    ys: list[int] = []
    for inst in db.instances.values():
        x1, y1, x2, y2 = instance_bbox(tech, inst)
        xs.extend((x1, x2))
        ys.extend((y1, y2))
    for w in db.wires:
        layer = tech.layer(w.layer)
        if layer is None:
            continue
        if layer.direction == "H":
            xs.extend(w.span)
            ys.extend((w.track, w.track))
        else:
            xs.extend((w.track, w.track))
            ys.extend(w.span)
    for v in db.vias:
        xs.append(v.x)
        ys.append(v.y)
    for l in db.labels:
        xs.append(l.x)
        ys.append(l.y)
    if not xs:
        return None
    return (min(xs), min(ys), max(xs), max(ys))


# re-exported here so callers needing a picture of a LayoutDb do not
# have to know about the svg module
from .svg import SvgOptions, to_svg  # noqa: E402  (cycle-free: svg imports nothing from here at import time)
