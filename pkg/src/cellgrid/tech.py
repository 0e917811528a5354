"""Technology description: routing layers, via rules, and cell templates.

A technology is loaded from a JSON document with a closed schema; any
unknown key is rejected so that typos fail loudly.  Layers are listed
bottom-up and must alternate direction (H/V), vias connect adjacent
layers only, and every template pin access point must sit on a track of
its layer under all four orientations.  The last point matters because
a pin that is on-grid in R0 but off-grid in MX would make mirrored rows
unroutable; checking the closure at load time keeps the router free of
special cases.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

from .errors import (
    DirectionError,
    MissingTemplate,
    OffGridPin,
    SchemaError,
    UnknownPin,
)
from .netlist import DEFAULT_SUPPLY_NAMES

ORIENTS = ("R0", "MX", "MY", "R180")

PMOS_UNIT = "PMOS_UNIT"
NMOS_UNIT = "NMOS_UNIT"
GATE_CELL = "GATE_CELL"
TEMPLATE_KINDS = (PMOS_UNIT, NMOS_UNIT, GATE_CELL)

DEFAULT_ROW_GAP = 2


@dataclass(frozen=True)
class Layer:
    name: str
    direction: str  # "H" or "V"
    pitch: int
    offset: int

    def on_track(self, coord: int) -> bool:
        return (coord - self.offset) % self.pitch == 0


@dataclass(frozen=True)
class ViaRule:
    lower: str
    upper: str


@dataclass(frozen=True)
class Template:
    name: str
    kind: str
    width: int
    height: int
    # pin name -> ordered access points (layer, dx, dy)
    pins: Mapping[str, tuple[tuple[str, int, int], ...]]


@dataclass(frozen=True)
class Technology:
    name: str
    layers: tuple[Layer, ...]
    vias: tuple[ViaRule, ...]
    templates: Mapping[str, Template]
    supply_names: frozenset[str]  # stored casefolded
    row_gap: int = DEFAULT_ROW_GAP

    def layer(self, name: str) -> Layer | None:
        for layer in self.layers:
            if layer.name == name:
                return layer
        return None

    def layer_index(self, name: str) -> int:
        for i, layer in enumerate(self.layers):
            if layer.name == name:
                return i
        raise KeyError(name)

    def via_between(self, a: str, b: str) -> ViaRule | None:
        for rule in self.vias:
            if {rule.lower, rule.upper} == {a, b}:
                return rule
        return None

    def is_supply(self, net: str) -> bool:
        return net.casefold() in self.supply_names

    def unit_template(self, kind: str) -> Template:
        for tmpl in self.templates.values():
            if tmpl.kind == kind:
                return tmpl
        raise MissingTemplate(f"technology {self.name} has no {kind} template")


def orient_point(dx: int, dy: int, width: int, height: int, orient: str) -> tuple[int, int]:
    """Transform a template-local point by an orientation."""
    if orient == "R0":
        return dx, dy
    if orient == "MY":
        return width - dx, dy
    if orient == "MX":
        return dx, height - dy
    if orient == "R180":
        return width - dx, height - dy
    raise SchemaError(f"unknown orientation {orient!r}")


def resolve_pin(template: Template, pin: str, origin: tuple[int, int],
                orient: str) -> list[tuple[str, int, int]]:
    """Absolute access points of a pin for a placed template."""
    if pin not in template.pins:
        raise UnknownPin(f"template {template.name} has no pin {pin}")
    ox, oy = origin
    out = []
    for layer, dx, dy in template.pins[pin]:
        x, y = orient_point(dx, dy, template.width, template.height, orient)
        out.append((layer, ox + x, oy + y))
    return out


# --- loading -----------------------------------------------------------------


def _require_keys(doc: dict, required: tuple[str, ...], optional: tuple[str, ...],
                  what: str) -> None:
    keys = set(doc)
    missing = [k for k in required if k not in keys]
    if missing:
        raise SchemaError(f"{what} is missing {missing[0]!r}")
    unknown = sorted(keys - set(required) - set(optional))
    if unknown:
        raise SchemaError(f"{what} has unknown key {unknown[0]!r}")


def _check_int(value, what: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{what} must be an integer")
    if minimum is not None and value < minimum:
        raise SchemaError(f"{what} must be >= {minimum}")
    return value


def _load_layer(doc: dict) -> Layer:
    _require_keys(doc, ("name", "direction", "pitch", "offset"), (), "layer")
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise SchemaError("layer name must be a non-empty string")
    direction = doc["direction"]
    if direction not in ("H", "V"):
        raise SchemaError(f"layer {name} direction must be 'H' or 'V'")
    pitch = _check_int(doc["pitch"], f"layer {name} pitch", minimum=1)
    offset = _check_int(doc["offset"], f"layer {name} offset", minimum=0)
    if offset >= pitch:
        raise SchemaError(f"layer {name} offset must be < pitch")
    return Layer(name, direction, pitch, offset)


def _load_template(doc: dict, layers: dict[str, Layer]) -> Template:
    _require_keys(doc, ("name", "kind", "width", "height", "pins"), (), "template")
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise SchemaError("template name must be a non-empty string")
    kind = doc["kind"]
    if kind not in TEMPLATE_KINDS:
        raise SchemaError(f"template {name} kind {kind!r} is not one of {TEMPLATE_KINDS}")
    width = _check_int(doc["width"], f"template {name} width", minimum=1)
    height = _check_int(doc["height"], f"template {name} height", minimum=1)
    if not isinstance(doc["pins"], dict):
        raise SchemaError(f"template {name} pins must be an object")
    pins: dict[str, tuple[tuple[str, int, int], ...]] = {}
    for pin, aps in doc["pins"].items():
        if not isinstance(aps, list) or not aps:
            raise SchemaError(f"template {name} pin {pin} needs at least one access point")
        resolved = []
        for ap in aps:
            if not (isinstance(ap, list) and len(ap) == 3):
                raise SchemaError(f"template {name} pin {pin}: access point must be [layer, dx, dy]")
            layer_name, dx, dy = ap
            layer = layers.get(layer_name)
            if layer is None:
                raise SchemaError(f"template {name} pin {pin} uses unknown layer {layer_name!r}")
            dx = _check_int(dx, f"template {name} pin {pin} dx")
            dy = _check_int(dy, f"template {name} pin {pin} dy")
            if not (0 <= dx <= width and 0 <= dy <= height):
                raise SchemaError(f"template {name} pin {pin} lies outside the template")
            for orient in ORIENTS:
                x, y = orient_point(dx, dy, width, height, orient)
                track = x if layer.direction == "V" else y
                if not layer.on_track(track):
                    raise OffGridPin(
                        f"template {name} pin {pin} at ({dx},{dy}) is off-track "
                        f"on {layer_name} under {orient}")
            resolved.append((layer_name, dx, dy))
        pins[pin] = tuple(resolved)
    return Template(name, kind, width, height, pins)


def load_tech(doc: str | dict) -> Technology:
    """Parse and validate a technology document (JSON text or dict)."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"technology document is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise SchemaError("technology document must be an object")
    _require_keys(doc, ("name", "layers", "vias", "templates"),
                  ("supply_names", "row_gap"), "technology")
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise SchemaError("technology name must be a non-empty string")

    if not isinstance(doc["layers"], list) or not doc["layers"]:
        raise SchemaError("technology needs at least one layer")
    layers: list[Layer] = []
    by_name: dict[str, Layer] = {}
    for item in doc["layers"]:
        layer = _load_layer(item)
        if layer.name in by_name:
            raise SchemaError(f"duplicate layer {layer.name}")
        layers.append(layer)
        by_name[layer.name] = layer
    for below, above in zip(layers, layers[1:]):
        if below.direction == above.direction:
            raise DirectionError(
                f"layers {below.name} and {above.name} do not alternate direction")

    if not isinstance(doc["vias"], list):
        raise SchemaError("vias must be a list")
    vias: list[ViaRule] = []
    for item in doc["vias"]:
        if not isinstance(item, dict):
            raise SchemaError("via rule must be an object")
        _require_keys(item, ("lower", "upper"), (), "via rule")
        lower, upper = item["lower"], item["upper"]
        if lower not in by_name or upper not in by_name:
            raise SchemaError(f"via rule references unknown layer")
        li = [l.name for l in layers].index(lower)
        ui = [l.name for l in layers].index(upper)
        if ui != li + 1:
            raise SchemaError(f"via {lower}/{upper} does not connect adjacent layers")
        if any(v.lower == lower for v in vias):
            raise SchemaError(f"duplicate via rule for {lower}/{upper}")
        vias.append(ViaRule(lower, upper))

    if not isinstance(doc["templates"], list):
        raise SchemaError("templates must be a list")
    templates: dict[str, Template] = {}
    for item in doc["templates"]:
        tmpl = _load_template(item, by_name)
        if tmpl.name in templates:
            raise SchemaError(f"duplicate template {tmpl.name}")
        templates[tmpl.name] = tmpl

    supply = doc.get("supply_names")
    if supply is not None:
        if not isinstance(supply, list) or not all(isinstance(s, str) for s in supply):
            raise SchemaError("supply_names must be a list of strings")
        supply_names = frozenset(s.casefold() for s in supply)
    else:
        supply_names = DEFAULT_SUPPLY_NAMES
    row_gap = doc.get("row_gap", DEFAULT_ROW_GAP)
    row_gap = _check_int(row_gap, "row_gap", minimum=0)

    return Technology(
        name=name,
        layers=tuple(layers),
        vias=tuple(vias),
        templates=templates,
        supply_names=supply_names,
        row_gap=row_gap,
    )


def load_tech_file(path) -> Technology:
    with open(path, "r", encoding="utf-8") as fh:
        return load_tech(fh.read())


def tech_to_dict(tech: Technology) -> dict:
    """Serialize a technology back to its document form.

    load_tech(tech_to_dict(t)) reproduces t exactly; the server uses
    this to publish the technology it was started with so clients can
    render layouts without a private copy of the tech file.
    """
    return {
        "name": tech.name,
        "layers": [
            {"name": l.name, "direction": l.direction,
             "pitch": l.pitch, "offset": l.offset}
            for l in tech.layers
        ],
        "vias": [{"lower": v.lower, "upper": v.upper} for v in tech.vias],
        "supply_names": sorted(tech.supply_names),
        "row_gap": tech.row_gap,
        "templates": [
            {"name": t.name, "kind": t.kind,
             "width": t.width, "height": t.height,
             "pins": {pin: [list(ap) for ap in aps]
                      for pin, aps in t.pins.items()}}
            for t in tech.templates.values()
        ],
    }
