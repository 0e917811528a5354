"""Deterministic SVG rendering of a layout database.

The drawing is derived data: geometry lives in the LayoutDb, and
rendering the same db with the same options always yields the same
document.  Grid y grows upward, SVG y grows downward, so everything is
flipped about the layout bbox.  Wires are grouped per layer (one <g>
per tech layer, emitted even when empty) so a viewer can toggle layers
by id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

# stable layer palette, cycled by layer index
_LAYER_COLORS = (
    "#4e79a7", "#e15759", "#59a14f", "#f28e2b", "#b07aa1",
    "#76b7b2", "#edc948", "#9c755f",
)
_OUTLINE = "#888888"
_VIA = "#222222"
_LABEL = "#111111"


@dataclass(frozen=True)
class SvgOptions:
    scale: int = 20
    margin: int = 2  # grid units around the bbox
    hide_layers: tuple[str, ...] = ()
    show_instance_names: bool = True


def _fmt(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return f"{value:.1f}"


def to_svg(db, tech, options: SvgOptions | None = None) -> str:
    from .layout import db_bbox, instance_bbox

    opt = options or SvgOptions()
    s = opt.scale
    bbox = db_bbox(db, tech)
    if bbox is None:
        bbox = (0, 0, 10, 10)
    x1, y1, x2, y2 = bbox
    x1 -= opt.margin
    y1 -= opt.margin
    x2 += opt.margin
    y2 += opt.margin
    width = (x2 - x1) * s
    height = (y2 - y1) * s

    def gx(x: float) -> float:
        return (x - x1) * s

    def gy(y: float) -> float:
        # grid y up, svg y down
        return (y2 - y) * s

    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_fmt(width)} {_fmt(height)}" '
        f'width="{_fmt(width)}" height="{_fmt(height)}">')
    out.append(f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" fill="#fdfdfa"/>')

    out.append('<g id="instances">')
    for name in sorted(db.instances):
        inst = db.instances[name]
        bx1, by1, bx2, by2 = instance_bbox(tech, inst)
        out.append(
            f'<rect x="{_fmt(gx(bx1))}" y="{_fmt(gy(by2))}" '
            f'width="{_fmt((bx2 - bx1) * s)}" height="{_fmt((by2 - by1) * s)}" '
            f'fill="none" stroke="{_OUTLINE}" stroke-width="1"/>')
        if opt.show_instance_names:
            cx = gx((bx1 + bx2) / 2)
            cy = gy((by1 + by2) / 2)
            out.append(
                f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" font-size="{_fmt(s * 0.45)}" '
                f'text-anchor="middle" fill="{_OUTLINE}">{_esc(name)}</text>')
    out.append('</g>')

    half = 0.3  # wire half-thickness in grid units
    for idx, layer in enumerate(tech.layers):
        color = _LAYER_COLORS[idx % len(_LAYER_COLORS)]
        out.append(f'<g id="layer-{_esc(layer.name)}" fill="{color}" fill-opacity="0.75">')
        if layer.name not in opt.hide_layers:
            for w in db.wires:
                if w.layer != layer.name:
                    continue
                a, b = w.span
                if layer.direction == "H":
                    rx, ry = a - half, w.track + half
                    rw, rh = (b - a) + 2 * half, 2 * half
                else:
                    rx, ry = w.track - half, b + half
                    rw, rh = 2 * half, (b - a) + 2 * half
                out.append(
                    f'<rect x="{_fmt(gx(rx))}" y="{_fmt(gy(ry))}" '
                    f'width="{_fmt(rw * s)}" height="{_fmt(rh * s)}">'
                    f'<title>{_esc(w.net)}</title></rect>')
        out.append('</g>')

    out.append(f'<g id="vias" fill="{_VIA}">')
    for v in db.vias:
        if v.lower in opt.hide_layers and v.upper in opt.hide_layers:
            continue
        r = 0.2
        out.append(
            f'<rect x="{_fmt(gx(v.x - r))}" y="{_fmt(gy(v.y + r))}" '
            f'width="{_fmt(2 * r * s)}" height="{_fmt(2 * r * s)}">'
            f'<title>{_esc(v.net)}</title></rect>')
    out.append('</g>')

    out.append(f'<g id="labels" fill="{_LABEL}">')
    for l in db.labels:
        out.append(
            f'<text x="{_fmt(gx(l.x) + 2)}" y="{_fmt(gy(l.y) - 2)}" '
            f'font-size="{_fmt(s * 0.5)}">{_esc(l.net)}</text>')
    out.append('</g>')

    out.append('</svg>')
    return "\n".join(out) + "\n"


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))
