/** Pure geometry: canonical layout JSON + technology -> drawable scene.
 *
 * The numbers here deliberately mirror the server's SVG renderer (same
 * scale, margin, wire thickness, via size, y-flip) so that what the
 * browser draws from layout JSON matches what GET /svg would return.
 * Nothing is invented client-side: every rectangle is a restatement of
 * a layout record, and a malformed payload raises SceneError instead
 * of guessing.
 */

import type { LayoutDoc, TechDoc, LayerDoc, TemplateDoc } from "./api.js";

export const SCALE = 20;
export const MARGIN = 2; // grid units around the bbox

const WIRE_HALF = 0.3; // wire half-thickness in grid units
const VIA_R = 0.2;

const LAYER_COLORS = [
  "#4e79a7", "#e15759", "#59a14f", "#f28e2b", "#b07aa1",
  "#76b7b2", "#edc948", "#9c755f",
];
export const OUTLINE_COLOR = "#888888";
export const VIA_COLOR = "#222222";
export const LABEL_COLOR = "#111111";
export const BACKGROUND = "#fdfdfa";

export class SceneError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SceneError";
  }
}

export type Selection =
  | { kind: "net"; net: string }
  | { kind: "instance"; name: string }
  | null;

export interface SceneOptions {
  /** Layer name -> shown flag; layers not listed are shown. */
  visibility?: Record<string, boolean>;
  selection?: Selection;
  showInstanceNames?: boolean;
}

export interface InstanceItem {
  name: string;
  template: string;
  orient: string;
  x: number;
  y: number;
  width: number;
  height: number;
  labelX: number;
  labelY: number;
  fontSize: number;
  selected: boolean;
  tooltip: string;
}

export interface WireItem {
  net: string;
  layer: string;
  x: number;
  y: number;
  width: number;
  height: number;
  selected: boolean;
  tooltip: string;
}

export interface LayerGroup {
  layer: string;
  color: string;
  visible: boolean;
  wires: WireItem[];
}

export interface ViaItem {
  net: string;
  lower: string;
  upper: string;
  x: number;
  y: number;
  size: number;
  selected: boolean;
  tooltip: string;
}

export interface LabelItem {
  net: string;
  layer: string;
  x: number;
  y: number;
  fontSize: number;
  selected: boolean;
  tooltip: string;
}

export interface Scene {
  width: number;
  height: number;
  background: string;
  showInstanceNames: boolean;
  instances: InstanceItem[];
  /** One group per tech layer, bottom-up, present even when hidden. */
  layers: LayerGroup[];
  vias: ViaItem[];
  labels: LabelItem[];
}

export function layerColor(index: number): string {
  return LAYER_COLORS[index % LAYER_COLORS.length];
}

function need<T>(cond: boolean, value: T, what: string): T {
  if (!cond) {
    throw new SceneError(`malformed layout: ${what}`);
  }
  return value;
}

function isPoint(v: unknown): v is [number, number] {
  return Array.isArray(v) && v.length === 2 &&
    typeof v[0] === "number" && typeof v[1] === "number";
}

/** Extent of all geometry in grid units, or null for an empty layout. */
export function layoutBbox(layout: LayoutDoc, tech: TechDoc):
    [number, number, number, number] | null {
  const xs: number[] = [];
  const ys: number[] = [];
  const templates = new Map(tech.templates.map((t) => [t.name, t]));
  const layers = new Map(tech.layers.map((l) => [l.name, l]));

  for (const name of Object.keys(layout.instances)) {
    const inst = layout.instances[name];
    const tmpl = templates.get(inst.template);
    if (tmpl === undefined) {
      throw new SceneError(
        `malformed layout: instance ${name} uses unknown template ${inst.template}`);
    }
    const [ox, oy] = need(isPoint(inst.origin), inst.origin,
                          `instance ${name} origin`);
    xs.push(ox, ox + tmpl.width);
    ys.push(oy, oy + tmpl.height);
  }
  for (const w of layout.wires) {
    const layer = layers.get(w.layer);
    if (layer === undefined) {
      continue; // mirrors the server: wires on unknown layers are ignored
    }
    const [a, b] = need(isPoint(w.span), w.span, `wire span on ${w.layer}`);
    if (layer.direction === "H") {
      xs.push(a, b);
      ys.push(w.track, w.track);
    } else {
      xs.push(w.track, w.track);
      ys.push(a, b);
    }
  }
  for (const v of layout.vias) {
    xs.push(v.x);
    ys.push(v.y);
  }
  for (const l of layout.labels) {
    xs.push(l.x);
    ys.push(l.y);
  }
  if (xs.length === 0) {
    return null;
  }
  return [Math.min(...xs), Math.min(...ys), Math.max(...xs), Math.max(...ys)];
}

function checkShape(layout: LayoutDoc): void {
  const ok = layout !== null && typeof layout === "object" &&
    typeof layout.instances === "object" && layout.instances !== null &&
    !Array.isArray(layout.instances) &&
    Array.isArray(layout.wires) && Array.isArray(layout.vias) &&
    Array.isArray(layout.labels);
  if (!ok) {
    throw new SceneError(
      "malformed layout: expected instances/wires/vias/labels");
  }
}

export function buildScene(layout: LayoutDoc, tech: TechDoc,
                           options: SceneOptions = {}): Scene {
  checkShape(layout);
  const visibility = options.visibility ?? {};
  const selection = options.selection ?? null;
  const showNames = options.showInstanceNames ?? true;
  const s = SCALE;

  let bbox = layoutBbox(layout, tech);
  if (bbox === null) {
    bbox = [0, 0, 10, 10];
  }
  const x1 = bbox[0] - MARGIN;
  const y1 = bbox[1] - MARGIN;
  const x2 = bbox[2] + MARGIN;
  const y2 = bbox[3] + MARGIN;
  const width = (x2 - x1) * s;
  const height = (y2 - y1) * s;
  // grid y grows upward, screen y grows downward
  const gx = (x: number) => (x - x1) * s;
  const gy = (y: number) => (y2 - y) * s;

  const templates = new Map(tech.templates.map((t: TemplateDoc) => [t.name, t]));
  const hidden = (name: string) => visibility[name] === false;
  const netSelected = (net: string) =>
    selection !== null && selection.kind === "net" && selection.net === net;

  const instances: InstanceItem[] = [];
  for (const name of Object.keys(layout.instances).sort()) {
    const inst = layout.instances[name];
    const tmpl = templates.get(inst.template) as TemplateDoc;
    const [ox, oy] = inst.origin;
    const pins = Object.keys(inst.pin_nets).sort()
      .map((p) => `${p}=${inst.pin_nets[p]}`).join(", ");
    instances.push({
      name,
      template: inst.template,
      orient: inst.orient,
      x: gx(ox),
      y: gy(oy + tmpl.height),
      width: tmpl.width * s,
      height: tmpl.height * s,
      labelX: gx(ox + tmpl.width / 2),
      labelY: gy(oy + tmpl.height / 2),
      fontSize: s * 0.45,
      selected: selection !== null && selection.kind === "instance" &&
        selection.name === name,
      tooltip: `${name}: ${inst.template} at (${ox},${oy}) ${inst.orient}` +
        (pins ? ` | ${pins}` : ""),
    });
  }

  const layers: LayerGroup[] = tech.layers.map((layer: LayerDoc, idx: number) => {
    const group: LayerGroup = {
      layer: layer.name,
      color: layerColor(idx),
      visible: !hidden(layer.name),
      wires: [],
    };
    if (!group.visible) {
      return group;
    }
    for (const w of layout.wires) {
      if (w.layer !== layer.name) {
        continue;
      }
      const [a, b] = w.span;
      let rx: number, ry: number, rw: number, rh: number;
      if (layer.direction === "H") {
        rx = a - WIRE_HALF;
        ry = w.track + WIRE_HALF;
        rw = (b - a) + 2 * WIRE_HALF;
        rh = 2 * WIRE_HALF;
      } else {
        rx = w.track - WIRE_HALF;
        ry = b + WIRE_HALF;
        rw = 2 * WIRE_HALF;
        rh = (b - a) + 2 * WIRE_HALF;
      }
      group.wires.push({
        net: w.net,
        layer: w.layer,
        x: gx(rx),
        y: gy(ry),
        width: rw * s,
        height: rh * s,
        selected: netSelected(w.net),
        tooltip: `${w.net} on ${w.layer} track ${w.track} span ${a}..${b}`,
      });
    }
    return group;
  });

  const vias: ViaItem[] = [];
  for (const v of layout.vias) {
    if (hidden(v.lower) && hidden(v.upper)) {
      continue;
    }
    vias.push({
      net: v.net,
      lower: v.lower,
      upper: v.upper,
      x: gx(v.x - VIA_R),
      y: gy(v.y + VIA_R),
      size: 2 * VIA_R * s,
      selected: netSelected(v.net),
      tooltip: `${v.net} via ${v.lower}/${v.upper} at (${v.x},${v.y})`,
    });
  }

  const labels: LabelItem[] = [];
  for (const l of layout.labels) {
    labels.push({
      net: l.net,
      layer: l.layer,
      x: gx(l.x) + 2,
      y: gy(l.y) - 2,
      fontSize: s * 0.5,
      selected: netSelected(l.net),
      tooltip: `${l.net} label at (${l.x},${l.y}) ${l.layer}`,
    });
  }

  return {
    width,
    height,
    background: BACKGROUND,
    showInstanceNames: showNames,
    instances,
    layers,
    vias,
    labels,
  };
}
