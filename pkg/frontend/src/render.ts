/** Scene -> SVG markup.
 *
 * Pure string building so it can run and be tested without a DOM; the
 * page assigns the result to a container's innerHTML. Group ids and
 * <title> tooltips follow the server's SVG so anyone inspecting either
 * picture sees the same structure.
 */

import type { Scene } from "./scene.js";
import { LABEL_COLOR, OUTLINE_COLOR, VIA_COLOR } from "./scene.js";

const SELECT_STROKE = "#111111";

function fmt(value: number): string {
  if (Number.isInteger(value)) {
    return String(value);
  }
  return value.toFixed(1);
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function rect(x: number, y: number, w: number, h: number,
              extra = "", title = ""): string {
  const body = title ? `<title>${esc(title)}</title>` : "";
  const attrs = extra ? ` ${extra}` : "";
  if (body) {
    return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
      `height="${fmt(h)}"${attrs}>${body}</rect>`;
  }
  return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
    `height="${fmt(h)}"${attrs}/>`;
}

export function renderScene(scene: Scene): string {
  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" ` +
    `viewBox="0 0 ${fmt(scene.width)} ${fmt(scene.height)}" ` +
    `width="${fmt(scene.width)}" height="${fmt(scene.height)}">`);
  out.push(rect(0, 0, scene.width, scene.height,
                `fill="${scene.background}"`));

  out.push('<g id="instances">');
  for (const inst of scene.instances) {
    const stroke = inst.selected
      ? `stroke="${SELECT_STROKE}" stroke-width="2"`
      : `stroke="${OUTLINE_COLOR}" stroke-width="1"`;
    out.push(rect(inst.x, inst.y, inst.width, inst.height,
                  `fill="none" ${stroke}`, inst.tooltip));
    if (scene.showInstanceNames) {
      out.push(
        `<text x="${fmt(inst.labelX)}" y="${fmt(inst.labelY)}" ` +
        `font-size="${fmt(inst.fontSize)}" text-anchor="middle" ` +
        `fill="${OUTLINE_COLOR}">${esc(inst.name)}</text>`);
    }
  }
  out.push("</g>");

  for (const group of scene.layers) {
    out.push(`<g id="layer-${esc(group.layer)}" fill="${group.color}" ` +
             `fill-opacity="0.75">`);
    for (const w of group.wires) {
      const extra = w.selected
        ? `stroke="${SELECT_STROKE}" stroke-width="2"`
        : "";
      out.push(rect(w.x, w.y, w.width, w.height, extra, w.tooltip));
    }
    out.push("</g>");
  }

  out.push(`<g id="vias" fill="${VIA_COLOR}">`);
  for (const v of scene.vias) {
    const extra = v.selected
      ? `stroke="${SELECT_STROKE}" stroke-width="2"`
      : "";
    out.push(rect(v.x, v.y, v.size, v.size, extra, v.tooltip));
  }
  out.push("</g>");

  out.push(`<g id="labels" fill="${LABEL_COLOR}">`);
  for (const l of scene.labels) {
    const weight = l.selected ? ` font-weight="bold"` : "";
    out.push(
      `<text x="${fmt(l.x)}" y="${fmt(l.y)}" ` +
      `font-size="${fmt(l.fontSize)}"${weight}>` +
      `<title>${esc(l.tooltip)}</title>${esc(l.net)}</text>`);
  }
  out.push("</g>");

  out.push("</svg>");
  return out.join("\n") + "\n";
}
