import { describe, expect, it } from "vitest";

import type { LayoutDoc } from "../src/api.js";
import { renderScene } from "../src/render.js";
import { buildScene } from "../src/scene.js";
import { abs3mlTech, emptyLayout, nand2Layout } from "./fixtures.js";

const TECH = abs3mlTech();

function svgOf(layout: LayoutDoc, options = {}): string {
  return renderScene(buildScene(layout, TECH, options));
}

describe("document structure", () => {
  it("emits a sized svg with the standard group skeleton", () => {
    const svg = svgOf(nand2Layout());
    expect(svg).toContain('<svg xmlns="http://www.w3.org/2000/svg"');
    expect(svg).toContain('viewBox="0 0 160 280"');
    for (const gid of ["instances", "layer-M1", "layer-M2", "layer-M3",
                       "vias", "labels"]) {
      expect(svg).toContain(`<g id="${gid}"`);
    }
    expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
  });

  it("shows instance names as centered text", () => {
    const svg = svgOf(nand2Layout());
    for (const name of ["MN1", "MN2", "MP1", "MP2"]) {
      expect(svg).toContain(`>${name}</text>`);
    }
  });

  it("can leave instance names out", () => {
    const svg = svgOf(nand2Layout(), { showInstanceNames: false });
    expect(svg).not.toContain(">MN1</text>");
    expect(svg).toContain('<g id="instances">');
  });

  it("keeps a hidden layer's group as an empty shell", () => {
    const svg = svgOf(nand2Layout(), { visibility: { M2: false } });
    expect(svg).toMatch(/<g id="layer-M2"[^>]*>\n<\/g>/);
  });
});

describe("geometry output", () => {
  it("writes integral coordinates without a decimal point", () => {
    const doc = {
      ...emptyLayout(),
      wires: [{ layer: "M1", net: "A", track: 3, span: [2, 6] as [number, number] }],
    };
    const svg = svgOf(doc);
    expect(svg).toContain('<rect x="34" y="34" width="12" height="92">');
  });

  it("marks vias as small squares around their grid point", () => {
    const doc = {
      ...emptyLayout(),
      vias: [{ lower: "M1", upper: "M2", net: "X", x: 0, y: 0 }],
    };
    const svg = svgOf(doc);
    expect(svg).toContain('<rect x="36" y="36" width="8" height="8">');
  });

  it("places geometry exactly where the server-side picture does", () => {
    // coordinate-for-coordinate with GET /svg for the same layout,
    // float rounding included
    const svg = svgOf(nand2Layout());
    expect(svg).toContain('x="114" y="74.0" width="12" height="132"');
    expect(svg).toContain('x="74" y="194" width="12" height="52"');
    expect(svg).toContain('x="76" y="76.0" width="8" height="8"');
  });

  it("clamps float noise to at most one decimal", () => {
    const svg = svgOf(nand2Layout());
    expect(svg).not.toMatch(/ (x|y|width|height)="\d+\.\d{2,}"/);
  });
});

describe("tooltips and escaping", () => {
  it("gives every wire a title with its net", () => {
    const svg = svgOf(nand2Layout());
    expect(svg).toContain("<title>ZN on M2 track 8 span 2..4</title>");
  });

  it("escapes markup-significant characters in net names", () => {
    const doc = {
      ...emptyLayout(),
      labels: [{ layer: "M2", net: "A&B<C>", x: 1, y: 1 }],
    };
    const svg = svgOf(doc);
    expect(svg).toContain("A&amp;B&lt;C&gt;");
    expect(svg).not.toContain("A&B<C>");
  });
});

describe("selection highlight", () => {
  it("strokes exactly the selected net's geometry", () => {
    const plain = svgOf(nand2Layout());
    const picked = svgOf(nand2Layout(), {
      selection: { kind: "net", net: "ZN" },
    });
    expect(plain).not.toContain('stroke="#111111"');
    const strokes = picked.match(/stroke="#111111"/g) ?? [];
    const layout = nand2Layout();
    const expected =
      layout.wires.filter((w) => w.net === "ZN").length +
      layout.vias.filter((v) => v.net === "ZN").length;
    expect(strokes.length).toBe(expected);
  });

  it("bolds the selected net's labels", () => {
    const picked = svgOf(nand2Layout(), {
      selection: { kind: "net", net: "ZN" },
    });
    expect(picked).toContain('font-weight="bold"');
  });

  it("outlines a selected instance more heavily", () => {
    const picked = svgOf(nand2Layout(), {
      selection: { kind: "instance", name: "MP2" },
    });
    const strokes = picked.match(/stroke="#111111" stroke-width="2"/g) ?? [];
    expect(strokes.length).toBe(1);
  });
});

describe("determinism", () => {
  it("renders the same scene to the same markup", () => {
    expect(svgOf(nand2Layout())).toBe(svgOf(nand2Layout()));
  });
});
