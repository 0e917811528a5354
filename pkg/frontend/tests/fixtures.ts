/** Real documents from the bundled corpus, loaded from disk. */

import { readFileSync } from "node:fs";

import type { LayoutDoc, TechDoc } from "../src/api.js";

function read(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8");
}

export function abs3mlTech(): TechDoc {
  return JSON.parse(read("abs3ml.tech.json"));
}

/** The routed NAND2 layout the server suite also pins as a golden file. */
export function nand2Layout(): LayoutDoc {
  return JSON.parse(read("nand2_layout.json"));
}

export function emptyLayout(): LayoutDoc {
  return {
    cell_name: "EMPTY",
    tech_name: "abs3ml",
    instances: {},
    wires: [],
    vias: [],
    labels: [],
  };
}

/** nand2 layout with the two NMOS devices exchanging origins. */
export function swappedLayout(): LayoutDoc {
  const doc = nand2Layout();
  const a = doc.instances["MN1"].origin;
  doc.instances["MN1"] = { ...doc.instances["MN1"],
                           origin: doc.instances["MN2"].origin };
  doc.instances["MN2"] = { ...doc.instances["MN2"], origin: a };
  return doc;
}
