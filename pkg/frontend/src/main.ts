/** Page wiring: one ViewerStore, one render subscription.
 *
 * All state lives in the store; this file only moves values between
 * DOM controls and store methods. Static regions are built once,
 * dynamic regions are re-rendered on every store notification, and
 * the command box is never rebuilt so failed text stays editable.
 */

import { makeApi } from "./api.js";
import { esc, renderScene } from "./render.js";
import type { ViewState } from "./state.js";
import { ViewerStore } from "./state.js";

const SAMPLE_NETLIST = `* two-input NAND, four transistors
.SUBCKT NAND2 A B ZN VDD VSS
MP1 ZN A VDD VDD PMOS_UNIT
MP2 ZN B VDD VDD PMOS_UNIT
MN1 ZN A N1 VSS NMOS_UNIT
MN2 N1 B VSS VSS NMOS_UNIT
.ENDS
`;

const PAGE = `
<header>
  <h1>cellgrid viewer</h1>
  <span id="session-info"></span>
</header>
<div class="columns">
  <div class="side">
    <section id="setup">
      <h2>session</h2>
      <textarea id="netlist" rows="9" spellcheck="false"></textarea>
      <div class="row">
        <input id="cell" placeholder="top cell (optional)">
        <button id="create">create session</button>
      </div>
      <div id="create-error" class="error"></div>
    </section>
    <section id="command-panel" hidden>
      <h2>command</h2>
      <textarea id="command" rows="3" spellcheck="false"
        placeholder="place_rows&#10;route net ZN auto"></textarea>
      <div class="row">
        <label><input type="radio" name="mode" value="dsl" checked> commands</label>
        <label><input type="radio" name="mode" value="nl"> plain language</label>
        <button id="run">run</button>
        <button id="undo">undo</button>
      </div>
      <div id="command-error" class="error"></div>
      <div id="proposal" hidden>
        <h3>proposed commands</h3>
        <pre id="proposal-list"></pre>
        <div class="row">
          <button id="apply-proposal">apply</button>
          <button id="discard-proposal">discard</button>
        </div>
      </div>
    </section>
    <section id="view-controls" hidden>
      <h2>view</h2>
      <div id="layer-toggles" class="row"></div>
      <div class="row">
        <label>highlight net
          <select id="net-select"><option value="">none</option></select>
        </label>
      </div>
    </section>
    <section id="status" hidden>
      <h2>report</h2>
      <div id="report"></div>
      <h2>history</h2>
      <ol id="history"></ol>
    </section>
  </div>
  <div class="canvas">
    <div id="banner" class="error" hidden></div>
    <div id="scene"></div>
  </div>
</div>
`;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function renderReport(state: ViewState): string {
  const report = state.report;
  if (report === null) {
    return "";
  }
  const drc = report.drc.length === 0
    ? "<div>drc: clean</div>"
    : `<div>drc: ${report.drc.length} violation(s)</div><ul>` +
      report.drc.map((v) =>
        `<li>${esc(v.rule)} ${esc(v.detail)}</li>`).join("") + "</ul>";
  const lvs = report.lvs;
  let detail = "";
  if (lvs.opens.length > 0) {
    detail += `<div>opens: ${lvs.opens.map(([net, parts]) =>
      `${esc(net)} (${parts} pieces)`).join(", ")}</div>`;
  }
  if (lvs.shorts.length > 0) {
    detail += `<div>shorts: ${lvs.shorts.map((group) =>
      esc(group.join("+"))).join(", ")}</div>`;
  }
  const wl = report.wirelength;
  return drc +
    `<div>lvs: ${esc(lvs.verdict)}</div>` + detail +
    `<div>wirelength: ${wl.total} (${wl.via_count} vias)</div>`;
}

function main(): void {
  const root = el<HTMLDivElement>("app");
  root.innerHTML = PAGE;
  const store = new ViewerStore(makeApi(""));

  const netlist = el<HTMLTextAreaElement>("netlist");
  const command = el<HTMLTextAreaElement>("command");
  const netSelect = el<HTMLSelectElement>("net-select");
  const layerToggles = el<HTMLDivElement>("layer-toggles");
  netlist.value = SAMPLE_NETLIST;

  el<HTMLButtonElement>("create").addEventListener("click", () => {
    const cell = el<HTMLInputElement>("cell").value.trim();
    void store.createSession(netlist.value, cell === "" ? undefined : cell);
  });

  el<HTMLButtonElement>("run").addEventListener("click", () => {
    const mode = (document.querySelector('input[name="mode"]:checked') as
      HTMLInputElement).value;
    const submitted = mode === "nl"
      ? store.submitNl(command.value)
      : store.submitDsl(command.value);
    void submitted.then(() => {
      // keep the text on failure so it can be edited and resent
      if (store.state.error === null) {
        command.value = "";
      }
    });
  });
  el<HTMLButtonElement>("undo").addEventListener("click", () => {
    void store.undoLast();
  });
  el<HTMLButtonElement>("apply-proposal").addEventListener("click", () => {
    void store.applyProposal();
  });
  el<HTMLButtonElement>("discard-proposal").addEventListener("click", () => {
    store.discardProposal();
  });
  netSelect.addEventListener("change", () => {
    store.select(netSelect.value === ""
      ? null : { kind: "net", net: netSelect.value });
  });

  let togglesBuilt = false;
  let netsShown = "";

  function render(state: ViewState): void {
    el("session-info").textContent = state.sessionId === null
      ? "no session"
      : `${state.cell} (${state.sessionId})`;
    el("command-panel").hidden = state.sessionId === null;
    el("view-controls").hidden = state.tech === null;
    el("status").hidden = state.sessionId === null;

    if (!togglesBuilt && state.tech !== null) {
      togglesBuilt = true;
      layerToggles.innerHTML = state.tech.layers.map((layer) =>
        `<label><input type="checkbox" data-layer="${esc(layer.name)}" ` +
        `checked> ${esc(layer.name)}</label>`).join("");
      for (const box of layerToggles.querySelectorAll("input")) {
        box.addEventListener("change", () => {
          store.toggleLayer((box as HTMLInputElement).dataset.layer as string);
        });
      }
    }
    const nets = state.nets.join(",");
    if (nets !== netsShown) {
      netsShown = nets;
      netSelect.innerHTML = '<option value="">none</option>' +
        state.nets.map((n) =>
          `<option value="${esc(n)}">${esc(n)}</option>`).join("");
    }

    const createError = state.error !== null && state.error.source === "create"
      ? state.error : null;
    el("create-error").textContent = createError === null
      ? "" : `${createError.type}: ${createError.message}`;
    const commandError = state.error !== null &&
      (state.error.source === "dsl" || state.error.source === "nl" ||
       state.error.source === "apply" || state.error.source === "undo")
      ? state.error : null;
    el("command-error").textContent = commandError === null
      ? "" : `${commandError.type}: ${commandError.message}`;

    const proposal = state.pendingProposal;
    el("proposal").hidden = proposal === null;
    if (proposal !== null) {
      el("proposal-list").textContent = proposal.commands.join("\n");
    }

    for (const button of ["run", "undo", "apply-proposal", "create"]) {
      el<HTMLButtonElement>(button).disabled = state.busy;
    }

    el("report").innerHTML = renderReport(state);
    const history = state.history;
    el("history").innerHTML = history === null ? "" :
      history.commands.map((c) => `<li>${esc(c)}</li>`).join("");

    const banner = el<HTMLDivElement>("banner");
    const { scene, error } = store.sceneOrError();
    const loadError = state.error !== null && state.error.source === "load"
      ? `${state.error.type}: ${state.error.message}` : null;
    const bannerText = error ?? loadError;
    banner.hidden = bannerText === null;
    banner.textContent = bannerText ?? "";
    el("scene").innerHTML = scene === null ? "" : renderScene(scene);
  }

  store.subscribe(render);
  render(store.state);
}

main();
