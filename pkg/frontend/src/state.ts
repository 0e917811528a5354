/** View state and the operations that drive it.
 *
 * The server is the only source of truth: every mutation re-fetches
 * layout, report, and history instead of patching a client-side copy,
 * so re-rendering after any operation reflects exactly what the
 * server holds. Proposed command lists from the language endpoint are
 * parked in pendingProposal and reach the session only through
 * applyProposal, never implicitly.
 */

import type {
  Api, HistoryDoc, LayoutDoc, ReportDoc, TechDoc,
} from "./api.js";
import { ApiError } from "./api.js";
import type { Scene, Selection } from "./scene.js";
import { buildScene, SceneError } from "./scene.js";

export interface Proposal {
  instruction: string;
  commands: string[];
  attempts: number;
}

export interface UiError {
  /** Which user action failed. */
  source: "create" | "load" | "dsl" | "nl" | "apply" | "undo";
  type: string;
  message: string;
  /** The submitted text, preserved so the user can edit and resend. */
  text?: string;
}

export interface ViewState {
  sessionId: string | null;
  cell: string | null;
  nets: string[];
  tech: TechDoc | null;
  layout: LayoutDoc | null;
  report: ReportDoc | null;
  history: HistoryDoc | null;
  /** Layer name -> shown flag; layers not listed are shown. */
  visibility: Record<string, boolean>;
  selection: Selection;
  pendingProposal: Proposal | null;
  error: UiError | null;
  busy: boolean;
}

function initialState(): ViewState {
  return {
    sessionId: null,
    cell: null,
    nets: [],
    tech: null,
    layout: null,
    report: null,
    history: null,
    visibility: {},
    selection: null,
    pendingProposal: null,
    error: null,
    busy: false,
  };
}

type Listener = (state: ViewState) => void;

export class ViewerStore {
  readonly state: ViewState = initialState();
  private listeners: Listener[] = [];

  constructor(private api: Api) {}

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private notify(): void {
    for (const fn of this.listeners) {
      fn(this.state);
    }
  }

  private fail(source: UiError["source"], err: unknown, text?: string): void {
    if (err instanceof ApiError) {
      this.state.error = { source, type: err.type, message: err.message, text };
    } else {
      this.state.error = { source, type: "ClientError", message: String(err), text };
    }
  }

  /** The drawable picture for the current state, or the reason there is none. */
  sceneOrError(): { scene: Scene | null; error: string | null } {
    if (this.state.layout === null || this.state.tech === null) {
      return { scene: null, error: null };
    }
    try {
      const scene = buildScene(this.state.layout, this.state.tech, {
        visibility: this.state.visibility,
        selection: this.state.selection,
      });
      return { scene, error: null };
    } catch (err) {
      if (err instanceof SceneError) {
        return { scene: null, error: err.message };
      }
      throw err;
    }
  }

  async createSession(netlistText: string, cell?: string): Promise<void> {
    this.state.busy = true;
    this.notify();
    try {
      const info = await this.api.createSession(netlistText, cell);
      this.state.sessionId = info.id;
      this.state.cell = info.cell;
      this.state.nets = info.nets;
      this.state.selection = null;
      this.state.pendingProposal = null;
      this.state.error = null;
      if (this.state.tech === null) {
        this.state.tech = await this.api.tech();
      }
      await this.reload();
    } catch (err) {
      this.fail("create", err);
    } finally {
      this.state.busy = false;
      this.notify();
    }
  }

  /** Re-fetch layout, report, and history for the current session. */
  async refresh(): Promise<void> {
    try {
      await this.reload();
    } catch (err) {
      this.fail("load", err);
    }
    this.notify();
  }

  private async reload(): Promise<void> {
    const sid = this.state.sessionId;
    if (sid === null) {
      return;
    }
    this.state.layout = await this.api.layout(sid);
    this.state.report = await this.api.report(sid);
    this.state.history = await this.api.history(sid);
  }

  /** Run command text directly; blank lines and # comments are dropped. */
  async submitDsl(text: string): Promise<void> {
    const sid = this.state.sessionId;
    if (sid === null) {
      return;
    }
    const commands = text.split("\n")
      .map((line) => line.trim())
      .filter((line) => line !== "" && !line.startsWith("#"));
    if (commands.length === 0) {
      return;
    }
    this.state.busy = true;
    this.notify();
    try {
      await this.api.apply(sid, commands);
      this.state.error = null;
    } catch (err) {
      // a failing batch may still have applied a prefix; the reload
      // below picks that up either way
      this.fail("dsl", err, text);
    }
    try {
      await this.reload();
    } catch (err) {
      this.fail("load", err);
    }
    this.state.busy = false;
    this.notify();
  }

  /** Ask for a translation; the result is only proposed, never applied. */
  async submitNl(instruction: string): Promise<void> {
    const sid = this.state.sessionId;
    if (sid === null || instruction.trim() === "") {
      return;
    }
    this.state.busy = true;
    this.notify();
    try {
      const doc = await this.api.translate(sid, instruction);
      this.state.pendingProposal = {
        instruction,
        commands: doc.proposed_commands,
        attempts: doc.transcript.attempts,
      };
      this.state.error = null;
    } catch (err) {
      this.fail("nl", err, instruction);
    }
    this.state.busy = false;
    this.notify();
  }

  /** Apply the pending proposal to the session, then re-sync. */
  async applyProposal(): Promise<void> {
    const sid = this.state.sessionId;
    const proposal = this.state.pendingProposal;
    if (sid === null || proposal === null) {
      return;
    }
    this.state.busy = true;
    this.state.pendingProposal = null;
    this.notify();
    try {
      await this.api.apply(sid, proposal.commands);
      this.state.error = null;
    } catch (err) {
      this.fail("apply", err, proposal.commands.join("\n"));
    }
    try {
      await this.reload();
    } catch (err) {
      this.fail("load", err);
    }
    this.state.busy = false;
    this.notify();
  }

  /** Drop the pending proposal without touching the session. */
  discardProposal(): void {
    this.state.pendingProposal = null;
    this.notify();
  }

  async undoLast(): Promise<void> {
    const sid = this.state.sessionId;
    if (sid === null) {
      return;
    }
    this.state.busy = true;
    this.notify();
    try {
      await this.api.undo(sid);
      this.state.error = null;
    } catch (err) {
      this.fail("undo", err);
    }
    try {
      await this.reload();
    } catch (err) {
      this.fail("load", err);
    }
    this.state.busy = false;
    this.notify();
  }

  toggleLayer(name: string): void {
    const shown = this.state.visibility[name] !== false;
    this.state.visibility = { ...this.state.visibility, [name]: !shown };
    this.notify();
  }

  select(selection: Selection): void {
    this.state.selection = selection;
    this.notify();
  }

  clearError(): void {
    this.state.error = null;
    this.notify();
  }
}
