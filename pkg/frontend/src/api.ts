/** Typed client for the cellgrid session API.
 *
 * Every payload shape here mirrors a server response verbatim; the
 * viewer never computes geometry the server has not stated. fetch is
 * injectable so tests run against a scripted fake.
 */

export interface LayerDoc {
  name: string;
  direction: "H" | "V";
  pitch: number;
  offset: number;
}

export interface ViaRuleDoc {
  lower: string;
  upper: string;
}

export interface TemplateDoc {
  name: string;
  kind: string;
  width: number;
  height: number;
  // pin name -> access points [layer, dx, dy]
  pins: Record<string, [string, number, number][]>;
}

export interface TechDoc {
  name: string;
  layers: LayerDoc[];
  vias: ViaRuleDoc[];
  supply_names: string[];
  row_gap: number;
  templates: TemplateDoc[];
}

export interface InstanceDoc {
  template: string;
  origin: [number, number];
  orient: string;
  pin_nets: Record<string, string>;
}

export interface WireDoc {
  layer: string;
  net: string;
  track: number;
  span: [number, number];
}

export interface ViaDoc {
  lower: string;
  upper: string;
  net: string;
  x: number;
  y: number;
}

export interface LabelDoc {
  layer: string;
  net: string;
  x: number;
  y: number;
}

export interface LayoutDoc {
  cell_name: string;
  tech_name: string;
  instances: Record<string, InstanceDoc>;
  wires: WireDoc[];
  vias: ViaDoc[];
  labels: LabelDoc[];
}

export interface ReportDoc {
  drc: { rule: string; detail: string; layer: string | null;
         x: number | null; y: number | null }[];
  lvs: { verdict: string; opens: [string, number][];
         shorts: string[][]; unresolved: string[] };
  wirelength: { per_net: Record<string, number>;
                per_net_vias: Record<string, number>;
                total: number; via_count: number };
}

export interface HistoryDoc {
  commands: string[];
  checkpoints: Record<string, number>;
  can_undo: boolean;
}

export interface EventDoc {
  type: string;
  [key: string]: unknown;
}

export interface SessionInfo {
  id: string;
  cell: string;
  nets: string[];
}

export interface TranslationDoc {
  proposed_commands: string[];
  transcript: {
    attempts: number;
    turns: { role: string; text: string }[];
  };
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Error payload from the server, or a transport failure (status 0). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly type: string,
    message: string,
    /** Events from commands that did apply before the failing one. */
    readonly events: EventDoc[] = [],
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(fetchFn: FetchLike, url: string,
                          init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetchFn(url, init);
  } catch (err) {
    throw new ApiError(0, "NetworkError", `request failed: ${err}`);
  }
  const text = await resp.text();
  if (!resp.ok) {
    let type = "HttpError";
    let message = text || `status ${resp.status}`;
    let events: EventDoc[] = [];
    try {
      const doc = JSON.parse(text);
      if (doc && typeof doc === "object" && doc.error) {
        type = doc.error.type ?? type;
        message = doc.error.message ?? message;
        events = Array.isArray(doc.events) ? doc.events : [];
      }
    } catch {
      // non-JSON error body; keep the raw text as the message
    }
    throw new ApiError(resp.status, type, message, events);
  }
  return JSON.parse(text) as T;
}

function post(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  };
}

export interface Api {
  tech(): Promise<TechDoc>;
  createSession(netlistText: string, cell?: string): Promise<SessionInfo>;
  layout(sid: string): Promise<LayoutDoc>;
  report(sid: string): Promise<ReportDoc>;
  history(sid: string): Promise<HistoryDoc>;
  apply(sid: string, commands: string[]): Promise<EventDoc[]>;
  translate(sid: string, instruction: string): Promise<TranslationDoc>;
  undo(sid: string): Promise<EventDoc[]>;
}

export function makeApi(base: string,
                        fetchFn: FetchLike = (u, i) => fetch(u, i)): Api {
  const url = (path: string) => base + path;
  return {
    tech: () =>
      request<TechDoc>(fetchFn, url("/tech")),
    createSession: (netlistText, cell) =>
      request<SessionInfo>(fetchFn, url("/sessions"),
        post(cell ? { netlist_text: netlistText, cell }
                  : { netlist_text: netlistText })),
    layout: (sid) =>
      request<LayoutDoc>(fetchFn, url(`/sessions/${sid}/layout`)),
    report: (sid) =>
      request<ReportDoc>(fetchFn, url(`/sessions/${sid}/report`)),
    history: (sid) =>
      request<HistoryDoc>(fetchFn, url(`/sessions/${sid}/history`)),
    apply: async (sid, commands) => {
      const doc = await request<{ events: EventDoc[] }>(
        fetchFn, url(`/sessions/${sid}/apply`), post({ commands }));
      return doc.events;
    },
    translate: (sid, instruction) =>
      request<TranslationDoc>(fetchFn, url(`/sessions/${sid}/nl`),
        post({ instruction })),
    undo: async (sid) => {
      const doc = await request<{ events: EventDoc[] }>(
        fetchFn, url(`/sessions/${sid}/undo`), { method: "POST" });
      return doc.events;
    },
  };
}
