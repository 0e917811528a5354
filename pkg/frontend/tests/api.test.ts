import { describe, expect, it } from "vitest";

import { ApiError, makeApi } from "../src/api.js";
import { fakeServer } from "./fakes.js";
import { abs3mlTech, nand2Layout } from "./fixtures.js";

describe("requests", () => {
  it("fetches the technology document", async () => {
    const server = fakeServer({
      "GET /tech": () => ({ json: abs3mlTech() }),
    });
    const tech = await makeApi("", server.fetch).tech();
    expect(tech.name).toBe("abs3ml");
    expect(tech.layers.map((l) => l.name)).toEqual(["M1", "M2", "M3"]);
  });

  it("creates a session from netlist text", async () => {
    const server = fakeServer({
      "POST /sessions": (body) => {
        expect(body).toEqual({ netlist_text: "x" });
        return { status: 201, json: { id: "s1", cell: "NAND2", nets: ["A"] } };
      },
    });
    const info = await makeApi("", server.fetch).createSession("x");
    expect(info.id).toBe("s1");
  });

  it("passes the top cell only when given", async () => {
    const bodies: unknown[] = [];
    const server = fakeServer({
      "POST /sessions": (body) => {
        bodies.push(body);
        return { status: 201, json: { id: "s1", cell: "C", nets: [] } };
      },
    });
    const api = makeApi("", server.fetch);
    await api.createSession("x");
    await api.createSession("x", "TOP");
    expect(bodies).toEqual([
      { netlist_text: "x" },
      { netlist_text: "x", cell: "TOP" },
    ]);
  });

  it("prefixes every path with the base url", async () => {
    const server = fakeServer({
      "GET /api/sessions/s1/layout": () => ({ json: nand2Layout() }),
    });
    const doc = await makeApi("/api", server.fetch).layout("s1");
    expect(doc.cell_name).toBe("NAND2");
  });

  it("unwraps the events list from command application", async () => {
    const server = fakeServer({
      "POST /sessions/s1/apply": (body) => {
        expect(body).toEqual({ commands: ["place_rows"] });
        return { json: { events: [{ type: "instances_placed", count: 4 }] } };
      },
    });
    const events = await makeApi("", server.fetch).apply("s1", ["place_rows"]);
    expect(events).toEqual([{ type: "instances_placed", count: 4 }]);
  });

  it("posts undo without a body", async () => {
    const server = fakeServer({
      "POST /sessions/s1/undo": (body) => {
        expect(body).toBeUndefined();
        return { json: { events: [{ type: "undone", command: "route net ZN auto" }] } };
      },
    });
    const events = await makeApi("", server.fetch).undo("s1");
    expect(events[0].type).toBe("undone");
  });

  it("sends the instruction to the translation endpoint", async () => {
    const server = fakeServer({
      "POST /sessions/s1/nl": (body) => {
        expect(body).toEqual({ instruction: "route everything" });
        return {
          json: {
            proposed_commands: ["route net A auto"],
            transcript: { attempts: 1, turns: [] },
          },
        };
      },
    });
    const doc = await makeApi("", server.fetch)
      .translate("s1", "route everything");
    expect(doc.proposed_commands).toEqual(["route net A auto"]);
  });
});

describe("error mapping", () => {
  it("turns a structured error payload into a typed ApiError", async () => {
    const server = fakeServer({
      "POST /sessions/s1/apply": () => ({
        status: 422,
        json: { error: { type: "DslSyntaxError",
                         message: "line 1: unknown command" } },
      }),
    });
    const api = makeApi("", server.fetch);
    const err = await api.apply("s1", ["bogus"]).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.type).toBe("DslSyntaxError");
    expect(err.message).toContain("unknown command");
  });

  it("keeps the applied prefix's events from a failed batch", async () => {
    const server = fakeServer({
      "POST /sessions/s1/apply": () => ({
        status: 409,
        json: {
          error: { type: "CommandError", message: "unknown net Q" },
          events: [{ type: "instances_placed", count: 4 }],
        },
      }),
    });
    const err = await makeApi("", server.fetch)
      .apply("s1", ["place_rows", "route net Q auto"]).catch((e) => e);
    expect(err.events).toEqual([{ type: "instances_placed", count: 4 }]);
  });

  it("falls back to the raw body for non-JSON errors", async () => {
    const server = fakeServer({
      "GET /sessions/s9/layout": () => ({ status: 500, text: "boom" }),
    });
    const err = await makeApi("", server.fetch).layout("s9").catch((e) => e);
    expect(err.type).toBe("HttpError");
    expect(err.message).toBe("boom");
  });

  it("wraps transport failures with status 0", async () => {
    const api = makeApi("", () => Promise.reject(new Error("refused")));
    const err = await api.tech().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(0);
    expect(err.type).toBe("NetworkError");
    expect(err.message).toContain("refused");
  });
});
