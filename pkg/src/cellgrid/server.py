"""HTTP front end.

Thin JSON mapping over Session: every endpoint parses its body,
delegates to the same dsl.apply path the CLI uses, and serializes the
events back out.  Sessions live in process memory, keyed by sequential
ids, each guarded by its own lock so concurrent commands to one
session serialize instead of interleaving.

Error mapping: unknown session or design object -> 404, text that does
not parse (or NL translation that gives up) -> 422, commands that parse
but are rejected by the engine (conflicts, overlaps, nothing to undo)
-> 409.  Engine payloads ride in the response body unchanged.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import dsl, llm_bridge
from .errors import (
    DslSyntaxError,
    EngineError,
    MissingTemplate,
    NothingToUndo,
    SessionNotFound,
    SpiceError,
    TranslationFailed,
    UnknownInstance,
    UnknownNet,
    UnknownPin,
    UnknownTemplate,
)
from .layout import to_canonical_json, to_svg
from .netlist import signal_nets
from .tech import Technology, tech_to_dict
from .verify import verification_report

_NOT_FOUND = (SessionNotFound, UnknownInstance, UnknownNet, UnknownPin,
              UnknownTemplate, MissingTemplate)
_UNPROCESSABLE = (DslSyntaxError, TranslationFailed, SpiceError)


@dataclass
class _Slot:
    session: dsl.Session
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory session registry with sequential ids."""

    def __init__(self):
        self._slots: dict[str, _Slot] = {}
        self._lock = threading.Lock()
        self._next = 1

    def create(self, session: dsl.Session) -> str:
        with self._lock:
            sid = f"s{self._next}"
            self._next += 1
            self._slots[sid] = _Slot(session)
        return sid

    def get(self, sid: str) -> _Slot:
        with self._lock:
            slot = self._slots.get(sid)
        if slot is None:
            raise SessionNotFound(f"no such session: {sid}")
        return slot

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._slots, key=lambda s: int(s[1:]))


def _error_response(exc: EngineError, status: int) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": exc.payload()})


def _status_for(exc: EngineError) -> int:
    if isinstance(exc, _NOT_FOUND):
        return 404
    if isinstance(exc, _UNPROCESSABLE):
        return 422
    return 409


def _event_json(events) -> list[dict]:
    return [dict(e) for e in events]


def make_app(tech: Technology,
             llm_config: llm_bridge.BridgeConfig | None = None,
             transport: llm_bridge.Transport | None = None,
             static_dir: str | None = None) -> FastAPI:
    """Build the API app around one Technology.

    transport is injectable so tests can run the NL endpoint offline;
    when llm_config is given without a transport the HTTP one is used.
    static_dir, when given, is served under /ui so a browser client can
    run same-origin with the API.
    """
    app = FastAPI(title="cellgrid", docs_url=None, redoc_url=None)
    store = SessionStore()
    if llm_config is not None and transport is None:
        transport = llm_bridge.http_transport

    @app.exception_handler(EngineError)
    async def _engine_error(request: Request, exc: EngineError):
        return _error_response(exc, _status_for(exc))

    @app.get("/")
    def root():
        return {"service": "cellgrid", "sessions": store.ids()}

    @app.get("/tech")
    def get_tech():
        return tech_to_dict(tech)

    @app.post("/sessions", status_code=201)
    def create_session(body: dict):
        text = body.get("netlist_text")
        if not isinstance(text, str) or not text.strip():
            return JSONResponse(status_code=422, content={
                "error": {"type": "BadRequest",
                          "message": "netlist_text must be a non-empty string"}})
        top = body.get("cell")
        session = dsl.new_session(tech, text, top=top)
        sid = store.create(session)
        return {"id": sid, "cell": session.netlist.name,
                "nets": signal_nets(session.netlist)}

    def _apply_texts(slot: _Slot, texts: list[str]):
        # Parse everything up front so a typo in command 3 rejects the
        # batch before command 1 mutates the session.
        parsed = [dsl.parse_command(t) for t in texts]
        events: list[dict] = []
        with slot.lock:
            session = slot.session
            try:
                for cmd in parsed:
                    session, evs = dsl.apply(session, cmd)
                    events.extend(_event_json(evs))
            except EngineError as exc:
                slot.session = session
                payload = {"error": exc.payload(), "events": events}
                return JSONResponse(status_code=_status_for(exc),
                                    content=payload)
            slot.session = session
        return {"events": events}

    @app.post("/sessions/{sid}/commands")
    def post_command(sid: str, body: dict):
        text = body.get("text")
        if not isinstance(text, str):
            return JSONResponse(status_code=422, content={
                "error": {"type": "BadRequest",
                          "message": "text must be a string"}})
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        return _apply_texts(store.get(sid), lines)

    @app.post("/sessions/{sid}/apply")
    def apply_commands(sid: str, body: dict):
        cmds = body.get("commands")
        if (not isinstance(cmds, list)
                or not all(isinstance(c, str) for c in cmds)):
            return JSONResponse(status_code=422, content={
                "error": {"type": "BadRequest",
                          "message": "commands must be a list of strings"}})
        return _apply_texts(store.get(sid), cmds)

    @app.post("/sessions/{sid}/nl")
    def translate_nl(sid: str, body: dict):
        instruction = body.get("instruction")
        if not isinstance(instruction, str) or not instruction.strip():
            return JSONResponse(status_code=422, content={
                "error": {"type": "BadRequest",
                          "message": "instruction must be a non-empty string"}})
        if llm_config is None or transport is None:
            return JSONResponse(status_code=422, content={
                "error": {"type": "NoTranslator",
                          "message": "no language model is configured; "
                                     "start the server with an llm config"}})
        slot = store.get(sid)
        with slot.lock:
            session = slot.session
        commands, transcript = llm_bridge.translate(
            session, instruction, transport, llm_config)
        return {
            "proposed_commands": [dsl.print_command(c) for c in commands],
            "transcript": {
                "attempts": transcript.attempts,
                "turns": [{"role": r, "text": t} for r, t in transcript.turns],
            },
        }

    @app.post("/sessions/{sid}/undo")
    def undo(sid: str, body: dict | None = None):
        slot = store.get(sid)
        with slot.lock:
            try:
                slot.session, events = dsl.apply(slot.session, dsl.Undo())
            except NothingToUndo as exc:
                return _error_response(exc, 409)
        return {"events": _event_json(events)}

    @app.get("/sessions/{sid}/layout")
    def get_layout(sid: str):
        slot = store.get(sid)
        with slot.lock:
            payload = to_canonical_json(slot.session.current)
        return Response(content=payload, media_type="application/json")

    @app.get("/sessions/{sid}/svg")
    def get_svg(sid: str):
        slot = store.get(sid)
        with slot.lock:
            svg = to_svg(slot.session.current, tech)
        return Response(content=svg, media_type="image/svg+xml")

    @app.get("/sessions/{sid}/report")
    def get_report(sid: str):
        slot = store.get(sid)
        with slot.lock:
            report = verification_report(slot.session.current,
                                         slot.session.netlist, tech)
        return report

    @app.get("/sessions/{sid}/history")
    def get_history(sid: str):
        slot = store.get(sid)
        with slot.lock:
            session = slot.session
        return {
            "commands": [dsl.print_command(c) for c in session.command_log],
            "checkpoints": dict(session.checkpoints),
            "can_undo": len(session.history) > 0,
        }

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=static_dir, html=True),
                  name="ui")

    return app
