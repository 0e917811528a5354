"""Shared exception hierarchy.

Every error the engine raises derives from EngineError and carries a
JSON-friendly payload, so the HTTP layer and the CLI can report failures
uniformly without string parsing.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""

    def __init__(self, message: str, **fields):
        super().__init__(message)
        self.fields = dict(fields)

    def payload(self) -> dict:
        return {"type": type(self).__name__, "message": str(self), **self.fields}


# --- netlist ---------------------------------------------------------------

class SpiceError(EngineError):
    """Netlist parse failure; line is the 1-based source line."""

    def __init__(self, message: str, line: int | None = None):
        fields = {"line": line} if line is not None else {}
        super().__init__(message, **fields)
        self.line = line


class UnterminatedSubckt(SpiceError):
    pass


class MalformedDeviceLine(SpiceError):
    pass


class DuplicateDeviceName(SpiceError):
    pass


class NotTransistorLevel(EngineError):
    pass


# --- tech ------------------------------------------------------------------

class TechError(EngineError):
    pass


class SchemaError(TechError):
    pass


class DirectionError(TechError):
    pass


class OffGridPin(TechError):
    pass


class UnknownPin(TechError):
    pass


# --- layout ----------------------------------------------------------------

class LayoutError(EngineError):
    pass


class DuplicateInstance(LayoutError):
    pass


class UnknownInstance(LayoutError):
    pass


class UnknownTemplate(LayoutError):
    pass


class Overlap(LayoutError):
    """Strictly positive area shared between two instance bounding boxes."""

    def __init__(self, message: str, existing: str):
        super().__init__(message, existing=existing)
        self.existing = existing


# --- place -----------------------------------------------------------------

class PlaceError(EngineError):
    pass


class MissingTemplate(PlaceError):
    pass


class BadPermutation(PlaceError):
    pass


class ConstraintConflict(PlaceError):
    pass


class UnresolvedPin(PlaceError):
    pass


class NotGateLevel(PlaceError):
    pass


# --- route -----------------------------------------------------------------

class RouteError(EngineError):
    pass


class Conflict(RouteError):
    """New geometry would come within one grid unit of a foreign net."""

    def __init__(self, message: str, layer: str, track: int,
                 span: tuple[int, int], other_net: str):
        super().__init__(message, layer=layer, track=track,
                         span=list(span), other_net=other_net)
        self.layer = layer
        self.track = track
        self.span = span
        self.other_net = other_net


class PinNetMismatch(RouteError):
    pass


class UnknownNet(RouteError):
    pass


class NotPerpendicular(RouteError):
    pass


class Unroutable(RouteError):
    pass


class OffGridTrack(RouteError):
    pass


# --- verify ----------------------------------------------------------------

class NetlistBindingError(EngineError):
    pass


# --- dsl -------------------------------------------------------------------

class DslSyntaxError(EngineError):
    """Command text rejected; hint names the expected token."""

    def __init__(self, message: str, position: int, hint: str):
        super().__init__(message, position=position, hint=hint)
        self.position = position
        self.hint = hint


class CommandError(EngineError):
    pass


class NothingToUndo(EngineError):
    pass


# --- llm bridge ------------------------------------------------------------

class TransportError(EngineError):
    pass


class TranslationFailed(EngineError):
    def __init__(self, message: str, attempts: int, last_error: str):
        super().__init__(message, attempts=attempts, last_error=last_error)
        self.attempts = attempts
        self.last_error = last_error


# --- app -------------------------------------------------------------------

class SessionNotFound(EngineError):
    pass


class ScriptError(EngineError):
    """A script line failed; wraps the underlying engine error."""

    def __init__(self, message: str, line: int, cause: EngineError | None = None):
        super().__init__(message, line=line)
        self.line = line
        self.cause = cause
