"""Wire protocol for live layout sessions: newline-free JSON messages,
one per websocket text frame (or per line on a raw socket).

Every message carries {protocol, kind, ...}; session-scoped server
messages also carry a per-session strictly increasing "seq".
"""

from __future__ import annotations

import json

PROTOCOL_VERSION = 1

CLIENT_KINDS = frozenset({
    "session.create", "control.pause", "control.resume", "control.step",
    "node.lock", "node.unlock", "node.move", "param.set", "session.reset",
    "ping",
})
SERVER_KINDS = frozenset({
    "session.created", "frame", "session.done", "error", "pong",
})
SESSION_SCOPED = frozenset({
    "control.pause", "control.resume", "control.step", "node.lock",
    "node.unlock", "node.move", "param.set", "session.reset",
})


class ProtocolError(ValueError):
    """Malformed or out-of-contract message; the connection survives it."""


def encode(kind: str, payload: dict | None = None, session: str | None = None,
           seq: int | None = None) -> str:
    doc: dict = {"protocol": PROTOCOL_VERSION, "kind": kind}
    if session is not None:
        doc["session"] = session
    if seq is not None:
        doc["seq"] = seq
    if payload is not None:
        doc["payload"] = payload
    return json.dumps(doc, sort_keys=True)


def decode(line: str) -> dict:
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProtocolError("message must be a JSON object")
    kind = doc.get("kind")
    if kind not in CLIENT_KINDS:
        raise ProtocolError(f"unknown or non-client message kind: {kind!r}")
    if kind in SESSION_SCOPED and not doc.get("session"):
        raise ProtocolError(f"{kind} requires a session id")
    payload = doc.get("payload", {})
    if not isinstance(payload, dict):
        raise ProtocolError("payload must be an object")
    doc["payload"] = payload
    return doc
