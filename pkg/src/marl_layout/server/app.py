"""ASGI binding: the message protocol over a websocket at /ws, a health
probe at /health, and optional static hosting for the steering frontend.

One SessionHost per connection; sessions step in background tasks and a
single writer task drains the outbound queue, so per-session sequence
numbers are monotone on the wire.
"""

from __future__ import annotations

import asyncio
import contextlib

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .host import SessionHost
from .protocol import PROTOCOL_VERSION, ProtocolError, decode


def build_app(frame_every: int = 1, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="marl-layout session server")

    @app.get("/health")
    async def health():
        return {"status": "ok", "protocol": PROTOCOL_VERSION}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        host = SessionHost(frame_every=frame_every)
        outbound: asyncio.Queue[str | None] = asyncio.Queue()
        pumps: dict[str, asyncio.Task] = {}

        async def writer():
            while True:
                line = await outbound.get()
                if line is None:
                    return
                await ws.send_text(line)

        async def pump(sid: str):
            live = host.sessions[sid]
            while live.done_reason is None:
                if not live.active:
                    await asyncio.sleep(0.01)
                    continue
                for out in host.advance(live):
                    outbound.put_nowait(out)
                if live.throttle_ms:
                    await asyncio.sleep(live.throttle_ms / 1e3)
                else:
                    await asyncio.sleep(0)

        writer_task = asyncio.create_task(writer())
        try:
            while True:
                line = await ws.receive_text()
                session_hint = None
                try:
                    msg = decode(line)
                    session_hint = msg.get("session")
                    for reply in host.handle(msg):
                        outbound.put_nowait(reply)
                except ProtocolError as exc:
                    outbound.put_nowait(host.error_message(str(exc), session_hint))
                    continue
                for sid in host.sessions:
                    task = pumps.get(sid)
                    if task is None or task.done():
                        pumps[sid] = asyncio.create_task(pump(sid))
        except WebSocketDisconnect:
            pass
        finally:
            for task in pumps.values():
                task.cancel()
            outbound.put_nowait(None)
            with contextlib.suppress(Exception):
                await writer_task

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def serve(host: str = "127.0.0.1", port: int = 8765, frame_every: int = 1,
          static_dir: str | None = None) -> None:
    import uvicorn

    app = build_app(frame_every=frame_every, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
