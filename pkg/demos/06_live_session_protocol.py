"""
Driving a live session over the wire protocol
=============================================

The session server speaks JSON messages over a websocket: create a session,
watch frames stream in, pause it, drag-and-lock a node, tighten a reward
weight, resume.  This demo exercises the protocol in-process (no network)
via the ASGI test client; `marl-layout serve --port 8765` exposes the same
endpoint for the browser frontend.
"""

import json

from starlette.testclient import TestClient

from marl_layout.server.app import build_app
from marl_layout.server.protocol import encode

client = TestClient(build_app())
with client.websocket_connect("/ws") as ws:
    ws.send_text(encode("session.create", {
        "graph": "g1", "algorithm": "marl-hybrid", "seed": 4, "paused": True,
    }))
    created = json.loads(ws.receive_text())
    sid = created["session"]
    print(f"session {sid}: {created['payload']['config']['n']} agents, "
          f"beta={created['payload']['config']['beta']}")

    def step_and_frame():
        ws.send_text(encode("control.step", {}, session=sid))
        while True:
            msg = json.loads(ws.receive_text())
            if msg["kind"] == "frame":
                return msg["payload"]

    frame = step_and_frame()
    print(f"t={frame['t']} T={frame['temperature']:.2f} metrics={frame['metrics']}")

    # drag node "5" somewhere and pin it
    ws.send_text(encode("node.move", {"id": "5", "x": 50.0, "y": 50.0}, session=sid))
    ws.send_text(encode("node.lock", {"id": "5"}, session=sid))

    # pure stress from here on
    ws.send_text(encode("param.set", {"name": "beta", "value": 0.0}, session=sid))

    for _ in range(5):
        frame = step_and_frame()
    print(f"t={frame['t']} node 5 pinned at {frame['positions']['5']}, "
          f"locked={frame['locked']}")
print("protocol demo done")
