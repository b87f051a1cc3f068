"""Transport-agnostic session hosting: applies protocol commands to live
engine sessions and renders frames.  All methods are synchronous; the
bindings decide when to step (always between sweeps, never inside one).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .. import engine, harness, metrics
from ..graph import Graph, parse_edge_list, parse_json_graph
from .protocol import ProtocolError, encode

_session_ids = itertools.count(1)

# param.set targets: engine learning rates, reward-shape fields, thresholds
_LEARN_PARAMS = {"epsilon", "alpha", "gamma", "kappa"}
_SPEC_PARAMS = {"beta", "weights", "edge_length", "node_radius", "p_hops"}
_CONV_PARAMS = {"max_iters", "a_min", "da_min", "de_min", "min_iters"}


@dataclass
class LiveSession:
    sid: str
    graph: Graph
    algorithm: str
    seed: int
    overrides: dict
    sess: engine.Session
    frame_every: int = 1
    throttle_ms: float = 0.0  # pacing between sweeps for interactive viewing
    paused: bool = False
    pending_steps: int = 0
    done_reason: str | None = None
    node_radius: float = 10.0
    _seq: int = 0

    def next_seq(self) -> int:
        self._seq += 1
        return self._seq

    @property
    def active(self) -> bool:
        return self.done_reason is None and (not self.paused or self.pending_steps > 0)


def _build_session(graph: Graph, algorithm: str, seed: int, overrides: dict,
                   init_positions=None) -> engine.Session:
    if algorithm in ("fr", "dgc", "sm"):
        raise ProtocolError(
            f"live sessions require a marl-* algorithm, got {algorithm!r}")
    spec, learn, conv = harness.marl_configs(algorithm, overrides)
    return engine.Session(graph, spec, learn, conv, seed=seed,
                          init_positions=init_positions)


class SessionHost:
    """One host per connection: owns that connection's sessions."""

    def __init__(self, frame_every: int = 1):
        self.default_frame_every = frame_every
        self.sessions: dict[str, LiveSession] = {}

    # ------------------------------------------------------------------
    # command handling (returns messages to send back immediately)

    def handle(self, msg: dict) -> list[str]:
        kind = msg["kind"]
        if kind == "ping":
            return [encode("pong")]
        if kind == "session.create":
            return [self._create(msg["payload"])]
        live = self.sessions.get(msg.get("session", ""))
        if live is None:
            raise ProtocolError(f"unknown session {msg.get('session')!r}")
        handler = {
            "control.pause": self._pause,
            "control.resume": self._resume,
            "control.step": self._step_once,
            "node.lock": self._lock,
            "node.unlock": self._unlock,
            "node.move": self._move,
            "param.set": self._param_set,
            "session.reset": self._reset,
        }[kind]
        return handler(live, msg["payload"])

    def _create(self, payload: dict) -> str:
        graph = self._load_graph(payload)
        algorithm = payload.get("algorithm", "marl-fr")
        if algorithm not in harness.ALGORITHMS:
            raise ProtocolError(f"unknown algorithm {algorithm!r}")
        seed = int(payload.get("seed", 0))
        overrides = dict(payload.get("overrides", {}))
        if "weights" in overrides:
            overrides["weights"] = tuple(overrides["weights"])
        init = None
        if payload.get("use_stored_positions") and graph.positions:
            init = np.array([graph.positions.get(label, (0.0, 0.0))
                             for label in graph.labels])
        sess = _build_session(graph, algorithm, seed, overrides, init)
        sid = f"s{next(_session_ids)}"
        live = LiveSession(
            sid=sid, graph=graph, algorithm=algorithm, seed=seed,
            overrides=overrides, sess=sess,
            frame_every=int(payload.get("frame_every", self.default_frame_every)),
            throttle_ms=float(payload.get("throttle_ms", 0.0)),
            paused=bool(payload.get("paused", False)),
            node_radius=float(overrides.get("node_radius", 10.0)),
        )
        self.sessions[sid] = live
        config = {
            "algorithm": algorithm, "seed": seed, "overrides": overrides,
            "frame_every": live.frame_every, "n": graph.n, "m": graph.m,
            "epsilon": sess.learn.epsilon, "alpha": sess.learn.alpha,
            "gamma": sess.learn.gamma, "beta": sess.spec.beta,
            "weights": list(sess.spec.weights),
            "max_iters": sess.conv.max_iters,
            "labels": list(graph.labels),
            "edges": [[graph.labels[u], graph.labels[v]] for u, v in graph.edges],
        }
        return encode("session.created", {"config": config}, session=sid,
                      seq=live.next_seq())

    @staticmethod
    def _load_graph(payload: dict) -> Graph:
        if "graph_json" in payload:
            return parse_json_graph(payload["graph_json"])
        if "edge_list" in payload:
            return parse_edge_list(payload["edge_list"])
        if "graph" in payload:
            return harness.load_graph(payload["graph"])
        raise ProtocolError("session.create needs graph, graph_json, or edge_list")

    # ------------------------------------------------------------------

    def _pause(self, live: LiveSession, payload: dict) -> list[str]:
        live.paused = True
        return []

    def _resume(self, live: LiveSession, payload: dict) -> list[str]:
        live.paused = False
        live.pending_steps = 0
        return []

    def _step_once(self, live: LiveSession, payload: dict) -> list[str]:
        live.pending_steps += int(payload.get("count", 1))
        return []

    def _node_index(self, live: LiveSession, payload: dict) -> int:
        if "id" not in payload:
            raise ProtocolError("node command requires an 'id'")
        try:
            return live.graph.index_of(str(payload["id"]))
        except KeyError as exc:
            raise ProtocolError(str(exc)) from exc

    def _lock(self, live: LiveSession, payload: dict) -> list[str]:
        engine.lock_node(live.sess, self._node_index(live, payload))
        return []

    def _unlock(self, live: LiveSession, payload: dict) -> list[str]:
        engine.unlock_node(live.sess, self._node_index(live, payload))
        return []

    def _move(self, live: LiveSession, payload: dict) -> list[str]:
        v = self._node_index(live, payload)
        try:
            x, y = float(payload["x"]), float(payload["y"])
        except (KeyError, TypeError, ValueError):
            raise ProtocolError("node.move requires numeric x and y")
        engine.move_node(live.sess, v, x, y)
        return []

    def _param_set(self, live: LiveSession, payload: dict) -> list[str]:
        if "name" not in payload or "value" not in payload:
            raise ProtocolError("param.set requires 'name' and 'value'")
        name, value = str(payload["name"]), payload["value"]
        sess = live.sess
        if name in _LEARN_PARAMS:
            previous = getattr(sess.learn, name)
            setattr(sess.learn, name, float(value))
            try:
                sess.learn.validate()
            except ValueError as exc:
                setattr(sess.learn, name, previous)
                raise ProtocolError(str(exc)) from exc
        elif name in _CONV_PARAMS:
            if name == "min_iters":
                sess.min_iters = int(value)
                return []
            previous = getattr(sess.conv, name)
            setattr(sess.conv, name,
                    int(value) if name == "max_iters" else float(value))
            try:
                sess.conv.validate()
            except ValueError as exc:
                setattr(sess.conv, name, previous)
                raise ProtocolError(str(exc)) from exc
        elif name in _SPEC_PARAMS:
            if name == "weights":
                if not isinstance(value, (list, tuple)) or len(value) != 5:
                    raise ProtocolError("weights must be a list of five numbers")
                value = tuple(float(x) for x in value)
            elif name == "p_hops":
                value = int(value)
            else:
                value = float(value)
            try:
                sess.spec = sess.spec.with_updates(**{name: value})
            except ValueError as exc:
                raise ProtocolError(str(exc)) from exc
            if name == "node_radius":
                live.node_radius = float(value)
            # Q-tables survive parameter changes; only the objective rebuilds
            from ..rewards import make_objective

            sess.objective = make_objective(sess.spec, sess.graph, sess.dist)
        else:
            raise ProtocolError(f"unknown parameter {name!r}")
        return []

    def _reset(self, live: LiveSession, payload: dict) -> list[str]:
        live.sess = _build_session(live.graph, live.algorithm, live.seed,
                                   live.overrides)
        live.done_reason = None
        live.pending_steps = 0
        return []

    # ------------------------------------------------------------------
    # stepping and frames (called by the binding between sweeps)

    def advance(self, live: LiveSession) -> list[str]:
        """Run one sweep if the session is runnable; return frames/done."""
        if not live.active:
            return []
        if live.paused:
            live.pending_steps -= 1
        engine.step(live.sess)
        out: list[str] = []
        if live.sess.t % live.frame_every == 0:
            out.append(self.frame_message(live))
        reason = engine.check_convergence(live.sess)
        if reason is not None:
            live.done_reason = reason
            out.append(encode("session.done",
                              {"reason": reason, "iterations": live.sess.t},
                              session=live.sid, seq=live.next_seq()))
        return out

    def frame_message(self, live: LiveSession) -> str:
        sess = live.sess
        rep = metrics.report(sess.pos, sess.graph, radius=live.node_radius)
        payload = sess.snapshot()
        payload["metrics"] = {"nc": rep.nc, "no": rep.no, "ne": rep.ne, "na": rep.na}
        payload["config"] = {
            "epsilon": sess.learn.epsilon, "alpha": sess.learn.alpha,
            "gamma": sess.learn.gamma, "beta": sess.spec.beta,
            "weights": list(sess.spec.weights), "node_radius": live.node_radius,
        }
        return encode("frame", payload, session=live.sid, seq=live.next_seq())

    def error_message(self, message: str, session: str | None = None) -> str:
        if session in self.sessions:
            return encode("error", {"message": message}, session=session,
                          seq=self.sessions[session].next_seq())
        return encode("error", {"message": message})
