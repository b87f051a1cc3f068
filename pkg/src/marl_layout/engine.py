"""Multi-agent Q-learning layout loop.

One agent per node; nine actions (stay + 8 compass moves of one temperature
step); a 3x3 tabular state recording the agent's last executed action.
Moves that worsen the agent's objective are reverted unless a Metropolis
draw accepts them.  Everything is driven by one seeded generator, so a run
is exactly reproducible.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .classic import JITTER, separate_coincident, total_stress
from .graph import Graph, all_pairs_hop_distance
from .rewards import RewardSpec, make_objective

_SQ2 = math.sqrt(0.5)

ACTION_NAMES = ("stay", "N", "S", "E", "W", "NE", "NW", "SE", "SW")
ACTION_VECTORS = np.array([
    (0.0, 0.0),
    (0.0, 1.0), (0.0, -1.0), (1.0, 0.0), (-1.0, 0.0),
    (_SQ2, _SQ2), (-_SQ2, _SQ2), (_SQ2, -_SQ2), (-_SQ2, -_SQ2),
])
# 3x3 grid cells, row-major with north up: NW=0 N=1 NE=2 / W=3 C=4 E=5 / SW=6 S=7 SE=8
ACTION_CELLS = (4, 1, 7, 5, 3, 2, 0, 8, 6)
CENTER_CELL = 4
N_ACTIONS = 9
N_STATES = 9

CRITERIA = ("max_iterations", "avg_displacement", "displacement_rate", "stress_ratio")


@dataclass
class LearnConfig:
    alpha: float = 0.3
    gamma: float = 0.5
    epsilon: float = 0.5  # high exploration: bad moves are rejected anyway
    initial_step: float = 10.0  # px; also the initial temperature
    cooling_factor: float = 0.75
    cooling_period: int | None = None  # None: n + m sweeps
    metropolis: bool = True
    kappa: float = 1.0  # objective units per px in the acceptance probability
    shared_q: bool = True
    frame_cap: float = 1000.0

    def validate(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.initial_step <= 0 or self.kappa <= 0:
            raise ValueError("initial_step and kappa must be positive")
        if not 0.0 < self.cooling_factor < 1.0:
            raise ValueError("cooling factor must lie in (0, 1)")


@dataclass
class ConvergenceConfig:
    max_iters: int = 2500
    a_min: float = 5.0  # px, average node displacement
    da_min: float = 2.0  # px, displacement rate
    de_min: float = 1e-4  # stress ratio
    active: tuple[str, ...] | None = None  # None: derived from the reward kind
    min_iters: int | None = None  # None: sweeps until T drops below da_min / 2

    def validate(self) -> None:
        if min(self.a_min, self.da_min, self.de_min) <= 0 or self.max_iters < 1:
            raise ValueError("convergence thresholds must be positive")
        if self.active is not None:
            unknown = set(self.active) - set(CRITERIA)
            if unknown:
                raise ValueError(f"unknown convergence criteria: {sorted(unknown)}")


def default_criteria(kind: str) -> tuple[str, ...]:
    """Active termination criteria per reward family (max_iterations is implicit)."""
    if kind in ("local_stress", "global_stress"):
        return ("stress_ratio",)
    if kind == "hybrid":
        return ("displacement_rate", "stress_ratio")
    return ("displacement_rate",)


@dataclass
class StepReport:
    t: int
    temperature: float
    avg_displacement: float
    displacement_rate: float | None
    stress_ratio: float | None
    rewards: np.ndarray
    accepted: int


@dataclass
class RunResult:
    positions: np.ndarray
    reason: str
    iterations: int
    seconds: float


class Session:
    """One running MARL optimization; single-writer, seed-deterministic."""

    def __init__(self, graph: Graph, spec: RewardSpec, learn: LearnConfig,
                 conv: ConvergenceConfig, seed: int,
                 init_positions: np.ndarray | None = None):
        if graph.n == 0:
            raise ValueError("cannot lay out an empty graph")
        learn.validate()
        conv.validate()
        self.graph = graph
        self.spec = spec
        self.learn = learn
        self.conv = conv
        self.seed = seed
        self.rng = np.random.default_rng(seed)

        self.cooling_period = learn.cooling_period or max(1, graph.n + graph.m)
        # total travel budget per agent under the geometric schedule; the
        # init frame must be reachable from anywhere inside it, discounted
        # for the fraction of sweeps an agent spends exploring or rejected
        budget = learn.initial_step * self.cooling_period / (1.0 - learn.cooling_factor)
        self.frame = min(learn.frame_cap, 0.35 * budget)

        if init_positions is not None:
            self.pos = np.array(init_positions, dtype=np.float64)
            if self.pos.shape != (graph.n, 2):
                raise ValueError("init positions must be (n, 2)")
        else:
            self.pos = self.rng.uniform(0.0, self.frame, size=(graph.n, 2))
        separate_coincident(self.pos, self.rng)

        self.dist = all_pairs_hop_distance(graph) if spec.needs_distances else None
        self.objective = make_objective(spec, graph, self.dist)
        self.tracks_energy = spec.kind in ("local_stress", "global_stress", "hybrid")

        if learn.shared_q:
            self.q = np.zeros((N_STATES, N_ACTIONS))
        else:
            self.q = np.zeros((graph.n, N_STATES, N_ACTIONS))
        self.agent_state = np.full(graph.n, CENTER_CELL, dtype=np.int64)
        self.locked: set[int] = set()
        self.t = 0
        self.a_history: list[float] = []
        self.e_history: list[float] = []
        if self.tracks_energy:
            self.e_history.append(self._system_energy())

        if conv.min_iters is not None:
            self.min_iters = conv.min_iters
        else:
            ratio = learn.initial_step / (conv.da_min / 2.0)
            periods = 0 if ratio <= 1.0 else math.ceil(
                math.log(ratio) / math.log(1.0 / learn.cooling_factor))
            self.min_iters = periods * self.cooling_period
        self.active_criteria = conv.active if conv.active is not None else default_criteria(spec.kind)

    @property
    def temperature(self) -> float:
        return self.learn.initial_step * self.learn.cooling_factor ** (self.t // self.cooling_period)

    def q_table(self, v: int) -> np.ndarray:
        return self.q if self.learn.shared_q else self.q[v]

    def _system_energy(self) -> float:
        return total_stress(self.pos, self.dist, self.spec.edge_length)

    def snapshot(self) -> dict:
        """JSON-ready state for the server's frame stream."""
        g = self.graph
        doc = {
            "t": self.t,
            "temperature": self.temperature,
            "frame": self.frame,
            "positions": {g.labels[v]: [float(self.pos[v, 0]), float(self.pos[v, 1])]
                          for v in g.nodes},
            "locked": sorted(g.labels[v] for v in self.locked),
            "avg_displacement": self.a_history[-1] if self.a_history else None,
            "displacement_rate": (abs(self.a_history[-1] - self.a_history[-2])
                                  if len(self.a_history) >= 2 else None),
            "stress_ratio": self._stress_ratio(),
        }
        return doc

    def _stress_ratio(self) -> float | None:
        if len(self.e_history) < 2:
            return None
        e0, e1 = self.e_history[-2], self.e_history[-1]
        if e1 == 0.0:
            return 0.0 if e0 == 0.0 else None
        return (e1 - e0) / e1


def init_session(graph: Graph, spec: RewardSpec,
                 learn: LearnConfig | None = None,
                 conv: ConvergenceConfig | None = None,
                 seed: int = 0,
                 init_positions: np.ndarray | None = None) -> Session:
    return Session(graph, spec, learn or LearnConfig(), conv or ConvergenceConfig(),
                   seed, init_positions)


def select_action(q: np.ndarray, state: int, epsilon: float,
                  rng: np.random.Generator) -> int:
    """Epsilon-greedy over the 9 actions; argmax ties break toward the
    first action in the fixed ordering (stay)."""
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(0, N_ACTIONS))
    return int(np.argmax(q[state]))


def q_update(q: np.ndarray, state: int, action: int, next_state: int,
             reward: float, alpha: float, gamma: float) -> None:
    """Tabular Q-learning update toward reward + gamma * max of the next row."""
    if not math.isfinite(reward):
        raise ValueError(f"non-finite reward: {reward!r}")
    q[state, action] = (1.0 - alpha) * q[state, action] + \
        alpha * (reward + gamma * np.max(q[next_state]))


def _nudge_apart(pos: np.ndarray, v: int, direction: np.ndarray) -> None:
    # grid moves can land exactly on another node; force laws need d > 0
    d = np.linalg.norm(pos - pos[v], axis=-1)
    d[v] = np.inf
    bump = direction if np.linalg.norm(direction) > 0 else np.array([1.0, 0.0])
    while (d == 0.0).any():
        pos[v] = pos[v] + bump * JITTER
        d = np.linalg.norm(pos - pos[v], axis=-1)
        d[v] = np.inf


def step(sess: Session) -> StepReport:
    """One full sweep: every unlocked agent acts once, in ascending node order."""
    learn = sess.learn
    temperature = sess.temperature
    pos = sess.pos
    prev_pos = pos.copy()
    rewards = np.zeros(sess.graph.n)
    accepted = 0

    for v in range(sess.graph.n):
        if v in sess.locked:
            continue
        q = sess.q_table(v)
        state = int(sess.agent_state[v])
        before = sess.objective(v, pos)
        action = select_action(q, state, learn.epsilon, sess.rng)

        if action == 0:  # stay
            reward = 0.0
            next_state = CENTER_CELL
            accepted += 1
        else:
            old = pos[v].copy()
            pos[v] = old + temperature * ACTION_VECTORS[action]
            _nudge_apart(pos, v, ACTION_VECTORS[action])
            after = sess.objective(v, pos)
            reward = before - after
            ok = reward >= 0.0
            if not ok and learn.metropolis and temperature > 0.0:
                ok = sess.rng.random() < math.exp(reward / (learn.kappa * temperature))
            if ok:
                next_state = ACTION_CELLS[action]
                accepted += 1
            else:
                pos[v] = old  # bitwise revert
                next_state = state
        q_update(q, state, action, next_state, reward, learn.alpha, learn.gamma)
        sess.agent_state[v] = next_state
        rewards[v] = reward

    sess.t += 1
    moved = np.linalg.norm(pos - prev_pos, axis=-1)
    avg_disp = float(moved.mean())
    sess.a_history.append(avg_disp)
    if sess.tracks_energy:
        sess.e_history.append(sess._system_energy())

    da = (abs(sess.a_history[-1] - sess.a_history[-2])
          if len(sess.a_history) >= 2 else None)
    return StepReport(t=sess.t, temperature=temperature, avg_displacement=avg_disp,
                      displacement_rate=da, stress_ratio=sess._stress_ratio(),
                      rewards=rewards, accepted=accepted)


def check_convergence(sess: Session) -> str | None:
    """First satisfied criterion in the fixed order, or None."""
    conv = sess.conv
    if sess.t >= conv.max_iters:
        return "max_iterations"
    if sess.t < sess.min_iters:
        return None
    active = sess.active_criteria
    a = sess.a_history
    if "avg_displacement" in active and a and a[-1] < conv.a_min:
        return "avg_displacement"
    if "displacement_rate" in active and len(a) >= 2 and abs(a[-1] - a[-2]) < conv.da_min:
        return "displacement_rate"
    if "stress_ratio" in active and len(sess.e_history) >= 2:
        e0, e1 = sess.e_history[-2], sess.e_history[-1]
        if e1 == 0.0 and e0 == 0.0:
            return "stress_ratio"
        if 0.0 < e1 <= e0 and (e0 - e1) / e1 < conv.de_min:
            return "stress_ratio"
    return None


def run_until_converged(sess: Session) -> RunResult:
    start = time.perf_counter()
    reason = check_convergence(sess)
    while reason is None:
        step(sess)
        reason = check_convergence(sess)
    return RunResult(positions=sess.pos.copy(), reason=reason,
                     iterations=sess.t, seconds=time.perf_counter() - start)


def lock_node(sess: Session, v: int) -> None:
    """Restrict the agent of v to the stay action: its position is frozen."""
    if not 0 <= v < sess.graph.n:
        raise ValueError(f"unknown node id {v}")
    sess.locked.add(v)


def unlock_node(sess: Session, v: int) -> None:
    if not 0 <= v < sess.graph.n:
        raise ValueError(f"unknown node id {v}")
    sess.locked.discard(v)


def move_node(sess: Session, v: int, x: float, y: float) -> None:
    """Externally set a node position (drag support); treated as accepted."""
    if not 0 <= v < sess.graph.n:
        raise ValueError(f"unknown node id {v}")
    sess.pos[v] = (float(x), float(y))
    _nudge_apart(sess.pos, v, np.array([1.0, 0.0]))
