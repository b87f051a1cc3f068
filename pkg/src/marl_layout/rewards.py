"""Per-agent objectives: force magnitudes, local/global stress, and the
aesthetic quality measure.  A reward is always the decrease of one of these
objectives across a single move, so every objective here is "lower is better".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .classic import DgcParams, FrParams, total_stress
from .geometry import angular_gaps, crossing_mask, incident_angles
from .graph import Graph, stress_weights

REWARD_KINDS = ("fr_force", "dgc_force", "local_stress", "global_stress", "custom", "hybrid")

DEFAULT_WEIGHTS = (0.35, 0.20, 0.10, 0.25, 0.10)  # overlap, crossing, spacing, length, angle


class CoincidentNodesError(ValueError):
    """Force laws diverge at distance zero; callers jitter beforehand."""


@dataclass
class RewardSpec:
    """Tagged choice of reward family plus the parameters that family needs."""

    kind: str = "fr_force"
    fr: FrParams | None = None
    dgc: DgcParams | None = None
    p_hops: int = 10
    weights: tuple[float, ...] = DEFAULT_WEIGHTS
    edge_length: float = 30.0  # L: desired edge length / minimum node distance, px
    beta: float = 0.5
    node_radius: float = 10.0

    def __post_init__(self):
        if self.kind not in REWARD_KINDS:
            raise ValueError(f"unknown reward kind {self.kind!r}")
        if self.kind in ("fr_force", "hybrid") and self.fr is None:
            self.fr = FrParams()
        if self.kind == "dgc_force" and self.dgc is None:
            self.dgc = DgcParams()
        self.validate()

    def validate(self) -> None:
        if self.p_hops < 1:
            raise ValueError("p_hops must be >= 1")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if len(self.weights) != 5 or any(w < 0 for w in self.weights):
            raise ValueError("need 5 non-negative weights")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if self.edge_length <= 0 or self.node_radius <= 0:
            raise ValueError("edge_length and node_radius must be positive")

    @property
    def needs_distances(self) -> bool:
        return self.kind in ("local_stress", "global_stress", "hybrid")

    def to_dict(self) -> dict:
        doc: dict = {"kind": self.kind, "p_hops": self.p_hops,
                     "weights": list(self.weights), "edge_length": self.edge_length,
                     "beta": self.beta, "node_radius": self.node_radius}
        if self.fr is not None:
            doc["k"] = self.fr.k
        if self.dgc is not None:
            doc.update(lam=self.dgc.lam, zeta=self.dgc.zeta, mu=self.dgc.mu)
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "RewardSpec":
        kind = doc.get("kind", "fr_force")
        fr = FrParams(k=float(doc["k"])) if "k" in doc else None
        dgc = None
        if any(key in doc for key in ("lam", "zeta", "mu")):
            dgc = DgcParams(lam=float(doc.get("lam", 30.0)),
                            zeta=float(doc.get("zeta", 5.0)),
                            mu=float(doc.get("mu", 5000.0)))
        return cls(kind=kind, fr=fr, dgc=dgc,
                   p_hops=int(doc.get("p_hops", 10)),
                   weights=tuple(doc.get("weights", DEFAULT_WEIGHTS)),
                   edge_length=float(doc.get("edge_length", 30.0)),
                   beta=float(doc.get("beta", 0.5)),
                   node_radius=float(doc.get("node_radius", 10.0)))

    @classmethod
    def from_json(cls, text: str) -> "RewardSpec":
        return cls.from_dict(json.loads(text))

    def with_updates(self, **changes) -> "RewardSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class Objective:
    kind: str
    value: float


def _distances_from(v: int, pos: np.ndarray, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    delta = pos[v] - pos[idx]
    d = np.linalg.norm(delta, axis=-1)
    if (d == 0.0).any():
        raise CoincidentNodesError(f"node {v} coincides with another node")
    return delta, d


def fr_force_magnitude(v: int, pos: np.ndarray, g: Graph, k: float) -> float:
    """Norm of the net spring-embedder force on v (attraction d^2/k, repulsion k^2/d)."""
    others = np.array([u for u in g.nodes if u != v], dtype=np.int64)
    force = np.zeros(2)
    if others.size:
        delta, d = _distances_from(v, pos, others)
        force += ((k * k / d)[:, None] * (delta / d[:, None])).sum(axis=0)
    neigh = np.array(g.adjacency[v], dtype=np.int64)
    if neigh.size:
        delta, d = _distances_from(v, pos, neigh)
        force -= ((d / k)[:, None] * delta).sum(axis=0)  # (d^2/k) along -unit
    return float(np.linalg.norm(force))


def dgc_force_magnitude(v: int, pos: np.ndarray, g: Graph,
                        lam: float, zeta: float, mu: float) -> float:
    """Norm of the net elastic-spring force on v (springs (lam-d)^2/zeta, repulsion mu/d^2)."""
    others = np.array([u for u in g.nodes if u != v], dtype=np.int64)
    force = np.zeros(2)
    if others.size:
        delta, d = _distances_from(v, pos, others)
        force += ((mu / np.square(d))[:, None] * (delta / d[:, None])).sum(axis=0)
    neigh = np.array(g.adjacency[v], dtype=np.int64)
    if neigh.size:
        delta, d = _distances_from(v, pos, neigh)
        spring = -np.sign(d - lam) * np.square(lam - d) / zeta
        force += ((spring / d)[:, None] * delta).sum(axis=0)
    return float(np.linalg.norm(force))


def local_stress(v: int, pos: np.ndarray, dist: np.ndarray, p_hops: int,
                 length_scale: float = 1.0) -> float:
    """Stress restricted to the p-hop neighborhood of v."""
    if p_hops < 1:
        raise ValueError("p_hops must be >= 1")
    row = dist[v]
    nbr = np.nonzero((row >= 1) & (row <= p_hops))[0]
    if nbr.size == 0:
        return 0.0
    ideal = row[nbr].astype(np.float64) * length_scale
    weight = 1.0 / np.square(ideal)
    d = np.linalg.norm(pos[v] - pos[nbr], axis=-1)
    return float(np.sum(weight * np.square(d - ideal)))


def global_stress_for_agent(v: int, pos: np.ndarray, dist: np.ndarray,
                            length_scale: float = 1.0) -> float:
    """The all-pairs stress; identical for every agent by construction."""
    return total_stress(pos, dist, length_scale)


def overlap_count(v: int, pos: np.ndarray, radius: float) -> int:
    """Number of nodes whose centers lie closer than 2 * radius to v."""
    d = np.linalg.norm(pos[v] - pos, axis=-1)
    d[v] = np.inf
    return int(np.count_nonzero(d < 2.0 * radius))


def crossing_count_local(v: int, pos: np.ndarray, g: Graph) -> int:
    """Incident-vs-all crossing count; pairs of edges both incident to v
    are counted twice, matching the literal double sum."""
    edges = g.edge_array()
    if edges.shape[0] == 0 or g.degree(v) == 0:
        return 0
    b1 = pos[edges[:, 0]]
    b2 = pos[edges[:, 1]]
    count = 0
    for i, (a, b) in enumerate(edges):
        if a != v and b != v:
            continue
        mask = crossing_mask(pos[a], pos[b], b1, b2)
        mask[i] = False  # an edge does not cross itself
        count += int(mask.sum())
    return count


def spacing_deficit(v: int, pos: np.ndarray, min_distance: float) -> float:
    """Total shortfall of other nodes inside the minimum-distance disc of v."""
    d = np.linalg.norm(pos[v] - pos, axis=-1)
    d[v] = np.inf
    short = min_distance - d
    return float(short[short > 0].sum())


def edge_length_variance(v: int, pos: np.ndarray, g: Graph, length: float) -> float:
    """Mean relative square error of the lengths of edges incident to v."""
    neigh = g.adjacency[v]
    if not neigh:
        return 0.0
    d = np.linalg.norm(pos[v] - pos[list(neigh)], axis=-1)
    return float(np.mean(np.square((d - length) / length)))


def angle_deviation(v: int, pos: np.ndarray, g: Graph) -> float:
    """Cumulative square deviation of the angular gaps at v from 2*pi/deg."""
    neigh = g.adjacency[v]
    if len(neigh) <= 1:
        return 0.0
    angles = incident_angles(v, pos, neigh)
    if angles.size <= 1:
        return 0.0
    gaps = angular_gaps(angles)
    ideal = 2.0 * np.pi / angles.size
    return float(np.sum(np.square(gaps - ideal)))


def local_quality(v: int, pos: np.ndarray, g: Graph, spec: RewardSpec) -> float:
    """Weighted aesthetic objective: overlaps, crossings, spacing, edge
    lengths, and angle deviation; zero is ideal."""
    w1, w2, w3, w4, w5 = spec.weights
    return (w1 * overlap_count(v, pos, spec.node_radius)
            + w2 * crossing_count_local(v, pos, g)
            + w3 * spacing_deficit(v, pos, spec.edge_length)
            + w4 * edge_length_variance(v, pos, g, spec.edge_length)
            + w5 * angle_deviation(v, pos, g))


def evaluate_objective(spec: RewardSpec, v: int, pos: np.ndarray, g: Graph,
                       dist: np.ndarray | None = None) -> Objective:
    """Dispatch to the objective selected by the spec's kind tag."""
    fn = make_objective(spec, g, dist)
    return Objective(kind=spec.kind, value=fn(v, pos))


def make_objective(spec: RewardSpec, g: Graph,
                   dist: np.ndarray | None = None) -> Callable[[int, np.ndarray], float]:
    """Build a fast per-agent objective closure with per-graph precomputation.

    The returned callable evaluates the objective of one agent at a layout;
    the engine calls it before and after each tentative move.
    """
    spec.validate()
    if spec.needs_distances and dist is None:
        raise ValueError(f"reward kind {spec.kind!r} requires a distance matrix")

    n = g.n
    others = [np.array([u for u in g.nodes if u != v], dtype=np.int64) for v in range(n)]
    neighbors = [np.array(g.adjacency[v], dtype=np.int64) for v in range(n)]

    if spec.kind == "fr_force":
        k = spec.fr.k
        return _force_closure(others, neighbors, repulsion=("fr", k), attraction=("fr", k))

    if spec.kind == "dgc_force":
        lam, zeta, mu = spec.dgc.lam, spec.dgc.zeta, spec.dgc.mu
        return _force_closure(others, neighbors, repulsion=("dgc", mu), attraction=("dgc", (lam, zeta)))

    if spec.kind in ("local_stress", "hybrid"):
        rows = []
        for v in range(n):
            row = dist[v]
            nbr = np.nonzero((row >= 1) & (row <= spec.p_hops))[0]
            ideal = row[nbr].astype(np.float64) * spec.edge_length
            weight = 1.0 / np.square(ideal) if nbr.size else np.empty(0)
            rows.append((nbr, ideal, weight))

        def stress_fn(v: int, pos: np.ndarray) -> float:
            nbr, ideal, weight = rows[v]
            if nbr.size == 0:
                return 0.0
            d = np.linalg.norm(pos[v] - pos[nbr], axis=-1)
            return float(np.sum(weight * np.square(d - ideal)))

        if spec.kind == "local_stress":
            return stress_fn

        force_fn = _force_closure(others, neighbors,
                                  repulsion=("fr", spec.fr.k), attraction=("fr", spec.fr.k))
        beta = spec.beta

        def hybrid_fn(v: int, pos: np.ndarray) -> float:
            return beta * force_fn(v, pos) + (1.0 - beta) * stress_fn(v, pos)

        return hybrid_fn

    if spec.kind == "global_stress":
        ideal, weight = stress_weights(dist, spec.edge_length)

        def global_fn(v: int, pos: np.ndarray) -> float:
            diff = pos[:, None, :] - pos[None, :, :]
            euclid = np.linalg.norm(diff, axis=-1)
            return float(0.5 * np.sum(weight * np.square(euclid - ideal)))

        return global_fn

    # custom quality measure
    def quality_fn(v: int, pos: np.ndarray) -> float:
        return local_quality(v, pos, g, spec)

    return quality_fn


def _force_closure(others, neighbors, repulsion, attraction):
    rep_kind, rep_param = repulsion
    att_kind, att_param = attraction

    def force_fn(v: int, pos: np.ndarray) -> float:
        force = np.zeros(2)
        idx = others[v]
        if idx.size:
            delta = pos[v] - pos[idx]
            d = np.linalg.norm(delta, axis=-1)
            if (d == 0.0).any():
                raise CoincidentNodesError(f"node {v} coincides with another node")
            if rep_kind == "fr":
                coeff = (rep_param * rep_param) / np.square(d)
            else:
                coeff = rep_param / (np.square(d) * d)
            force += (coeff[:, None] * delta).sum(axis=0)
        nbr = neighbors[v]
        if nbr.size:
            delta = pos[v] - pos[nbr]
            d = np.linalg.norm(delta, axis=-1)
            if (d == 0.0).any():
                raise CoincidentNodesError(f"node {v} coincides with a neighbor")
            if att_kind == "fr":
                coeff = -d / att_param
            else:
                lam, zeta = att_param
                coeff = -np.sign(d - lam) * np.square(lam - d) / (zeta * d)
            force += (coeff[:, None] * delta).sum(axis=0)
        return float(np.linalg.norm(force))

    return force_fn
