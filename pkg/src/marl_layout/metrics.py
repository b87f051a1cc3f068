"""Normalized layout-quality metrics: crossings, overlaps, edge-length
uniformity, and minimum angles, each mapped into [0, 1] with 1 best.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import angular_gaps, crossing_mask, incident_angles
from .graph import Graph


@dataclass
class MetricsReport:
    nc: float
    no: float
    ne: float
    na: float
    crossings: int
    overlaps: int
    edge_length_variance: float
    min_angles_deg: list[float | None]
    runtime_ms: float | None = None
    algorithm: str = ""
    seed: int = 0

    def values(self) -> tuple[float, float, float, float]:
        return (self.nc, self.no, self.ne, self.na)


def count_crossings(pos: np.ndarray, g: Graph) -> int:
    """Crossings between unordered edge pairs that share no endpoint."""
    edges = g.edge_array()
    m = edges.shape[0]
    if m < 2:
        return 0
    b1 = pos[edges[:, 0]]
    b2 = pos[edges[:, 1]]
    total = 0
    for i in range(m - 1):
        a, b = edges[i]
        rest = edges[i + 1:]
        disjoint = (rest[:, 0] != a) & (rest[:, 0] != b) & \
                   (rest[:, 1] != a) & (rest[:, 1] != b)
        if not disjoint.any():
            continue
        mask = crossing_mask(pos[a], pos[b], b1[i + 1:], b2[i + 1:])
        total += int(np.count_nonzero(mask & disjoint))
    return total


def crossing_upper_bound(g: Graph) -> int:
    """All edge pairs minus the pairs excluded because adjacent edges
    cannot cross; clamped at zero."""
    m = g.m
    deg = g.degrees
    value = m * (m - 1) // 2 - int(np.sum(deg * (deg - 1))) // 2
    return max(0, value)


def nc(pos: np.ndarray, g: Graph) -> float:
    bound = crossing_upper_bound(g)
    if bound <= 0:
        return 1.0
    return float(np.clip(1.0 - count_crossings(pos, g) / bound, 0.0, 1.0))


def overlap_pairs(pos: np.ndarray, radius: float) -> int:
    n = pos.shape[0]
    if n < 2:
        return 0
    diff = pos[:, None, :] - pos[None, :, :]
    d = np.linalg.norm(diff, axis=-1)
    mask = d < 2.0 * radius
    return int((np.count_nonzero(mask) - n) // 2)  # drop the diagonal, halve


def no(pos: np.ndarray, g: Graph, radius: float = 10.0) -> float:
    if g.n <= 1:
        return 1.0
    max_pairs = g.n * (g.n - 1) // 2
    return 1.0 - overlap_pairs(pos, radius) / max_pairs


def edge_length_sigma(pos: np.ndarray, g: Graph, length: float) -> float:
    edges = g.edge_array()
    if edges.shape[0] == 0:
        return 0.0
    d = np.linalg.norm(pos[edges[:, 0]] - pos[edges[:, 1]], axis=-1)
    return float(np.mean(np.square((d - length) / length)))


def ne(pos: np.ndarray, g: Graph, length: float = 30.0) -> float:
    return 1.0 / (1.0 + edge_length_sigma(pos, g, length))


def min_incident_angles(pos: np.ndarray, g: Graph) -> list[float | None]:
    """Per-node minimum angle between incident edges, degrees; None for deg <= 1."""
    result: list[float | None] = []
    for v in g.nodes:
        if g.degree(v) <= 1:
            result.append(None)
            continue
        angles = incident_angles(v, pos, g.adjacency[v])
        if angles.size <= 1:
            result.append(None)
            continue
        result.append(float(np.degrees(angular_gaps(angles).min())))
    return result


def na(pos: np.ndarray, g: Graph) -> float:
    if g.n == 0:
        return 1.0
    deviation = 0.0
    angles = min_incident_angles(pos, g)
    for v in g.nodes:
        theta = angles[v]
        if theta is None:
            continue  # deg <= 1 contributes zero deviation
        ideal = 360.0 / g.degree(v)
        deviation += abs((ideal - theta) / ideal)
    return float(np.clip(1.0 - deviation / g.n, 0.0, 1.0))


def mean_edge_length(pos: np.ndarray, g: Graph) -> float:
    edges = g.edge_array()
    if edges.shape[0] == 0:
        return 0.0
    return float(np.linalg.norm(pos[edges[:, 0]] - pos[edges[:, 1]], axis=-1).mean())


def report(pos: np.ndarray, g: Graph, radius: float = 10.0,
           edge_length: float | None = None, algorithm: str = "", seed: int = 0,
           runtime_ms: float | None = None) -> MetricsReport:
    """All four normalized metrics plus the raw counts behind them.

    With edge_length=None the length deviation is measured against the
    layout's own mean edge length, making the edge-length metric a pure
    uniformity score; pass an explicit length to score against a target.
    """
    if edge_length is None:
        edge_length = mean_edge_length(pos, g) or 1.0
    sigma = edge_length_sigma(pos, g, edge_length)
    return MetricsReport(
        nc=nc(pos, g),
        no=no(pos, g, radius),
        ne=1.0 / (1.0 + sigma),
        na=na(pos, g),
        crossings=count_crossings(pos, g),
        overlaps=overlap_pairs(pos, radius),
        edge_length_variance=sigma,
        min_angles_deg=min_incident_angles(pos, g),
        runtime_ms=runtime_ms,
        algorithm=algorithm,
        seed=seed,
    )
