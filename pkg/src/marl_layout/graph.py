"""Graph representation, parsers, and hop-distance computation.

Node ids are interned to dense integers 0..n-1 so hot loops can index
numpy arrays directly; the original string labels are kept for display
and serialization.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

UNREACHABLE = -1  # sentinel in DistanceMatrix for disconnected pairs


class GraphParseError(ValueError):
    """Raised when edge-list or JSON graph input is malformed."""


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph.

    Self-loops and duplicate edges are dropped at construction time,
    so ``sum(degrees) == 2 * m`` always holds.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[str, ...]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False)
    positions: dict[str, tuple[float, float]] | None = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def nodes(self) -> range:
        return range(self.n)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    def edge_array(self) -> np.ndarray:
        """Edges as an (m, 2) int array ((0, 2)-shaped when m == 0)."""
        if not self.edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(self.edges, dtype=np.int64)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown node label: {label!r}") from None


def build_graph(labels: list[str], raw_edges: list[tuple[int, int]],
                positions: dict[str, tuple[float, float]] | None = None) -> Graph:
    """Construct a Graph from interned ids, collapsing duplicates and self-loops."""
    n = len(labels)
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    for u, v in raw_edges:
        if u == v:
            continue  # self-loops are not representable
        key = (u, v) if u < v else (v, u)
        if key in seen:
            continue
        seen.add(key)
        edges.append(key)
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return Graph(
        n=n,
        edges=tuple(edges),
        labels=tuple(labels),
        adjacency=tuple(tuple(sorted(a)) for a in adj),
        positions=positions,
    )


def parse_edge_list(text: str) -> Graph:
    """Parse whitespace-separated edge-list text into a Graph.

    Lines starting with '%' or '#' are comments (SuiteSparse / KONECT
    convention).  Each remaining non-empty line must hold exactly two
    tokens; token order within a line is irrelevant.
    """
    labels: list[str] = []
    index: dict[str, int] = {}
    raw: list[tuple[int, int]] = []

    def intern(tok: str) -> int:
        if tok not in index:
            index[tok] = len(labels)
            labels.append(tok)
        return index[tok]

    saw_content = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(("%", "#")):
            continue
        saw_content = True
        tokens = stripped.split()
        if len(tokens) != 2:
            raise GraphParseError(
                f"line {lineno}: expected two tokens, got {len(tokens)}: {stripped!r}"
            )
        raw.append((intern(tokens[0]), intern(tokens[1])))
    if not saw_content:
        raise GraphParseError("empty edge-list input")
    return build_graph(labels, raw)


def parse_json_graph(text: str) -> Graph:
    """Parse the JSON interchange format {nodes: [{id, x?, y?}], edges: [{source, target}]}.

    Stored positions, when present, are carried through on the returned
    graph so incremental sessions can resume from them.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "nodes" not in doc:
        raise GraphParseError("document must be an object with a 'nodes' array")

    labels: list[str] = []
    index: dict[str, int] = {}
    positions: dict[str, tuple[float, float]] = {}
    for i, node in enumerate(doc.get("nodes", [])):
        if not isinstance(node, dict) or "id" not in node:
            raise GraphParseError(f"node #{i} is missing an 'id'")
        label = str(node["id"])
        if label in index:
            raise GraphParseError(f"duplicate node id {label!r}")
        index[label] = len(labels)
        labels.append(label)
        if "x" in node and "y" in node:
            positions[label] = (float(node["x"]), float(node["y"]))

    raw: list[tuple[int, int]] = []
    for i, edge in enumerate(doc.get("edges", [])):
        if not isinstance(edge, dict) or "source" not in edge or "target" not in edge:
            raise GraphParseError(f"edge #{i} must have 'source' and 'target'")
        for key in ("source", "target"):
            if str(edge[key]) not in index:
                raise GraphParseError(f"edge #{i} references unknown node {edge[key]!r}")
        raw.append((index[str(edge["source"])], index[str(edge["target"])]))

    return build_graph(labels, raw, positions=positions or None)


def serialize_json_graph(g: Graph, positions: np.ndarray | None = None) -> str:
    """Inverse of parse_json_graph; optionally embeds per-node positions."""
    nodes = []
    for v in g.nodes:
        node: dict = {"id": g.labels[v]}
        if positions is not None:
            node["x"] = float(positions[v, 0])
            node["y"] = float(positions[v, 1])
        elif g.positions and g.labels[v] in g.positions:
            node["x"], node["y"] = g.positions[g.labels[v]]
        nodes.append(node)
    edges = [{"source": g.labels[u], "target": g.labels[v]} for u, v in g.edges]
    return json.dumps({"nodes": nodes, "edges": edges})


def all_pairs_hop_distance(g: Graph) -> np.ndarray:
    """BFS-exact hop counts as an (n, n) int matrix.

    Unreachable pairs carry the UNREACHABLE sentinel and are excluded
    from every stress sum downstream.
    """
    n = g.n
    dist = np.full((n, n), UNREACHABLE, dtype=np.int64)
    for src in range(n):
        dist[src, src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            du = dist[src, u]
            for w in g.adjacency[u]:
                if dist[src, w] == UNREACHABLE:
                    dist[src, w] = du + 1
                    queue.append(w)
    return dist


def stress_weights(dist: np.ndarray, length_scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Ideal pixel distances and weights w = d'^-2 from a hop matrix.

    Returns (ideal, weight) arrays with zeros on the diagonal and on
    unreachable pairs, so masked sums need no further filtering.
    """
    reachable = dist > 0
    ideal = np.where(reachable, dist * length_scale, 0.0).astype(np.float64)
    weight = np.zeros_like(ideal)
    np.divide(1.0, np.square(ideal), out=weight, where=reachable)
    return ideal, weight
