"""Classic baseline layouts: two spring embedders and localized stress majorization.

All three are pure functions of (graph, params, seed): the same seed gives a
bitwise-identical layout.  Positions are pixel coordinates in an (n, 2)
float64 array; use layout_to_json / layout_from_json for the {id: {x, y}}
interchange format.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, stress_weights

DEFAULT_FRAME = 1000.0  # random init samples uniformly in frame x frame px
JITTER = 1e-3  # px, separates coincident nodes before force evaluation


@dataclass
class FrParams:
    """Spring-embedder parameters: f_a = d^2/k, f_r = k^2/d.

    repulsion_cutoff is the grid-variant rule of the classic algorithm:
    repulsion is ignored beyond that distance (default 2k), which keeps
    edge lengths near k on dense graphs; use inf for the pure law.
    """

    k: float = 30.0
    max_iters: int = 300
    initial_step: float = 250.0
    cooling_factor: float = 0.9
    da_min: float = 2.0  # stop once |A(t) - A(t-1)| drops below this
    frame: float = DEFAULT_FRAME
    repulsion_cutoff: float = 60.0

    def validate(self) -> None:
        if self.k <= 0:
            raise ValueError("k must be positive")
        if not 0.0 < self.cooling_factor < 1.0:
            raise ValueError("cooling factor must lie in (0, 1)")


@dataclass
class DgcParams:
    """Elastic spring parameters: f_a = (lambda - d)^2 / zeta, f_r = mu / d^2."""

    lam: float = 30.0
    zeta: float = 5.0
    mu: float = 5000.0
    max_iters: int = 300
    initial_step: float = 250.0
    cooling_factor: float = 0.9
    da_min: float = 2.0
    frame: float = DEFAULT_FRAME

    def validate(self) -> None:
        if min(self.lam, self.zeta, self.mu) <= 0:
            raise ValueError("lambda, zeta, mu must all be positive")
        if not 0.0 < self.cooling_factor < 1.0:
            raise ValueError("cooling factor must lie in (0, 1)")


@dataclass
class StressParams:
    """Localized majorization parameters; weights are fixed at d'^-2."""

    de_min: float = 1e-4  # stress-ratio tolerance
    max_iters: int = 300
    length_scale: float = 30.0  # px per hop of graph-theoretic distance
    frame: float = DEFAULT_FRAME

    def validate(self) -> None:
        if self.de_min <= 0:
            raise ValueError("stress-ratio tolerance must be positive")


def init_positions(n: int, frame: float, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(0.0, frame, size=(n, 2))


def separate_coincident(pos: np.ndarray, rng: np.random.Generator) -> None:
    """Jitter exactly coincident nodes apart (force laws diverge at d = 0)."""
    while True:
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        np.fill_diagonal(dist, np.inf)
        clashes = np.argwhere(dist < 1e-12)
        if clashes.size == 0:
            return
        for v in np.unique(clashes[:, 0]):
            pos[v] += rng.uniform(-JITTER, JITTER, size=2)


def _force_directed(g: Graph, coefficient, params, seed,
                    stats: dict | None) -> np.ndarray:
    """Shared loop for both spring embedders.

    ``coefficient(dist)`` returns the per-pair scalar c where the
    displacement contribution of u on v is c * (p_v - p_u); positive
    pushes apart, negative pulls together.
    """
    rng = np.random.default_rng(seed)
    pos = init_positions(g.n, params.frame, rng)
    if g.n <= 1:
        if stats is not None:
            stats.update(iterations=0, reason="trivial")
        return pos

    temperature = params.initial_step
    prev_a = None
    iterations = 0
    reason = "max_iters"
    a_hist: list[float] = []
    max_step_hist: list[float] = []
    temp_hist: list[float] = []
    # while moves saturate the temperature, positions oscillate around the
    # equilibrium with amplitude ~T and the displacement rate is schedule
    # noise; arm the stop only once T is well below the threshold scale
    ratio = params.initial_step / (0.1 * params.da_min)
    min_iters = 0 if ratio <= 1.0 else math.ceil(
        math.log(ratio) / math.log(1.0 / params.cooling_factor))

    for it in range(params.max_iters):
        separate_coincident(pos, rng)
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        disp = np.einsum("uvx,uv->ux", diff, coefficient(dist))
        length = np.linalg.norm(disp, axis=-1)
        safe = np.where(length > 0, length, 1.0)
        step = disp * (np.minimum(length, temperature) / safe)[:, None]
        pos += step

        moved = np.linalg.norm(step, axis=-1)
        a = float(moved.mean())
        a_hist.append(a)
        max_step_hist.append(float(moved.max()))
        temp_hist.append(temperature)
        iterations = it + 1
        if it >= min_iters and prev_a is not None and abs(a - prev_a) < params.da_min:
            reason = "displacement_rate"
            break
        prev_a = a
        temperature *= params.cooling_factor

    if stats is not None:
        stats.update(iterations=iterations, reason=reason, a_history=a_hist,
                     max_step_history=max_step_hist, temp_history=temp_hist)
    return pos


def fr_layout(g: Graph, params: FrParams | None = None, seed: int = 0,
              stats: dict | None = None) -> np.ndarray:
    """Fruchterman-Reingold layout with temperature-capped displacement."""
    params = params or FrParams()
    params.validate()
    adjacency = _adjacency_matrix(g)
    k = params.k
    cutoff = params.repulsion_cutoff

    def coefficient(dist: np.ndarray) -> np.ndarray:
        np.fill_diagonal(dist, np.inf)
        with np.errstate(invalid="ignore"):
            repulsion = (k * k) / np.square(dist)
            if np.isfinite(cutoff):
                repulsion = np.where(dist <= cutoff, repulsion, 0.0)
            coeff = repulsion - adjacency * dist / k
        np.fill_diagonal(coeff, 0.0)
        return coeff

    return _force_directed(g, coefficient, params, seed, stats)


def dgc_layout(g: Graph, params: DgcParams | None = None, seed: int = 0,
               stats: dict | None = None) -> np.ndarray:
    """Elastic spring layout: quadratic springs on edges, inverse-square repulsion."""
    params = params or DgcParams()
    params.validate()
    adjacency = _adjacency_matrix(g)
    lam, zeta, mu = params.lam, params.zeta, params.mu

    def coefficient(dist: np.ndarray) -> np.ndarray:
        np.fill_diagonal(dist, np.inf)
        with np.errstate(invalid="ignore"):
            repulsion = mu / (np.square(dist) * dist)
            # spring pulls together beyond lam, pushes apart inside it
            spring = -np.sign(dist - lam) * np.square(lam - dist) / (zeta * dist)
            coeff = repulsion + adjacency * spring
        np.fill_diagonal(coeff, 0.0)
        return coeff

    return _force_directed(g, coefficient, params, seed, stats)


def _adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1.0
    return a


def total_stress(pos: np.ndarray, dist: np.ndarray, length_scale: float = 1.0) -> float:
    """Sum over reachable pairs u < v of d'^-2 (d(u,v) - d')^2."""
    ideal, weight = stress_weights(dist, length_scale)
    diff = pos[:, None, :] - pos[None, :, :]
    euclid = np.linalg.norm(diff, axis=-1)
    return float(0.5 * np.sum(weight * np.square(euclid - ideal)))


def stress_majorize(g: Graph, params: StressParams | None = None,
                    dist: np.ndarray | None = None, seed: int = 0,
                    init: np.ndarray | None = None,
                    stats: dict | None = None) -> np.ndarray:
    """Localized (per-node, Gauss-Seidel) stress majorization.

    Each node moves to the weighted barycenter of its ideal-distance
    targets; a move is kept only if it strictly lowers the node's stress,
    so the total stress is non-increasing at every sweep.
    """
    params = params or StressParams()
    params.validate()
    if dist is None:
        from .graph import all_pairs_hop_distance

        dist = all_pairs_hop_distance(g)
    rng = np.random.default_rng(seed)
    if init is not None:
        pos = np.array(init, dtype=np.float64)
    else:
        # init on the scale of the target layout: starting far outside it
        # makes the first sweep collapse everything toward the barycenter
        finite = dist[dist > 0]
        diameter = int(finite.max()) if finite.size else 1
        frame = min(params.frame, params.length_scale * max(1, diameter))
        pos = init_positions(g.n, frame, rng)
    ideal, weight = stress_weights(dist, params.length_scale)

    energy = total_stress(pos, dist, params.length_scale)
    iterations = 0
    reason = "max_iters"
    stress_hist = [energy]

    for sweep in range(params.max_iters):
        for v in range(g.n):
            w = weight[v]
            mask = w > 0
            if not mask.any():
                continue
            delta = pos[v] - pos[mask]
            d = np.linalg.norm(delta, axis=-1)
            unit = np.zeros_like(delta)
            nonzero = d > 0
            unit[nonzero] = delta[nonzero] / d[nonzero, None]
            if (~nonzero).any():
                angles = rng.uniform(0.0, 2.0 * np.pi, size=int((~nonzero).sum()))
                unit[~nonzero] = np.column_stack([np.cos(angles), np.sin(angles)])
            targets = pos[mask] + ideal[v, mask][:, None] * unit
            wv = w[mask]
            candidate = (wv[:, None] * targets).sum(axis=0) / wv.sum()

            before = float(np.sum(wv * np.square(d - ideal[v, mask])))
            d_new = np.linalg.norm(candidate - pos[mask], axis=-1)
            after = float(np.sum(wv * np.square(d_new - ideal[v, mask])))
            if after < before:
                pos[v] = candidate

        new_energy = total_stress(pos, dist, params.length_scale)
        iterations = sweep + 1
        stress_hist.append(new_energy)
        if new_energy == 0.0:
            reason = "stress_ratio"
            break
        if abs(energy - new_energy) / new_energy < params.de_min:
            reason = "stress_ratio"
            energy = new_energy
            break
        energy = new_energy

    if stats is not None:
        stats.update(iterations=iterations, reason=reason, stress_history=stress_hist)
    return pos


def layout_to_json(g: Graph, pos: np.ndarray) -> str:
    doc = {g.labels[v]: {"x": float(pos[v, 0]), "y": float(pos[v, 1])} for v in g.nodes}
    return json.dumps(doc, indent=0, sort_keys=True)


def layout_from_json(g: Graph, text: str) -> np.ndarray:
    doc = json.loads(text)
    pos = np.zeros((g.n, 2))
    for v in g.nodes:
        entry = doc[g.labels[v]]
        pos[v] = (entry["x"], entry["y"])
    return pos
