"""Benchmark protocol: seeded repeated trials, aggregation, MARL/classic
ratio rows, and CSV export.  Also hosts the bundled corpus and the small
graph generators used by tests and demos.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import classic, engine, metrics
from .graph import Graph, build_graph, parse_edge_list, parse_json_graph
from .rewards import RewardSpec

ALGORITHMS = ("fr", "dgc", "sm", "marl-fr", "marl-dgc", "marl-local-stress",
              "marl-global-stress", "marl-hybrid", "marl-custom")

_MARL_KINDS = {
    "marl-fr": "fr_force",
    "marl-dgc": "dgc_force",
    "marl-local-stress": "local_stress",
    "marl-global-stress": "global_stress",
    "marl-hybrid": "hybrid",
    "marl-custom": "custom",
}

CSV_COLUMNS = ("graph", "algorithm", "seed", "nc", "no", "ne", "na",
               "iterations", "runtime_ms")


class UnknownAlgorithmError(ValueError):
    pass


# ---------------------------------------------------------------------------
# corpus and generators

def path_graph(n: int) -> Graph:
    return build_graph([str(i) for i in range(n)], [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    edges = [(i, (i + 1) % n) for i in range(n)]
    return build_graph([str(i) for i in range(n)], edges)


def complete_graph(n: int) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return build_graph([str(i) for i in range(n)], edges)


def star_graph(leaves: int) -> Graph:
    return build_graph([str(i) for i in range(leaves + 1)],
                       [(0, i) for i in range(1, leaves + 1)])


def grid_graph(rows: int, cols: int) -> Graph:
    def idx(r, c):
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((idx(r, c), idx(r, c + 1)))
            if r + 1 < rows:
                edges.append((idx(r, c), idx(r + 1, c)))
    return build_graph([str(i) for i in range(rows * cols)], edges)


def gnp_graph(n: int, p: float, seed: int = 0) -> Graph:
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return build_graph([str(i) for i in range(n)], edges)


def random_connected_graph(n: int, m: int, seed: int = 0) -> Graph:
    """Random spanning tree plus random extra edges, exactly m edges total."""
    if m < n - 1 or m > n * (n - 1) // 2:
        raise ValueError(f"cannot build a connected simple graph with n={n}, m={m}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    edges = {tuple(sorted((int(order[i]), int(order[rng.integers(0, i)]))))
             for i in range(1, n)}
    while len(edges) < m:
        u, v = rng.integers(0, n, size=2)
        if u != v:
            edges.add(tuple(sorted((int(u), int(v)))))
    return build_graph([str(i) for i in range(n)], sorted(edges))


def _bundled_karate() -> Graph:
    text = resources.files("marl_layout.data").joinpath("karate.txt").read_text()
    return parse_edge_list(text)


# G2/G3 are size-matched synthetic stand-ins for corpus graphs whose source
# files are not redistributable; G1 (karate) ships verbatim.
_CORPUS_BUILDERS = {
    "g1": _bundled_karate,
    "karate": _bundled_karate,
    "g2": lambda: random_connected_graph(39, 46, seed=3902),
    "g3": lambda: random_connected_graph(44, 48, seed=4403),
}


def corpus_names() -> tuple[str, ...]:
    return ("g1", "g2", "g3")


def load_graph(source: str) -> Graph:
    """Load a bundled corpus graph by name, or parse a file path."""
    key = source.lower()
    if key in _CORPUS_BUILDERS:
        return _CORPUS_BUILDERS[key]()
    path = Path(source)
    if not path.exists():
        raise FileNotFoundError(f"no bundled graph or file named {source!r}")
    text = path.read_text()
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return parse_json_graph(text)
    return parse_edge_list(text)


# ---------------------------------------------------------------------------
# algorithm registry

@dataclass
class RunRecord:
    positions: np.ndarray
    iterations: int
    reason: str
    seconds: float


def classic_params(algo: str, ov: dict):
    if algo == "fr":
        p = classic.FrParams()
        for key in ("k", "max_iters", "initial_step", "cooling_factor", "da_min", "frame",
                    "repulsion_cutoff"):
            if key in ov:
                setattr(p, key, ov[key])
        return p
    if algo == "dgc":
        p = classic.DgcParams()
        for key in ("lam", "zeta", "mu", "max_iters", "initial_step",
                    "cooling_factor", "da_min", "frame"):
            if key in ov:
                setattr(p, key, ov[key])
        return p
    p = classic.StressParams()
    for key in ("de_min", "max_iters", "length_scale", "frame"):
        if key in ov:
            setattr(p, key, ov[key])
    return p


def marl_configs(algo: str, ov: dict):
    """RewardSpec + LearnConfig + ConvergenceConfig for a marl-* algorithm id."""
    kind = _MARL_KINDS[algo]
    spec = RewardSpec(
        kind=kind,
        fr=classic.FrParams(k=ov.get("k", 30.0)) if kind in ("fr_force", "hybrid") else None,
        dgc=classic.DgcParams(lam=ov.get("lam", 30.0), zeta=ov.get("zeta", 5.0),
                              mu=ov.get("mu", 5000.0)) if kind == "dgc_force" else None,
        p_hops=ov.get("p_hops", 10),
        weights=tuple(ov.get("weights", RewardSpec().weights)),
        edge_length=ov.get("edge_length", 30.0),
        beta=ov.get("beta", 0.5),
        node_radius=ov.get("node_radius", 10.0),
    )
    learn = engine.LearnConfig()
    for key in ("alpha", "gamma", "epsilon", "initial_step", "cooling_factor",
                "cooling_period", "metropolis", "kappa", "shared_q", "frame_cap"):
        if key in ov:
            setattr(learn, key, ov[key])
    conv = engine.ConvergenceConfig()
    for key in ("max_iters", "a_min", "da_min", "de_min", "active", "min_iters"):
        if key in ov:
            setattr(conv, key, ov[key])
    return spec, learn, conv


def run_algorithm(algo: str, g: Graph, seed: int,
                  overrides: dict | None = None) -> RunRecord:
    """Run one registered algorithm to convergence and time it."""
    ov = dict(overrides or {})
    if algo not in ALGORITHMS:
        raise UnknownAlgorithmError(f"unknown algorithm {algo!r}")

    start = time.perf_counter()
    if algo in ("fr", "dgc", "sm"):
        stats: dict = {}
        params = classic_params(algo, ov)
        if algo == "fr":
            pos = classic.fr_layout(g, params, seed=seed, stats=stats)
        elif algo == "dgc":
            pos = classic.dgc_layout(g, params, seed=seed, stats=stats)
        else:
            pos = classic.stress_majorize(g, params, seed=seed, stats=stats)
        return RunRecord(pos, stats.get("iterations", 0), stats.get("reason", "done"),
                         time.perf_counter() - start)

    spec, learn, conv = marl_configs(algo, ov)
    sess = engine.init_session(g, spec, learn, conv, seed=seed)
    result = engine.run_until_converged(sess)
    return RunRecord(result.positions, result.iterations, result.reason,
                     time.perf_counter() - start)


# ---------------------------------------------------------------------------
# trials

@dataclass
class TrialPlan:
    graph_id: str
    algorithm: str
    n_runs: int = 100
    base_seed: int = 0
    overrides: dict = field(default_factory=dict)
    node_radius: float = 10.0
    edge_length: float | None = None  # None: score uniformity against the mean

    def validate(self) -> None:
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if self.algorithm not in ALGORITHMS:
            raise UnknownAlgorithmError(f"unknown algorithm {self.algorithm!r}")


@dataclass
class TrialAggregate:
    graph_id: str
    algorithm: str
    base_seed: int
    n_runs: int
    mean: dict[str, float]
    std: dict[str, float]
    mean_iterations: float
    mean_runtime_ms: float
    reports: list[metrics.MetricsReport] = field(repr=False, default_factory=list)

    def csv_row(self) -> dict:
        return {
            "graph": self.graph_id, "algorithm": self.algorithm, "seed": self.base_seed,
            "nc": self.mean["nc"], "no": self.mean["no"],
            "ne": self.mean["ne"], "na": self.mean["na"],
            "iterations": self.mean_iterations, "runtime_ms": self.mean_runtime_ms,
        }


def _one_trial(algo: str, g: Graph, seed: int, overrides: dict,
               radius: float, edge_length: float):
    record = run_algorithm(algo, g, seed, overrides)
    rep = metrics.report(record.positions, g, radius=radius, edge_length=edge_length,
                         algorithm=algo, seed=seed,
                         runtime_ms=record.seconds * 1e3)
    return rep, record.iterations


def run_trials(plan: TrialPlan, g: Graph | None = None, jobs: int = 1) -> TrialAggregate:
    """Seeded repeat runs: trial i uses seed base_seed + i; arithmetic-mean aggregate."""
    plan.validate()
    graph = g if g is not None else load_graph(plan.graph_id)
    seeds = [plan.base_seed + i for i in range(plan.n_runs)]
    args = [(plan.algorithm, graph, s, plan.overrides, plan.node_radius, plan.edge_length)
            for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one_trial_star, args))
    else:
        results = [_one_trial(*a) for a in args]

    results.sort(key=lambda pair: pair[0].seed)  # deterministic fold order
    reports = [r for r, _ in results]
    iters = np.array([it for _, it in results], dtype=np.float64)
    table = {name: np.array([getattr(r, name) for r in reports]) for name in ("nc", "no", "ne", "na")}
    return TrialAggregate(
        graph_id=plan.graph_id,
        algorithm=plan.algorithm,
        base_seed=plan.base_seed,
        n_runs=plan.n_runs,
        mean={k: float(v.mean()) for k, v in table.items()},
        std={k: float(v.std()) for k, v in table.items()},
        mean_iterations=float(iters.mean()),
        mean_runtime_ms=float(np.mean([r.runtime_ms for r in reports])),
        reports=reports,
    )


def _one_trial_star(args):
    return _one_trial(*args)


@dataclass
class RatioRow:
    r_nc: float
    r_no: float
    r_ne: float
    r_na: float
    flagged: bool = False  # a 0/0 convention or division by zero occurred

    def values(self) -> tuple[float, float, float, float]:
        return (self.r_nc, self.r_no, self.r_ne, self.r_na)


def ratio_table(marl: TrialAggregate, classic_agg: TrialAggregate) -> RatioRow:
    """Elementwise MARL / classic mean-metric ratios."""
    out = {}
    flagged = False
    for name in ("nc", "no", "ne", "na"):
        num, den = marl.mean[name], classic_agg.mean[name]
        if den == 0.0:
            flagged = True
            out[name] = 1.0 if num == 0.0 else float("inf")
        else:
            out[name] = num / den
    return RatioRow(r_nc=out["nc"], r_no=out["no"], r_ne=out["ne"], r_na=out["na"],
                    flagged=flagged)


def export_csv(rows, out=None) -> str:
    """Write aggregate rows (stable column order, decimal dot); returns the text."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        record = row.csv_row() if isinstance(row, TrialAggregate) else dict(row)
        writer.writerow({key: record.get(key, "") for key in CSV_COLUMNS})
    text = buffer.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            Path(out).write_text(text)
    return text


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def summary_json(aggregates: list[TrialAggregate],
                 ratios: dict[str, RatioRow] | None = None) -> dict:
    """Nested summary grouped by graph then algorithm, ratio rows attached."""
    doc: dict = {}
    for agg in aggregates:
        entry = doc.setdefault(agg.graph_id, {})
        entry[agg.algorithm] = {
            "metrics": dict(agg.mean),
            "std": dict(agg.std),
            "iterations": agg.mean_iterations,
            "runtime_ms": agg.mean_runtime_ms,
            "runs": agg.n_runs,
        }
    for key, ratio in (ratios or {}).items():
        graph_id, pair = key.split(":", 1)
        doc.setdefault(graph_id, {}).setdefault("ratios", {})[pair] = {
            "r_nc": ratio.r_nc, "r_no": ratio.r_no,
            "r_ne": ratio.r_ne, "r_na": ratio.r_na, "flagged": ratio.flagged,
        }
    return doc
