"""Command-line entry point: one-shot layouts, benchmark evaluation runs,
and the live session server.

Exit codes: 0 success, 2 bad input, 3 unknown algorithm, 4 port in use.
A bare invocation runs with the standard default parameters; every one of
them has an override flag, and --print-config echoes the resolved set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import harness
from .classic import layout_to_json
from .graph import GraphParseError
from .metrics import report

EXIT_BAD_INPUT = 2
EXIT_UNKNOWN_ALGORITHM = 3
EXIT_PORT_IN_USE = 4

_OVERRIDE_FLAGS = [
    # (flag, overrides-key, type, help)
    ("--k", "k", float, "optimal spring-embedder distance, px"),
    ("--lam", "lam", float, "ideal elastic edge length, px"),
    ("--zeta", "zeta", float, "elastic constant"),
    ("--mu", "mu", float, "repulsion constant"),
    ("--p-hops", "p_hops", int, "local-stress neighborhood radius, hops"),
    ("--edge-length", "edge_length", float, "desired edge length / min node distance, px"),
    ("--beta", "beta", float, "hybrid mix between force (1) and local stress (0)"),
    ("--node-radius", "node_radius", float, "node radius for the overlap predicate, px"),
    ("--max-iters", "max_iters", int, "iteration bound M"),
    ("--a-min", "a_min", float, "average-displacement threshold, px"),
    ("--da-min", "da_min", float, "displacement-rate threshold, px"),
    ("--de-min", "de_min", float, "stress-ratio threshold"),
    ("--min-iters", "min_iters", int, "sweeps before the thresholds arm"),
    ("--epsilon", "epsilon", float, "exploration rate"),
    ("--alpha", "alpha", float, "learning rate"),
    ("--gamma", "gamma", float, "discount factor"),
    ("--kappa", "kappa", float, "reward scale in the acceptance probability"),
    ("--initial-step", "initial_step", float, "initial temperature, px"),
    ("--cooling-factor", "cooling_factor", float, "geometric cooling factor"),
    ("--cooling-period", "cooling_period", int, "sweeps between cooling steps"),
    ("--frame", "frame", float, "random-init frame side for classic runs, px"),
    ("--frame-cap", "frame_cap", float, "random-init frame cap for sessions, px"),
    ("--length-scale", "length_scale", float, "px per hop in stress majorization"),
    ("--repulsion-cutoff", "repulsion_cutoff", float, "spring-embedder repulsion range, px"),
]


def _add_override_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("parameter overrides")
    for flag, _, typ, text in _OVERRIDE_FLAGS:
        group.add_argument(flag, type=typ, default=None, help=text)
    group.add_argument("--weights", type=str, default=None,
                       help="five comma-separated quality weights summing to 1")
    group.add_argument("--no-metropolis", action="store_true",
                       help="reject every objective-worsening move")
    group.add_argument("--per-agent-q", action="store_true",
                       help="one Q-table per agent instead of the shared table")


def _collect_overrides(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    for _, key, _, _ in _OVERRIDE_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.weights is not None:
        parts = [float(x) for x in args.weights.split(",")]
        overrides["weights"] = tuple(parts)
    if args.no_metropolis:
        overrides["metropolis"] = False
    if args.per_agent_q:
        overrides["shared_q"] = False
    return overrides


def _resolve_seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("MARLL_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise GraphParseError(f"MARLL_SEED must be an integer, got {env!r}")
    return 0


def _resolved_config(algo: str, overrides: dict) -> dict:
    """Defaults merged with overrides, exactly as a run would use them."""
    from dataclasses import asdict

    if algo in ("fr", "dgc", "sm"):
        return asdict(harness.classic_params(algo, overrides))
    spec, learn, conv = harness.marl_configs(algo, overrides)
    return {"reward": spec.to_dict(), "learning": asdict(learn),
            "convergence": asdict(conv)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="marl-layout",
        description="Classic and multi-agent Q-learning graph layouts.")
    sub = parser.add_subparsers(dest="command", required=True)

    lay = sub.add_parser("layout", help="run one algorithm to convergence")
    lay.add_argument("--algo", required=True, help=f"one of {', '.join(harness.ALGORITHMS)}")
    lay.add_argument("--graph", required=True, help="bundled name (g1/g2/g3) or file path")
    lay.add_argument("--seed", type=int, default=None, help="rng seed (MARLL_SEED fallback)")
    lay.add_argument("--out", default=None, help="layout JSON path (default: stdout doc)")
    lay.add_argument("--print-config", action="store_true",
                     help="echo the resolved configuration and exit")
    _add_override_flags(lay)

    ev = sub.add_parser("eval", help="seeded repeated trials with CSV output")
    ev.add_argument("--graphs", default="g1,g2,g3", help="comma-separated names/paths")
    ev.add_argument("--algos", default="fr", help="comma-separated algorithm ids")
    ev.add_argument("--runs", type=int, default=100, help="trials per (graph, algorithm)")
    ev.add_argument("--seed", type=int, default=None, help="base seed (MARLL_SEED fallback)")
    ev.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    ev.add_argument("--out", default=None, help="CSV path (default: stdout)")
    ev.add_argument("--summary-json", default=None, help="optional nested summary path")
    ev.add_argument("--print-config", action="store_true")
    _add_override_flags(ev)

    srv = sub.add_parser("serve", help="run the live session server")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8765,
                     help="0 binds an ephemeral port and prints it")
    srv.add_argument("--frame-every", type=int, default=1,
                     help="emit a frame every N sweeps")
    srv.add_argument("--static", default=None,
                     help="serve a frontend build from this directory")
    return parser


def cmd_layout(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    overrides = _collect_overrides(args)
    if args.algo not in harness.ALGORITHMS:
        print(f"unknown algorithm {args.algo!r}; expected one of "
              f"{', '.join(harness.ALGORITHMS)}", file=sys.stderr)
        return EXIT_UNKNOWN_ALGORITHM
    if args.print_config:
        doc = {"command": "layout", "algorithm": args.algo, "graph": args.graph,
               "seed": seed, "overrides": overrides,
               "resolved": _resolved_config(args.algo, overrides)}
        print(json.dumps(doc, sort_keys=True, indent=2, default=str))
        return 0

    graph = harness.load_graph(args.graph)
    record = harness.run_algorithm(args.algo, graph, seed, overrides)
    rep = report(record.positions, graph,
                 radius=overrides.get("node_radius", 10.0),
                 algorithm=args.algo, seed=seed)
    print(f"{args.algo} on {args.graph}: {record.iterations} iterations "
          f"({record.reason}), {record.seconds * 1e3:.1f} ms", file=sys.stderr)

    layout_doc = layout_to_json(graph, record.positions)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(layout_doc)
    doc = {
        "algorithm": args.algo,
        "graph": args.graph,
        "seed": seed,
        "iterations": record.iterations,
        "reason": record.reason,
        "metrics": {"nc": rep.nc, "no": rep.no, "ne": rep.ne, "na": rep.na,
                    "crossings": rep.crossings, "overlaps": rep.overlaps},
        "layout": json.loads(layout_doc),
    }
    print(json.dumps(doc, sort_keys=True))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    overrides = _collect_overrides(args)
    graphs = [s for s in (t.strip() for t in args.graphs.split(",")) if s]
    algos = [s for s in (t.strip() for t in args.algos.split(",")) if s]
    for algo in algos:
        if algo not in harness.ALGORITHMS:
            print(f"unknown algorithm {algo!r}", file=sys.stderr)
            return EXIT_UNKNOWN_ALGORITHM
    if args.print_config:
        doc = {"command": "eval", "graphs": graphs, "algos": algos, "runs": args.runs,
               "seed": seed, "jobs": args.jobs, "overrides": overrides,
               "resolved": {algo: _resolved_config(algo, overrides) for algo in algos}}
        print(json.dumps(doc, sort_keys=True, indent=2, default=str))
        return 0

    aggregates = []
    for gid in graphs:
        graph = harness.load_graph(gid)
        for algo in algos:
            plan = harness.TrialPlan(gid, algo, n_runs=args.runs, base_seed=seed,
                                     overrides=overrides,
                                     node_radius=overrides.get("node_radius", 10.0))
            t0 = time.perf_counter()
            aggregates.append(harness.run_trials(plan, g=graph, jobs=args.jobs))
            print(f"{algo} on {gid}: {args.runs} runs in "
                  f"{time.perf_counter() - t0:.1f} s", file=sys.stderr)

    text = harness.export_csv(aggregates)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.summary_json:
        with open(args.summary_json, "w") as fh:
            json.dump(harness.summary_json(aggregates), fh, indent=2, sort_keys=True)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import socket

    from .server.app import serve

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        probe.close()
        return EXIT_PORT_IN_USE
    port = probe.getsockname()[1]
    probe.close()
    print(f"listening on {args.host}:{port}", flush=True)
    serve(host=args.host, port=port, frame_every=args.frame_every,
          static_dir=args.static)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "layout":
            return cmd_layout(args)
        if args.command == "eval":
            return cmd_eval(args)
        return cmd_serve(args)
    except harness.UnknownAlgorithmError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_UNKNOWN_ALGORITHM
    except (GraphParseError, FileNotFoundError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
