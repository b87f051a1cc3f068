"""
Benchmark protocol: seeded trials, aggregates, and MARL/classic ratios
======================================================================

Each (graph, algorithm) cell is run n times with seeds base, base+1, ...;
the aggregate is the arithmetic mean of the four aesthetics metrics.
Ratios close to 1 mean the learned layouts match the classic ones.

A fuller run is the CLI's job:  marl-layout eval --graphs g1,g2,g3 \
    --algos fr,marl-fr --runs 100 --out results.csv
"""

import sys

from marl_layout import TrialPlan, export_csv, load_graph, ratio_table, run_trials

RUNS = 5  # keep the demo quick; the acceptance suite uses 30+

aggregates = []
for gid in ("g1", "g3"):
    graph = load_graph(gid)
    classic = run_trials(TrialPlan(gid, "fr", n_runs=RUNS, base_seed=0), g=graph)
    marl = run_trials(TrialPlan(gid, "marl-fr", n_runs=RUNS, base_seed=0), g=graph)
    aggregates += [classic, marl]
    row = ratio_table(marl, classic)
    print(f"{gid}: R_NC={row.r_nc:.3f} R_NO={row.r_no:.3f} "
          f"R_NE={row.r_ne:.3f} R_NA={row.r_na:.3f} "
          f"(runtime x{marl.mean_runtime_ms / classic.mean_runtime_ms:.0f})")

print()
export_csv(aggregates, out=sys.stdout)
