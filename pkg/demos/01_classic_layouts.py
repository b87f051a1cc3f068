"""
Classic layouts on the karate-club graph
========================================

Runs the three baseline algorithms (spring embedder, elastic springs,
localized stress majorization) on the bundled karate graph and compares
their aesthetics metrics side by side.
"""

import numpy as np

from marl_layout import (DgcParams, FrParams, StressParams, dgc_layout, fr_layout,
                         load_graph, report, stress_majorize)

graph = load_graph("g1")
print(f"karate: n={graph.n}, m={graph.m}")

# each layout is a (n, 2) array of pixel coordinates, deterministic per seed
layouts = {
    "fr": fr_layout(graph, FrParams(), seed=42),
    "dgc": dgc_layout(graph, DgcParams(), seed=42),
    "sm": stress_majorize(graph, StressParams(), seed=42),
}

print(f"{'algo':<5} {'NC':>6} {'NO':>6} {'NE':>6} {'NA':>6} {'crossings':>10}")
for name, pos in layouts.items():
    rep = report(pos, graph, algorithm=name, seed=42)
    print(f"{name:<5} {rep.nc:6.3f} {rep.no:6.3f} {rep.ne:6.3f} {rep.na:6.3f} "
          f"{rep.crossings:10d}")

# optional: draw the three layouts next to each other
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    for ax, (name, pos) in zip(axes, layouts.items()):
        for u, v in graph.edges:
            ax.plot(*np.column_stack([pos[u], pos[v]]), lw=0.5, color="#7899bb")
        ax.scatter(pos[:, 0], pos[:, 1], s=18, c=range(graph.n), cmap="turbo", zorder=2)
        ax.set_title(name)
        ax.set_aspect("equal")
        ax.axis("off")
    fig.savefig("classic_layouts.png", dpi=150, bbox_inches="tight")
    print("wrote classic_layouts.png")
except ImportError:
    pass
