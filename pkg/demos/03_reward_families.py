"""
The reward families
===================

One engine, six objectives.  A reward is always "objective before minus
objective after" for the moving agent, so any per-node score that should
shrink can drive the layout: net force, local or global stress, a weighted
aesthetics measure, or a hybrid mix.
"""

import numpy as np

from marl_layout import (RewardSpec, all_pairs_hop_distance, evaluate_objective,
                         fr_force_magnitude, load_graph, local_quality, local_stress)
from marl_layout.rewards import make_objective

graph = load_graph("g3")
dist = all_pairs_hop_distance(graph)
rng = np.random.default_rng(0)
pos = rng.uniform(0, 400, (graph.n, 2))
v = 10

for kind in ("fr_force", "dgc_force", "local_stress", "global_stress", "custom", "hybrid"):
    obj = evaluate_objective(RewardSpec(kind=kind), v, pos, graph, dist)
    print(f"{kind:<14} objective at node {v}: {obj.value:12.3f}")

# the hybrid is literally a convex mix of force and local stress
spec = RewardSpec(kind="hybrid", beta=0.5)
force = fr_force_magnitude(v, pos, graph, k=30.0)
stress = make_objective(RewardSpec(kind="local_stress"), graph, dist)(v, pos)
mixed = evaluate_objective(spec, v, pos, graph, dist).value
print(f"\nbeta=0.5 check: 0.5*{force:.3f} + 0.5*{stress:.3f} = {mixed:.3f}")

# the custom quality measure blends five aesthetic criteria; weights sum to 1
spec = RewardSpec(kind="custom", weights=(0.35, 0.20, 0.10, 0.25, 0.10))
print(f"custom quality at node {v}: {local_quality(v, pos, graph, spec):.3f}")

# local stress is the restriction of the stress sum to a p-hop neighborhood
for p in (1, 2, 5, 10):
    print(f"local stress, p={p:2d}: {local_stress(v, pos, dist, p, 30.0):10.3f}")
