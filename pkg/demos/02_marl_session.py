"""
A multi-agent Q-learning layout session, step by step
=====================================================

Every node is an agent with nine actions (stay + 8 compass moves of one
temperature step).  An agent keeps a move when it lowers its own objective,
occasionally keeps a worsening one (Metropolis), and updates a shared
9x9 Q-table either way.  Here the objective is the spring-embedder net
force on the node.
"""

from marl_layout import (ConvergenceConfig, LearnConfig, RewardSpec, check_convergence,
                         init_session, load_graph, report, run_until_converged, step)

graph = load_graph("g1")
sess = init_session(graph, RewardSpec(kind="fr_force"), LearnConfig(),
                    ConvergenceConfig(), seed=7)
print(f"agents={graph.n}, initial temperature={sess.temperature} px, "
      f"cooling every {sess.cooling_period} sweeps, frame={sess.frame:.0f} px")

# watch the first few sweeps by hand
for _ in range(5):
    rep = step(sess)
    print(f"t={rep.t:3d} T={rep.temperature:5.2f} A(t)={rep.avg_displacement:5.2f} px "
          f"accepted={rep.accepted}/{graph.n}")

# then let it run to convergence
result = run_until_converged(sess)
print(f"converged: {result.reason} after {result.iterations} sweeps "
      f"({result.seconds:.1f} s)")
assert check_convergence(sess) is not None

metrics = report(result.positions, graph, algorithm="marl-fr", seed=7)
print(f"quality: NC={metrics.nc:.3f} NO={metrics.no:.3f} "
      f"NE={metrics.ne:.3f} NA={metrics.na:.3f}")

# the learned action-values: rows are states (3x3 grid cells), columns the
# nine actions; with the cooperative setup there is a single shared table
print("shared Q-table (rounded):")
for row in sess.q.round(1):
    print("  ", row)
