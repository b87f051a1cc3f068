"""Graph layouts by classic algorithms and their multi-agent Q-learning
counterparts, with aesthetics metrics and a benchmark harness."""

from .classic import (DgcParams, FrParams, StressParams, dgc_layout, fr_layout,
                      layout_from_json, layout_to_json, stress_majorize, total_stress)
from .engine import (ConvergenceConfig, LearnConfig, RunResult, Session, StepReport,
                     check_convergence, init_session, lock_node, move_node,
                     q_update, run_until_converged, select_action, step, unlock_node)
from .graph import (Graph, GraphParseError, UNREACHABLE, all_pairs_hop_distance,
                    build_graph, parse_edge_list, parse_json_graph, serialize_json_graph)
from .harness import (ALGORITHMS, RatioRow, TrialAggregate, TrialPlan, export_csv,
                      load_graph, ratio_table, run_algorithm, run_trials)
from .metrics import (MetricsReport, count_crossings, crossing_upper_bound,
                      mean_edge_length, na, nc, ne, no, report)
from .rewards import (CoincidentNodesError, Objective, RewardSpec,
                      dgc_force_magnitude, evaluate_objective, fr_force_magnitude,
                      global_stress_for_agent, local_quality, local_stress,
                      make_objective)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
