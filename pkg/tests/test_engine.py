import numpy as np
import pytest

from marl_layout.engine import (ACTION_CELLS, ACTION_VECTORS, CENTER_CELL,
                                ConvergenceConfig, LearnConfig, check_convergence,
                                init_session, lock_node, move_node, q_update,
                                run_until_converged, select_action, step, unlock_node)
from marl_layout.graph import build_graph, parse_edge_list
from marl_layout.harness import load_graph, path_graph, random_connected_graph
from marl_layout.rewards import RewardSpec

TWO_NODE = parse_edge_list("a b")


def fr_session(graph=TWO_NODE, seed=0, **learn_kw):
    return init_session(graph, RewardSpec(kind="fr_force"),
                        LearnConfig(**learn_kw), ConvergenceConfig(), seed=seed)


# ---------------------------------------------------------------------------
# action model


def test_action_table_shape():
    assert ACTION_VECTORS.shape == (9, 2)
    assert np.linalg.norm(ACTION_VECTORS[0]) == 0.0
    for vec in ACTION_VECTORS[1:]:
        assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-15)
    assert ACTION_CELLS[0] == CENTER_CELL
    assert sorted(ACTION_CELLS) == list(range(9))


def test_select_action_pure_greedy():
    q = np.zeros((9, 9))
    q[2, 3] = 1.0  # action E
    rng = np.random.default_rng(0)
    assert select_action(q, 2, epsilon=0.0, rng=rng) == 3


def test_select_action_tie_breaks_to_stay():
    q = np.zeros((9, 9))
    rng = np.random.default_rng(0)
    assert select_action(q, 5, epsilon=0.0, rng=rng) == 0


def test_select_action_uniform_at_full_exploration():
    q = np.zeros((9, 9))
    rng = np.random.default_rng(123)
    counts = np.zeros(9, dtype=int)
    draws = 10_000
    for _ in range(draws):
        counts[select_action(q, 0, epsilon=1.0, rng=rng)] += 1
    expected = draws / 9.0
    sigma = np.sqrt(draws * (1 / 9) * (8 / 9))
    assert (np.abs(counts - expected) < 3.0 * sigma).all(), counts


# ---------------------------------------------------------------------------
# q-update algebra


def test_q_update_full_overwrite():
    q = np.zeros((9, 9))
    q_update(q, 1, 2, 3, reward=5.0, alpha=1.0, gamma=0.0)
    assert q[1, 2] == 5.0


def test_q_update_from_zero_table():
    q = np.zeros((9, 9))
    q_update(q, 0, 1, 2, reward=1.0, alpha=0.5, gamma=0.9)
    assert q[0, 1] == 0.5


def test_q_update_zero_learning_rate_is_identity():
    rng = np.random.default_rng(1)
    q = rng.normal(size=(9, 9))
    before = q.copy()
    with pytest.raises(ValueError):
        LearnConfig(alpha=0.0).validate()  # alpha=0 is outside the config range
    q_update(q, 3, 4, 5, reward=123.0, alpha=0.0, gamma=0.5)  # op itself allows it
    assert np.array_equal(q, before)


def test_q_update_rejects_non_finite():
    q = np.zeros((9, 9))
    with pytest.raises(ValueError):
        q_update(q, 0, 0, 0, reward=float("nan"), alpha=0.5, gamma=0.5)
    with pytest.raises(ValueError):
        q_update(q, 0, 0, 0, reward=float("inf"), alpha=0.5, gamma=0.5)


def test_q_update_matches_closed_form_bitwise():
    rng = np.random.default_rng(99)
    q = np.zeros((9, 9))
    for _ in range(20_000):
        s, a, s2 = (int(x) for x in rng.integers(0, 9, size=3))
        r = float(rng.normal() * 10)
        alpha = float(rng.uniform(0.01, 1.0))
        gamma = float(rng.uniform(0.0, 0.99))
        expected = (1.0 - alpha) * q[s, a] + alpha * (r + gamma * np.max(q[s2]))
        q_update(q, s, a, s2, r, alpha, gamma)
        assert q[s, a] == expected


def test_q_bounded_under_bounded_rewards():
    rng = np.random.default_rng(5)
    q = np.zeros((9, 9))
    r_max, gamma = 10.0, 0.9
    for _ in range(100_000):
        s, a, s2 = (int(x) for x in rng.integers(0, 9, size=3))
        q_update(q, s, a, s2, float(rng.uniform(-r_max, r_max)), 0.5, gamma)
    assert np.isfinite(q).all()
    assert np.abs(q).max() <= r_max / (1.0 - gamma) + 1e-9


# ---------------------------------------------------------------------------
# sessions


def test_init_session_deterministic():
    a = fr_session(seed=7)
    b = fr_session(seed=7)
    assert np.array_equal(a.pos, b.pos)
    assert a.frame == b.frame


def test_init_session_karate_creates_34_agents():
    sess = init_session(load_graph("g1"), RewardSpec(kind="fr_force"),
                        LearnConfig(), ConvergenceConfig(), seed=1)
    assert sess.pos.shape == (34, 2)
    assert sess.agent_state.shape == (34,)
    assert (sess.agent_state == CENTER_CELL).all()
    assert sess.q.shape == (9, 9)  # fully cooperative: one shared table


def test_init_session_rejects_empty_graph():
    empty = build_graph([], [])
    with pytest.raises(ValueError):
        init_session(empty, RewardSpec(kind="fr_force"), LearnConfig(),
                     ConvergenceConfig(), seed=0)


def test_single_node_session_steps_are_noops():
    g = build_graph(["only"], [])
    sess = init_session(g, RewardSpec(kind="fr_force"), LearnConfig(),
                        ConvergenceConfig(), seed=0)
    start = sess.pos.copy()
    for _ in range(5):
        rep = step(sess)
    assert rep.avg_displacement == 0.0
    assert np.array_equal(sess.pos, start)


def test_temperature_schedule_exact():
    g = random_connected_graph(6, 8, seed=0)  # period = 14
    sess = init_session(g, RewardSpec(kind="fr_force"), LearnConfig(),
                        ConvergenceConfig(), seed=3)
    t0, tau, period = 10.0, 0.75, 14
    for _ in range(40):
        assert sess.temperature == t0 * tau ** (sess.t // period)
        step(sess)


def test_step_all_locked_is_identity():
    sess = fr_session(seed=2)
    for v in range(2):
        lock_node(sess, v)
    before = sess.pos.copy()
    rep = step(sess)
    assert rep.avg_displacement == 0.0
    assert np.array_equal(sess.pos, before)


def test_step_accepted_move_reduces_force():
    sess = fr_session(seed=4, epsilon=0.0)
    lock_node(sess, 1)
    sess.pos[:] = [[0.0, 0.0], [600.0, 0.0]]
    sess.q[CENTER_CELL, 3] = 1.0  # E, toward the neighbor
    rep = step(sess)
    expected = (600.0 ** 2 / 30.0 - 30.0 ** 2 / 600.0) - \
               (590.0 ** 2 / 30.0 - 30.0 ** 2 / 590.0)
    assert rep.rewards[0] == pytest.approx(expected, rel=1e-12)
    assert rep.rewards[0] > 0
    assert sess.pos[0, 0] == pytest.approx(10.0)


def test_step_rejected_move_reverts_bitwise():
    sess = init_session(TWO_NODE, RewardSpec(kind="fr_force"),
                        LearnConfig(epsilon=0.0, metropolis=False),
                        ConvergenceConfig(), seed=4)
    lock_node(sess, 1)
    sess.pos[:] = [[0.0, 0.0], [600.0, 0.0]]
    before = sess.pos.copy()
    sess.q[CENTER_CELL, 4] = 1.0  # W, away from the neighbor: worsens the force
    rep = step(sess)
    assert rep.rewards[0] < 0
    assert np.array_equal(sess.pos, before)
    assert sess.agent_state[0] == CENTER_CELL  # next state is the pre-move state


def test_accepted_displacement_never_exceeds_temperature():
    g = random_connected_graph(8, 12, seed=1)
    sess = init_session(g, RewardSpec(kind="fr_force"), LearnConfig(epsilon=0.5),
                        ConvergenceConfig(), seed=9)
    for _ in range(60):
        temp = sess.temperature
        before = sess.pos.copy()
        step(sess)
        moved = np.linalg.norm(sess.pos - before, axis=-1)
        assert (moved <= temp * (1.0 + 1e-12)).all()


def test_greedy_no_metropolis_stress_moves_only_downhill():
    g = random_connected_graph(8, 12, seed=3)
    sess = init_session(g, RewardSpec(kind="local_stress"),
                        LearnConfig(epsilon=0.0, metropolis=False),
                        ConvergenceConfig(), seed=11)
    for _ in range(80):
        before = sess.pos.copy()
        rep = step(sess)
        changed = np.linalg.norm(sess.pos - before, axis=-1) > 0
        assert (rep.rewards[changed] >= 0).all()


def test_locked_node_900_steps_bitwise_fixed():
    g = path_graph(5)
    sess = init_session(g, RewardSpec(kind="fr_force"), LearnConfig(),
                        ConvergenceConfig(), seed=6)
    lock_node(sess, 2)
    frozen = sess.pos[2].copy()
    for _ in range(100):
        step(sess)
    assert np.array_equal(sess.pos[2], frozen)
    unlock_node(sess, 2)
    for _ in range(50):
        step(sess)
    # after unlocking the node is free again (it eventually moves)
    assert not np.array_equal(sess.pos[2], frozen)


def test_lock_unknown_id_errors():
    sess = fr_session()
    with pytest.raises(ValueError):
        lock_node(sess, 99)
    with pytest.raises(ValueError):
        unlock_node(sess, -1)


def test_lock_all_but_one_only_free_node_moves():
    g = path_graph(4)
    sess = init_session(g, RewardSpec(kind="fr_force"),
                        LearnConfig(epsilon=0.3), ConvergenceConfig(), seed=2)
    for v in (0, 1, 3):
        lock_node(sess, v)
    before = sess.pos.copy()
    for _ in range(30):
        step(sess)
    deltas = np.linalg.norm(sess.pos - before, axis=-1)
    assert deltas[0] == deltas[1] == deltas[3] == 0.0
    assert deltas[2] > 0.0


def test_move_node_sets_position():
    sess = fr_session(seed=5)
    move_node(sess, 0, 123.0, -45.0)
    assert tuple(sess.pos[0]) == (123.0, -45.0)
    with pytest.raises(ValueError):
        move_node(sess, 7, 0.0, 0.0)


# ---------------------------------------------------------------------------
# convergence


def test_convergence_max_iterations():
    sess = fr_session(seed=0)
    sess.conv.max_iters = 3
    sess.t = 3
    assert check_convergence(sess) == "max_iterations"


def test_convergence_avg_displacement_below_threshold():
    sess = init_session(TWO_NODE, RewardSpec(kind="fr_force"), LearnConfig(),
                        ConvergenceConfig(active=("avg_displacement",), min_iters=0),
                        seed=0)
    sess.t = 1
    sess.a_history = [(3.0 + 5.0) / 2.0]  # two nodes displaced 3 and 5 px
    assert check_convergence(sess) == "avg_displacement"
    sess.a_history = [6.0]
    assert check_convergence(sess) is None


def test_convergence_stress_ratio_zero_change():
    g = path_graph(3)
    sess = init_session(g, RewardSpec(kind="local_stress"), LearnConfig(),
                        ConvergenceConfig(min_iters=0), seed=0)
    sess.t = 2
    sess.e_history = [42.0, 42.0]
    assert check_convergence(sess) == "stress_ratio"


def test_convergence_never_triggers_on_energy_increase():
    g = path_graph(3)
    sess = init_session(g, RewardSpec(kind="local_stress"), LearnConfig(),
                        ConvergenceConfig(min_iters=0), seed=0)
    sess.t = 2
    sess.e_history = [42.0, 42.0000001]
    assert check_convergence(sess) is None


def test_run_until_converged_deterministic_replay():
    g = random_connected_graph(6, 7, seed=2)
    results = []
    for _ in range(2):
        sess = init_session(g, RewardSpec(kind="fr_force"), LearnConfig(),
                            ConvergenceConfig(max_iters=150), seed=21)
        results.append(run_until_converged(sess))
    a, b = results
    assert a.reason == b.reason
    assert a.iterations == b.iterations
    assert np.array_equal(a.positions, b.positions)


def test_runs_terminate_within_bound():
    g = random_connected_graph(12, 16, seed=4)
    for kind in ("fr_force", "local_stress", "hybrid"):
        sess = init_session(g, RewardSpec(kind=kind), LearnConfig(),
                            ConvergenceConfig(), seed=3)
        result = run_until_converged(sess)
        assert result.iterations <= 2500
        assert result.reason in ("max_iterations", "avg_displacement",
                                 "displacement_rate", "stress_ratio")
