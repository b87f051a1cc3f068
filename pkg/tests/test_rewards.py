import numpy as np
import pytest


from marl_layout.graph import all_pairs_hop_distance, build_graph, parse_edge_list
from marl_layout.harness import complete_graph, path_graph, random_connected_graph
from marl_layout.rewards import (CoincidentNodesError, RewardSpec, dgc_force_magnitude,
                                 evaluate_objective, fr_force_magnitude, local_quality,
                                 local_stress, make_objective)

P3_POS = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
P3_AC_TERM = 0.08578643762690494  # (sqrt(2) - 2)^2 / 4


def two_nodes(d):
    g = parse_edge_list("a b")
    return g, np.array([[0.0, 0.0], [d, 0.0]])


def test_fr_force_zero_at_equilibrium():
    g, pos = two_nodes(30.0)
    assert fr_force_magnitude(0, pos, g, k=30.0) == 0.0


def test_fr_force_at_double_distance():
    # f_a = 60^2/30 = 120 toward, f_r = 30^2/60 = 15 away -> net 105
    g, pos = two_nodes(60.0)
    assert fr_force_magnitude(0, pos, g, k=30.0) == pytest.approx(105.0, abs=1e-12)


def test_fr_force_repulsion_only_for_isolated_node():
    g = build_graph(["a", "b"], [])
    pos = np.array([[0.0, 0.0], [30.0, 0.0]])
    assert fr_force_magnitude(0, pos, g, k=30.0) == pytest.approx(30.0, abs=1e-12)


def test_fr_force_raises_on_coincident_nodes():
    g = parse_edge_list("a b")
    pos = np.zeros((2, 2))
    with pytest.raises(CoincidentNodesError):
        fr_force_magnitude(0, pos, g, k=30.0)


def test_dgc_force_at_ideal_length_is_pure_repulsion():
    g, pos = two_nodes(30.0)
    expected = 5000.0 / 900.0  # ~5.56
    assert dgc_force_magnitude(0, pos, g, lam=30.0, zeta=5.0, mu=5000.0) == \
        pytest.approx(expected, abs=1e-12)


def test_dgc_force_compressed_spring():
    # f_a = (30-10)^2/5 = 80 pushing apart, f_r = 5000/100 = 50 -> net 130
    g, pos = two_nodes(10.0)
    assert dgc_force_magnitude(0, pos, g, lam=30.0, zeta=5.0, mu=5000.0) == \
        pytest.approx(130.0, abs=1e-12)


def test_dgc_force_symmetric_triangle():
    g = complete_graph(3)
    side = 40.0
    pos = np.array([[0.0, 0.0], [side, 0.0], [side / 2.0, side * np.sqrt(3.0) / 2.0]])
    mags = [dgc_force_magnitude(v, pos, g, 30.0, 5.0, 5000.0) for v in range(3)]
    assert max(mags) - min(mags) < 1e-9


def test_local_stress_exact_embedding_is_zero():
    g = path_graph(3)
    d = all_pairs_hop_distance(g)
    pos = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    for v in range(3):
        assert local_stress(v, pos, d, p_hops=2) == 0.0


def test_local_stress_hand_values_p3():
    g = path_graph(3)
    d = all_pairs_hop_distance(g)
    assert local_stress(0, P3_POS, d, p_hops=1) == 0.0
    assert local_stress(0, P3_POS, d, p_hops=2) == pytest.approx(P3_AC_TERM, abs=1e-15)


def test_local_stress_with_p_at_diameter_matches_global_per_node():
    rng = np.random.default_rng(5)
    for trial in range(10):
        n = int(rng.integers(3, 20))
        g = random_connected_graph(n, min(2 * n, n * (n - 1) // 2), seed=trial)
        d = all_pairs_hop_distance(g)
        pos = rng.uniform(0, 50, (n, 2))
        diameter = int(d.max())
        for v in range(n):
            # independent brute-force per-node stress
            expected = sum(
                (1.0 / d[v, u] ** 2) * (np.linalg.norm(pos[v] - pos[u]) - d[v, u]) ** 2
                for u in range(n) if u != v)
            assert local_stress(v, pos, d, p_hops=diameter) == pytest.approx(expected)


def test_local_quality_isolated_far_node_is_zero():
    g = build_graph(["a", "b", "c"], [(1, 2)])
    pos = np.array([[1000.0, 1000.0], [0.0, 0.0], [30.0, 0.0]])
    spec = RewardSpec(kind="custom")
    assert local_quality(0, pos, g, spec) == 0.0


def test_local_quality_single_overlap_weighted():
    # v overlaps exactly one node (radius chosen so the spacing term stays 0)
    g = build_graph(["a", "b"], [])
    pos = np.array([[0.0, 0.0], [35.0, 0.0]])
    spec = RewardSpec(kind="custom", node_radius=20.0, edge_length=30.0)
    assert local_quality(0, pos, g, spec) == pytest.approx(0.35, abs=1e-15)


def test_local_quality_ideal_degree_two_node():
    # both incident edges at length L and 180 degrees apart: all terms vanish
    g = path_graph(3)
    pos = np.array([[-30.0, 0.0], [0.0, 0.0], [30.0, 0.0]])
    spec = RewardSpec(kind="custom")
    assert local_quality(1, pos, g, spec) == 0.0


def test_quality_nonnegative_random():
    rng = np.random.default_rng(9)
    g = random_connected_graph(12, 20, seed=1)
    spec = RewardSpec(kind="custom")
    for _ in range(20):
        pos = rng.uniform(0, 200, (12, 2))
        assert local_quality(int(rng.integers(12)), pos, g, spec) >= 0.0


def test_crossing_component_counts_four_per_disjoint_crossing():
    # two crossing edges with no shared endpoint are seen once from each
    # of the four endpoints
    g = build_graph(["a", "b", "c", "d"], [(0, 1), (2, 3)])
    pos = np.array([[0.0, 0.0], [10.0, 10.0], [10.0, 0.0], [0.0, 10.0]])
    from marl_layout.rewards import crossing_count_local

    counts = [crossing_count_local(v, pos, g) for v in range(4)]
    assert counts == [1, 1, 1, 1]


def test_crossing_component_double_counts_shared_node_pairs():
    # both edges incident to v: the double sum counts the pair twice at v
    g = build_graph(["v", "a", "b", "c", "d"], [(0, 1), (0, 2), (3, 4)])
    pos = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [-100.0, -100.0], [-90.0, -100.0]])
    from marl_layout.rewards import crossing_count_local

    assert crossing_count_local(0, pos, g) == 0  # no crossings at all here


def test_chi_sum_matches_four_times_oracle():
    from shapely.geometry import LineString

    from marl_layout.rewards import crossing_count_local

    rng = np.random.default_rng(17)
    for trial in range(25):
        n = int(rng.integers(4, 15))
        g = random_connected_graph(n, min(2 * n, n * (n - 1) // 2), seed=100 + trial)
        pos = rng.uniform(0, 100, (n, 2))
        oracle = 0
        edges = list(g.edges)
        for i in range(len(edges)):
            for j in range(i + 1, len(edges)):
                a, b = edges[i]
                c, d = edges[j]
                if len({a, b, c, d}) < 4:
                    continue  # shared endpoint: skip, matching "at least twice" scope
                if LineString([pos[a], pos[b]]).crosses(LineString([pos[c], pos[d]])):
                    oracle += 1
        total = sum(crossing_count_local(v, pos, g) for v in range(n))
        assert total == 4 * oracle, f"trial {trial}"


def test_evaluate_objective_hybrid_mixes():
    g = parse_edge_list("a b\nb c")
    d = all_pairs_hop_distance(g)
    rng = np.random.default_rng(3)
    pos = rng.uniform(0, 100, (3, 2))

    force = make_objective(RewardSpec(kind="fr_force"), g)
    stress = make_objective(
        RewardSpec(kind="hybrid", beta=0.0), g, d)  # beta=0: pure local stress
    pure_stress_value = make_objective(RewardSpec(kind="local_stress"), g, d)(1, pos)

    full_force = evaluate_objective(RewardSpec(kind="hybrid", beta=1.0), 1, pos, g, d)
    assert full_force.value == force(1, pos)

    zero_force = evaluate_objective(RewardSpec(kind="hybrid", beta=0.0), 1, pos, g, d)
    assert zero_force.value == pure_stress_value
    assert stress(1, pos) == pure_stress_value

    f = force(1, pos)
    e = pure_stress_value
    mixed = evaluate_objective(RewardSpec(kind="hybrid", beta=0.5), 1, pos, g, d)
    assert mixed.value == 0.5 * f + 0.5 * e


def test_every_objective_translation_invariant_exact():
    g = random_connected_graph(10, 15, seed=8)
    d = all_pairs_hop_distance(g)
    rng = np.random.default_rng(2)
    pos = rng.integers(0, 500, size=(10, 2)).astype(np.float64)
    shift = np.array([250.0, -125.0])
    specs = [RewardSpec(kind=k) for k in
             ("fr_force", "dgc_force", "local_stress", "global_stress", "custom", "hybrid")]
    for spec in specs:
        fn = make_objective(spec, g, d)
        for v in (0, 3, 7):
            assert fn(v, pos) == fn(v, pos + shift), spec.kind


def test_reward_spec_json_roundtrip():
    spec = RewardSpec(kind="hybrid", beta=0.25, p_hops=4)
    back = RewardSpec.from_json(spec.to_json())
    assert back.kind == "hybrid"
    assert back.beta == 0.25
    assert back.p_hops == 4
    assert back.fr.k == spec.fr.k


def test_reward_spec_validation():
    with pytest.raises(ValueError):
        RewardSpec(kind="nope")
    with pytest.raises(ValueError):
        RewardSpec(kind="custom", weights=(1.0, 1.0, 1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        RewardSpec(kind="hybrid", beta=1.5)
    with pytest.raises(ValueError):
        RewardSpec(kind="local_stress", p_hops=0)
