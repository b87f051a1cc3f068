import io

import numpy as np
import pytest

from marl_layout.harness import (ALGORITHMS, TrialAggregate, TrialPlan,
                                 UnknownAlgorithmError, export_csv, load_graph,
                                 ratio_table, read_csv, run_algorithm, run_trials,
                                 summary_json)
from marl_layout.metrics import report
from marl_layout.harness import path_graph


def small_plan(algo="fr", **kw):
    defaults = dict(n_runs=2, base_seed=11, overrides={"max_iters": 40})
    defaults.update(kw)
    return TrialPlan("g3", algo, **defaults)


def test_single_run_aggregate_equals_single_report():
    g = load_graph("g3")
    plan = TrialPlan("g3", "fr", n_runs=1, base_seed=3)
    agg = run_trials(plan, g=g)
    record = run_algorithm("fr", g, seed=3)
    rep = report(record.positions, g, algorithm="fr", seed=3)
    assert agg.mean["nc"] == rep.nc
    assert agg.mean["ne"] == rep.ne
    assert agg.std["nc"] == 0.0
    assert agg.n_runs == 1


def test_same_seeds_identical_aggregates():
    g = load_graph("g3")
    a = run_trials(small_plan(), g=g)
    b = run_trials(small_plan(), g=g)
    assert a.mean == b.mean
    assert a.std == b.std
    assert a.mean_iterations == b.mean_iterations


def test_trials_use_consecutive_seeds():
    g = load_graph("g3")
    agg = run_trials(small_plan(n_runs=3), g=g)
    assert [r.seed for r in agg.reports] == [11, 12, 13]


def test_unknown_algorithm_rejected():
    with pytest.raises(UnknownAlgorithmError):
        run_algorithm("nope", load_graph("g3"), seed=0)
    with pytest.raises(UnknownAlgorithmError):
        TrialPlan("g3", "nope").validate()


def test_unknown_graph_rejected():
    with pytest.raises(FileNotFoundError):
        load_graph("no-such-graph")


def test_all_algorithms_registered_and_runnable():
    g = path_graph(4)
    fast = {"max_iters": 12, "min_iters": 0}
    for algo in ALGORITHMS:
        record = run_algorithm(algo, g, seed=1, overrides=fast)
        assert record.positions.shape == (4, 2)
        assert record.iterations <= 12


def test_ratio_identity():
    g = load_graph("g3")
    agg = run_trials(small_plan(), g=g)
    row = ratio_table(agg, agg)
    assert row.values() == (1.0, 1.0, 1.0, 1.0)
    assert not row.flagged


def test_ratio_zero_over_zero_flagged():
    base = dict(graph_id="x", algorithm="fr", base_seed=0, n_runs=1,
                std={}, mean_iterations=0.0, mean_runtime_ms=0.0)
    zero = TrialAggregate(mean={"nc": 0.0, "no": 0.0, "ne": 0.0, "na": 0.0}, **base)
    row = ratio_table(zero, zero)
    assert row.values() == (1.0, 1.0, 1.0, 1.0)
    assert row.flagged


def test_ratio_hand_value():
    base = dict(graph_id="x", algorithm="fr", base_seed=0, n_runs=1,
                std={}, mean_iterations=0.0, mean_runtime_ms=0.0)
    marl = TrialAggregate(mean={"nc": 0.95, "no": 1.0, "ne": 0.9, "na": 0.2}, **base)
    cls = TrialAggregate(mean={"nc": 0.96, "no": 1.0, "ne": 0.95, "na": 0.25}, **base)
    row = ratio_table(marl, cls)
    assert row.r_nc == pytest.approx(0.95 / 0.96)
    assert row.r_na == pytest.approx(0.8)


def test_export_csv_header_only():
    text = export_csv([])
    assert text == "graph,algorithm,seed,nc,no,ne,na,iterations,runtime_ms\n"


def test_export_csv_roundtrip():
    g = load_graph("g3")
    agg = run_trials(small_plan(), g=g)
    text = export_csv([agg])
    rows = read_csv(text)
    assert len(rows) == 1
    assert rows[0]["graph"] == "g3"
    assert float(rows[0]["nc"]) == pytest.approx(agg.mean["nc"])


def test_export_csv_row_count_and_order():
    base = dict(graph_id="g", algorithm="a", base_seed=0, n_runs=1,
                std={}, mean_iterations=1.0, mean_runtime_ms=2.0)
    rows = []
    for gi in range(10):
        for ai in range(9):
            agg = TrialAggregate(mean={"nc": 1.0, "no": 1.0, "ne": 1.0, "na": 1.0}, **base)
            agg.graph_id = f"g{gi}"
            agg.algorithm = f"a{ai}"
            rows.append(agg)
    text = export_csv(rows)
    parsed = read_csv(text)
    assert len(parsed) == 90
    buf = io.StringIO()
    export_csv(rows, out=buf)
    assert buf.getvalue() == text


def test_aggregation_permutation_invariant():
    g = load_graph("g3")
    agg = run_trials(small_plan(n_runs=4), g=g)
    means = np.array([[r.nc, r.no, r.ne, r.na] for r in agg.reports])
    rng = np.random.default_rng(0)
    shuffled = means[rng.permutation(4)]
    assert np.allclose(shuffled.mean(axis=0),
                       [agg.mean["nc"], agg.mean["no"], agg.mean["ne"], agg.mean["na"]])


def test_aggregate_metrics_stay_in_unit_interval():
    g = load_graph("g2")
    agg = run_trials(TrialPlan("g2", "sm", n_runs=3, base_seed=2,
                               overrides={"max_iters": 60}), g=g)
    for name in ("nc", "no", "ne", "na"):
        assert 0.0 <= agg.mean[name] <= 1.0


def test_summary_json_structure():
    g = load_graph("g3")
    marl = run_trials(small_plan(algo="marl-fr", overrides={"max_iters": 30, "min_iters": 0}), g=g)
    cls = run_trials(small_plan(), g=g)
    doc = summary_json([marl, cls], {"g3:marl-fr/fr": ratio_table(marl, cls)})
    assert "g3" in doc
    assert "marl-fr" in doc["g3"]
    assert "ratios" in doc["g3"]
    assert "r_nc" in doc["g3"]["ratios"]["marl-fr/fr"]


def test_parallel_jobs_match_serial():
    g = load_graph("g3")
    serial = run_trials(small_plan(n_runs=4), g=g)
    parallel = run_trials(small_plan(n_runs=4), g=g, jobs=2)
    assert serial.mean == parallel.mean
    assert [r.seed for r in serial.reports] == [r.seed for r in parallel.reports]
