import json

import pytest

from ucurve.cost import generate_subset_sum_instance
from ucurve.harness import (
    ExperimentConfig,
    derive_seed,
    dynamics_profile,
    emit_report,
    load_instance_checked,
    prepare_instances,
    report_columns,
    run_benchmark,
    run_optimal,
    run_solver,
    run_suboptimal,
)
from ucurve.oracle import exhaustive_solve


def small_config(**overrides):
    base = dict(
        sizes=[5, 6],
        instances_per_size=5,
        seed=11,
        algorithms=["ucs", "ubb", "sffs"],
        include_times=False,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(sizes=[])
        with pytest.raises(ValueError):
            ExperimentConfig(sizes=[5], algorithms=["nope"])
        with pytest.raises(ValueError):
            ExperimentConfig(sizes=[5], jobs=2)  # needs include_times=False
        with pytest.raises(ValueError):
            ExperimentConfig(sizes=[5], threshold_scope="sometimes")

    def test_from_json_rejects_unknown_keys(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"sizes": [5], "bogus": 1}))
        with pytest.raises(ValueError):
            ExperimentConfig.from_json(path)

    def test_derive_seed_is_stable(self):
        assert derive_seed(1, "instance", 5, 0) == derive_seed(1, "instance", 5, 0)
        assert derive_seed(1, "instance", 5, 0) != derive_seed(1, "instance", 5, 1)


class TestInstanceFiles:
    def test_manifest_regenerates_identically(self, tmp_path):
        cfg = small_config()
        first = prepare_instances(cfg, tmp_path / "a")
        second = prepare_instances(cfg, tmp_path / "b")
        assert first == second

    def test_tampering_is_detected(self, tmp_path):
        cfg = small_config()
        manifest = prepare_instances(cfg, tmp_path)
        name = next(iter(manifest))
        victim = tmp_path / "instances" / name
        payload = json.loads(victim.read_text())
        payload["target"] += 1
        victim.write_text(json.dumps(payload))
        with pytest.raises(ValueError, match="hash mismatch"):
            load_instance_checked(victim, manifest[name])


class TestRunOptimal:
    def test_single_instance_single_algorithm(self, tmp_path):
        cfg = ExperimentConfig(
            sizes=[6], instances_per_size=1, seed=3, algorithms=["exhaustive"], include_times=False
        )
        rows = run_optimal(cfg, tmp_path)
        assert len(rows) == 1
        row = rows[0]
        assert row["mean_computed_nodes"] == 64
        assert row["best_solution_count"] == 1

    def test_optimal_solvers_always_count_as_best(self, tmp_path):
        cfg = ExperimentConfig(
            sizes=[7],
            instances_per_size=10,
            seed=9,
            algorithms=["ucs", "ubb", "exhaustive"],
            include_times=False,
        )
        rows = run_optimal(cfg, tmp_path)
        for row in rows:
            assert row["best_solution_count"] == 10


class TestRunSuboptimal:
    def test_mean_scope_end_to_end(self, tmp_path):
        cfg = small_config(mode="suboptimal")
        thresholds, results = run_suboptimal(cfg, tmp_path)
        assert [t["n"] for t in thresholds] == [5, 6]
        for t in thresholds:
            assert t["threshold"] >= max(t["ucs_nodes"], t["ubb_nodes"], t["sffs_nodes"])
            assert t["threshold"] == -(-max(t["ucs_nodes"], t["ubb_nodes"], t["sffs_nodes"]) // 1)
        for r in results:
            assert r["mean_computed_nodes"] <= r["threshold"]

    def test_per_instance_scope(self, tmp_path):
        cfg = small_config(mode="suboptimal", threshold_scope="per-instance")
        thresholds, results = run_suboptimal(cfg, tmp_path)
        assert len(thresholds) == 10  # one row per (size, instance)
        assert all("instance" in t for t in thresholds)
        assert len(results) == 6

    def test_budget_slack_equals_unbudgeted(self):
        inst = generate_subset_sum_instance(6, 5)
        free = exhaustive_solve(6, inst)
        capped = run_solver("exhaustive", inst, node_budget=2**6)
        assert capped.minima == free.minima
        assert capped.computed_nodes == free.computed_nodes
        assert not capped.budget_exhausted


class TestDynamics:
    def test_ratio_bounded_and_rows_shaped(self, tmp_path):
        cfg = small_config(mode="dynamics", sizes=[4, 7], algorithms=["ucs"])
        rows = dynamics_profile(cfg, tmp_path)
        assert [r["n"] for r in rows] == [4, 7]
        for row in rows:
            assert 0 < row["ratio"] <= 1.0
            assert row["mean_dfs_calls"] <= row["mean_minmax_calls"]


class TestEmission:
    def test_empty_rows_gives_header_only(self, tmp_path):
        path = tmp_path / "out.csv"
        emit_report([], ["n", "algorithm"], path, "csv")
        assert path.read_text() == "n,algorithm\n"

    def test_identical_inputs_identical_bytes(self, tmp_path):
        rows = [{"n": 5, "algorithm": "ucs", "mean_computed_nodes": 12.3456}]
        cols = ["n", "algorithm", "mean_computed_nodes"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_report(rows, cols, a, "csv")
        emit_report(rows, cols, b, "csv")
        assert a.read_bytes() == b.read_bytes()

    def test_json_round_trips_through_csv_columns(self, tmp_path):
        rows = [
            {"n": 5, "algorithm": "ucs", "mean_computed_nodes": 20.0, "best_solution_count": 5},
            {"n": 5, "algorithm": "ubb", "mean_computed_nodes": 24.755, "best_solution_count": 4},
        ]
        cols = ["n", "algorithm", "best_solution_count", "mean_computed_nodes"]
        emit_report(rows, cols, tmp_path / "r.csv", "csv")
        emit_report(rows, cols, tmp_path / "r.json", "json")
        parsed = json.loads((tmp_path / "r.json").read_text())
        lines = (tmp_path / "r.csv").read_text().splitlines()
        header = lines[0].split(",")
        assert header == cols
        for row, line in zip(parsed, lines[1:]):
            cells = line.split(",")
            for col, cell in zip(header, cells):
                value = row[col]
                assert str(value) == cell or float(cell) == value

    def test_pipeline_byte_identical_across_runs(self, tmp_path):
        cfg = small_config(mode="optimal")
        out_a = run_benchmark(cfg, tmp_path / "a")
        out_b = run_benchmark(cfg, tmp_path / "b")
        for pa, pb in zip(out_a, out_b):
            assert pa.read_bytes() == pb.read_bytes()

    def test_suboptimal_pipeline_byte_identical(self, tmp_path):
        cfg = small_config(mode="suboptimal", sizes=[5], instances_per_size=4)
        out_a = run_benchmark(cfg, tmp_path / "a")
        out_b = run_benchmark(cfg, tmp_path / "b")
        assert [p.name for p in out_a] == [
            "suboptimal_thresholds.csv",
            "suboptimal_thresholds.json",
            "suboptimal_results.csv",
            "suboptimal_results.json",
        ]
        for pa, pb in zip(out_a, out_b):
            assert pa.read_bytes() == pb.read_bytes()

    def test_time_columns_present_only_when_asked(self, tmp_path):
        timed = ExperimentConfig(sizes=[4], instances_per_size=2, seed=1, include_times=True)
        plain = small_config()
        assert "mean_time_sec" in report_columns(timed, "comparison")
        assert "mean_time_sec" not in report_columns(plain, "comparison")


class TestWorkers:
    def test_jobs_two_matches_jobs_one_on_counts(self, tmp_path):
        serial = run_optimal(small_config(), tmp_path / "s")
        parallel = run_optimal(small_config(jobs=2), tmp_path / "p")
        assert serial == parallel


class TestEntropyCostRuns:
    def test_witness_rate_recorded_for_entropy_costs(self, tmp_path):
        cfg = ExperimentConfig(
            sizes=[5],
            instances_per_size=6,
            seed=2,
            algorithms=["ucs", "sffs"],
            cost_kind="mce",
            include_times=False,
        )
        rows = run_optimal(cfg, tmp_path)
        for row in rows:
            assert 0.0 <= row["witness_rate"] <= 1.0
        assert "witness_rate" in report_columns(cfg, "comparison")

    def test_dynamics_ratio_decreases_with_size(self, tmp_path):
        cfg = ExperimentConfig(
            sizes=[5, 9],
            instances_per_size=30,
            seed=4,
            algorithms=["ucs"],
            mode="dynamics",
            include_times=False,
        )
        small, large = dynamics_profile(cfg, tmp_path)
        assert large["ratio"] < small["ratio"]


class TestCounterCrossCheck:
    def test_reported_nodes_match_raw_cost_invocations(self):
        from ucurve.cost import CostEvaluator
        from ucurve.oracle import exhaustive_solve, legacy_ucurve_solve
        from ucurve.sffs import sffs_solve
        from ucurve.ubb import ubb_solve
        from ucurve.ucs import ucs_solve

        inst = generate_subset_sum_instance(7, 12)
        base = inst.cost_function()
        runners = [
            lambda ev: ucs_solve(7, inst, seed=1, evaluator=ev),
            lambda ev: ubb_solve(7, inst, evaluator=ev),
            lambda ev: sffs_solve(7, inst, evaluator=ev),
            lambda ev: exhaustive_solve(7, inst, evaluator=ev),
            lambda ev: legacy_ucurve_solve(7, inst, seed=1, evaluator=ev),
        ]
        for runner in runners:
            calls = []

            def counted(x, _base=base, _calls=calls):
                _calls.append(x)
                return _base(x)

            ev = CostEvaluator(counted, n=7)
            report = runner(ev)
            assert report.computed_nodes == len(calls) == len(set(calls))
