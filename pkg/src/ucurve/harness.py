"""Experiment runner: optimal / suboptimal comparison protocols and dynamics.

Instances are materialized as files with a hash manifest; every protocol
step re-reads them through the manifest so all steps provably consume the
same inputs. Reports are emitted as CSV and JSON with fixed column order
and fixed rounding, byte-stable for identical inputs. Wall-clock columns
are only meaningful (and only emitted) for jobs=1 runs; node counts stay
valid under a worker pool.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import cost as costmod
from .cost import Instance, load_instance, load_samples, mce_instance, save_instance, save_samples
from .oracle import exhaustive_solve, legacy_ucurve_solve
from .report import SearchReport
from .sffs import sffs_solve
from .ubb import ubb_solve
from .ucs import ucs_solve

OPTIMAL = "optimal"
SUBOPTIMAL = "suboptimal"
DYNAMICS = "dynamics"

ALGORITHMS = ("ucs", "ubb", "sffs", "exhaustive", "ucurve-legacy")


def derive_seed(*parts) -> int:
    """Stable sub-seed from a root seed and a label path (hash-randomization safe)."""
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


@dataclass
class ExperimentConfig:
    sizes: list[int]
    instances_per_size: int = 100
    seed: int = 0
    algorithms: list[str] = field(default_factory=lambda: ["ucs", "ubb", "sffs"])
    cost_kind: str = costmod.SUBSET_SUM
    mode: str = OPTIMAL
    threshold_scope: str = "mean"  # or "per-instance"
    weight_max: int = costmod.DEFAULT_WEIGHT_MAX
    sample_rows: int = 200
    p_up: float = 0.5
    jobs: int = 1
    include_times: bool = True

    def __post_init__(self) -> None:
        if not self.sizes:
            raise ValueError("config needs at least one size")
        if self.instances_per_size < 1:
            raise ValueError("instances_per_size must be at least 1")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {alg!r}")
        if self.mode not in (OPTIMAL, SUBOPTIMAL, DYNAMICS):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.threshold_scope not in ("mean", "per-instance"):
            raise ValueError("threshold_scope must be 'mean' or 'per-instance'")
        if self.cost_kind not in (costmod.SUBSET_SUM, costmod.MCE):
            raise ValueError(f"unsupported cost kind {self.cost_kind!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.jobs > 1 and self.include_times:
            raise ValueError("time columns are only valid at jobs=1; set include_times=False")

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(payload, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        return cls(**payload)


# ---------------------------------------------------------------------------
# instance materialization


def prepare_instances(config: ExperimentConfig, workdir: str | Path) -> dict[str, str]:
    """Write one file per (size, index) instance plus a sha256 manifest.

    Returns the manifest mapping relative file name to hash. Regenerating
    with the same config yields byte-identical files.
    """
    root = Path(workdir)
    instance_dir = root / "instances"
    instance_dir.mkdir(parents=True, exist_ok=True)
    manifest: dict[str, str] = {}
    for size in config.sizes:
        for idx in range(config.instances_per_size):
            seed = derive_seed(config.seed, "instance", size, idx)
            name = _instance_name(config, size, idx)
            path = instance_dir / name
            if config.cost_kind == costmod.SUBSET_SUM:
                save_instance(
                    costmod.generate_subset_sum_instance(size, seed, config.weight_max), path
                )
            else:
                save_samples(
                    costmod.generate_sample_table(size, config.sample_rows, seed), path
                )
            manifest[name] = hashlib.sha256(path.read_bytes()).hexdigest()
    manifest_path = root / "instances_manifest.json"
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return manifest


def _instance_name(config: ExperimentConfig, size: int, idx: int) -> str:
    suffix = "json" if config.cost_kind == costmod.SUBSET_SUM else "txt"
    return f"n{size:02d}_i{idx:03d}.{suffix}"


def load_instance_checked(path: Path, expected_hash: str) -> Instance:
    data = path.read_bytes()
    digest = hashlib.sha256(data).hexdigest()
    if digest != expected_hash:
        raise ValueError(f"{path}: content hash mismatch, instance file changed between steps")
    if path.suffix == ".txt":
        return mce_instance(load_samples(path))
    return load_instance(path)


# ---------------------------------------------------------------------------
# single runs


def run_solver(
    algorithm: str,
    instance: Instance,
    seed: int = 0,
    p_up: float = 0.5,
    node_budget: int | None = None,
    cost_target: float | None = None,
    on_event: Callable[[dict], None] | None = None,
) -> SearchReport:
    if on_event is not None and algorithm != "ucs":
        raise ValueError("event tracing is only supported by the ucs solver")
    if algorithm == "ucs":
        return ucs_solve(
            instance.n, instance, seed=seed, p_up=p_up,
            node_budget=node_budget, cost_target=cost_target, on_event=on_event,
        )
    if algorithm == "ubb":
        return ubb_solve(instance.n, instance, node_budget=node_budget, cost_target=cost_target)
    if algorithm == "sffs":
        return sffs_solve(instance.n, instance, node_budget=node_budget, cost_target=cost_target)
    if algorithm == "exhaustive":
        return exhaustive_solve(instance.n, instance, node_budget=node_budget, cost_target=cost_target)
    if algorithm == "ucurve-legacy":
        return legacy_ucurve_solve(
            instance.n, instance, seed=seed, p_up=p_up,
            node_budget=node_budget, cost_target=cost_target,
        )
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _run_task(task: dict) -> tuple:
    instance = load_instance_checked(Path(task["path"]), task["hash"])
    report = run_solver(
        task["algorithm"],
        instance,
        seed=task["seed"],
        p_up=task["p_up"],
        node_budget=task.get("node_budget"),
        cost_target=task.get("cost_target"),
    )
    return task["key"], report


def _run_all(tasks: list[dict], jobs: int) -> dict[tuple, SearchReport]:
    if jobs <= 1:
        return dict(_run_task(t) for t in tasks)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return dict(pool.map(_run_task, tasks, chunksize=4))


# ---------------------------------------------------------------------------
# protocols


def _tasks_for(
    config: ExperimentConfig,
    workdir: Path,
    manifest: dict[str, str],
    algorithms: Sequence[str],
    step: str,
    budgets: Callable[[int, int, str], dict] | None = None,
) -> list[dict]:
    tasks = []
    for size in config.sizes:
        for idx in range(config.instances_per_size):
            name = _instance_name(config, size, idx)
            for alg in algorithms:
                task = {
                    "key": (size, idx, alg),
                    "path": str(workdir / "instances" / name),
                    "hash": manifest[name],
                    "algorithm": alg,
                    "seed": derive_seed(config.seed, "solve", step, size, idx, alg),
                    "p_up": config.p_up,
                }
                if budgets:
                    task.update(budgets(size, idx, alg))
                tasks.append(task)
    return tasks


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def _best_counts(
    config: ExperimentConfig,
    results: dict[tuple, SearchReport],
    algorithms: Sequence[str],
    size: int,
) -> dict[str, int]:
    """Per algorithm, how many instances it matched the best cost found by any of them."""
    counts = {alg: 0 for alg in algorithms}
    for idx in range(config.instances_per_size):
        costs = {
            alg: results[(size, idx, alg)].best_cost
            if results[(size, idx, alg)].best_cost is not None
            else math.inf
            for alg in algorithms
        }
        best = min(costs.values())
        for alg in algorithms:
            if costs[alg] == best:
                counts[alg] += 1
    return counts


def _comparison_rows(
    config: ExperimentConfig,
    results: dict[tuple, SearchReport],
    algorithms: Sequence[str],
    extra: Callable[[int, str], dict] | None = None,
) -> list[dict]:
    rows = []
    for size in config.sizes:
        counts = _best_counts(config, results, algorithms, size)
        for alg in algorithms:
            reports = [results[(size, idx, alg)] for idx in range(config.instances_per_size)]
            row = {
                "n": size,
                "algorithm": alg,
                "instances": len(reports),
                "mean_computed_nodes": _mean([r.computed_nodes for r in reports]),
                "best_solution_count": counts[alg],
            }
            if config.include_times:
                mean_time = _mean([r.wall_time for r in reports])
                row["mean_time_sec"] = mean_time
                row["mean_time_in_cost_sec"] = _mean([r.time_in_cost for r in reports])
                row["log2_mean_time_sec"] = math.log2(mean_time) if mean_time > 0 else None
            if extra:
                row.update(extra(size, alg))
            rows.append(row)
    return rows


def _witness_rates(config: ExperimentConfig, workdir: Path, manifest: dict[str, str]) -> dict[int, float]:
    """Fraction of instances per size where the entropy cost breaks the chain shape.

    Estimated data gives no shape guarantee; the rate is recorded alongside
    the comparison so suboptimal entropy results can be read with care.
    """
    rates = {}
    for size in config.sizes:
        witnesses = 0
        for idx in range(config.instances_per_size):
            name = _instance_name(config, size, idx)
            instance = load_instance_checked(workdir / "instances" / name, manifest[name])
            seed = derive_seed(config.seed, "witness", size, idx)
            if costmod.verify_decomposable(instance, mode="sampled", chains=200, seed=seed):
                witnesses += 1
        rates[size] = witnesses / config.instances_per_size
    return rates


def run_optimal(config: ExperimentConfig, workdir: str | Path) -> list[dict]:
    """Unbudgeted comparison: mean nodes, mean time, best-solution counts."""
    workdir = Path(workdir)
    manifest = prepare_instances(config, workdir)
    tasks = _tasks_for(config, workdir, manifest, config.algorithms, "optimal")
    results = _run_all(tasks, config.jobs)
    extra = None
    if config.cost_kind == costmod.MCE:
        rates = _witness_rates(config, workdir, manifest)

        def extra(size, alg):
            return {"witness_rate": rates[size]}

    return _comparison_rows(config, results, config.algorithms, extra)


def run_suboptimal(config: ExperimentConfig, workdir: str | Path) -> tuple[list[dict], list[dict]]:
    """Three-step budgeted protocol over one shared instance set.

    Step 1 runs the floating heuristic unbudgeted; its best costs set the
    cost thresholds (mean per size, or per instance). Step 2 runs the two
    optimal solvers with that cost target and records their node counts;
    the node threshold is the ceiling of the greatest mean (or per-instance
    count) across all three algorithms. Step 3 reruns all three with the
    node threshold as the budget and tabulates like the optimal protocol.
    """
    workdir = Path(workdir)
    manifest = prepare_instances(config, workdir)
    per_instance = config.threshold_scope == "per-instance"

    step1 = _run_all(_tasks_for(config, workdir, manifest, ["sffs"], "step1"), config.jobs)

    if per_instance:
        cost_threshold = {
            (size, idx): step1[(size, idx, "sffs")].best_cost
            for size in config.sizes
            for idx in range(config.instances_per_size)
        }
    else:
        cost_threshold = {}
        for size in config.sizes:
            costs = [step1[(size, idx, "sffs")].best_cost for idx in range(config.instances_per_size)]
            for idx in range(config.instances_per_size):
                cost_threshold[(size, idx)] = _mean(costs)

    def step2_budget(size: int, idx: int, alg: str) -> dict:
        return {"cost_target": cost_threshold[(size, idx)]}

    step2 = _run_all(
        _tasks_for(config, workdir, manifest, ["ucs", "ubb"], "step2", step2_budget),
        config.jobs,
    )

    threshold_rows: list[dict] = []
    node_threshold: dict[tuple[int, int], int] = {}
    for size in config.sizes:
        if per_instance:
            for idx in range(config.instances_per_size):
                nodes = {
                    "ucs": step2[(size, idx, "ucs")].computed_nodes,
                    "ubb": step2[(size, idx, "ubb")].computed_nodes,
                    "sffs": step1[(size, idx, "sffs")].computed_nodes,
                }
                limit = math.ceil(max(nodes.values()))
                node_threshold[(size, idx)] = limit
                threshold_rows.append(
                    {
                        "n": size,
                        "instance": idx,
                        "ucs_nodes": nodes["ucs"],
                        "ubb_nodes": nodes["ubb"],
                        "sffs_nodes": nodes["sffs"],
                        "threshold": limit,
                    }
                )
        else:
            nodes = {
                alg: _mean(
                    [
                        (step2 if alg != "sffs" else step1)[(size, idx, alg)].computed_nodes
                        for idx in range(config.instances_per_size)
                    ]
                )
                for alg in ("ucs", "ubb", "sffs")
            }
            limit = math.ceil(max(nodes.values()))
            for idx in range(config.instances_per_size):
                node_threshold[(size, idx)] = limit
            threshold_rows.append(
                {
                    "n": size,
                    "ucs_nodes": nodes["ucs"],
                    "ubb_nodes": nodes["ubb"],
                    "sffs_nodes": nodes["sffs"],
                    "threshold": limit,
                }
            )

    # thresholds land on disk before step 3 runs, so an aborted step still
    # leaves the pre-processing results behind
    for fmt in ("csv", "json"):
        emit_report(
            threshold_rows,
            report_columns(config, "thresholds"),
            workdir / f"suboptimal_thresholds.{fmt}",
            fmt,
        )

    def step3_budget(size: int, idx: int, alg: str) -> dict:
        return {"node_budget": node_threshold[(size, idx)]}

    step3_algs = ["ucs", "ubb", "sffs"]
    step3 = _run_all(
        _tasks_for(config, workdir, manifest, step3_algs, "step3", step3_budget),
        config.jobs,
    )
    for (size, idx, alg), report in step3.items():
        limit = node_threshold[(size, idx)]
        if report.computed_nodes > limit:
            raise RuntimeError(
                f"budget contract violated: {alg} computed {report.computed_nodes} > {limit}"
            )

    def extra(size: int, alg: str) -> dict:
        if per_instance:
            return {}
        return {"threshold": node_threshold[(size, 0)]}

    result_rows = _comparison_rows(config, step3, step3_algs, extra)
    return threshold_rows, result_rows


def dynamics_profile(config: ExperimentConfig, workdir: str | Path) -> list[dict]:
    """Main-loop iteration accounting: how rarely an iteration yields a DFS."""
    workdir = Path(workdir)
    manifest = prepare_instances(config, workdir)
    tasks = _tasks_for(config, workdir, manifest, ["ucs"], "dynamics")
    results = _run_all(tasks, config.jobs)
    rows = []
    for size in config.sizes:
        reports = [results[(size, idx, "ucs")] for idx in range(config.instances_per_size)]
        mean_dfs = _mean([r.dfs_calls for r in reports])
        mean_minmax = _mean([r.minmax_calls for r in reports])
        rows.append(
            {
                "n": size,
                "instances": len(reports),
                "mean_dfs_calls": mean_dfs,
                "mean_minmax_calls": mean_minmax,
                "ratio": mean_dfs / mean_minmax if mean_minmax else None,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# report emission

_COLUMN_DECIMALS = {
    "mean_computed_nodes": 2,
    "mean_time_sec": 2,
    "mean_time_in_cost_sec": 2,
    "log2_mean_time_sec": 2,
    "mean_dfs_calls": 2,
    "mean_minmax_calls": 2,
    "ratio": 4,
    "witness_rate": 4,
    "ucs_nodes": 2,
    "ubb_nodes": 2,
    "sffs_nodes": 2,
}


def _rounded(rows: list[dict], columns: Sequence[str]) -> list[dict]:
    out = []
    for row in rows:
        item = {}
        for col in columns:
            value = row.get(col)
            decimals = _COLUMN_DECIMALS.get(col)
            if decimals is not None and isinstance(value, float):
                value = round(value, decimals)
            item[col] = value
        out.append(item)
    return out


def _format_cell(column: str, value) -> str:
    if value is None:
        return ""
    decimals = _COLUMN_DECIMALS.get(column)
    if decimals is not None and isinstance(value, float):
        return f"{value:.{decimals}f}"
    return str(value)


def emit_report(rows: list[dict], columns: Sequence[str], path: str | Path, fmt: str = "csv") -> None:
    """Write rows deterministically; identical inputs give identical bytes."""
    rounded = _rounded(rows, columns)
    path = Path(path)
    if fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_format_cell(c, row[c]) for c in columns) for row in rounded)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif fmt == "json":
        path.write_text(json.dumps(rounded, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def report_columns(config: ExperimentConfig, table: str) -> list[str]:
    if table == "comparison":
        columns = ["n", "algorithm", "instances", "best_solution_count", "mean_computed_nodes"]
        if config.mode == SUBOPTIMAL and config.threshold_scope == "mean":
            columns.append("threshold")
        if config.mode == OPTIMAL and config.cost_kind == costmod.MCE:
            columns.append("witness_rate")
        if config.include_times:
            columns += ["mean_time_sec", "mean_time_in_cost_sec", "log2_mean_time_sec"]
        return columns
    if table == "thresholds":
        columns = ["n"]
        if config.threshold_scope == "per-instance":
            columns.append("instance")
        return columns + ["ucs_nodes", "ubb_nodes", "sffs_nodes", "threshold"]
    if table == "dynamics":
        return ["n", "instances", "mean_dfs_calls", "mean_minmax_calls", "ratio"]
    raise ValueError(f"unknown table {table!r}")


def run_benchmark(config: ExperimentConfig, outdir: str | Path) -> list[Path]:
    """Run the configured protocol end-to-end, writing CSV and JSON reports."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(rows: list[dict], table: str, stem: str) -> None:
        columns = report_columns(config, table)
        for fmt in ("csv", "json"):
            path = outdir / f"{stem}.{fmt}"
            emit_report(rows, columns, path, fmt)
            written.append(path)

    if config.mode == OPTIMAL:
        emit(run_optimal(config, outdir), "comparison", "optimal")
    elif config.mode == SUBOPTIMAL:
        thresholds, results = run_suboptimal(config, outdir)
        emit(thresholds, "thresholds", "suboptimal_thresholds")
        emit(results, "comparison", "suboptimal_results")
    else:
        emit(dynamics_profile(config, outdir), "dynamics", "dynamics")
    return written
