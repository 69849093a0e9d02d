"""Solver run reports shared by every algorithm."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .cost import CostEvaluator
from .lattice import render_element


@dataclass
class SearchReport:
    """Outcome and instrumentation of one solver run.

    minima holds every found element of best cost, sorted by characteristic
    vector for reproducible output. minmax_calls doubles as the number of
    main-loop iterations for the lattice search (each iteration asks for one
    minimal or maximal element).
    """

    algorithm: str
    n: int
    minima: list[int]
    best_cost: float | None
    computed_nodes: int
    wall_time: float
    time_in_cost: float
    dfs_calls: int = 0
    minmax_calls: int = 0
    budget_exhausted: bool = False
    target_reached: bool = False

    @property
    def time_other(self) -> float:
        return self.wall_time - self.time_in_cost

    def minima_vectors(self) -> list[str]:
        return [render_element(m, self.n) for m in self.minima]

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "n": self.n,
            "minima": self.minima_vectors(),
            "best_cost": self.best_cost,
            "computed_nodes": self.computed_nodes,
            "wall_time_sec": self.wall_time,
            "time_in_cost_sec": self.time_in_cost,
            "time_other_sec": self.time_other,
            "dfs_calls": self.dfs_calls,
            "minmax_calls": self.minmax_calls,
            "budget_exhausted": self.budget_exhausted,
            "target_reached": self.target_reached,
        }


def conclude(
    algorithm: str,
    n: int,
    evaluator: CostEvaluator,
    minima_costs: dict[int, float],
    started: float,
    dfs_calls: int = 0,
    minmax_calls: int = 0,
    budget_exhausted: bool = False,
) -> SearchReport:
    """Build the report from a finished (or gracefully stopped) run."""
    wall = time.perf_counter() - started
    if minima_costs:
        best = min(minima_costs.values())
        minima = sorted(
            (e for e, c in minima_costs.items() if c == best),
            key=lambda e: render_element(e, n),
        )
    else:
        best = None
        minima = []
    return SearchReport(
        algorithm=algorithm,
        n=n,
        minima=minima,
        best_cost=best,
        computed_nodes=evaluator.computed_nodes,
        wall_time=wall,
        time_in_cost=evaluator.elapsed_in_cost,
        dfs_calls=dfs_calls,
        minmax_calls=minmax_calls,
        budget_exhausted=budget_exhausted,
        target_reached=evaluator.target_reached,
    )
