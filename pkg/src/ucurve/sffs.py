"""Sequential selection heuristics: SFS, SBS, and the floating SFFS."""

from __future__ import annotations

import math
import time
from typing import Callable

from .cost import BudgetExhausted, CostEvaluator, Instance
from .lattice import check_degree, full_set
from .report import SearchReport, conclude


def sfs_step(current: int, n: int, evaluator: CostEvaluator) -> int:
    """Add the single feature whose inclusion minimizes cost (ties: lowest index)."""
    if current == full_set(n):
        raise ValueError("nothing left to add")
    best = None
    best_cost = None
    for b in range(n):
        bit = 1 << b
        if current & bit:
            continue
        c = evaluator.evaluate(current | bit)
        if best_cost is None or c < best_cost:
            best, best_cost = current | bit, c
    return best


def sbs_step(current: int, n: int, evaluator: CostEvaluator) -> int:
    """Remove the single feature whose exclusion minimizes cost (ties: lowest index)."""
    if current == 0:
        raise ValueError("nothing left to remove")
    best = None
    best_cost = None
    for b in range(n):
        bit = 1 << b
        if not current & bit:
            continue
        c = evaluator.evaluate(current ^ bit)
        if best_cost is None or c < best_cost:
            best, best_cost = current ^ bit, c
    return best


def sffs_solve(
    n: int,
    cost: Instance | Callable[[int], float],
    node_budget: int | None = None,
    cost_target: float | None = None,
    evaluator: CostEvaluator | None = None,
) -> SearchReport:
    """Floating forward selection run over the whole cardinality range.

    From the empty set, alternate a forward step with backward excursions
    accepted only while they strictly improve the best cost recorded at the
    resulting cardinality (the standard anti-cycling safeguard). The run
    ends when the forward frontier reaches the full set; the result is the
    global best over all cardinalities. Suboptimal by design.
    """
    check_degree(n)
    ev = evaluator or CostEvaluator(cost, n=n, node_budget=node_budget, cost_target=cost_target)
    budget_exhausted = False
    started = time.perf_counter()
    full = full_set(n)
    try:
        current = 0
        best_at = {0: ev.evaluate(0)}
        while current != full and not ev.target_reached:
            current = sfs_step(current, n, ev)
            k = current.bit_count()
            c_current = ev.evaluate(current)
            if c_current < best_at.get(k, math.inf):
                best_at[k] = c_current
            if ev.target_reached:
                break
            while current.bit_count() >= 2:
                candidate = sbs_step(current, n, ev)
                if ev.target_reached:
                    break
                c_candidate = ev.evaluate(candidate)
                if c_candidate < best_at.get(k - 1, math.inf):
                    current = candidate
                    k -= 1
                    best_at[k] = c_candidate
                else:
                    break
    except BudgetExhausted:
        budget_exhausted = True
    return conclude("sffs", n, ev, ev.memo, started, budget_exhausted=budget_exhausted)
