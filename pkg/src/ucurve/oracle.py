"""Ground truth and the original, flawed lattice search.

exhaustive_solve enumerates everything and is the correctness oracle for
the other solvers. legacy_ucurve_solve reimplements the earlier published
search whose pop step restricts BOTH sides of the popped element, which
can delete an unvisited region holding the global minimum; the flaw is
demonstrated constructively by find_counterexample rather than by
hard-coding any particular figure.
"""

from __future__ import annotations

import random
import time
from typing import Callable

from .cost import (
    BudgetExhausted,
    CostEvaluator,
    Instance,
    generate_decomposable_explicit,
)
from .lattice import (
    LOWER,
    UPPER,
    RestrictionSet,
    check_degree,
    maximal_element,
    minimal_element,
)
from .report import SearchReport, conclude
from .ucs import UP, select_direction

EXHAUSTIVE_MAX_DEGREE = 24


def exhaustive_solve(
    n: int,
    cost: Instance | Callable[[int], float],
    node_budget: int | None = None,
    cost_target: float | None = None,
    evaluator: CostEvaluator | None = None,
) -> SearchReport:
    """Evaluate all 2**n subsets and return every minimum."""
    check_degree(n)
    if n > EXHAUSTIVE_MAX_DEGREE:
        raise ValueError(f"exhaustive search is capped at degree {EXHAUSTIVE_MAX_DEGREE}")
    ev = evaluator or CostEvaluator(cost, n=n, node_budget=node_budget, cost_target=cost_target)
    budget_exhausted = False
    started = time.perf_counter()
    try:
        for m in range(1 << n):
            ev.evaluate(m)
            if ev.target_reached:
                break
    except BudgetExhausted:
        budget_exhausted = True
    return conclude("exhaustive", n, ev, ev.memo, started, budget_exhausted=budget_exhausted)


def legacy_ucurve_solve(
    n: int,
    cost: Instance | Callable[[int], float],
    seed: int = 0,
    p_up: float = 0.5,
    node_budget: int | None = None,
    cost_target: float | None = None,
    evaluator: CostEvaluator | None = None,
) -> SearchReport:
    """The original minimum-exhausting search; may return suboptimal cost.

    Each outer iteration walks a maximal chain from a minimal or maximal
    element of the remaining space to the chain's minimum (the walk is a
    reconstruction: the chain extends by the lowest feasible bit index and
    stops as soon as the next chain element costs more), then exhausts the
    chain minimum depth-first, pushing every feasible unstacked neighbour
    of the stack top with cost <= the top's. A top with nothing to push is
    popped and added to BOTH restriction collections, the documented
    error: the popped element's lower and upper intervals vanish even
    where they were never visited.
    """
    check_degree(n)
    ev = evaluator or CostEvaluator(cost, n=n, node_budget=node_budget, cost_target=cost_target)
    rng = random.Random(seed)
    r_lower = RestrictionSet(LOWER, n)
    r_upper = RestrictionSet(UPPER, n)
    budget_exhausted = False
    started = time.perf_counter()
    try:
        while True:
            going_up = select_direction(rng, p_up) == UP
            if going_up:
                a = minimal_element(n, r_lower)
                if a is None:
                    break
                if r_upper.covers(a):
                    r_lower.update(a)
                    continue
            else:
                a = maximal_element(n, r_upper)
                if a is None:
                    break
                if r_lower.covers(a):
                    r_upper.update(a)
                    continue
            m = _chain_minimum(a, n, ev, r_lower, r_upper, going_up)
            if ev.target_reached:
                break
            _minimum_exhausting(m, n, ev, r_lower, r_upper)
            if ev.target_reached:
                break
    except BudgetExhausted:
        budget_exhausted = True
    return conclude("ucurve-legacy", n, ev, ev.memo, started, budget_exhausted=budget_exhausted)


def _chain_minimum(
    start: int,
    n: int,
    ev: CostEvaluator,
    r_lower: RestrictionSet,
    r_upper: RestrictionSet,
    going_up: bool,
) -> int:
    current = start
    c_current = ev.evaluate(start)
    while not ev.target_reached:
        step = None
        for b in range(n):
            bit = 1 << b
            if going_up == bool(current & bit):
                continue
            candidate = current ^ bit
            if r_lower.covers(candidate) or r_upper.covers(candidate):
                continue
            step = candidate
            break
        if step is None:
            break
        c_step = ev.evaluate(step)
        if c_step > c_current:
            break
        current, c_current = step, c_step
    return current


def _minimum_exhausting(
    m: int,
    n: int,
    ev: CostEvaluator,
    r_lower: RestrictionSet,
    r_upper: RestrictionSet,
) -> None:
    stack = [m]
    stacked = {m}
    while stack:
        top = stack[-1]
        # a top that earlier pops removed from the search space is not
        # expanded; it is exhausted as-is (this is what makes the pop step
        # able to delete never-visited regions)
        if r_lower.covers(top) or r_upper.covers(top):
            stack.pop()
            stacked.discard(top)
            r_lower.update(top)
            r_upper.update(top)
            continue
        c_top = ev.evaluate(top)
        pushed = False
        for b in range(n):
            y = top ^ (1 << b)
            if y in stacked:
                continue
            if r_lower.covers(y) or r_upper.covers(y):
                continue
            c_y = ev.evaluate(y)
            if ev.target_reached:
                return
            if c_y <= c_top:
                stack.append(y)
                stacked.add(y)
                pushed = True
        if not pushed:
            stack.pop()
            stacked.discard(top)
            r_lower.update(top)
            r_upper.update(top)


def find_counterexample(
    n: int,
    trials: int,
    seed: int,
    weight_max: int = 4,
    noise: float = 0.0,
) -> Instance | None:
    """Search for a chain-U-shaped instance where the legacy search loses the optimum.

    Draws seeded random decomposable explicit instances and compares the
    legacy search against exhaustive enumeration; the first instance whose
    legacy cost is strictly worse is returned. None when the trial budget
    runs out.
    """
    if not 4 <= n <= 8:
        raise ValueError("counter-example search supports degrees 4..8")
    if trials < 0:
        raise ValueError("trials must be non-negative")
    for trial in range(trials):
        trial_seed = seed * 1_000_003 + 2 * trial
        instance = generate_decomposable_explicit(n, trial_seed, weight_max=weight_max, noise=noise)
        optimum = exhaustive_solve(n, instance)
        legacy = legacy_ucurve_solve(n, instance, seed=trial_seed + 1)
        if legacy.best_cost > optimum.best_cost:
            return instance
    return None
