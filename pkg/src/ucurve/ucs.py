"""The corrected lattice search.

The main loop repeatedly draws a direction, takes a minimal (going up) or
maximal (going down) element A of the remaining space, removes A's interval
on that side, and, if A still survives the opposite restrictions, runs a
depth-first search seeded at A. The DFS expands the head of a stack toward
any adjacent element of cost <= the head's, and prunes with four rules that
only ever remove regions provably costlier than an already-recorded
element, so no global minimum is lost:

* an element strictly costlier than an upper neighbour drags its whole
  lower interval along (and dually for upper intervals);
* an element all of whose lower (upper) neighbours are gone can itself be
  removed, since its interval minus itself is gone already.

Node flags track those neighbour states: lower_adjacent / upper_adjacent
hold the bits whose neighbour is not yet known covered, and an empty flag
licenses the interval removal. unverified holds the bits not yet examined
for expansion.

A run never shares state; minima accumulate as element -> cost pairs so
the final filter needs no re-evaluation. The optional on_event callback
receives one dict per push / pop / restriction update, which is what the
CLI --trace flag and the instrumented no-minimum-loss tests consume.
"""

from __future__ import annotations

import random
import time
from typing import Callable

from .cost import BudgetExhausted, CostEvaluator, Instance
from .lattice import (
    LOWER,
    UPPER,
    RestrictionSet,
    check_degree,
    full_set,
    maximal_element,
    minimal_element,
)
from .report import SearchReport, conclude

UP = "up"
DOWN = "down"

EventCallback = Callable[[dict], None]


class Node:
    """A visited element plus neighbour bookkeeping masks."""

    __slots__ = ("element", "unverified", "lower_adjacent", "upper_adjacent")

    def __init__(self, element: int, unverified: int, lower_adjacent: int, upper_adjacent: int):
        self.element = element
        self.unverified = unverified
        self.lower_adjacent = lower_adjacent
        self.upper_adjacent = upper_adjacent

    def __repr__(self) -> str:
        return (
            f"Node(element={self.element:#x}, unverified={self.unverified:#x}, "
            f"lower_adjacent={self.lower_adjacent:#x}, upper_adjacent={self.upper_adjacent:#x})"
        )


def fresh_node(element: int, n: int) -> Node:
    """Node for a newly visited element: nothing verified, nothing known covered."""
    full = full_set(n)
    return Node(element, full, element, full ^ element)


def select_direction(rng: random.Random, p_up: float = 0.5) -> str:
    if not 0.0 <= p_up <= 1.0:
        raise ValueError(f"p_up must be within [0, 1], got {p_up}")
    return UP if rng.random() < p_up else DOWN


def select_unvisited_adjacent(
    y: Node,
    graph: dict[int, Node],
    n: int,
    r_lower: RestrictionSet,
    r_upper: RestrictionSet,
) -> Node | None:
    """Pop unverified bits of y (lowest first) until an expandable neighbour shows.

    Returns a fresh node for the first neighbour that is both inside the
    current space and unvisited, or None when y's unverified set empties.
    Along the way y's flags are maintained: a neighbour found covered by the
    matching restriction side clears its bit from y's flag (visited but
    uncovered neighbours clear nothing).
    """
    element = y.element
    while y.unverified:
        bit = y.unverified & -y.unverified
        y.unverified ^= bit
        x = element ^ bit
        if element & bit:  # x is the lower neighbour across this bit
            if r_lower.covers(x):
                y.lower_adjacent &= ~bit
                continue
            if x not in graph and not r_upper.covers(x):
                return fresh_node(x, n)
        else:
            if r_upper.covers(x):
                y.upper_adjacent &= ~bit
                continue
            if x not in graph and not r_lower.covers(x):
                return fresh_node(x, n)
    return None


def lower_pruning(
    y: Node,
    graph: dict[int, Node],
    r_lower: RestrictionSet,
    on_event: EventCallback | None = None,
) -> None:
    """Add y's element to the lower restrictions and drop its proper subsets."""
    r_lower.update(y.element)
    if on_event:
        on_event({"event": "restrict", "side": "lower", "element": y.element})
    ye = y.element
    for e in [e for e in graph if e != ye and not e & ~ye]:
        del graph[e]


def upper_pruning(
    y: Node,
    graph: dict[int, Node],
    r_upper: RestrictionSet,
    on_event: EventCallback | None = None,
) -> None:
    r_upper.update(y.element)
    if on_event:
        on_event({"event": "restrict", "side": "upper", "element": y.element})
    ye = y.element
    for e in [e for e in graph if e != ye and not ye & ~e]:
        del graph[e]


def node_pruning(
    x: Node,
    y: Node,
    graph: dict[int, Node],
    r_lower: RestrictionSet,
    r_upper: RestrictionSet,
    evaluator: CostEvaluator,
    on_event: EventCallback | None = None,
) -> None:
    """Prune around the adjacent pair (x, y) when one side is strictly cheaper.

    The costlier element of the pair is removed together with its interval
    away from the cheaper one; the cheaper node's flag loses the bit toward
    the removed neighbour, and the removed node's flag on that side empties.
    Equal costs fire nothing.
    """
    cx = evaluator.evaluate(x.element)
    cy = evaluator.evaluate(y.element)
    if cx == cy:
        return
    bit = x.element ^ y.element
    if bit == 0 or bit & (bit - 1):
        raise ValueError("node_pruning needs adjacent nodes")
    if x.element & bit:  # x is upper adjacent to y
        if cx < cy:
            lower_pruning(y, graph, r_lower, on_event)
            x.lower_adjacent &= ~bit
            y.lower_adjacent = 0
        else:
            upper_pruning(x, graph, r_upper, on_event)
            y.upper_adjacent &= ~bit
            x.upper_adjacent = 0
    else:  # x is lower adjacent to y
        if cx < cy:
            upper_pruning(y, graph, r_upper, on_event)
            x.upper_adjacent &= ~bit
            y.upper_adjacent = 0
        else:
            lower_pruning(x, graph, r_lower, on_event)
            y.lower_adjacent &= ~bit
            x.lower_adjacent = 0


def dfs(
    m_node: Node,
    n: int,
    r_lower: RestrictionSet,
    r_upper: RestrictionSet,
    evaluator: CostEvaluator,
    minima: dict[int, float],
    on_event: EventCallback | None = None,
) -> dict[int, float]:
    """Depth-first search from m_node, shrinking the space as it prunes.

    Every pushed element lands in minima with its cost (the accumulator
    over-collects; the caller's final filter keeps only the cheapest). On a
    node-budget stop the exception propagates with minima already holding
    everything evaluated so far; on a cost-target hit the search returns
    immediately.
    """
    cm = evaluator.evaluate(m_node.element)
    minima[m_node.element] = cm
    if evaluator.target_reached:
        return minima
    graph: dict[int, Node] = {m_node.element: m_node}
    stack: list[Node] = [m_node]
    while stack:
        y = stack[-1]
        cy = evaluator.evaluate(y.element)
        while True:
            x = select_unvisited_adjacent(y, graph, n, r_lower, r_upper)
            if x is None:
                stack.remove(y)
                if on_event:
                    on_event({"event": "pop", "element": y.element})
                break
            stack.append(x)
            graph[x.element] = x
            cx = evaluator.evaluate(x.element)
            minima[x.element] = cx
            if on_event:
                on_event({"event": "push", "element": x.element, "cost": cx})
            if evaluator.target_reached:
                return minima
            node_pruning(x, y, graph, r_lower, r_upper, evaluator, on_event)
            if cx <= cy:
                break
        if not y.lower_adjacent and not r_lower.covers(y.element):
            # flag soundness: an empty flag must mean every neighbour on that
            # side is really covered, or the interval removal would be unsound
            assert all(
                r_lower.covers(y.element ^ (1 << b)) for b in range(n) if y.element >> b & 1
            )
            lower_pruning(y, graph, r_lower, on_event)
        if not y.upper_adjacent and not r_upper.covers(y.element):
            assert all(
                r_upper.covers(y.element | (1 << b)) for b in range(n) if not y.element >> b & 1
            )
            upper_pruning(y, graph, r_upper, on_event)
        if not y.lower_adjacent and not y.upper_adjacent:
            graph.pop(y.element, None)
        stack[:] = [node for node in stack if graph.get(node.element) is node]
    for node in graph.values():
        if not node.lower_adjacent:
            r_lower.update(node.element)
            if on_event:
                on_event({"event": "restrict", "side": "lower", "element": node.element})
        if not node.upper_adjacent:
            r_upper.update(node.element)
            if on_event:
                on_event({"event": "restrict", "side": "upper", "element": node.element})
    return minima


def ucs_solve(
    n: int,
    cost: Instance | Callable[[int], float],
    seed: int = 0,
    p_up: float = 0.5,
    node_budget: int | None = None,
    cost_target: float | None = None,
    evaluator: CostEvaluator | None = None,
    on_event: EventCallback | None = None,
) -> SearchReport:
    """Solve the lattice minimization problem; optimal on chain-U-shaped costs.

    Terminates on arbitrary costs: each iteration removes at least its seed
    element from the remaining space whether or not a DFS runs.
    """
    check_degree(n)
    ev = evaluator or CostEvaluator(cost, n=n, node_budget=node_budget, cost_target=cost_target)
    rng = random.Random(seed)
    full = full_set(n)
    r_lower = RestrictionSet(LOWER, n)
    r_upper = RestrictionSet(UPPER, n)
    minima: dict[int, float] = {}
    dfs_calls = 0
    minmax_calls = 0
    budget_exhausted = False
    started = time.perf_counter()
    try:
        while True:
            going_up = select_direction(rng, p_up) == UP
            minmax_calls += 1
            if going_up:
                a = minimal_element(n, r_lower)
            else:
                a = maximal_element(n, r_upper)
            if a is None:
                break
            blocked = r_lower.covers(a) if not going_up else r_upper.covers(a)
            if not blocked:
                minima[a] = ev.evaluate(a)
                if on_event:
                    on_event({"event": "push", "element": a, "cost": minima[a]})
            if going_up:
                r_lower.update(a)
                if on_event:
                    on_event({"event": "restrict", "side": "lower", "element": a})
            else:
                r_upper.update(a)
                if on_event:
                    on_event({"event": "restrict", "side": "upper", "element": a})
            if blocked:
                continue
            if ev.target_reached:
                break
            if going_up:
                seed_node = Node(a, full ^ a, 0, full ^ a)
            else:
                seed_node = Node(a, a, a, 0)
            dfs_calls += 1
            dfs(seed_node, n, r_lower, r_upper, ev, minima, on_event)
            if ev.target_reached:
                break
    except BudgetExhausted:
        budget_exhausted = True
    return conclude(
        "ucs",
        n,
        ev,
        minima,
        started,
        dfs_calls=dfs_calls,
        minmax_calls=minmax_calls,
        budget_exhausted=budget_exhausted,
    )
