"""Cost functions, instances, and the instrumented evaluator.

Three instance kinds are supported:

* ``subset_sum``: weights w and target t, cost(X) = |t - sum of w over X|.
  Along any chain the weight sum is monotone, so the absolute gap to the
  target is U-shaped on every chain; these are the synthetic "hard"
  instances used by the benchmark protocols.
* ``explicit``: a total cost table over all 2**n subsets, used for
  regression fixtures (searched counter-examples in particular).
* ``mce``: a penalized mean conditional entropy over a binary sample
  table, the cost used for classifier window design. Not guaranteed
  U-shaped on empirical data.

The CostEvaluator wraps a cost function with memoization, the
computed-nodes counter shared by every solver comparison, wall-time
accounting, and the two stop criteria (node budget, cost target).
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

from .lattice import check_degree, check_element, parse_element, render_element

SUBSET_SUM = "subset_sum"
MCE = "mce"
EXPLICIT = "explicit"

# An explicit table needs all 2**n keys; past this degree the file format is
# not a sane way to describe an instance.
MAX_EXPLICIT_DEGREE = 24

DEFAULT_WEIGHT_MAX = 10_000


@dataclass(frozen=True)
class SampleTable:
    """Binary training rows: (observed feature mask, binary label)."""

    n: int
    rows: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        check_degree(self.n)
        if not self.rows:
            raise ValueError("a sample table needs at least one row")
        for x, y in self.rows:
            check_element(x, self.n)
            if y not in (0, 1):
                raise ValueError(f"labels must be 0 or 1, got {y!r}")

    @property
    def t(self) -> int:
        """Total number of samples."""
        return len(self.rows)


@dataclass(frozen=True)
class Instance:
    n: int
    kind: str
    weights: tuple[int, ...] | None = None
    target: int | None = None
    costs: tuple[float, ...] | None = None  # indexed by element mask
    samples: SampleTable | None = None

    def __post_init__(self) -> None:
        check_degree(self.n)
        if self.kind == SUBSET_SUM:
            if self.weights is None or self.target is None:
                raise ValueError("subset_sum instances need weights and target")
            if len(self.weights) != self.n:
                raise ValueError("weights length must equal the degree")
            if any(w < 0 for w in self.weights) or self.target < 0:
                raise ValueError("weights and target must be non-negative")
        elif self.kind == EXPLICIT:
            if self.n > MAX_EXPLICIT_DEGREE:
                raise ValueError(f"explicit instances capped at degree {MAX_EXPLICIT_DEGREE}")
            if self.costs is None or len(self.costs) != 1 << self.n:
                raise ValueError("explicit instances need a cost for every subset")
            if any(c < 0 for c in self.costs):
                raise ValueError("costs must be non-negative")
        elif self.kind == MCE:
            if self.samples is None:
                raise ValueError("mce instances need a sample table")
            if self.samples.n != self.n:
                raise ValueError("sample width must equal the degree")
        else:
            raise ValueError(f"unknown instance kind {self.kind!r}")

    def cost_function(self) -> Callable[[int], float]:
        if self.kind == SUBSET_SUM:
            weights, target = self.weights, self.target

            def subset_sum(x: int) -> float:
                s = 0
                while x:
                    b = x & -x
                    s += weights[b.bit_length() - 1]
                    x ^= b
                return float(abs(target - s))

            return subset_sum
        if self.kind == EXPLICIT:
            table = self.costs
            return lambda x: table[x]
        samples = self.samples
        return lambda x: mce_cost(samples, x)


def subset_sum_cost(weights, target: int, x: int) -> float:
    """|target - sum of weights over the members of x|."""
    s = 0
    while x:
        b = x & -x
        s += weights[b.bit_length() - 1]
        x ^= b
    return float(abs(target - s))


def mce_cost(samples: SampleTable, x: int) -> float:
    """Penalized mean conditional entropy of the label given the features in x.

    Rows are projected onto x (masking is a faithful key because x is fixed
    across rows). Values observed exactly once contribute 1/t each; values
    observed at least twice contribute their empirical weight times the
    binary entropy (bits) of the label within the group, with 0*log 0 = 0.
    """
    check_element(x, samples.n)
    counts: dict[int, list[int]] = {}
    for rx, y in samples.rows:
        key = rx & x
        c = counts.get(key)
        if c is None:
            counts[key] = c = [0, 0]
        c[y] += 1
    t = samples.t
    singletons = 0
    acc = 0.0
    for c0, c1 in counts.values():
        total = c0 + c1
        if total == 1:
            singletons += 1
            continue
        if c0 and c1:
            p0 = c0 / total
            p1 = c1 / total
            acc += -(p0 * math.log2(p0) + p1 * math.log2(p1)) * (total / t)
    return singletons / t + acc


class BudgetExhausted(Exception):
    """Control signal: the node budget is spent, solvers unwind and report best-so-far."""


class CostEvaluator:
    """Memoizing cost oracle with instrumentation and stop criteria.

    computed_nodes equals the number of distinct elements evaluated; repeat
    lookups hit the memo and do not count. With a node budget, the call that
    would exceed the budget is never performed: BudgetExhausted is raised
    instead. With a cost target, target_reached latches as soon as a freshly
    computed value is <= the target; solvers poll the flag.
    """

    __slots__ = (
        "fn",
        "n",
        "memo",
        "node_budget",
        "cost_target",
        "target_reached",
        "elapsed_in_cost",
        "best_element",
        "best_cost",
    )

    def __init__(
        self,
        cost: Instance | Callable[[int], float],
        n: int | None = None,
        node_budget: int | None = None,
        cost_target: float | None = None,
    ) -> None:
        if isinstance(cost, Instance):
            self.fn = cost.cost_function()
            self.n = cost.n
        else:
            if n is None:
                raise ValueError("a bare cost callable needs an explicit degree")
            check_degree(n)
            self.fn = cost
            self.n = n
        if node_budget is not None and (not isinstance(node_budget, int) or node_budget < 0):
            raise ValueError(f"node budget must be a non-negative int, got {node_budget!r}")
        self.memo: dict[int, float] = {}
        self.node_budget = node_budget
        self.cost_target = cost_target
        self.target_reached = False
        self.elapsed_in_cost = 0.0
        self.best_element: int | None = None
        self.best_cost: float | None = None

    @property
    def computed_nodes(self) -> int:
        return len(self.memo)

    def evaluate(self, x: int) -> float:
        memo = self.memo
        value = memo.get(x)
        if value is not None:
            return value
        if x < 0 or x >> self.n:
            raise ValueError(f"element {x} out of range for degree {self.n}")
        if self.node_budget is not None and len(memo) >= self.node_budget:
            raise BudgetExhausted
        start = time.perf_counter()
        value = self.fn(x)
        self.elapsed_in_cost += time.perf_counter() - start
        memo[x] = value
        if self.best_cost is None or value < self.best_cost:
            self.best_element = x
            self.best_cost = value
        if self.cost_target is not None and value <= self.cost_target:
            self.target_reached = True
        return value

    def known_cost(self, x: int) -> float | None:
        return self.memo.get(x)


class Witness(NamedTuple):
    """A chain triple z <= y <= x with cost(y) > max(cost(z), cost(x))."""

    z: int
    y: int
    x: int


def verify_decomposable(
    instance: Instance,
    mode: str = "exhaustive",
    chains: int = 1000,
    seed: int = 0,
) -> Witness | None:
    """Check that the instance cost is U-shaped along chains.

    Exhaustive mode covers every nested triple (degree capped at 10): a
    violation at y exists iff some subset of y and some superset of y are
    both strictly cheaper, so per-element subset/superset minima decide it.
    Sampled mode draws random maximal chains (seeded permutations) and
    checks every index triple along each. Returns the first violating
    triple found, or None.
    """
    fn = instance.cost_function()
    n = instance.n
    if mode == "exhaustive":
        if n > 10:
            raise ValueError("exhaustive verification is capped at degree 10")
        size = 1 << n
        cost = [fn(m) for m in range(size)]
        min_below = cost[:]
        min_above = cost[:]
        for b in range(n):
            bit = 1 << b
            for m in range(size):
                if m & bit:
                    if min_below[m ^ bit] < min_below[m]:
                        min_below[m] = min_below[m ^ bit]
                else:
                    if min_above[m | bit] < min_above[m]:
                        min_above[m] = min_above[m | bit]
        for y in range(size):
            cy = cost[y]
            if min_below[y] < cy and min_above[y] < cy:
                z = next(s for s in range(size) if s & ~y == 0 and cost[s] < cy)
                x = next(s for s in range(size) if y & ~s == 0 and cost[s] < cy)
                return Witness(z, y, x)
        return None
    if mode != "sampled":
        raise ValueError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")
    rng = random.Random(seed)
    order = list(range(n))
    for _ in range(chains):
        rng.shuffle(order)
        chain = [0]
        m = 0
        for b in order:
            m |= 1 << b
            chain.append(m)
        values = [fn(e) for e in chain]
        for j in range(1, n):
            vj = values[j]
            i = next((i for i in range(j) if values[i] < vj), None)
            if i is None:
                continue
            k = next((k for k in range(j + 1, n + 1) if values[k] < vj), None)
            if k is not None:
                return Witness(chain[i], chain[j], chain[k])
    return None


def generate_subset_sum_instance(
    n: int, seed: int, weight_max: int = DEFAULT_WEIGHT_MAX
) -> Instance:
    """Seeded random subset-sum instance: weights in [1, weight_max], target in [0, sum]."""
    check_degree(n)
    if weight_max < 1:
        raise ValueError("weight_max must be at least 1")
    rng = random.Random(seed)
    weights = tuple(rng.randint(1, weight_max) for _ in range(n))
    target = rng.randint(0, sum(weights))
    return Instance(n=n, kind=SUBSET_SUM, weights=weights, target=target)


def generate_sample_table(
    n: int,
    rows: int,
    seed: int,
    planted_size: int | None = None,
    noise: float = 0.1,
) -> SampleTable:
    """Synthetic sample table with a planted informative feature subset.

    The label is the parity of the planted features, flipped with the given
    noise probability; the remaining features are uninformative.
    """
    check_degree(n)
    if rows < 1:
        raise ValueError("need at least one row")
    rng = random.Random(seed)
    if planted_size is None:
        planted_size = max(1, n // 3)
    planted = 0
    for b in rng.sample(range(n), planted_size):
        planted |= 1 << b
    out = []
    for _ in range(rows):
        x = rng.getrandbits(n)
        y = (x & planted).bit_count() & 1
        if rng.random() < noise:
            y ^= 1
        out.append((x, y))
    return SampleTable(n=n, rows=tuple(out))


def generate_decomposable_explicit(
    n: int,
    seed: int,
    weight_max: int = 4,
    noise: float = 0.0,
    max_attempts: int = 1000,
) -> Instance:
    """Random explicit instance that is U-shaped along every chain.

    Costs are max(0, omitted-weight excess, included-weight excess) for two
    independent integer weight vectors: the first term falls along any
    chain, the second rises, so their maximum is U-shaped on every chain by
    construction. Integer weights leave exact plateaus, the landscape class
    where the uncorrected search loses minima. Optional uniform noise
    reshapes the plateaus; noisy candidates are rejected and redrawn until
    the chain shape verifies (noise=0 always passes).
    """
    check_degree(n)
    rng = random.Random(seed)
    size = 1 << n
    for _ in range(max_attempts):
        omit = [rng.randint(0, weight_max) for _ in range(n)]
        include = [rng.randint(0, weight_max) for _ in range(n)]
        total_omit = sum(omit)
        slack_omit = rng.randint(0, max(1, total_omit))
        slack_include = rng.randint(0, max(1, sum(include)))
        s_omit = [0] * size
        s_include = [0] * size
        for m in range(1, size):
            b = m & -m
            i = b.bit_length() - 1
            s_omit[m] = s_omit[m ^ b] + omit[i]
            s_include[m] = s_include[m ^ b] + include[i]
        costs = tuple(
            max(0, total_omit - s_omit[m] - slack_omit, s_include[m] - slack_include)
            + (rng.random() * noise if noise else 0.0)
            for m in range(size)
        )
        instance = Instance(n=n, kind=EXPLICIT, costs=costs)
        if verify_decomposable(instance) is None:
            return instance
    raise RuntimeError(f"no decomposable candidate in {max_attempts} attempts")


def save_instance(instance: Instance, path: str | Path) -> None:
    """Write the JSON instance form (subset_sum or explicit kinds)."""
    if instance.kind == SUBSET_SUM:
        payload = {
            "n": instance.n,
            "kind": SUBSET_SUM,
            "weights": list(instance.weights),
            "target": instance.target,
        }
    elif instance.kind == EXPLICIT:
        payload = {
            "n": instance.n,
            "kind": EXPLICIT,
            "costs": {
                render_element(m, instance.n): instance.costs[m]
                for m in range(1 << instance.n)
            },
        }
    else:
        raise ValueError("mce instances are stored as sample files, use save_samples")
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_instance(path: str | Path) -> Instance:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: instance file must hold a JSON object")
    kind = payload.get("kind")
    n = payload.get("n")
    if not isinstance(n, int):
        raise ValueError(f"{path}: missing integer field 'n'")
    check_degree(n)
    if kind == SUBSET_SUM:
        weights = payload.get("weights")
        target = payload.get("target")
        if not isinstance(weights, list) or not all(isinstance(w, int) for w in weights):
            raise ValueError(f"{path}: 'weights' must be a list of ints")
        if not isinstance(target, int):
            raise ValueError(f"{path}: 'target' must be an int")
        return Instance(n=n, kind=SUBSET_SUM, weights=tuple(weights), target=target)
    if kind == EXPLICIT:
        raw = payload.get("costs")
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: 'costs' must be an object")
        if n > MAX_EXPLICIT_DEGREE:
            raise ValueError(f"{path}: explicit instances capped at degree {MAX_EXPLICIT_DEGREE}")
        size = 1 << n
        if len(raw) != size:
            raise ValueError(f"{path}: explicit cost table must have all {size} subsets")
        costs = [0.0] * size
        for key, value in raw.items():
            m = parse_element(key, n)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"{path}: cost of {key!r} must be a number")
            costs[m] = float(value)
        return Instance(n=n, kind=EXPLICIT, costs=tuple(costs))
    raise ValueError(f"{path}: unknown instance kind {kind!r}")


def save_samples(table: SampleTable, path: str | Path) -> None:
    """Write the text sample form: header line, then '<vector> <label>' rows."""
    lines = [f"n={table.n} t={table.t}"]
    lines.extend(f"{render_element(x, table.n)} {y}" for x, y in table.rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_samples(path: str | Path) -> SampleTable:
    raw = Path(path).read_text(encoding="utf-8").splitlines()
    lines = [line.strip() for line in raw if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty sample file")
    declared_n = declared_t = None
    if lines[0].startswith("n="):
        head = lines.pop(0).split()
        try:
            fields = dict(part.split("=", 1) for part in head)
            declared_n = int(fields["n"])
            declared_t = int(fields["t"])
        except (ValueError, KeyError) as exc:
            raise ValueError(f"{path}: malformed header {head!r}") from exc
    rows = []
    n = declared_n
    for line in lines:
        parts = line.split()
        if len(parts) != 2 or parts[1] not in ("0", "1"):
            raise ValueError(f"{path}: malformed sample row {line!r}")
        if n is None:
            n = len(parts[0])
        rows.append((parse_element(parts[0], n), int(parts[1])))
    if declared_t is not None and declared_t != len(rows):
        raise ValueError(f"{path}: header declares t={declared_t} but file has {len(rows)} rows")
    return SampleTable(n=n, rows=tuple(rows))


def mce_instance(table: SampleTable) -> Instance:
    return Instance(n=table.n, kind=MCE, samples=table)
