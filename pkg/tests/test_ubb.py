from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_minima
from ucurve.cost import Instance, generate_decomposable_explicit, generate_subset_sum_instance
from ucurve.ubb import ubb_solve


def test_n2_example(explicit_n2):
    report = ubb_solve(2, explicit_n2)
    assert report.minima_vectors() == ["10"]
    assert report.best_cost == 1.0


def test_monotone_cost_evaluates_root_and_children_only():
    report = ubb_solve(5, lambda m: float(bin(m).count("1")))
    assert report.computed_nodes == 6
    assert report.minima == [0]


def test_subset_sum_example():
    inst = Instance(n=3, kind="subset_sum", weights=(2, 3, 5), target=5)
    report = ubb_solve(3, inst)
    assert report.minima_vectors() == ["001", "110"]


def test_visit_once_under_constant_cost():
    for n in (4, 8, 12, 16):
        report = ubb_solve(n, lambda m: 1.0)
        assert report.computed_nodes == 2**n


def test_optimal_on_random_instances():
    for n in range(3, 10):
        for seed in range(15):
            inst = generate_subset_sum_instance(n, 7 * n + seed)
            minima, cost = brute_minima(inst)
            report = ubb_solve(n, inst)
            assert report.best_cost == cost
            assert set(report.minima) == minima
    for seed in range(20):
        inst = generate_decomposable_explicit(5, 400 + seed)
        _, cost = brute_minima(inst)
        assert ubb_solve(5, inst).best_cost == cost


@given(st.integers(min_value=0, max_value=50), st.integers(min_value=0, max_value=999))
@settings(max_examples=40, deadline=None)
def test_budget_contract(budget, seed):
    inst = generate_subset_sum_instance(6, seed)
    report = ubb_solve(6, inst, node_budget=budget)
    assert report.computed_nodes <= budget
    if report.budget_exhausted and budget > 0:
        assert report.minima


def test_cost_target_stops_early():
    inst = generate_subset_sum_instance(9, 5)
    _, optimum = brute_minima(inst)
    targeted = ubb_solve(9, inst, cost_target=optimum)
    assert targeted.target_reached
    assert targeted.best_cost == optimum
    assert targeted.computed_nodes <= ubb_solve(9, inst).computed_nodes
