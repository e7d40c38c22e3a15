import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robustnet import sptree as spt
from robustnet.detsolve import per_scenario_optima
from robustnet.exceptions import InfeasibleError, SizeLimitError
from robustnet.generators import (
    random_assignment_instance,
    random_connected_instance,
    random_sp_instance,
)
from robustnet.model import Graph, RobustInstance, ScenarioSet, per_scenario_costs, validate_solution
from robustnet.robust import (
    enumerate_feasible,
    mean_scenario_heuristic,
    pareto_dp,
    pareto_front,
    solve_exact,
    solve_minmax_exact,
    solve_regret_exact,
)

from oracles import feasible_sets, robust_optimum

seeds = st.integers(0, 2**32 - 1)
objectives = st.sampled_from(["minmax", "regret"])


def test_sat3_counts_and_values(sat3_path):
    inst, _ = sat3_path
    assert sum(1 for _ in enumerate_feasible(inst)) == 27
    for method in ("brute", "dp"):
        assert solve_minmax_exact(inst, method).value == 1
        assert solve_regret_exact(inst, method).value == 1


def test_sample_cut_has_27_minimal_cuts(sat3_cut):
    inst, _ = sat3_cut
    cuts = list(enumerate_feasible(inst))
    assert len(cuts) == 27
    assert all(len(c) == 3 and validate_solution(inst, c) == [] for c in cuts)


def test_unsat_level0_optimum_is_two(unsat_path):
    inst, _ = unsat_path
    assert solve_minmax_exact(inst, "brute").value == 2
    assert solve_minmax_exact(inst, "dp").value == 2


def test_single_edge_has_one_solution():
    inst = RobustInstance("path", Graph(2, ((0, 1),), True, 0, 1), ScenarioSet(((),)), spt.Leaf(0, 0, 1))
    assert [s.sorted() for s in enumerate_feasible(inst)] == [(0,)]


def test_parallel_zero_edges_collapse():
    tree = spt.Parallel((spt.Leaf(0, 0, 1), spt.Leaf(1, 0, 1)), 0, 1)
    inst = RobustInstance("path", Graph(2, ((0, 1), (0, 1)), True, 0, 1), ScenarioSet(((),)), tree)
    res = pareto_dp(inst)
    assert res.value == 0
    assert len(pareto_front(inst)) == 1


def test_enumeration_limit(sat3_path):
    inst, _ = sat3_path
    with pytest.raises(SizeLimitError):
        list(enumerate_feasible(inst, limit=10))
    with pytest.raises(SizeLimitError):
        solve_exact(inst, method="brute", limit=10)


def test_infeasible_path():
    g = Graph(3, ((0, 1),), True, 0, 2)
    inst = RobustInstance("path", g, ScenarioSet(((),)))
    with pytest.raises(InfeasibleError):
        solve_exact(inst)


def test_heuristic_on_sat3(sat3_path):
    inst, _ = sat3_path
    res = mean_scenario_heuristic(inst)
    assert validate_solution(inst, res.solution) == []
    assert res.value <= 6 * 1
    assert res.value == int(per_scenario_costs(inst, res.solution).max())


@given(seeds, st.integers(1, 10), st.integers(1, 4), objectives, st.booleans())
def test_sp_exact_matches_oracle(seed, m, k, objective, directed):
    inst = random_sp_instance(np.random.default_rng(seed), m, k, "path", directed)
    ref = robust_optimum(inst, objective)
    for method in ("brute", "dp"):
        res = solve_exact(inst, objective, method)
        assert res.value == ref
        assert validate_solution(inst, res.solution) == []


@given(seeds, st.integers(1, 9), st.integers(1, 3), objectives)
def test_cut_exact_matches_oracle(seed, m, k, objective):
    inst = random_sp_instance(np.random.default_rng(seed), m, k, "cut", False)
    ref = robust_optimum(inst, objective)
    for method in ("brute", "dp"):
        res = solve_exact(inst, objective, method)
        assert res.value == ref
        assert validate_solution(inst, res.solution) == []


@given(seeds, st.integers(2, 6), st.integers(0, 4), st.integers(1, 3), objectives)
def test_tree_search_matches_oracle(seed, n, extra, k, objective):
    inst = random_connected_instance(np.random.default_rng(seed), n, n - 1 + extra, k)
    res = solve_exact(inst, objective)
    assert res.value == robust_optimum(inst, objective)
    assert validate_solution(inst, res.solution) == []


@given(seeds, st.integers(1, 4), st.integers(1, 3), objectives)
def test_assignment_matches_oracle(seed, side, k, objective):
    inst = random_assignment_instance(np.random.default_rng(seed), side, k)
    res = solve_exact(inst, objective)
    assert res.value == robust_optimum(inst, objective)


@given(seeds, st.integers(1, 10), st.integers(1, 4), objectives)
def test_pruning_does_not_change_optimum(seed, m, k, objective):
    inst = random_sp_instance(np.random.default_rng(seed), m, k, "path")
    pruned = pareto_dp(inst, objective=objective)
    full = pareto_dp(inst, objective=objective, prune=False)
    loose = pareto_dp(inst, objective=objective, upper_bound=None)
    assert pruned.value == full.value == loose.value


@given(seeds, st.integers(1, 9), st.integers(1, 4))
def test_pareto_front_is_the_nondominated_set(seed, m, k):
    inst = random_sp_instance(np.random.default_rng(seed), m, k, "path")
    dense = inst.cost_matrix()
    vecs = {tuple(int(x) for x in dense[:, sorted(s)].sum(axis=1)) for s in feasible_sets(inst)}
    nondom = {
        v for v in vecs if not any(w != v and all(a <= b for a, b in zip(w, v)) for w in vecs)
    }
    front = pareto_front(inst)
    assert {lab.costs for lab in front} == nondom
    for lab in front:
        assert tuple(per_scenario_costs(inst, lab.edges)) == lab.costs


@given(seeds, st.integers(1, 8), st.integers(1, 5), objectives)
def test_heuristic_is_k_approximate(seed, m, k, objective):
    inst = random_sp_instance(np.random.default_rng(seed), m, k, "path")
    fstar = per_scenario_optima(inst)
    exact = solve_exact(inst, objective, fstar=fstar).value
    heur = mean_scenario_heuristic(inst, objective, fstar=fstar).value
    assert exact <= heur <= k * exact


@given(seeds, st.integers(1, 8), st.integers(1, 4))
def test_identical_scenarios_make_heuristic_exact(seed, m, k):
    inst = random_sp_instance(np.random.default_rng(seed), m, 1, "path")
    same = RobustInstance(inst.family, inst.graph, ScenarioSet(inst.scenarios.rows * k), inst.sp_tree)
    assert mean_scenario_heuristic(same).value == solve_exact(same).value


@given(seeds, st.integers(1, 8), st.integers(1, 4))
def test_regret_bounds(seed, m, k):
    inst = random_sp_instance(np.random.default_rng(seed), m, k, "path")
    mm = solve_exact(inst, "minmax").value
    rg = solve_exact(inst, "regret").value
    assert 0 <= rg <= mm


@given(seeds, st.integers(1, 8), st.integers(1, 4))
def test_results_are_deterministic(seed, m, k):
    inst = random_sp_instance(np.random.default_rng(seed), m, k, "path")
    assert solve_exact(inst) == solve_exact(inst)
    assert solve_exact(inst, method="brute") == solve_exact(inst, method="brute")


def test_brute_returns_lexicographically_smallest_optimum(sat3_path):
    inst, _ = sat3_path
    dense = inst.cost_matrix()
    best = min(
        (int(dense[:, sorted(s)].sum(axis=1).max()), tuple(sorted(s))) for s in feasible_sets(inst)
    )
    res = solve_exact(inst, method="brute")
    assert (res.value, res.solution.sorted()) == best


def test_dp_rejects_other_families():
    inst = random_connected_instance(np.random.default_rng(0), 4, 5, 2)
    with pytest.raises(ValueError):
        pareto_dp(inst)
    with pytest.raises(ValueError):
        solve_exact(inst, "median")
