import numpy as np
import pytest

from robustnet.model import (
    Graph,
    RobustInstance,
    ScenarioSet,
    Solution,
    cost,
    evaluate,
    minmax_value,
    per_scenario_costs,
    regret_value,
    validate_instance,
    validate_solution,
    check_instance,
)
from robustnet.exceptions import InvalidInstanceError
from robustnet.reduce import path_connector_edge, path_dummy_edge, path_literal_edge


def _path_through(choices):
    """Path picking literal position ``choices[i]`` in gadget ``i``."""
    edges = []
    for i, j in enumerate(choices):
        edges += [path_literal_edge(i, j), path_dummy_edge(i, j)]
        if i < len(choices) - 1:
            edges.append(path_connector_edge(i))
    return Solution(edges)


def test_generated_sat3_is_valid(sat3_path):
    inst, _ = sat3_path
    assert validate_instance(inst) == []


def test_unknown_edge_in_scenario(sat3_path):
    inst, _ = sat3_path
    M = inst.edge_count
    bad = RobustInstance("path", inst.graph, ScenarioSet((((M, 1),),)), inst.sp_tree)
    assert any("unknown edge" in p for p in validate_instance(bad))
    with pytest.raises(InvalidInstanceError):
        check_instance(bad)


def test_cut_without_sink():
    g = Graph(2, ((0, 1),), False, 0, None)
    probs = validate_instance(RobustInstance("cut", g, ScenarioSet(((),))))
    assert any("sink required" in p for p in probs)


def test_empty_scenario_set_rejected():
    g = Graph(2, ((0, 1),), True, 0, 1)
    assert any("K = 0" in p for p in validate_instance(RobustInstance("path", g, ScenarioSet(()))))


def test_assignment_must_be_bipartite():
    g = Graph(3, ((0, 1), (1, 2), (0, 2)), False)
    probs = validate_instance(RobustInstance("assignment", g, ScenarioSet(((),))))
    assert any("bipartite" in p for p in probs)


def test_cost_examples(sat3_path):
    inst, _ = sat3_path
    # literal arcs x1@C1, x2@C2, x3@C3 plus dummies; S1 charges (s, v^1_1)
    X = _path_through((0, 1, 2))
    assert cost(inst, X, 0) == 1
    assert cost(inst, Solution(), 3) == 0
    # S6 charges (s_2, v^2_1) and (s_3, v^3_1)
    both = Solution((path_literal_edge(1, 0), path_literal_edge(2, 0)))
    assert cost(inst, both, 5) == 2
    with pytest.raises(IndexError):
        cost(inst, X, 6)


def test_witness_minmax_is_min_over_all_literal_selections(sat3_path):
    inst, _ = sat3_path
    # oracle: every one of the 27 gadget selections, evaluated densely
    dense = inst.cost_matrix()
    values = {}
    for a in range(3):
        for b in range(3):
            for c in range(3):
                X = _path_through((a, b, c))
                values[(a, b, c)] = int(dense[:, X.sorted()].sum(axis=1).max())
                assert minmax_value(inst, X) == values[(a, b, c)]
    assert min(values.values()) == 1
    # lowest true literal per clause under all-true: x1@C1, x2@C2, x1@C3
    assert values[(0, 1, 0)] == 1


def test_regret_self_difference_and_length_check(sat3_path):
    inst, _ = sat3_path
    X = _path_through((1, 1, 1))
    assert regret_value(inst, X, per_scenario_costs(inst, X)) == 0
    assert regret_value(inst, X, np.zeros(6)) == minmax_value(inst, X)
    with pytest.raises(ValueError):
        regret_value(inst, X, [0, 0])


def test_evaluate_report(sat3_path):
    inst, _ = sat3_path
    X = _path_through((0, 1, 0))
    rep = evaluate(inst, X, fstar=np.zeros(6))
    assert rep.minmax_value == 1 and rep.regret_value == 1
    assert list(rep.per_scenario_costs) == list(per_scenario_costs(inst, X))


def test_validate_solution_families(sat3_path, sat3_cut):
    path_inst, _ = sat3_path
    assert validate_solution(path_inst, _path_through((0, 0, 0))) == []
    assert validate_solution(path_inst, [0, 3]) != []
    assert validate_solution(path_inst, list(_path_through((0, 0, 0))) + [1]) != []
    cut_inst, _ = sat3_cut
    assert validate_solution(cut_inst, [0, 4, 8]) == []
    assert validate_solution(cut_inst, [0, 4]) != []

    tri = Graph(3, ((0, 1), (1, 2), (0, 2)), False)
    tree = RobustInstance("tree", tri, ScenarioSet(((),)))
    assert validate_solution(tree, [0, 1]) == []
    assert validate_solution(tree, [0]) != []
    sq = Graph(4, ((0, 2), (0, 3), (1, 2), (1, 3)), False)
    match = RobustInstance("assignment", sq, ScenarioSet(((),)))
    assert validate_solution(match, [0, 3]) == []
    assert validate_solution(match, [0, 2]) != []


def test_dense_round_trip():
    m = np.array([[0, 2, 0], [1, 0, 3]])
    s = ScenarioSet.from_dense(m)
    assert s.rows == (((1, 2),), ((0, 1), (2, 3)))
    assert (s.dense(3) == m).all()
