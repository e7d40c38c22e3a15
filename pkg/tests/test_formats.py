import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robustnet.exceptions import FormatError
from robustnet.formats import (
    canonical,
    parse_instance,
    parse_solution,
    serialize_instance,
    serialize_solution,
)
from robustnet.generators import random_assignment_instance, random_sp_instance
from robustnet.model import Solution

SMALL = """ROBUSTNET 1
problem path
directed 1
nodes 4
source 0
sink 3
edges 3
e 0 0 1
e 1 1 3
e 2 0 3
scenarios 2
s 1 0 2
s 2 2 4 1 1
sptree (P (S (L 0) (L 1)) (L 2))
end
"""


def test_parse_small():
    inst = parse_instance(SMALL)
    assert inst.family == "path" and inst.edge_count == 3
    assert inst.scenarios.rows == (((0, 2),), ((1, 1), (2, 4)))
    assert inst.cost_matrix().tolist() == [[2, 0, 0], [0, 1, 4]]


def test_round_trip_sat3(sat3_path):
    inst, _ = sat3_path
    text = serialize_instance(inst)
    back = parse_instance(text)
    assert back == inst
    body = "".join(l for l in text.splitlines(True) if not l.startswith("#"))
    assert serialize_instance(back) == body


def test_cut_golden_counts(sat3_cut):
    inst = parse_instance(serialize_instance(sat3_cut[0]))
    assert (inst.edge_count, inst.scenario_count) == (9, 6)
    assert not inst.graph.directed


@pytest.mark.parametrize(
    "mutate",
    [
        lambda t: t.replace("scenarios 2", "scenarios -1"),
        lambda t: t.replace("ROBUSTNET 1", "ROBUSTNET 2"),
        lambda t: t.replace("problem path", "problem flow"),
        lambda t: t.replace("e 1 1 3", "e 2 1 3"),
        lambda t: t.replace("s 1 0 2", "s 1 0 -2"),
        lambda t: t.replace("end\n", ""),
        lambda t: t + "extra\n",
        lambda t: t.replace("edges 3", "edges 4"),
    ],
)
def test_parse_errors(mutate):
    with pytest.raises(FormatError):
        parse_instance(mutate(SMALL))


def test_comments_ignored():
    text = SMALL.replace("nodes 4", "nodes 4  # four nodes")
    assert parse_instance(text) == parse_instance(SMALL)


def test_solution_round_trip():
    text = serialize_solution(Solution([5, 1, 3]), 7)
    assert text == "value 7\nedges 1 3 5\n"
    assert parse_solution(text) == (7, Solution([1, 3, 5]))
    assert parse_solution("edges\n") == (None, Solution())
    with pytest.raises(FormatError):
        parse_solution("edges 1 1\n")


@given(st.integers(1, 12), st.integers(1, 4), st.integers(0, 2**32 - 1), st.booleans())
def test_round_trip_random_sp(m, k, seed, directed):
    inst = random_sp_instance(np.random.default_rng(seed), m, k, "path", directed)
    assert canonical(parse_instance(serialize_instance(inst))) == canonical(inst)


@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_round_trip_random_assignment(side, k, seed):
    inst = random_assignment_instance(np.random.default_rng(seed), side, k)
    assert parse_instance(serialize_instance(inst)) == inst
