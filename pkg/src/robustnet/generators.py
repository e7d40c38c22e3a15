"""Seeded random instances for property tests and the ratio harness."""

from __future__ import annotations

import numpy as np

from . import sptree as spt
from .model import Graph, RobustInstance, ScenarioSet


def _random_rows(rng, edge_count, scenario_count, max_cost, zero_prob):
    costs = rng.integers(1, max_cost + 1, size=(scenario_count, edge_count))
    costs[rng.random(size=costs.shape) < zero_prob] = 0
    return ScenarioSet.from_dense(costs)


def random_sp_instance(
    rng,
    n_edges: int,
    n_scenarios: int,
    family: str = "path",
    directed: bool = True,
    max_cost: int = 4,
    zero_prob: float = 0.3,
) -> RobustInstance:
    """Random two-terminal series-parallel instance with its decomposition.

    Source is node 0 and sink node 1; parallel edges may occur.
    """
    rng = np.random.default_rng(rng)
    edges = []
    node_count = [2]

    def build(n, u, v):
        if n == 1:
            edges.append((u, v))
            return spt.Leaf(len(edges) - 1, u, v)
        k = int(rng.integers(1, n))
        if rng.random() < 0.5:
            w = node_count[0]
            node_count[0] += 1
            return spt.series([build(k, u, w), build(n - k, w, v)])
        return spt.parallel([build(k, u, v), build(n - k, u, v)])

    tree = build(n_edges, 0, 1)
    graph = Graph(node_count[0], tuple(edges), directed, 0, 1)
    rows = _random_rows(rng, len(edges), n_scenarios, max_cost, zero_prob)
    return RobustInstance(family, graph, rows, tree, {"generator": "random-sp"})


def random_connected_instance(
    rng, n_nodes: int, n_edges: int, n_scenarios: int, max_cost: int = 4, zero_prob: float = 0.3
) -> RobustInstance:
    """Random connected undirected multigraph for the spanning tree family."""
    rng = np.random.default_rng(rng)
    edges = []
    for v in range(1, n_nodes):
        edges.append((int(rng.integers(0, v)), v))
    while len(edges) < n_edges:
        u, v = rng.choice(n_nodes, size=2, replace=False)
        edges.append((int(min(u, v)), int(max(u, v))))
    graph = Graph(n_nodes, tuple(edges), False)
    rows = _random_rows(rng, len(edges), n_scenarios, max_cost, zero_prob)
    return RobustInstance("tree", graph, rows, None, {"generator": "random-connected"})


def random_assignment_instance(
    rng, side: int, n_scenarios: int, max_cost: int = 4, zero_prob: float = 0.3
) -> RobustInstance:
    """Complete bipartite graph ``K_{side,side}``; left nodes come first."""
    rng = np.random.default_rng(rng)
    edges = tuple((i, side + j) for i in range(side) for j in range(side))
    graph = Graph(2 * side, edges, False)
    rows = _random_rows(rng, len(edges), n_scenarios, max_cost, zero_prob)
    return RobustInstance("assignment", graph, rows, None, {"generator": "random-bipartite"})


def random_instance(rng, family: str, size: int, n_scenarios: int, max_cost: int = 4) -> RobustInstance:
    """Dispatch on family; ``size`` is the edge count (side length for assignment)."""
    rng = np.random.default_rng(rng)
    if family == "path":
        return random_sp_instance(rng, size, n_scenarios, "path", True, max_cost)
    if family == "cut":
        return random_sp_instance(rng, size, n_scenarios, "cut", False, max_cost)
    if family == "tree":
        n_nodes = max(2, (size * 2) // 3)
        return random_connected_instance(rng, n_nodes, max(size, n_nodes - 1), n_scenarios, max_cost)
    if family == "assignment":
        return random_assignment_instance(rng, size, n_scenarios, max_cost)
    raise ValueError(f"unknown family {family!r}")
