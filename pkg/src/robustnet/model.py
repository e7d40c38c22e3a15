"""Instances, scenarios, solutions and their evaluation.

Costs are nonnegative integers.  Scenario rows are sparse: each row lists
``(edge_id, cost)`` pairs with strictly positive costs, every other edge
costing zero under that scenario.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from . import sptree as spt
from .exceptions import InvalidInstanceError

FAMILIES = ("path", "tree", "cut", "assignment")
TERMINAL_FAMILIES = ("path", "cut")


@dataclass(frozen=True)
class Graph:
    """Directed or undirected multigraph; edge ``i`` is ``edges[i] == (tail, head)``."""

    node_count: int
    edges: tuple
    directed: bool = True
    source: Optional[int] = None
    sink: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def incidence(self):
        """Adjacency lists ``node -> [(edge_id, other_end)]`` in edge-id order.

        Undirected edges appear at both endpoints.
        """
        adj = [[] for _ in range(self.node_count)]
        for eid, (u, v) in enumerate(self.edges):
            adj[u].append((eid, v))
            if not self.directed:
                adj[v].append((eid, u))
        return adj


@dataclass(frozen=True)
class ScenarioSet:
    rows: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "rows", tuple(tuple((int(e), int(c)) for e, c in row) for row in self.rows)
        )

    @property
    def count(self) -> int:
        return len(self.rows)

    def dense(self, edge_count: int) -> np.ndarray:
        """K x M integer matrix."""
        mat = np.zeros((len(self.rows), edge_count), dtype=np.int64)
        for s, row in enumerate(self.rows):
            for e, c in row:
                mat[s, e] = c
        return mat

    @classmethod
    def from_dense(cls, matrix) -> "ScenarioSet":
        matrix = np.asarray(matrix)
        return cls(
            tuple(
                tuple((int(e), int(row[e])) for e in np.flatnonzero(row)) for row in matrix
            )
        )


@dataclass(frozen=True)
class RobustInstance:
    family: str
    graph: Graph
    scenarios: ScenarioSet
    sp_tree: Optional[spt.SPTree] = None
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def edge_count(self) -> int:
        return self.graph.edge_count

    @property
    def scenario_count(self) -> int:
        return self.scenarios.count

    def cost_matrix(self) -> np.ndarray:
        return self.scenarios.dense(self.graph.edge_count)


@dataclass(frozen=True)
class Solution:
    edge_ids: frozenset

    def __init__(self, edge_ids: Iterable[int] = ()):
        object.__setattr__(self, "edge_ids", frozenset(int(e) for e in edge_ids))

    def __iter__(self):
        return iter(sorted(self.edge_ids))

    def __len__(self):
        return len(self.edge_ids)

    def __contains__(self, e):
        return e in self.edge_ids

    def sorted(self) -> tuple:
        return tuple(sorted(self.edge_ids))


@dataclass(frozen=True)
class EvalReport:
    per_scenario_costs: tuple
    minmax_value: int
    regret_value: Optional[int] = None


# -- validation -------------------------------------------------------------


def _bipartition(graph: Graph):
    """Two-colouring of the graph, or None if it is not bipartite."""
    color = [-1] * graph.node_count
    adj = Graph(graph.node_count, graph.edges, directed=False).incidence()
    for start in range(graph.node_count):
        if color[start] != -1:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for _, v in adj[u]:
                if color[v] == -1:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return None
    return color


def validate_instance(inst: RobustInstance) -> list[str]:
    """Return every violated invariant; an empty list means the instance is valid."""
    out = []
    g = inst.graph
    if inst.family not in FAMILIES:
        out.append(f"unknown problem family {inst.family!r}")
    if g.node_count < 1:
        out.append("node count must be positive")
    for eid, (u, v) in enumerate(g.edges):
        if not (0 <= u < g.node_count and 0 <= v < g.node_count):
            out.append(f"edge {eid} has an endpoint outside 0..{g.node_count - 1}")
        elif u == v:
            out.append(f"edge {eid} is a self-loop")
    needs_terminals = inst.family in TERMINAL_FAMILIES
    for name in ("source", "sink"):
        value = getattr(g, name)
        if needs_terminals and value is None:
            out.append(f"{name} required for family {inst.family}")
        elif not needs_terminals and value is not None:
            out.append(f"{name} not allowed for family {inst.family}")
        elif value is not None and not 0 <= value < g.node_count:
            out.append(f"{name} {value} outside node range")
    if needs_terminals and g.source is not None and g.source == g.sink:
        out.append("source and sink coincide")

    rows = inst.scenarios.rows
    if not rows:
        out.append("scenario set is empty (K = 0)")
    for s, row in enumerate(rows):
        seen = set()
        for e, c in row:
            if not 0 <= e < g.edge_count:
                out.append(f"scenario {s}: unknown edge {e}")
            if e in seen:
                out.append(f"scenario {s}: duplicate edge {e}")
            seen.add(e)
            if c <= 0:
                out.append(f"scenario {s}: stored cost for edge {e} must be positive")

    if inst.family == "assignment":
        if g.directed:
            out.append("assignment family requires an undirected graph")
        if _bipartition(g) is None:
            out.append("assignment family requires a bipartite graph")

    if inst.sp_tree is not None:
        if inst.family not in TERMINAL_FAMILIES:
            out.append("sptree only meaningful for path and cut families")
        out.extend(spt.check(inst.sp_tree, g.edges))
        if needs_terminals and (inst.sp_tree.left, inst.sp_tree.right) != (g.source, g.sink):
            out.append("sptree terminals differ from source/sink")
    return out


def check_instance(inst: RobustInstance) -> RobustInstance:
    """Raise :class:`InvalidInstanceError` unless ``inst`` is valid."""
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstanceError(problems)
    return inst


def _reach(adj, start, removed=frozenset(), allowed=None):
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for eid, v in adj[u]:
            if eid in removed or v in seen:
                continue
            if allowed is not None and v not in allowed:
                continue
            seen.add(v)
            queue.append(v)
    return seen


def validate_solution(inst: RobustInstance, X) -> list[str]:
    """Family-dependent feasibility check; returns a list of problems."""
    g = inst.graph
    edges = set(X.edge_ids if isinstance(X, Solution) else X)
    bad = [e for e in edges if not 0 <= e < g.edge_count]
    if bad:
        return [f"unknown edge ids {sorted(bad)}"]

    if inst.family == "path":
        out = []
        adj = g.incidence()
        used = set()
        cur = g.source
        visited = {cur}
        while cur != g.sink:
            step = [
                (e, v)
                for e, v in adj[cur]
                if e in edges and e not in used
            ]
            if len(step) != 1:
                out.append(f"path does not continue uniquely from node {cur}")
                return out
            e, v = step[0]
            if v in visited:
                return [f"path revisits node {v}"]
            used.add(e)
            visited.add(v)
            cur = v
        if used != edges:
            out.append("solution has edges off the s-t path")
        return out

    if inst.family == "tree":
        if len(edges) != g.node_count - 1:
            return [f"spanning tree needs {g.node_count - 1} edges, got {len(edges)}"]
        parent = list(range(g.node_count))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in edges:
            u, v = g.edges[e]
            ru, rv = find(u), find(v)
            if ru == rv:
                return ["edges contain a cycle"]
            parent[ru] = rv
        return []

    if inst.family == "cut":
        adj = g.incidence()
        if g.sink in _reach(adj, g.source, removed=edges):
            return ["removing the edges leaves the sink reachable"]
        return []

    if inst.family == "assignment":
        covered = {}
        for e in edges:
            for x in g.edges[e]:
                covered[x] = covered.get(x, 0) + 1
        if len(covered) != g.node_count or any(c != 1 for c in covered.values()):
            return ["edges do not form a perfect matching"]
        return []
    return [f"unknown family {inst.family!r}"]


# -- evaluation -------------------------------------------------------------


def _edge_set(X):
    return X.edge_ids if isinstance(X, Solution) else frozenset(X)


def cost(inst: RobustInstance, X, s: int) -> int:
    """Total cost of solution ``X`` under scenario ``s``."""
    K = inst.scenarios.count
    if not 0 <= s < K:
        raise IndexError(f"scenario index {s} out of range 0..{K - 1}")
    chosen = _edge_set(X)
    return sum(c for e, c in inst.scenarios.rows[s] if e in chosen)


def per_scenario_costs(inst: RobustInstance, X) -> np.ndarray:
    chosen = _edge_set(X)
    return np.array(
        [sum(c for e, c in row if e in chosen) for row in inst.scenarios.rows], dtype=np.int64
    )


def minmax_value(inst: RobustInstance, X) -> int:
    costs = per_scenario_costs(inst, X)
    return int(costs.max()) if costs.size else 0


def regret_value(inst: RobustInstance, X, fstar) -> int:
    fstar = np.asarray(fstar, dtype=np.int64)
    if fstar.shape != (inst.scenarios.count,):
        raise ValueError(
            f"fstar has length {fstar.size}, expected {inst.scenarios.count}"
        )
    return int((per_scenario_costs(inst, X) - fstar).max())


def evaluate(inst: RobustInstance, X, fstar=None) -> EvalReport:
    costs = per_scenario_costs(inst, X)
    regret = None
    if fstar is not None:
        regret = regret_value(inst, X, fstar)
    return EvalReport(tuple(int(c) for c in costs), int(costs.max()), regret)
