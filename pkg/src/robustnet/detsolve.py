"""Single-scenario (deterministic) solvers for the four families.

Each solver takes a graph and one nonnegative integer cost per edge and
returns ``(Solution, value)``.  Iteration always follows edge-id order,
so ties resolve the same way on every run.
"""

from __future__ import annotations

import heapq
from collections import deque

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import InfeasibleError
from .model import Graph, RobustInstance, Solution, _bipartition


def _check_costs(graph: Graph, costs):
    costs = [int(c) for c in costs]
    if len(costs) != graph.edge_count:
        raise ValueError(f"cost vector has length {len(costs)}, expected {graph.edge_count}")
    if any(c < 0 for c in costs):
        raise ValueError("costs must be nonnegative")
    return costs


def shortest_path(graph: Graph, costs):
    """Dijkstra from ``graph.source``; returns the path edges and its length."""
    costs = _check_costs(graph, costs)
    adj = graph.incidence()
    dist = [None] * graph.node_count
    pred = [None] * graph.node_count
    dist[graph.source] = 0
    heap = [(0, graph.source)]
    done = [False] * graph.node_count
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == graph.sink:
            break
        for eid, v in adj[u]:
            nd = d + costs[eid]
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                pred[v] = (eid, u)
                heapq.heappush(heap, (nd, v))
    if dist[graph.sink] is None:
        raise InfeasibleError("no path from source to sink")
    path = []
    node = graph.sink
    while node != graph.source:
        eid, node = pred[node]
        path.append(eid)
    return Solution(path), dist[graph.sink]


def spanning_tree(graph: Graph, costs):
    """Kruskal on ``(cost, edge id)`` order; directions are ignored."""
    costs = _check_costs(graph, costs)
    parent = list(range(graph.node_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for eid in sorted(range(graph.edge_count), key=lambda e: (costs[e], e)):
        u, v = graph.edges[eid]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen.append(eid)
    if len(chosen) != graph.node_count - 1:
        raise InfeasibleError("graph is disconnected; no spanning tree")
    return Solution(chosen), sum(costs[e] for e in chosen)


class _FlowNetwork:
    """Residual network with paired arcs (arc ``a`` and its reverse ``a ^ 1``)."""

    def __init__(self, n):
        self.head = []
        self.cap = []
        self.adj = [[] for _ in range(n)]

    def add(self, u, v, cap_uv, cap_vu):
        self.adj[u].append(len(self.head))
        self.head.append(v)
        self.cap.append(cap_uv)
        self.adj[v].append(len(self.head))
        self.head.append(u)
        self.cap.append(cap_vu)

    def augment(self, s, t, delta):
        """Push flow along one BFS path whose residual capacities are all >= delta."""
        pred = {s: None}
        queue = deque([s])
        while queue and t not in pred:
            u = queue.popleft()
            for a in self.adj[u]:
                v = self.head[a]
                if v not in pred and self.cap[a] >= delta:
                    pred[v] = a
                    queue.append(v)
        if t not in pred:
            return 0
        arcs = []
        node = t
        while node != s:
            a = pred[node]
            arcs.append(a)
            node = self.head[a ^ 1]
        push = min(self.cap[a] for a in arcs)
        for a in arcs:
            self.cap[a] -= push
            self.cap[a ^ 1] += push
        return push

    def reachable(self, s):
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in self.adj[u]:
                v = self.head[a]
                if v not in seen and self.cap[a] > 0:
                    seen.add(v)
                    queue.append(v)
        return seen


def min_cut(graph: Graph, costs):
    """Minimum s-t cut by capacity-scaling augmentation.

    The cut consists of the edges leaving the set of nodes reachable from
    the source in the final residual network.
    """
    costs = _check_costs(graph, costs)
    s, t = graph.source, graph.sink
    if s == t:
        raise InfeasibleError("source equals sink; no cut exists")
    net = _FlowNetwork(graph.node_count)
    for eid, (u, v) in enumerate(graph.edges):
        net.add(u, v, costs[eid], 0 if graph.directed else costs[eid])
    delta = 1
    while delta * 2 <= max(costs, default=0):
        delta *= 2
    flow = 0
    while delta >= 1:
        while True:
            pushed = net.augment(s, t, delta)
            if not pushed:
                break
            flow += pushed
        delta //= 2
    side = net.reachable(s)
    cut = []
    for eid, (u, v) in enumerate(graph.edges):
        if graph.directed:
            if u in side and v not in side:
                cut.append(eid)
        elif (u in side) != (v in side):
            cut.append(eid)
    value = sum(costs[e] for e in cut)
    assert value == flow, "max-flow/min-cut mismatch"
    return Solution(cut), value


def min_assignment(graph: Graph, costs):
    """Minimum-cost perfect matching of a bipartite graph."""
    costs = _check_costs(graph, costs)
    color = _bipartition(graph)
    if color is None:
        raise InfeasibleError("graph is not bipartite")
    # A perfect matching needs every connected component to be balanced.
    comp = list(range(graph.node_count))

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for u, v in graph.edges:
        comp[find(u)] = find(v)
    balance = {}
    for x in range(graph.node_count):
        balance[find(x)] = balance.get(find(x), 0) + (1 if color[x] == 0 else -1)
    if any(balance.values()):
        raise InfeasibleError("bipartite sides unequal")

    left = [x for x in range(graph.node_count) if color[x] == 0]
    right = [x for x in range(graph.node_count) if color[x] == 1]
    lpos = {x: i for i, x in enumerate(left)}
    rpos = {x: i for i, x in enumerate(right)}
    big = float(sum(costs) + 1)
    matrix = np.full((len(left), len(right)), np.inf)
    best_edge = {}
    for eid, (u, v) in enumerate(graph.edges):
        if color[u] == 1:
            u, v = v, u
        key = (lpos[u], rpos[v])
        if key not in best_edge or costs[eid] < costs[best_edge[key]]:
            best_edge[key] = eid
            matrix[key] = costs[eid]
    if not len(left):
        return Solution(), 0
    # Forbidden pairs get a finite penalty so an infeasible problem is detected afterwards.
    penalized = np.where(np.isinf(matrix), big * len(left), matrix)
    rows, cols = linear_sum_assignment(penalized)
    chosen = []
    for r, c in zip(rows, cols):
        if (r, c) not in best_edge:
            raise InfeasibleError("no perfect matching exists")
        chosen.append(best_edge[(r, c)])
    return Solution(chosen), sum(costs[e] for e in chosen)


_DISPATCH = {
    "path": shortest_path,
    "tree": spanning_tree,
    "cut": min_cut,
    "assignment": min_assignment,
}


def det_solve(family: str, graph: Graph, costs):
    """Minimum-total-cost feasible solution under a single cost vector."""
    try:
        solver = _DISPATCH[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}") from None
    return solver(graph, costs)


def summed_costs(inst: RobustInstance) -> np.ndarray:
    """Per-edge sum over all scenarios (K times the mean cost, kept integral)."""
    total = np.zeros(inst.graph.edge_count, dtype=np.int64)
    for row in inst.scenarios.rows:
        for e, c in row:
            total[e] += c
    return total


def per_scenario_optima(inst: RobustInstance) -> np.ndarray:
    """Vector of F*(S): the deterministic optimum under each scenario."""
    M = inst.graph.edge_count
    out = np.zeros(inst.scenarios.count, dtype=np.int64)
    for s, row in enumerate(inst.scenarios.rows):
        costs = np.zeros(M, dtype=np.int64)
        for e, c in row:
            costs[e] = c
        out[s] = det_solve(inst.family, inst.graph, costs)[1]
    return out
