"""Independent reference computations built on networkx and plain enumeration."""

import itertools

import networkx as nx
import numpy as np


def nx_graph(inst, subset=None):
    g = inst.graph
    G = nx.MultiDiGraph() if g.directed else nx.MultiGraph()
    G.add_nodes_from(range(g.node_count))
    for e, (u, v) in enumerate(g.edges):
        if subset is None or e in subset:
            G.add_edge(u, v, key=e)
    return G


def feasible_sets(inst):
    """Every feasible edge set, found without the library's enumerators."""
    g = inst.graph
    M = g.edge_count
    if inst.family == "path":
        G = nx_graph(inst)
        for p in nx.all_simple_edge_paths(G, g.source, g.sink):
            yield frozenset(k for _, _, k in p)
    elif inst.family == "cut":
        for r in range(M + 1):
            for sub in itertools.combinations(range(M), r):
                rest = nx_graph(inst, set(range(M)) - set(sub))
                if not nx.has_path(rest, g.source, g.sink):
                    yield frozenset(sub)
    elif inst.family == "tree":
        for sub in itertools.combinations(range(M), g.node_count - 1):
            T = nx_graph(inst, set(sub))
            if nx.is_tree(T):
                yield frozenset(sub)
    elif inst.family == "assignment":
        for r in range(M + 1):
            if 2 * r != g.node_count:
                continue
            for sub in itertools.combinations(range(M), r):
                ends = [x for e in sub for x in g.edges[e]]
                if len(set(ends)) == g.node_count:
                    yield frozenset(sub)


def scenario_optima(inst):
    dense = inst.cost_matrix()
    sets = [sorted(s) for s in feasible_sets(inst)]
    return np.array([min(int(row[s].sum()) for s in sets) for row in dense])


def robust_optimum(inst, objective="minmax"):
    dense = inst.cost_matrix()
    offsets = scenario_optima(inst) if objective == "regret" else np.zeros(len(dense), dtype=int)
    return min(int((dense[:, sorted(s)].sum(axis=1) - offsets).max()) for s in feasible_sets(inst))
