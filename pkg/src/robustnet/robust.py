"""Exact and heuristic solvers for the minmax and minmax-regret objectives.

Three routes are available:

* brute force over :func:`enumerate_feasible` (any family, small inputs;
  spanning trees use a branch and bound on the partial worst case),
* :func:`pareto_dp`, a label-setting dynamic program over a series-parallel
  decomposition (path and cut families),
* :func:`mean_scenario_heuristic`, the deterministic optimum under summed
  scenario costs, whose objective is at most K times the optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from . import sptree as spt
from .detsolve import det_solve, per_scenario_optima, summed_costs
from .exceptions import InfeasibleError, SizeLimitError
from .model import RobustInstance, Solution, _reach, check_instance

DEFAULT_LIMIT = 2**20
DEFAULT_LABEL_CAP = 200_000
MAX_ASSIGNMENT_SIDE = 9
MAX_CUT_CANDIDATES = 2**22
OBJECTIVES = ("minmax", "regret")


@dataclass(frozen=True)
class SolverResult:
    solution: Solution
    value: int
    objective: str
    method: str
    stats: dict = field(default_factory=dict, compare=False)


class ParetoLabel(NamedTuple):
    costs: tuple
    edges: tuple


# -- enumeration ------------------------------------------------------------


def _paths(inst: RobustInstance) -> Iterator[Solution]:
    g = inst.graph
    adj = g.incidence()
    on_path = {g.source}
    stack_edges = []

    def dfs(u):
        if u == g.sink:
            yield Solution(stack_edges)
            return
        for eid, v in adj[u]:
            if v in on_path:
                continue
            on_path.add(v)
            stack_edges.append(eid)
            yield from dfs(v)
            stack_edges.pop()
            on_path.discard(v)

    yield from dfs(g.source)


def _connectable(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


def _trees(inst: RobustInstance) -> Iterator[Solution]:
    g = inst.graph
    n, M = g.node_count, g.edge_count
    if not _connectable(n, g.edges):
        return
    chosen = []

    def rec(i, parent):
        if len(chosen) == n - 1:
            yield Solution(chosen)
            return
        if i == M:
            return
        u, v = g.edges[i]

        def find(p, x):
            while p[x] != x:
                x = p[x]
            return x

        ru, rv = find(parent, u), find(parent, v)
        if ru != rv:
            nxt = list(parent)
            nxt[ru] = rv
            chosen.append(i)
            yield from rec(i + 1, nxt)
            chosen.pop()
        # Excluding edge i is only useful if the rest can still span the graph.
        rest = [g.edges[e] for e in chosen] + list(g.edges[i + 1 :])
        if _connectable(n, rest):
            yield from rec(i + 1, parent)

    yield from rec(0, list(range(n)))


def _cuts(inst: RobustInstance) -> Iterator[Solution]:
    """Minimal s-t cuts, one per admissible source side."""
    g = inst.graph
    s, t = g.source, g.sink
    fwd = g.incidence()
    rev = [[] for _ in range(g.node_count)]
    for eid, (u, v) in enumerate(g.edges):
        rev[v].append((eid, u))
        if not g.directed:
            rev[u].append((eid, v))
    from_s = _reach(fwd, s)
    if t not in from_s:
        yield Solution()
        return
    relevant = from_s & _reach(rev, t)
    inner = sorted(relevant - {s, t})
    if 2 ** len(inner) > MAX_CUT_CANDIDATES:
        raise SizeLimitError(
            f"cut enumeration needs 2^{len(inner)} candidate source sides "
            f"(cap {MAX_CUT_CANDIDATES})",
            MAX_CUT_CANDIDATES,
        )
    for mask in range(2 ** len(inner)):
        side = {s} | {x for b, x in enumerate(inner) if mask >> b & 1}
        other = relevant - side
        if _reach(fwd, s, allowed=side) != side:
            continue
        if _reach(rev, t, allowed=other) != other:
            continue
        cut = []
        for eid, (u, v) in enumerate(g.edges):
            if u not in relevant or v not in relevant:
                continue
            if (u in side and v in other) or (not g.directed and v in side and u in other):
                cut.append(eid)
        yield Solution(cut)


def _matchings(inst: RobustInstance) -> Iterator[Solution]:
    from .model import _bipartition

    g = inst.graph
    color = _bipartition(g)
    if color is None:
        return
    left = [x for x in range(g.node_count) if color[x] == 0]
    if len(left) * 2 != g.node_count:
        return
    if len(left) > MAX_ASSIGNMENT_SIDE:
        raise SizeLimitError(
            f"assignment enumeration limited to sides of {MAX_ASSIGNMENT_SIDE} nodes, got {len(left)}",
            MAX_ASSIGNMENT_SIDE,
        )
    adj = g.incidence()
    used = set()
    chosen = []

    def rec(k):
        if k == len(left):
            yield Solution(chosen)
            return
        for eid, v in adj[left[k]]:
            if v in used:
                continue
            used.add(v)
            chosen.append(eid)
            yield from rec(k + 1)
            chosen.pop()
            used.discard(v)

    yield from rec(0)


_ENUMERATORS = {"path": _paths, "tree": _trees, "cut": _cuts, "assignment": _matchings}


def enumerate_feasible(inst: RobustInstance, limit: int = DEFAULT_LIMIT) -> Iterator[Solution]:
    """Stream every feasible solution once, in a deterministic order.

    For the cut family only inclusion-minimal cuts are produced; with
    nonnegative costs they contain an optimum for both objectives.
    Raises :class:`SizeLimitError` as soon as more than ``limit``
    solutions would be produced.
    """
    for count, sol in enumerate(_ENUMERATORS[inst.family](inst), 1):
        if count > limit:
            raise SizeLimitError(f"more than {limit} feasible solutions; refusing to enumerate", limit)
        yield sol


# -- objective helpers ------------------------------------------------------


def _objective_offsets(inst, objective, fstar):
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    if objective == "minmax":
        return np.zeros(inst.scenarios.count, dtype=np.int64)
    if fstar is None:
        fstar = per_scenario_optima(inst)
    fstar = np.asarray(fstar, dtype=np.int64)
    if fstar.shape != (inst.scenarios.count,):
        raise ValueError("fstar length does not match the scenario count")
    return fstar


def _value(vec, offsets):
    return int((vec - offsets).max())


# -- brute force ------------------------------------------------------------


def _brute(inst, objective, offsets, limit):
    dense = inst.cost_matrix()
    best = None
    count = 0
    for sol in enumerate_feasible(inst, limit):
        count += 1
        ids = sol.sorted()
        vec = dense[:, list(ids)].sum(axis=1)
        key = (_value(vec, offsets), ids)
        if best is None or key < best:
            best = key
    if best is None:
        raise InfeasibleError(f"no feasible solution for family {inst.family}")
    return SolverResult(Solution(best[1]), best[0], objective, "brute", {"enumerated": count})


def _tree_search(inst, objective, offsets, limit):
    """Branch and bound over spanning trees, pruning on the partial worst case."""
    g = inst.graph
    n, M = g.node_count, g.edge_count
    dense = inst.cost_matrix()
    if not _connectable(n, g.edges):
        raise InfeasibleError("graph is disconnected; no spanning tree")
    start = mean_scenario_heuristic(inst, objective, fstar=offsets if objective == "regret" else None)
    best = [start.value, start.solution.sorted()]
    nodes = [0]
    chosen = []

    def find(p, x):
        while p[x] != x:
            x = p[x]
        return x

    def rec(i, parent, partial):
        nodes[0] += 1
        if nodes[0] > limit:
            raise SizeLimitError(f"tree search exceeded {limit} nodes", limit)
        if _value(partial, offsets) >= best[0]:
            return
        if len(chosen) == n - 1:
            best[0] = _value(partial, offsets)
            best[1] = tuple(chosen)
            return
        if i == M:
            return
        u, v = g.edges[i]
        ru, rv = find(parent, u), find(parent, v)
        if ru != rv:
            nxt = list(parent)
            nxt[ru] = rv
            chosen.append(i)
            rec(i + 1, nxt, partial + dense[:, i])
            chosen.pop()
        rest = [g.edges[e] for e in chosen] + list(g.edges[i + 1 :])
        if _connectable(n, rest):
            rec(i + 1, parent, partial)

    rec(0, list(range(n)), np.zeros(inst.scenarios.count, dtype=np.int64))
    return SolverResult(Solution(best[1]), best[0], objective, "brute", {"search_nodes": nodes[0]})


# -- Pareto dynamic program -------------------------------------------------


def _dominance_view(costs):
    """Columns that can decide dominance: constant and repeated columns are dropped."""
    varying = np.flatnonzero((costs != costs[:1]).any(axis=0))
    view = np.unique(costs[:, varying], axis=1) if len(varying) else costs[:, :0]
    top = int(view.max()) if view.size else 0
    for dtype in (np.int8, np.int16, np.int32):
        if top <= np.iinfo(dtype).max:
            return view.astype(dtype)
    return view


def _prune(costs, reps, offsets, bound, dominance=True):
    """Drop labels over the bound and every label dominated by another.

    A label is dropped when an earlier label (ordered by cost sum) is
    componentwise <= it; by transitivity this leaves exactly the minimal
    elements.  Equal vectors keep the lexicographically smallest edge set.
    """
    if bound is not None and len(reps):
        keep = np.flatnonzero((costs - offsets).max(axis=1) <= bound)
        costs = costs[keep]
        reps = [reps[i] for i in keep]
    n = len(reps)
    if n <= 1 or not dominance:
        return costs, reps
    first = {}
    for i in range(n):
        key = costs[i].tobytes()
        j = first.get(key)
        if j is None or reps[i] < reps[j]:
            first[key] = i
    uniq = list(first.values())
    sums = costs[uniq].sum(axis=1)
    uniq = [uniq[i] for i in sorted(range(len(uniq)), key=lambda i: (sums[i], reps[uniq[i]]))]
    ordered = _dominance_view(costs[uniq])
    K = ordered.shape[1]
    keep = []
    kept = np.empty((0, K), dtype=ordered.dtype)
    block = 256
    part_rows = max(64, 32_000_000 // (block * max(1, K)))
    pos = 0
    while pos < len(ordered):
        chunk = ordered[pos : pos + block]
        dominated = np.zeros(len(chunk), dtype=bool)
        for start in range(0, len(kept), part_rows):
            part = kept[start : start + part_rows]
            dominated |= (part[:, None, :] <= chunk[None, :, :]).all(axis=2).any(axis=0)
        inner = (chunk[:, None, :] <= chunk[None, :, :]).all(axis=2)
        inner = np.triu(inner, k=1)
        dominated |= inner.any(axis=0)
        survivors = np.flatnonzero(~dominated)
        keep.extend(pos + survivors)
        kept = np.vstack([kept, chunk[survivors]])
        pos += block
    chosen = [uniq[i] for i in keep]
    return costs[chosen], [reps[i] for i in chosen]


def _sum_sets(a, b, offset, offsets, bound, prune, cap, dominance=True):
    (ca, ra), (cb, rb) = a, b
    if len(ra) * len(rb) > 50 * cap:
        raise SizeLimitError(
            f"label combination of {len(ra)} x {len(rb)} exceeds the cap of {cap}", cap
        )
    shifted = [tuple(x + offset for x in r) for r in rb]
    costs = (ca[:, None, :] + cb[None, :, :]).reshape(-1, ca.shape[1])
    reps = [x + y for x in ra for y in shifted]
    if prune:
        costs, reps = _prune(costs, reps, offsets, bound, dominance)
    return costs, reps


def _union_sets(parts, offsets, bound, prune, dominance=True):
    costs = np.vstack([labels[0] for labels, _ in parts])
    reps = []
    for (_, r), off in parts:
        reps.extend(tuple(x + off for x in rep) for rep in r)
    if prune:
        costs, reps = _prune(costs, reps, offsets, bound, dominance)
    return costs, reps


def _label_dp(inst, tree, offsets, bound, prune, label_cap, root_dominance=True):
    """Run the label DP; returns root costs, root reps (leaf positions), leaf order, stats."""
    columns = inst.cost_matrix().T.copy()
    additive = spt.Series if inst.family == "path" else spt.Parallel
    interned = {}
    memo = {}
    stats = {"nodes": 0, "memo_hits": 0, "max_labels": 0}

    def solve(node, root=False):
        """Return (key id, leaf count, (costs, reps)) with reps in local leaf positions."""
        if isinstance(node, spt.Leaf):
            key = ("L", columns[node.edge].tobytes())
        else:
            kids = [solve(c) for c in node.children]
            key = (type(node).__name__, tuple(k[0] for k in kids))
        kid_id = interned.setdefault(key, len(interned))
        if kid_id in memo:
            stats["memo_hits"] += 1
            return kid_id, memo[kid_id][0], memo[kid_id][1]
        stats["nodes"] += 1
        if isinstance(node, spt.Leaf):
            size = 1
            labels = (columns[node.edge][None, :].copy(), [(0,)])
        else:
            size = sum(k[1] for k in kids)
            # Dominance at the root cannot change the optimum; only the bound is applied there.
            dom = root_dominance or not root
            if isinstance(node, additive):
                labels, offset = kids[0][2], kids[0][1]
                for n, k in enumerate(kids[1:], 2):
                    last = n == len(kids)
                    labels = _sum_sets(
                        labels, k[2], offset, offsets, bound, prune, label_cap, dom or not last
                    )
                    offset += k[1]
            else:
                parts, offset = [], 0
                for k in kids:
                    parts.append((k[2], offset))
                    offset += k[1]
                labels = _union_sets(parts, offsets, bound, prune, dom)
        if len(labels[1]) > label_cap:
            raise SizeLimitError(
                f"label set of {len(labels[1])} exceeds the cap of {label_cap}", label_cap
            )
        stats["max_labels"] = max(stats["max_labels"], len(labels[1]))
        memo[kid_id] = (size, labels)
        return kid_id, size, labels

    _, _, (costs, reps) = solve(tree, root=True)
    return costs, reps, list(spt.leaves(tree)), stats


def _dp_inputs(inst, sp_tree):
    tree = sp_tree if sp_tree is not None else inst.sp_tree
    if tree is None:
        raise ValueError("pareto_dp needs a series-parallel decomposition")
    if inst.family not in ("path", "cut"):
        raise ValueError(f"pareto_dp supports path and cut families, not {inst.family}")
    return tree


def pareto_front(inst: RobustInstance, sp_tree=None, label_cap: int = DEFAULT_LABEL_CAP) -> list:
    """Non-dominated per-scenario cost vectors of all feasible solutions."""
    tree = _dp_inputs(inst, sp_tree)
    offsets = np.zeros(inst.scenarios.count, dtype=np.int64)
    costs, reps, order, _ = _label_dp(inst, tree, offsets, None, True, label_cap)
    return [
        ParetoLabel(tuple(int(c) for c in vec), tuple(sorted(order[i] for i in rep)))
        for vec, rep in zip(costs, reps)
    ]


def pareto_dp(
    inst: RobustInstance,
    sp_tree=None,
    objective: str = "minmax",
    fstar=None,
    prune: bool = True,
    upper_bound="auto",
    label_cap: int = DEFAULT_LABEL_CAP,
) -> SolverResult:
    """Exact solve by label sets over a series-parallel decomposition.

    For paths, series nodes add label vectors and parallel nodes take the
    union of their children's labels; for cuts the roles swap.  After
    every merge, dominated labels and labels whose objective already
    exceeds ``upper_bound`` are discarded (``prune=False`` keeps all of
    them).  Structurally identical subtrees whose leaves carry identical
    scenario columns are solved once.
    """
    tree = _dp_inputs(inst, sp_tree)
    offsets = _objective_offsets(inst, objective, fstar)
    bound = None
    if prune and upper_bound == "auto":
        fs = offsets if objective == "regret" else None
        bound = mean_scenario_heuristic(inst, objective, fstar=fs).value
    elif prune and upper_bound is not None:
        bound = int(upper_bound)

    costs, reps, order, stats = _label_dp(
        inst, tree, offsets, bound, prune, label_cap, root_dominance=False
    )
    best = None
    for vec, rep in zip(costs, reps):
        ids = tuple(sorted(order[i] for i in rep))
        key = (_value(vec, offsets), ids)
        if best is None or key < best:
            best = key
    if best is None:
        raise InfeasibleError("no label survived; the upper bound was below the optimum")
    stats["root_labels"] = len(reps)
    stats["bound"] = bound
    return SolverResult(Solution(best[1]), best[0], objective, "pareto_dp", stats)


# -- entry points -----------------------------------------------------------


def _pick_method(inst, method):
    if method == "auto":
        return "dp" if inst.sp_tree is not None and inst.family in ("path", "cut") else "brute"
    if method not in ("brute", "dp"):
        raise ValueError(f"unknown method {method!r}")
    return method


def solve_exact(
    inst: RobustInstance,
    objective: str = "minmax",
    method: str = "auto",
    fstar=None,
    limit: int = DEFAULT_LIMIT,
    label_cap: int = DEFAULT_LABEL_CAP,
) -> SolverResult:
    check_instance(inst)
    offsets = _objective_offsets(inst, objective, fstar)
    fs = offsets if objective == "regret" else None
    chosen = _pick_method(inst, method)
    if chosen == "dp":
        return pareto_dp(inst, objective=objective, fstar=fs, label_cap=label_cap)
    if inst.family == "tree":
        return _tree_search(inst, objective, offsets, limit)
    return _brute(inst, objective, offsets, limit)


def solve_minmax_exact(inst: RobustInstance, method: str = "auto", **kwargs) -> SolverResult:
    return solve_exact(inst, "minmax", method, **kwargs)


def solve_regret_exact(inst: RobustInstance, method: str = "auto", fstar=None, **kwargs) -> SolverResult:
    return solve_exact(inst, "regret", method, fstar=fstar, **kwargs)


def mean_scenario_heuristic(inst: RobustInstance, objective: str = "minmax", fstar=None) -> SolverResult:
    """Optimal solution under averaged costs, scored by the true objective.

    Solving under the per-edge scenario sums has the same minimizers as
    solving under the averages and keeps everything integral.
    """
    offsets = _objective_offsets(inst, objective, fstar)
    sol, _ = det_solve(inst.family, inst.graph, summed_costs(inst))
    dense = inst.cost_matrix()
    vec = dense[:, list(sol.sorted())].sum(axis=1)
    return SolverResult(sol, _value(vec, offsets), objective, "heuristic")
