"""3-SAT gadgets, recursive gap amplification and the path/tree transform.

Edge numbering of the path gadget graph is clause-major: clause ``i``
owns edges ``7i .. 7i+6`` laid out as three literal arcs
``(s_i, v_j)``, three dummy arcs ``(v_j, t_i)`` and the connector
``(t_i, s_{i+1})`` (absent after the last clause).  Nodes are
``s_i = 5i``, ``v_j = 5i + j``, ``t_i = 5i + 4``.

The cut graph has nodes ``s = 0``, ``t = 1`` and, for clause ``i``,
``v_1 = 2 + 2i`` and ``v_2 = 3 + 2i``; clause ``i`` owns the undirected
chain ``{s, v_1}, {v_1, v_2}, {v_2, t}`` as edges ``3i .. 3i+2``.

Every pair of literal edges carrying complementary literals becomes one
scenario charging exactly those two edges.  Pairs are listed in
lexicographic order of ``(smaller edge, larger edge)``.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from . import sptree as spt
from .cnf import CnfFormula
from .exceptions import InvalidInstanceError, SizeLimitError
from .model import Graph, RobustInstance, ScenarioSet, Solution, validate_solution

MODES = ("faithful", "compressed")
DEFAULT_MAX_ENTRIES = 2_000_000


@dataclass(frozen=True)
class PairIndex:
    """For each base scenario, the two unit-cost edges ``(a, b)`` with ``a < b``."""

    pairs: tuple

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, k):
        return self.pairs[k]


@dataclass(frozen=True)
class AmplifyParams:
    levels: int = 0
    mode: str = "faithful"
    materialize: bool = True
    max_entries: int = DEFAULT_MAX_ENTRIES

    def __post_init__(self):
        if self.levels < 0:
            raise ValueError("levels must be nonnegative")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


# -- level-0 constructions --------------------------------------------------


def _pair_scenarios(literal_edges):
    """Scenario rows and PairIndex from ``[(edge, literal), ...]``."""
    pairs = sorted(
        (min(e1, e2), max(e1, e2))
        for idx, (e1, l1) in enumerate(literal_edges)
        for e2, l2 in literal_edges[idx + 1 :]
        if l1 == -l2
    )
    if not pairs:
        # K = 0 is not allowed; keep a single all-zero scenario instead.
        return ScenarioSet(((),)), PairIndex(())
    rows = tuple(((a, 1), (b, 1)) for a, b in pairs)
    return ScenarioSet(rows), PairIndex(tuple(pairs))


def path_literal_edge(i: int, j: int) -> int:
    return 7 * i + j


def path_dummy_edge(i: int, j: int) -> int:
    return 7 * i + 3 + j


def path_connector_edge(i: int) -> int:
    return 7 * i + 6


def _path_graph(m: int, directed: bool = True):
    edges = []
    for i in range(m):
        s, t = 5 * i, 5 * i + 4
        edges += [(s, s + j) for j in (1, 2, 3)]
        edges += [(s + j, t) for j in (1, 2, 3)]
        if i < m - 1:
            edges.append((t, t + 1))
    if directed:
        return Graph(5 * m, tuple(edges), True, 0, 5 * m - 1)
    return Graph(5 * m, tuple(edges), False)


def _path_sptree(graph: Graph, m: int):
    parts = []
    for i in range(m):
        branches = []
        for j in range(3):
            lit, dummy = path_literal_edge(i, j), path_dummy_edge(i, j)
            branches.append(
                spt.series([spt.Leaf(lit, *graph.edges[lit]), spt.Leaf(dummy, *graph.edges[dummy])])
            )
        parts.append(spt.parallel(branches))
        if i < m - 1:
            c = path_connector_edge(i)
            parts.append(spt.Leaf(c, *graph.edges[c]))
    return spt.series(parts)


def sat_to_shortest_path(cnf: CnfFormula):
    """Minmax shortest path instance whose optimum is <= 1 iff ``cnf`` is satisfiable."""
    m = cnf.clause_count
    if m == 0:
        raise ValueError("formula has no clauses")
    graph = _path_graph(m)
    literal_edges = [
        (path_literal_edge(i, j), lit) for i, clause in enumerate(cnf.clauses) for j, lit in enumerate(clause)
    ]
    scenarios, pairs = _pair_scenarios(literal_edges)
    meta = {
        "construction": "3sat-path",
        "variables": cnf.variable_count,
        "clauses": m,
        "level": 0,
        "expected_gap": 2,
    }
    return RobustInstance("path", graph, scenarios, _path_sptree(graph, m), meta), pairs


def sat_to_cut(cnf: CnfFormula):
    """Minmax s-t cut instance: ``m`` disjoint three-edge s-t chains."""
    m = cnf.clause_count
    if m == 0:
        raise ValueError("formula has no clauses")
    edges = []
    for i in range(m):
        v1, v2 = 2 + 2 * i, 3 + 2 * i
        edges += [(0, v1), (v1, v2), (v2, 1)]
    graph = Graph(2 + 2 * m, tuple(edges), False, 0, 1)
    literal_edges = [(3 * i + j, lit) for i, clause in enumerate(cnf.clauses) for j, lit in enumerate(clause)]
    scenarios, pairs = _pair_scenarios(literal_edges)
    chains = [spt.series([spt.Leaf(3 * i + j, *edges[3 * i + j]) for j in range(3)]) for i in range(m)]
    meta = {
        "construction": "3sat-cut",
        "variables": cnf.variable_count,
        "clauses": m,
        "level": 0,
        "expected_gap": 2,
    }
    return RobustInstance("cut", graph, scenarios, spt.parallel(chains), meta), pairs


def reduce_formula(cnf: CnfFormula, family: str):
    if family == "path":
        return sat_to_shortest_path(cnf)
    if family == "cut":
        return sat_to_cut(cnf)
    raise ValueError(f"no 3-SAT construction for family {family!r}")


# -- amplification ----------------------------------------------------------


class Amplification:
    """Index arithmetic shared by every level of the recursive construction.

    Level ``r + 1`` replaces each substituted base edge ``b`` by a copy of
    the level-``r`` graph whose source and sink are glued to the endpoints
    of ``b``.  Global scenario ``k * K_r**2 + i * K_r + j`` charges the copy
    on the first edge of base pair ``k`` like inner scenario ``i``, the copy
    on the second edge like inner scenario ``j``, and nothing else.
    """

    def __init__(self, base: RobustInstance, pairs: PairIndex, mode: str = "faithful"):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        _check_base(base, pairs)
        self.base = base
        self.pairs = tuple(pairs.pairs)
        self.mode = mode
        g = base.graph
        self.base_edges = g.edges
        self.source, self.sink = g.source, g.sink
        paired = {e for pair in self.pairs for e in pair}
        if mode == "faithful":
            self.substituted = tuple(True for _ in g.edges)
        else:
            self.substituted = tuple(e in paired for e in range(g.edge_count))
        self.edges = [g.edge_count]
        self.nodes = [g.node_count]
        self.scenarios = [len(self.pairs)]
        self.edge_offsets = [None]
        self.node_offsets = [None]

    def ensure(self, level: int):
        while len(self.edges) <= level:
            prev_e, prev_n, prev_k = self.edges[-1], self.nodes[-1], self.scenarios[-1]
            e_off, n_off = [], []
            e_pos, n_pos = 0, self.nodes[0]
            for sub in self.substituted:
                e_off.append(e_pos)
                n_off.append(n_pos)
                e_pos += prev_e if sub else 1
                if sub:
                    n_pos += prev_n - 2
            self.edge_offsets.append(e_off)
            self.node_offsets.append(n_off)
            self.edges.append(e_pos)
            self.nodes.append(n_pos)
            self.scenarios.append(len(self.pairs) * prev_k * prev_k)

    def counts(self, level: int):
        self.ensure(level)
        return self.nodes[level], self.edges[level], self.scenarios[level]

    def locate(self, edge: int, level: int):
        """``(base edge, inner edge or None)`` for an edge id at ``level >= 1``."""
        offs = self.edge_offsets[level]
        b = bisect_right(offs, edge) - 1
        if not self.substituted[b]:
            return b, None
        return b, edge - offs[b]

    def split(self, scenario: int, level: int):
        """``(k, i, j)`` for a scenario index at ``level >= 1``."""
        inner = self.scenarios[level - 1]
        k, rest = divmod(scenario, inner * inner)
        i, j = divmod(rest, inner)
        return k, i, j

    def node_map(self, level: int, b: int):
        tail, head = self.base_edges[b]
        off = self.node_offsets[level][b]
        src, snk = self.source, self.sink

        def f(x):
            if x == src:
                return tail
            if x == snk:
                return head
            return off + x - (x > src) - (x > snk)

        return f

    def metadata(self, level: int) -> dict:
        nodes, edges, scen = self.counts(level)
        meta = dict(self.base.metadata)
        meta.update(
            level=level,
            mode=self.mode,
            expected_gap=2 ** (level + 1),
            nodes=nodes,
            edges=edges,
            scenarios=scen,
            base_edges=self.edges[0],
            base_scenarios=self.scenarios[0],
        )
        return meta


def _check_base(base: RobustInstance, pairs: PairIndex):
    if base.sp_tree is None:
        raise InvalidInstanceError(["amplification needs a base instance with an sptree"])
    rows = base.scenarios.rows
    problems = []
    if len(pairs.pairs) != len(rows) or not rows:
        problems.append("pair index does not match the scenario count")
    for k, row in enumerate(rows):
        if len(row) != 2 or any(c != 1 for _, c in row):
            problems.append(f"base scenario {k} must have exactly two unit nonzeros")
        elif k < len(pairs.pairs) and tuple(sorted(e for e, _ in row)) != tuple(pairs.pairs[k]):
            problems.append(f"base scenario {k} disagrees with the pair index")
    if problems:
        raise InvalidInstanceError(problems)


def _materialize_next(amp: Amplification, inner: RobustInstance, level: int, max_entries: int):
    """Build level ``level`` explicitly from the explicit level ``level - 1``."""
    nodes, edges_total, scen = amp.counts(level)
    inner_rows = inner.scenarios.rows
    # sum over (k, i, j) of |row_i| + |row_j|
    total_nnz = 2 * len(amp.pairs) * len(inner_rows) * sum(len(r) for r in inner_rows)
    if total_nnz + edges_total > max_entries:
        raise SizeLimitError(
            f"materializing level {level} needs {total_nnz} nonzeros and {edges_total} edges "
            f"(cap {max_entries}); use the implicit representation",
            max_entries,
        )
    offs = amp.edge_offsets[level]
    edges = []
    for b, (u, v) in enumerate(amp.base_edges):
        if amp.substituted[b]:
            f = amp.node_map(level, b)
            edges.extend((f(x), f(y)) for x, y in inner.graph.edges)
        else:
            edges.append((u, v))
    rows = []
    for a, b in amp.pairs:
        oa, ob = offs[a], offs[b]
        for ri in inner_rows:
            left = tuple((oa + e, c) for e, c in ri)
            for rj in inner_rows:
                rows.append(left + tuple((ob + e, c) for e, c in rj))

    def replace(leaf):
        b = leaf.edge
        if not amp.substituted[b]:
            return spt.Leaf(offs[b], leaf.left, leaf.right)
        return spt.relabel(inner.sp_tree, lambda e, o=offs[b]: o + e, amp.node_map(level, b))

    tree = spt.substitute(amp.base.sp_tree, replace)
    g = amp.base.graph
    graph = Graph(nodes, tuple(edges), g.directed, g.source, g.sink)
    return RobustInstance(amp.base.family, graph, ScenarioSet(tuple(rows)), tree, amp.metadata(level))


class ImplicitInstance:
    """Level-``t`` amplified instance evaluated by recursion instead of storage."""

    def __init__(self, amp: Amplification, level: int):
        self.amp = amp
        self.level = level
        amp.ensure(level)
        self.family = amp.base.family
        self.directed = amp.base.graph.directed
        self.source, self.sink = amp.source, amp.sink
        self.metadata = amp.metadata(level)

    @property
    def node_count(self):
        return self.amp.nodes[self.level]

    @property
    def edge_count(self):
        return self.amp.edges[self.level]

    @property
    def scenario_count(self):
        return self.amp.scenarios[self.level]

    def cost(self, edge: int, scenario: int) -> int:
        """Cost of one edge under one scenario by point lookup."""
        if not 0 <= edge < self.edge_count:
            raise IndexError(f"edge {edge} out of range")
        if not 0 <= scenario < self.scenario_count:
            raise IndexError(f"scenario {scenario} out of range")
        amp = self.amp
        for r in range(self.level, 0, -1):
            b, inner = amp.locate(edge, r)
            k, i, j = amp.split(scenario, r)
            a_k, b_k = amp.pairs[k]
            if b == a_k:
                scenario = i
            elif b == b_k:
                scenario = j
            else:
                return 0
            if inner is None:
                return 0
            edge = inner
        return 1 if edge in amp.pairs[scenario] else 0

    def row(self, scenario: int, level: int | None = None):
        """Sparse row ``[(edge, cost), ...]`` sorted by edge id."""
        r = self.level if level is None else level
        amp = self.amp
        if r == 0:
            a, b = amp.pairs[scenario]
            return [(a, 1), (b, 1)]
        k, i, j = amp.split(scenario, r)
        a_k, b_k = amp.pairs[k]
        offs = amp.edge_offsets[r]
        left = [(offs[a_k] + e, c) for e, c in self.row(i, r - 1)]
        return left + [(offs[b_k] + e, c) for e, c in self.row(j, r - 1)]

    def endpoints(self, edge: int, level: int | None = None):
        r = self.level if level is None else level
        if r == 0:
            return self.amp.base_edges[edge]
        b, inner = self.amp.locate(edge, r)
        if inner is None:
            return self.amp.base_edges[b]
        f = self.amp.node_map(r, b)
        u, v = self.endpoints(inner, r - 1)
        return f(u), f(v)

    def _split_solution(self, edges, r):
        groups = {}
        for e in edges:
            b, inner = self.amp.locate(e, r)
            groups.setdefault(b, []).append(inner)
        return groups

    def max_cost(self, X, level: int | None = None) -> int:
        """Worst-case cost of ``X`` over all scenarios, without enumerating them."""
        r = self.level if level is None else level
        edges = X.edge_ids if isinstance(X, Solution) else set(X)
        amp = self.amp
        if r == 0:
            return max(sum(1 for e in pair if e in edges) for pair in amp.pairs)
        groups = self._split_solution(edges, r)
        inner_max = {}
        for b, inner in groups.items():
            inner_max[b] = 0 if not amp.substituted[b] else self.max_cost(inner, r - 1)
        return max(inner_max.get(a, 0) + inner_max.get(b, 0) for a, b in amp.pairs)

    minmax_value = max_cost

    def per_scenario_costs(self, X, level: int | None = None, max_scenarios: int = 10_000_000):
        """Dense cost vector of ``X`` (index order matches scenario numbering)."""
        r = self.level if level is None else level
        amp = self.amp
        if amp.scenarios[r] > max_scenarios:
            raise SizeLimitError(f"{amp.scenarios[r]} scenarios exceed {max_scenarios}", max_scenarios)
        edges = X.edge_ids if isinstance(X, Solution) else set(X)
        if r == 0:
            return np.array([sum(1 for e in pair if e in edges) for pair in amp.pairs], dtype=np.int64)
        groups = self._split_solution(edges, r)
        zero = np.zeros(amp.scenarios[r - 1], dtype=np.int64)
        inner = {
            b: self.per_scenario_costs(g, r - 1) if amp.substituted[b] else zero
            for b, g in groups.items()
        }
        blocks = [
            (inner.get(a, zero)[:, None] + inner.get(b, zero)[None, :]).ravel() for a, b in amp.pairs
        ]
        return np.concatenate(blocks)

    def is_path(self, X) -> bool:
        """True when ``X`` is a simple source-sink path of the implicit graph."""
        edges = list(X.edge_ids if isinstance(X, Solution) else X)
        ends = {e: self.endpoints(e) for e in edges}
        nodes = {x for uv in ends.values() for x in uv}
        remap = {x: i for i, x in enumerate(sorted(nodes | {self.source, self.sink}))}
        local = Graph(
            len(remap),
            tuple((remap[u], remap[v]) for u, v in ends.values()),
            self.directed,
            remap[self.source],
            remap[self.sink],
        )
        probe = RobustInstance("path", local, ScenarioSet(((),)))
        return not validate_solution(probe, range(len(edges)))


def amplify(base: RobustInstance, pairs: PairIndex, params: AmplifyParams = AmplifyParams()):
    """Amplify a level-0 instance ``params.levels`` times.

    Returns a :class:`RobustInstance` when ``params.materialize`` is set,
    otherwise an :class:`ImplicitInstance`.  Level 0 returns ``base``
    itself when materializing.
    """
    amp = Amplification(base, pairs, params.mode)
    if not params.materialize:
        return ImplicitInstance(amp, params.levels)
    if params.levels == 0:
        return base
    amp.counts(params.levels)
    inst = base
    for level in range(1, params.levels + 1):
        inst = _materialize_next(amp, inst, level, params.max_entries)
    return inst


def lift_solution(amp: Amplification, base_solution, level: int) -> Solution:
    """Place the level-``r-1`` solution into every copy on a base solution edge."""
    amp.ensure(level)
    current = sorted(Solution(base_solution).edge_ids)
    base_ids = current
    for r in range(1, level + 1):
        offs = amp.edge_offsets[r]
        nxt = []
        for b in base_ids:
            if amp.substituted[b]:
                nxt.extend(offs[b] + e for e in current)
            else:
                nxt.append(offs[b])
        current = nxt
    return Solution(current)


# -- witnesses --------------------------------------------------------------


def _truth(assignment):
    if isinstance(assignment, dict):
        return lambda lit: assignment.get(abs(lit)) is not None and assignment[abs(lit)] == (lit > 0)
    return lambda lit: bool(assignment[abs(lit) - 1]) == (lit > 0)


def _chosen_positions(cnf: CnfFormula, assignment):
    true = _truth(assignment)
    chosen = []
    for i, clause in enumerate(cnf.clauses):
        js = [j for j, lit in enumerate(clause) if true(lit)]
        if not js:
            raise ValueError(f"assignment does not satisfy clause {i + 1} {clause}")
        chosen.append(js[0])
    return chosen


def _base_witness_path(cnf, assignment):
    m = cnf.clause_count
    edges = []
    for i, j in enumerate(_chosen_positions(cnf, assignment)):
        edges += [path_literal_edge(i, j), path_dummy_edge(i, j)]
        if i < m - 1:
            edges.append(path_connector_edge(i))
    return Solution(edges)


def witness_path(cnf: CnfFormula, assignment, levels: int = 0, mode: str = "faithful") -> Solution:
    """Path using, per clause, the arc of its lowest-indexed true literal.

    At ``levels >= 1`` every copy on the base witness carries the
    level-below witness, which keeps the worst-case cost at most 1.
    """
    base = _base_witness_path(cnf, assignment)
    if levels == 0:
        return base
    inst, pairs = sat_to_shortest_path(cnf)
    return lift_solution(Amplification(inst, pairs, mode), base, levels)


def witness_cut(cnf: CnfFormula, assignment, levels: int = 0, mode: str = "faithful") -> Solution:
    """Cut taking, per chain, the edge of the lowest-indexed true literal."""
    base = Solution(3 * i + j for i, j in enumerate(_chosen_positions(cnf, assignment)))
    if levels == 0:
        return base
    inst, pairs = sat_to_cut(cnf)
    return lift_solution(Amplification(inst, pairs, mode), base, levels)


def decode_assignment(cnf: CnfFormula, X, family: str = "path") -> dict:
    """Read a partial assignment off the literal edges used by a level-0 solution."""
    edges = Solution(X).edge_ids
    out = {}
    for i, clause in enumerate(cnf.clauses):
        for j, lit in enumerate(clause):
            e = path_literal_edge(i, j) if family == "path" else 3 * i + j
            if e not in edges:
                continue
            var, val = abs(lit), lit > 0
            if out.get(var, val) != val:
                raise ValueError(f"solution uses contradictory literals of x{var}")
            out[var] = val
    return out


# -- path <-> tree ----------------------------------------------------------


def _gadget_count(inst: RobustInstance, directed: bool) -> int:
    g = inst.graph
    m, rem = divmod(g.node_count, 5)
    if rem or m == 0 or g.edge_count != 7 * m - 1:
        raise InvalidInstanceError(["instance is not a level-0 gadget chain"])
    expected = _path_graph(m, directed)
    if g.edges != expected.edges or g.directed != directed:
        raise InvalidInstanceError(["instance is not a level-0 gadget chain"])
    return m


def _dummy_edges(m: int):
    out = []
    for i in range(m):
        out += [path_dummy_edge(i, j) for j in range(3)]
        if i < m - 1:
            out.append(path_connector_edge(i))
    return out


def path_to_tree(inst: RobustInstance, P):
    """Spanning tree instance and tree with the same per-scenario costs as ``P``.

    The tree is ``P``'s literal arcs plus every zero-cost dummy edge.
    """
    if inst.family != "path":
        raise InvalidInstanceError(["path_to_tree expects a path instance"])
    m = _gadget_count(inst, directed=inst.graph.directed)
    problems = validate_solution(inst, P)
    if problems:
        raise ValueError("infeasible path: " + "; ".join(problems))
    g = inst.graph
    literals = {path_literal_edge(i, j) for i in range(m) for j in range(3)}
    tree_edges = (Solution(P).edge_ids & literals) | set(_dummy_edges(m))
    meta = dict(inst.metadata)
    meta["construction"] = "path-to-tree"
    tree_inst = RobustInstance(
        "tree", Graph(g.node_count, g.edges, False), inst.scenarios, None, meta
    )
    return tree_inst, Solution(tree_edges)


def tree_to_path(tree_inst: RobustInstance, T):
    """Inverse of :func:`path_to_tree`.

    Per gadget the path keeps the lowest literal arc whose dummy arc is
    also in the tree, so its cost never exceeds the tree's in any scenario.
    """
    if tree_inst.family != "tree":
        raise InvalidInstanceError(["tree_to_path expects a tree instance"])
    m = _gadget_count(tree_inst, directed=False)
    problems = validate_solution(tree_inst, T)
    if problems:
        raise ValueError("infeasible tree: " + "; ".join(problems))
    edges = Solution(T).edge_ids
    path = []
    for i in range(m):
        js = [j for j in range(3) if path_literal_edge(i, j) in edges and path_dummy_edge(i, j) in edges]
        j = js[0]
        path += [path_literal_edge(i, j), path_dummy_edge(i, j)]
        if i < m - 1:
            path.append(path_connector_edge(i))
    graph = _path_graph(m, directed=True)
    meta = dict(tree_inst.metadata)
    meta["construction"] = "3sat-path"
    path_inst = RobustInstance("path", graph, tree_inst.scenarios, _path_sptree(graph, m), meta)
    return path_inst, Solution(path)
