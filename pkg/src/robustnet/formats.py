"""Text formats for instances and solutions.

Instance file::

    ROBUSTNET 1
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
    s 2 1 1 2 4
    sptree (P (S (L 0) (L 1)) (L 2))
    end

Tokens are whitespace separated and ``#`` starts a comment.  Serialized
output is canonical: rows are sorted by edge id and metadata is written
as leading ``# key: value`` comments, which the parser ignores.
"""

from __future__ import annotations

from .exceptions import FormatError
from .model import FAMILIES, Graph, RobustInstance, ScenarioSet, Solution
from .sptree import format_tree, parse_tree

MAGIC = "ROBUSTNET"
VERSION = "1"


class _Tokens:
    def __init__(self, text):
        self.items = []
        for lineno, line in enumerate(text.splitlines(), 1):
            body = line.split("#", 1)[0]
            self.items.extend((tok, lineno) for tok in body.split())
        self.pos = 0

    def peek(self):
        return self.items[self.pos][0] if self.pos < len(self.items) else None

    def next(self, what="token"):
        if self.pos >= len(self.items):
            raise FormatError(f"unexpected end of input, expected {what}")
        tok = self.items[self.pos]
        self.pos += 1
        return tok

    def word(self, expected):
        tok, line = self.next(repr(expected))
        if tok != expected:
            raise FormatError(f"line {line}: expected {expected!r}, got {tok!r}")

    def int(self, what, minimum=0):
        tok, line = self.next(what)
        try:
            value = int(tok)
        except ValueError:
            raise FormatError(f"line {line}: {what} must be an integer, got {tok!r}") from None
        if value < minimum:
            raise FormatError(f"line {line}: {what} must be >= {minimum}, got {value}")
        return value

    def rest_of_line(self, line):
        out = []
        while self.pos < len(self.items) and self.items[self.pos][1] == line:
            out.append(self.items[self.pos][0])
            self.pos += 1
        return " ".join(out)


def parse_instance(text: str) -> RobustInstance:
    tok = _Tokens(text)
    tok.word(MAGIC)
    version, line = tok.next("format version")
    if version != VERSION:
        raise FormatError(f"line {line}: unsupported format version {version!r}")

    tok.word("problem")
    family, line = tok.next("problem family")
    if family not in FAMILIES:
        raise FormatError(f"line {line}: unknown problem family {family!r}")
    tok.word("directed")
    directed = tok.int("directed flag")
    if directed not in (0, 1):
        raise FormatError("directed flag must be 0 or 1")
    tok.word("nodes")
    nodes = tok.int("node count", 1)
    source = sink = None
    if tok.peek() == "source":
        tok.next()
        source = tok.int("source")
    if tok.peek() == "sink":
        tok.next()
        sink = tok.int("sink")

    tok.word("edges")
    m = tok.int("edge count")
    edges = []
    for i in range(m):
        tok.word("e")
        eid = tok.int("edge id")
        if eid != i:
            raise FormatError(f"edge ids must be 0..{m - 1} in order; got {eid} at position {i}")
        edges.append((tok.int("tail"), tok.int("head")))

    tok.word("scenarios")
    k = tok.int("scenario count")
    rows = []
    for _ in range(k):
        tok.word("s")
        nnz = tok.int("nonzero count")
        row = []
        for _ in range(nnz):
            e = tok.int("edge id")
            c = tok.int("cost")
            row.append((e, c))
        rows.append(tuple(sorted(row)))

    graph = Graph(nodes, tuple(edges), bool(directed), source, sink)
    tree = None
    if tok.peek() == "sptree":
        _, line = tok.next()
        tree = parse_tree(tok.rest_of_line(line), graph.edges)
    tok.word("end")
    if tok.peek() is not None:
        raise FormatError("trailing content after 'end'")
    return RobustInstance(family, graph, ScenarioSet(tuple(rows)), tree)


def serialize_instance(inst: RobustInstance) -> str:
    g = inst.graph
    out = [f"{MAGIC} {VERSION}"]
    for key, value in inst.metadata.items():
        out.append(f"# {key}: {value}")
    out.append(f"problem {inst.family}")
    out.append(f"directed {int(g.directed)}")
    out.append(f"nodes {g.node_count}")
    if g.source is not None:
        out.append(f"source {g.source}")
    if g.sink is not None:
        out.append(f"sink {g.sink}")
    out.append(f"edges {g.edge_count}")
    out.extend(f"e {i} {u} {v}" for i, (u, v) in enumerate(g.edges))
    out.append(f"scenarios {inst.scenarios.count}")
    for row in inst.scenarios.rows:
        parts = [f"s {len(row)}"]
        parts.extend(f"{e} {c}" for e, c in sorted(row))
        out.append(" ".join(parts))
    if inst.sp_tree is not None:
        out.append("sptree " + format_tree(inst.sp_tree))
    out.append("end")
    return "\n".join(out) + "\n"


def canonical(inst: RobustInstance) -> RobustInstance:
    """Instance with scenario rows sorted by edge id."""
    rows = tuple(tuple(sorted(r)) for r in inst.scenarios.rows)
    return RobustInstance(inst.family, inst.graph, ScenarioSet(rows), inst.sp_tree, inst.metadata)


def parse_solution(text: str):
    """Return ``(value, Solution)``; ``value`` is None when the file omits it."""
    tok = _Tokens(text)
    value = None
    if tok.peek() == "value":
        tok.next()
        value = tok.int("value", minimum=-(2**62))
    tok.word("edges")
    ids = []
    while tok.peek() is not None:
        ids.append(tok.int("edge id"))
    if len(set(ids)) != len(ids):
        raise FormatError("duplicate edge id in solution")
    return value, Solution(ids)


def serialize_solution(solution: Solution, value=None) -> str:
    lines = []
    if value is not None:
        lines.append(f"value {value}")
    lines.append(" ".join(["edges"] + [str(e) for e in solution.sorted()]))
    return "\n".join(lines) + "\n"
