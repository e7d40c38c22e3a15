"""Series-parallel decomposition trees.

A tree is built from three node kinds.  Every node carries the pair of
graph nodes it connects (``left`` and ``right``).  A :class:`Leaf` stands
for one edge oriented ``left -> right``; a :class:`Series` chains its
children so that each child's ``right`` is the next child's ``left``; a
:class:`Parallel` node joins children that all share both terminals.

The text form used in instance files omits the terminals, which are
recovered from the graph's edge list::

    (S (P (L 0) (L 1)) (L 2))
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .exceptions import FormatError


@dataclass(frozen=True)
class Leaf:
    edge: int
    left: int
    right: int


@dataclass(frozen=True)
class Series:
    children: tuple
    left: int
    right: int


@dataclass(frozen=True)
class Parallel:
    children: tuple
    left: int
    right: int


SPTree = Union[Leaf, Series, Parallel]


def series(children) -> SPTree:
    children = tuple(children)
    if len(children) == 1:
        return children[0]
    return Series(children, children[0].left, children[-1].right)


def parallel(children) -> SPTree:
    children = tuple(children)
    if len(children) == 1:
        return children[0]
    return Parallel(children, children[0].left, children[0].right)


def leaves(tree: SPTree) -> Iterator[int]:
    """Yield leaf edge ids in left-to-right order."""
    stack = [tree]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            yield node.edge
        else:
            stack.extend(reversed(node.children))


def relabel(tree: SPTree, edge_map, node_map) -> SPTree:
    """Return a copy of ``tree`` with edge and node ids passed through the maps.

    Both maps are callables.
    """
    if isinstance(tree, Leaf):
        return Leaf(edge_map(tree.edge), node_map(tree.left), node_map(tree.right))
    children = tuple(relabel(c, edge_map, node_map) for c in tree.children)
    return type(tree)(children, node_map(tree.left), node_map(tree.right))


def substitute(tree: SPTree, replace) -> SPTree:
    """Replace each leaf by ``replace(leaf)`` (which may return a subtree)."""
    if isinstance(tree, Leaf):
        return replace(tree)
    return type(tree)(tuple(substitute(c, replace) for c in tree.children), tree.left, tree.right)


def check(tree: SPTree, edges, edge_count: int | None = None) -> list[str]:
    """List structural violations of ``tree`` against an edge list.

    ``edges`` is a sequence of ``(tail, head)`` pairs indexed by edge id.
    """
    problems = []
    seen = []

    def visit(node):
        if isinstance(node, Leaf):
            if not 0 <= node.edge < len(edges):
                problems.append(f"sptree leaf refers to unknown edge {node.edge}")
                return
            seen.append(node.edge)
            if tuple(edges[node.edge]) != (node.left, node.right):
                problems.append(f"sptree leaf {node.edge} terminals do not match edge endpoints")
            return
        if len(node.children) < 2:
            problems.append("sptree inner node with fewer than two children")
        for child in node.children:
            visit(child)
        if isinstance(node, Series):
            ends = [node.left] + [c.right for c in node.children]
            starts = [c.left for c in node.children] + [node.right]
            if ends != starts:
                problems.append("sptree series children do not chain")
        else:
            for child in node.children:
                if (child.left, child.right) != (node.left, node.right):
                    problems.append("sptree parallel children do not share terminals")
                    break

    visit(tree)
    total = len(edges) if edge_count is None else edge_count
    if sorted(seen) != list(range(total)):
        problems.append("sptree leaves do not partition the edge set")
    return problems


def format_tree(tree: SPTree) -> str:
    if isinstance(tree, Leaf):
        return f"(L {tree.edge})"
    tag = "S" if isinstance(tree, Series) else "P"
    return "(" + tag + " " + " ".join(format_tree(c) for c in tree.children) + ")"


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_tree(text: str, edges) -> SPTree:
    """Parse the parenthesized form, taking terminals from ``edges``."""
    tokens = _tokenize(text)
    pos = 0

    def expect(tok):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != tok:
            got = tokens[pos] if pos < len(tokens) else "end of input"
            raise FormatError(f"sptree: expected {tok!r}, got {got!r}")
        pos += 1

    def node():
        nonlocal pos
        expect("(")
        if pos >= len(tokens):
            raise FormatError("sptree: truncated expression")
        tag = tokens[pos]
        pos += 1
        if tag == "L":
            try:
                edge = int(tokens[pos])
            except (IndexError, ValueError):
                raise FormatError("sptree: leaf needs an integer edge id") from None
            pos += 1
            expect(")")
            if not 0 <= edge < len(edges):
                raise FormatError(f"sptree: unknown edge {edge}")
            tail, head = edges[edge]
            return Leaf(edge, tail, head)
        if tag not in ("S", "P"):
            raise FormatError(f"sptree: unknown node tag {tag!r}")
        children = []
        while pos < len(tokens) and tokens[pos] == "(":
            children.append(node())
        expect(")")
        if len(children) < 2:
            raise FormatError("sptree: inner node needs at least two children")
        if tag == "S":
            return Series(tuple(children), children[0].left, children[-1].right)
        return Parallel(tuple(children), children[0].left, children[0].right)

    tree = node()
    if pos != len(tokens):
        raise FormatError("sptree: trailing tokens after expression")
    return tree
