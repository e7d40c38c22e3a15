from robustnet import sptree as spt
from robustnet.sptree import Leaf, format_tree, parse_tree


def test_parse_format_round_trip():
    edges = ((0, 1), (1, 3), (0, 3))
    tree = parse_tree("(P (S (L 0) (L 1)) (L 2))", edges)
    assert format_tree(tree) == "(P (S (L 0) (L 1)) (L 2))"
    assert (tree.left, tree.right) == (0, 3)
    assert list(spt.leaves(tree)) == [0, 1, 2]
    assert spt.check(tree, edges) == []


def test_single_children_collapse():
    leaf = Leaf(0, 0, 1)
    assert spt.series([leaf]) is leaf
    assert spt.parallel([leaf]) is leaf


def test_check_reports_bad_terminals():
    edges = ((0, 1), (2, 3))
    tree = spt.Series((Leaf(0, 0, 1), Leaf(1, 2, 3)), 0, 3)
    assert spt.check(tree, edges)


def test_check_reports_missing_edge():
    edges = ((0, 1), (0, 1))
    assert spt.check(Leaf(0, 0, 1), edges, 2)
