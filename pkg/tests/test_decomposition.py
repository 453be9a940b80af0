import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import L_SHAPE, SQUARE, regular_polygon
from skeg.decomposition import build_decomp_tree, locate_sites, share_bounds
from skeg.errors import SiteOutsidePolygon
from skeg.geometry import Point, generate_star_polygon, triangulate, validate_polygon
from skeg.oracle import random_simple_polygon, random_sites


def check_tree(p, t, tree):
    assert sorted(leaf.triangle for leaf in tree.leaves()) == list(range(len(t.triangles)))
    for node in tree.nodes:
        if node.is_leaf:
            continue
        f = node.vertex_count
        lo, hi = share_bounds(f)
        for child in node.children():
            assert lo <= child.vertex_count - 1 <= hi
        assert node.left.triangles | node.right.triangles == node.triangles
        assert not node.left.triangles & node.right.triangles
        i, j = node.diagonal
        assert (min(i, j), max(i, j)) in {tuple(d) for d in t.diagonals}
    m = len(p.vertices)
    assert tree.height <= math.log(m) / math.log(1.5) + 2


def test_triangle_is_single_leaf():
    p = validate_polygon([(0, 0), (1, 0), (0, 1)])
    tree = build_decomp_tree(p, triangulate(p))
    assert tree.root.is_leaf and tree.height == 0


def test_square_tree():
    p = validate_polygon(SQUARE)
    t = triangulate(p)
    tree = build_decomp_tree(p, t)
    assert tree.height == 1
    assert not tree.root.is_leaf and len(tree.root.children()) == 2


def test_convex_16gon_balance():
    p = regular_polygon(16)
    t = triangulate(p)
    tree = build_decomp_tree(p, t)
    assert tree.height <= math.ceil(math.log(16) / math.log(1.5))
    check_tree(p, t, tree)


def test_share_bounds_small_faces():
    assert share_bounds(4) == (2, 2)
    assert share_bounds(5) == (2, 3)
    assert share_bounds(16) == (6, 10)


def test_square_site_split():
    p = validate_polygon(SQUARE)
    t = triangulate(p)
    tree = build_decomp_tree(p, t)
    i, j = tree.root.diagonal
    diag = {p.vertices[i], p.vertices[j]}
    if diag == {Point(0, 0), Point(4, 4)}:
        sites = [(1, 3), (3, 1)]
    else:
        sites = [(1, 1), (3, 3)]
    a = locate_sites(p, t, tree, sites)
    assert a.count(tree.root.left) == 1 and a.count(tree.root.right) == 1


def test_no_sites():
    p = validate_polygon(L_SHAPE)
    t = triangulate(p)
    tree = build_decomp_tree(p, t)
    a = locate_sites(p, t, tree, [])
    assert all(a.count(nd) == 0 for nd in tree.nodes)


def test_site_outside():
    p = validate_polygon(L_SHAPE)
    t = triangulate(p)
    tree = build_decomp_tree(p, t)
    with pytest.raises(SiteOutsidePolygon) as err:
        locate_sites(p, t, tree, [(0.5, 0.5), (1.5, 1.5)])
    assert err.value.index == 1


def brute_triangle(t, s):
    for i, tri in enumerate(t.triangles):
        a, b, c = (t.polygon.vertices[v] for v in tri)
        d1 = (b.x - a.x) * (s[1] - a.y) - (b.y - a.y) * (s[0] - a.x)
        d2 = (c.x - b.x) * (s[1] - b.y) - (c.y - b.y) * (s[0] - b.x)
        d3 = (a.x - c.x) * (s[1] - c.y) - (a.y - c.y) * (s[0] - c.x)
        if min(d1, d2, d3) >= -1e-12:
            return i
    raise AssertionError("site not in any triangle")


def check_assignment(p, t, tree, sites, a):
    n = len(sites)
    assert sorted(a.order) == list(range(n))
    assert a.intervals[tree.root.id] == (0, n)
    for node in tree.nodes:
        if node.is_leaf:
            assert all(a.triangle_of_site[i] == node.triangle for i in a.sites_of(node))
        else:
            ls, le = a.intervals[node.left.id]
            rs, re_ = a.intervals[node.right.id]
            assert (ls, re_) == a.intervals[node.id] and le == rs
    for i, s in enumerate(sites):
        assert a.triangle_of_site[i] == brute_triangle(t, s)


def test_lshape_random_sites():
    p = validate_polygon(L_SHAPE)
    t = triangulate(p)
    tree = build_decomp_tree(p, t)
    sites = random_sites(np.random.default_rng(10), p, 10)
    check_assignment(p, t, tree, sites, locate_sites(p, t, tree, sites))


@given(st.integers(0, 2**32 - 1), st.integers(3, 60), st.integers(0, 30))
@settings(max_examples=60, deadline=None)
def test_tree_and_assignment_properties(seed, m, n):
    rng = np.random.default_rng(seed)
    p = random_simple_polygon(rng, m)
    t = triangulate(p)
    tree = build_decomp_tree(p, t)
    check_tree(p, t, tree)
    sites = random_sites(rng, p, n)
    check_assignment(p, t, tree, sites, locate_sites(p, t, tree, sites))


def test_star_tree():
    p = generate_star_polygon(12)
    t = triangulate(p)
    check_tree(p, t, build_decomp_tree(p, t))
