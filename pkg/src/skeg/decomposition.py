"""Balanced hierarchical decomposition of a triangulated polygon and site location."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import NoBalancedDiagonal, PointOutsidePolygon, SiteOutsidePolygon
from .geometry import Chord, Polygon, Triangulation


@dataclass(eq=False)
class DecompNode:
    id: int
    triangles: frozenset[int]
    depth: int
    diagonal: tuple[int, int] | None = None
    triangle: int | None = None
    left: DecompNode | None = None
    right: DecompNode | None = None

    @property
    def is_leaf(self) -> bool:
        return self.triangle is not None

    @property
    def vertex_count(self) -> int:
        return len(self.triangles) + 2

    def children(self) -> list[DecompNode]:
        return [c for c in (self.left, self.right) if c is not None]


@dataclass(eq=False)
class DecompTree:
    root: DecompNode
    nodes: list[DecompNode]
    leaf_of_triangle: dict[int, DecompNode]
    triangulation: Triangulation = field(repr=False)

    @property
    def height(self) -> int:
        return max(n.depth for n in self.nodes)

    def chord(self, node: DecompNode) -> Chord:
        v = self.triangulation.polygon.vertices
        i, j = node.diagonal
        return Chord(v[i], v[j])

    def leaves(self) -> list[DecompNode]:
        """Leaves in left-to-right (post-order) sequence."""
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.append(node.right)
                stack.append(node.left)
        return out


def share_bounds(f: int) -> tuple[int, int]:
    """Allowed [lo, hi] share of a split of an f-vertex face."""
    return math.ceil(f / 3), (2 * f) // 3


def build_decomp_tree(p: Polygon, t: Triangulation) -> DecompTree:
    nodes: list[DecompNode] = []
    leaf_of: dict[int, DecompNode] = {}

    def make(tris: frozenset[int], depth: int) -> DecompNode:
        node = DecompNode(id=len(nodes), triangles=tris, depth=depth)
        nodes.append(node)
        if len(tris) == 1:
            (node.triangle,) = tris
            leaf_of[node.triangle] = node
            return node
        edge, side_a, side_b = _balanced_split(t, tris)
        node.diagonal = edge
        node.left = make(side_a, depth + 1)
        node.right = make(side_b, depth + 1)
        return node

    root = make(frozenset(range(len(t.triangles))), 0)
    return DecompTree(root=root, nodes=nodes, leaf_of_triangle=leaf_of, triangulation=t)


def _balanced_split(t: Triangulation, tris: frozenset[int]):
    """Find the first dual edge whose cut leaves both sides within share bounds.

    Each side's share is its subpolygon vertex count minus one, so the two
    shares partition the face's vertices.
    """
    start = min(tris)
    parent = {start: None}
    via: dict[int, tuple[int, int]] = {}
    order = [start]
    stack = [start]
    while stack:
        cur = stack.pop()
        for nb, e in t.adjacency[cur]:
            if nb in tris and nb not in parent:
                parent[nb] = cur
                via[nb] = e
                order.append(nb)
                stack.append(nb)
    size = {v: 1 for v in order}
    for v in reversed(order):
        if parent[v] is not None:
            size[parent[v]] += size[v]
    total = len(tris)
    lo, hi = share_bounds(total + 2)
    for v in order[1:]:
        s = size[v]
        if lo <= s + 1 <= hi and lo <= total - s + 1 <= hi:
            sub = _collect(v, parent, order)
            rest = tris - sub
            return via[v], rest, sub
    raise NoBalancedDiagonal(f"no balanced diagonal among {total} triangles")


def _collect(v: int, parent: dict, order: list[int]) -> frozenset[int]:
    inside = {v}
    for u in order:
        p = parent[u]
        if p is not None and p in inside:
            inside.add(u)
    return frozenset(inside)


@dataclass
class SiteAssignment:
    """Sites grouped by leaf: ``order`` is the permutation array, intervals index it."""

    order: list[int]
    intervals: dict[int, tuple[int, int]]
    triangle_of_site: list[int]

    def sites_of(self, node: DecompNode) -> list[int]:
        s, e = self.intervals[node.id]
        return self.order[s:e]

    def count(self, node: DecompNode) -> int:
        s, e = self.intervals[node.id]
        return e - s


def locate_sites(p: Polygon, t: Triangulation, tree: DecompTree, sites: Sequence) -> SiteAssignment:
    per_triangle: dict[int, list[int]] = {}
    tri_of = []
    for i, s in enumerate(sites):
        try:
            tri = t.locate(s)
        except PointOutsidePolygon:
            raise SiteOutsidePolygon(s, i) from None
        tri_of.append(tri)
        per_triangle.setdefault(tri, []).append(i)
    order: list[int] = []
    intervals: dict[int, tuple[int, int]] = {}

    def visit(node: DecompNode):
        if node.is_leaf:
            start = len(order)
            order.extend(per_triangle.get(node.triangle, []))
            intervals[node.id] = (start, len(order))
            return
        visit(node.left)
        visit(node.right)
        intervals[node.id] = (intervals[node.left.id][0], intervals[node.right.id][1])

    visit(tree.root)
    return SiteAssignment(order=order, intervals=intervals, triangle_of_site=tri_of)
