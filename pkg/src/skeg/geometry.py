"""Polygon representation, validation, predicates and ear-clipping triangulation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateVertex,
    PointOutsidePolygon,
    SelfIntersecting,
    TooFewVertices,
    TriangulationError,
)

# absolute tolerance on cross products used by on-segment / containment tests
EPS = 1e-12


class Point(NamedTuple):
    x: float
    y: float


def as_point(p) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite coordinate in {p!r}")
    return Point(x, y)


def orient(a, b, c) -> float:
    """Twice the signed area of (a, b, c); positive when c lies left of a->b."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def dist(a, b) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def on_segment(p, a, b, eps: float = EPS) -> bool:
    if abs(orient(a, b, p)) > eps:
        return False
    return (min(a[0], b[0]) - eps <= p[0] <= max(a[0], b[0]) + eps
            and min(a[1], b[1]) - eps <= p[1] <= max(a[1], b[1]) + eps)


def segments_intersect(p1, p2, q1, q2, eps: float = EPS) -> bool:
    """Closed-segment intersection test (touching counts)."""
    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and \
            ((d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)):
        return True
    return (on_segment(p1, q1, q2, eps) or on_segment(p2, q1, q2, eps)
            or on_segment(q1, p1, p2, eps) or on_segment(q2, p1, p2, eps))


def signed_area(vertices: Sequence) -> float:
    s = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


@dataclass(frozen=True, eq=False)
class Polygon:
    """Counter-clockwise simple polygon. Build through :func:`validate_polygon`."""

    vertices: tuple[Point, ...]
    reflex_indices: frozenset[int]

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def edges(self):
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    @cached_property
    def edge_array(self) -> np.ndarray:
        """(m, 2, 2) array of boundary edges."""
        v = np.asarray(self.vertices, dtype=float)
        return np.stack([v, np.roll(v, -1, axis=0)], axis=1)

    @cached_property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def reflex_vertices(self) -> list[Point]:
        return [self.vertices[i] for i in sorted(self.reflex_indices)]

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def on_boundary(self, p, eps: float = EPS) -> bool:
        return any(on_segment(p, a, b, eps) for a, b in self.edges)

    def contains(self, p, eps: float = EPS) -> bool:
        """Closed containment: boundary points count as inside."""
        if self.on_boundary(p, eps):
            return True
        return _crossing_parity(self.vertices, p)

    def to_json(self) -> dict:
        return {"vertices": [[v.x, v.y] for v in self.vertices]}


def _crossing_parity(vertices, p) -> bool:
    x, y = p[0], p[1]
    inside = False
    n = len(vertices)
    j = n - 1
    for i in range(n):
        xi, yi = vertices[i]
        xj, yj = vertices[j]
        if (yi > y) != (yj > y):
            xc = xi + (y - yi) * (xj - xi) / (yj - yi)
            if xc > x:
                inside = not inside
        j = i
    return inside


def points_in_polygon(poly: Polygon, pts: np.ndarray, eps: float = EPS) -> np.ndarray:
    """Vectorized closed containment for an (N, 2) array."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    e = poly.edge_array
    a = e[:, 0][None, :, :]
    b = e[:, 1][None, :, :]
    p = pts[:, None, :]
    ay, by = a[..., 1], b[..., 1]
    ax, bx = a[..., 0], b[..., 0]
    px, py = p[..., 0], p[..., 1]
    straddle = (ay > py) != (by > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = ax + (py - ay) * (bx - ax) / (by - ay)
    hits = straddle & (xc > px)
    inside = (hits.sum(axis=1) % 2) == 1
    cr = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    within = ((np.minimum(ax, bx) - eps <= px) & (px <= np.maximum(ax, bx) + eps)
              & (np.minimum(ay, by) - eps <= py) & (py <= np.maximum(ay, by) + eps))
    boundary = ((np.abs(cr) <= eps) & within).any(axis=1)
    return inside | boundary


def validate_polygon(vertices: Iterable) -> Polygon:
    pts = [as_point(v) for v in vertices]
    n = len(pts)
    if n < 3:
        raise TooFewVertices(f"need at least 3 vertices, got {n}")
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        if dist(a, b) <= EPS:
            raise DegenerateVertex(f"repeated vertex at index {i}: {tuple(b)}")
        scale = dist(a, b) * dist(b, c)
        if abs(orient(a, b, c)) <= EPS * max(scale, 1.0):
            raise DegenerateVertex(f"collinear vertex at index {i}: {tuple(b)}")
    _check_simple(pts)
    area = signed_area(pts)
    if abs(area) <= EPS:
        raise DegenerateVertex("polygon has zero area")
    if area < 0:
        pts.reverse()
    reflex = frozenset(
        i for i in range(n) if orient(pts[i - 1], pts[i], pts[(i + 1) % n]) < 0
    )
    return Polygon(tuple(pts), reflex)


def _check_simple(pts: list[Point]) -> None:
    n = len(pts)
    if n == 3:
        return
    v = np.asarray(pts, dtype=float)
    a = v
    b = np.roll(v, -1, axis=0)
    for i in range(n):
        # edges j > i that are not adjacent to edge i
        js = np.arange(i + 2, n if i > 0 else n - 1)
        if js.size == 0:
            continue
        p1, p2 = a[i], b[i]
        q1, q2 = a[js], b[js]
        d1 = _orient_v(q1, q2, p1)
        d2 = _orient_v(q1, q2, p2)
        d3 = _orient_v(p1, p2, q1)
        d4 = _orient_v(p1, p2, q2)
        proper = (((d1 > EPS) & (d2 < -EPS)) | ((d1 < -EPS) & (d2 > EPS))) & \
                 (((d3 > EPS) & (d4 < -EPS)) | ((d3 < -EPS) & (d4 > EPS)))
        cand = np.nonzero(proper | (np.abs(d1) <= EPS) | (np.abs(d2) <= EPS)
                          | (np.abs(d3) <= EPS) | (np.abs(d4) <= EPS))[0]
        for c in cand:
            j = int(js[c])
            if segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                raise SelfIntersecting(f"edges {i} and {j} intersect")


def _orient_v(a, b, c):
    a = np.asarray(a)
    b = np.asarray(b)
    c = np.asarray(c)
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - \
        (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def is_convex(p: Polygon) -> bool:
    return not p.reflex_indices


def simplify_polygon(p: Polygon) -> Polygon:
    """Reduce the polygon to its geodesically relevant part.

    Currently the identity; callers go through here so a size-reducing
    simplification can be dropped in without touching them.
    """
    return p


def generate_star_polygon(spikes: int) -> Polygon:
    """Star with tips at radius 2.0 and reflex vertices at radius 0.5."""
    if spikes < 3:
        raise ValueError("a star polygon needs at least 3 spikes")
    verts = []
    for i in range(2 * spikes):
        ang = math.pi * i / spikes
        r = 2.0 if i % 2 == 0 else 0.5
        verts.append((r * math.cos(ang), r * math.sin(ang)))
    return validate_polygon(verts)


@dataclass(frozen=True)
class Chord:
    a: Point
    b: Point

    def __post_init__(self):
        if dist(self.a, self.b) <= EPS:
            raise ValueError("chord endpoints coincide")

    @property
    def length(self) -> float:
        return dist(self.a, self.b)

    def point_at(self, x: float) -> Point:
        """Point at arclength ``x`` from ``a``."""
        t = x / self.length
        return Point(self.a.x + t * (self.b.x - self.a.x), self.a.y + t * (self.b.y - self.a.y))

    def param_of(self, p) -> float:
        dx, dy = self.b.x - self.a.x, self.b.y - self.a.y
        return ((p[0] - self.a.x) * dx + (p[1] - self.a.y) * dy) / self.length


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Triangles as CCW vertex-index triples plus the diagonals between them."""

    polygon: Polygon
    triangles: tuple[tuple[int, int, int], ...]
    diagonals: tuple[tuple[int, int], ...]
    # per triangle: list of (neighbour triangle, (i, j)) shared edges
    adjacency: tuple[tuple[tuple[int, tuple[int, int]], ...], ...] = field(repr=False)

    def chords(self) -> list[Chord]:
        v = self.polygon.vertices
        return [Chord(v[i], v[j]) for i, j in self.diagonals]

    def triangle_points(self, t: int) -> tuple[Point, Point, Point]:
        v = self.polygon.vertices
        i, j, k = self.triangles[t]
        return v[i], v[j], v[k]

    def triangle_area(self, t: int) -> float:
        a, b, c = self.triangle_points(t)
        return 0.5 * orient(a, b, c)

    @cached_property
    def _tri_array(self) -> np.ndarray:
        v = np.asarray(self.polygon.vertices, dtype=float)
        return v[np.asarray(self.triangles, dtype=int)]

    def containing_triangles(self, p, eps: float = EPS) -> list[int]:
        """Indices of all triangles whose closed interior contains ``p``."""
        tri = self._tri_array
        a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
        x, y = p[0], p[1]
        o1 = (b[:, 0] - a[:, 0]) * (y - a[:, 1]) - (b[:, 1] - a[:, 1]) * (x - a[:, 0])
        o2 = (c[:, 0] - b[:, 0]) * (y - b[:, 1]) - (c[:, 1] - b[:, 1]) * (x - b[:, 0])
        o3 = (a[:, 0] - c[:, 0]) * (y - c[:, 1]) - (a[:, 1] - c[:, 1]) * (x - c[:, 0])
        ok = (o1 >= -eps) & (o2 >= -eps) & (o3 >= -eps)
        return [int(i) for i in np.nonzero(ok)[0]]

    def locate(self, p, eps: float = EPS) -> int:
        """Lowest-index triangle containing ``p`` (linear scan)."""
        hits = self.containing_triangles(p, eps)
        if not hits:
            raise PointOutsidePolygon(p)
        return hits[0]

    def triangle_contains(self, t: int, p, eps: float = EPS) -> bool:
        a, b, c = self.triangle_points(t)
        return orient(a, b, p) >= -eps and orient(b, c, p) >= -eps and orient(c, a, p) >= -eps

    @cached_property
    def engine(self):
        from .geodesic import GeodesicEngine

        return GeodesicEngine(self)


def triangulate(p: Polygon) -> Triangulation:
    """Ear clipping, O(m^2): ear status is cached and only refreshed locally."""
    verts = p.vertices
    n = len(verts)
    if n == 3:
        return _assemble(p, [(0, 1, 2)])
    prev = {i: (i - 1) % n for i in range(n)}
    nxt = {i: (i + 1) % n for i in range(n)}
    reflex = {i for i in range(n) if orient(verts[prev[i]], verts[i], verts[nxt[i]]) <= 0}
    ears: dict[int, float] = {}

    def refresh(i):
        ears.pop(i, None)
        if i in reflex:
            return
        a, b, c = verts[prev[i]], verts[i], verts[nxt[i]]
        for r in reflex:
            if r == prev[i] or r == nxt[i]:
                continue
            q = verts[r]
            if q == a or q == b or q == c:
                continue
            if orient(a, b, q) >= -EPS and orient(b, c, q) >= -EPS and orient(c, a, q) >= -EPS:
                return
        ears[i] = _min_angle_sine(a, b, c)

    for i in range(n):
        refresh(i)
    triangles: list[tuple[int, int, int]] = []
    remaining = n
    while remaining > 3:
        if not ears:
            raise TriangulationError("no ear found; polygon is degenerate")
        # the fattest ear keeps triangles well shaped
        i = max(ears, key=lambda e: (ears[e], -e))
        ip, inx = prev[i], nxt[i]
        triangles.append((ip, i, inx))
        del ears[i]
        nxt[ip], prev[inx] = inx, ip
        del prev[i], nxt[i]
        remaining -= 1
        unblocked = False
        for j in (ip, inx):
            if j in reflex and orient(verts[prev[j]], verts[j], verts[nxt[j]]) > 0:
                reflex.discard(j)
                unblocked = True
        if unblocked:
            for j in list(prev):
                if j not in ears:
                    refresh(j)
        refresh(ip)
        refresh(inx)
    a = next(iter(prev))
    triangles.append((prev[a], a, nxt[a]))
    return _assemble(p, triangles)


def _min_angle_sine(a, b, c) -> float:
    area2 = abs(orient(a, b, c))
    la, lb, lc = dist(b, c), dist(a, c), dist(a, b)
    return area2 / max(la * lb, lb * lc, la * lc)


def _assemble(p: Polygon, triangles: list[tuple[int, int, int]]) -> Triangulation:
    n = len(p.vertices)
    edge_owner: dict[tuple[int, int], list[int]] = {}
    for t, tri in enumerate(triangles):
        for e in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            edge_owner.setdefault((min(e), max(e)), []).append(t)
    adjacency: list[list[tuple[int, tuple[int, int]]]] = [[] for _ in triangles]
    diagonals = []
    for e, owners in sorted(edge_owner.items()):
        if len(owners) == 2:
            diagonals.append(e)
            t0, t1 = owners
            adjacency[t0].append((t1, e))
            adjacency[t1].append((t0, e))
        elif len(owners) != 1 or (e[1] - e[0]) % n not in (1, n - 1):
            raise TriangulationError(f"malformed triangulation at edge {e}")
    return Triangulation(
        polygon=p,
        triangles=tuple(triangles),
        diagonals=tuple(diagonals),
        adjacency=tuple(tuple(a) for a in adjacency),
    )
