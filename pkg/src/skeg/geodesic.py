"""Geodesic shortest paths via the funnel algorithm over the triangle sleeve.

Also builds funnels from a point to a chord, the piecewise-hyperbolic
distance function along the chord, chord projections, and disc/chord
intersections.
"""
from __future__ import annotations

import bisect
import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Chord, Point, Polygon, Triangulation, as_point, dist, orient


@dataclass(frozen=True)
class GeodesicPath:
    waypoints: tuple[Point, ...]
    cumulative: tuple[float, ...]

    @property
    def length(self) -> float:
        return self.cumulative[-1]

    @classmethod
    def from_points(cls, pts: Sequence) -> GeodesicPath:
        pts = tuple(Point(*p) for p in pts)
        cum = [0.0]
        for a, b in zip(pts, pts[1:]):
            cum.append(cum[-1] + dist(a, b))
        return cls(pts, tuple(cum))

    def point_at(self, s: float) -> Point:
        """Point at arclength ``s`` from the source."""
        if len(self.waypoints) == 1 or s <= 0:
            return self.waypoints[0]
        if s >= self.length:
            return self.waypoints[-1]
        i = bisect.bisect_right(self.cumulative, s) - 1
        a, b = self.waypoints[i], self.waypoints[i + 1]
        seg = self.cumulative[i + 1] - self.cumulative[i]
        t = (s - self.cumulative[i]) / seg
        return Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))


def path_midpoint(path: GeodesicPath) -> Point:
    return path.point_at(path.length / 2)


@dataclass(frozen=True)
class Funnel:
    apex: Point
    chain_to_a: tuple[Point, ...]
    chain_to_b: tuple[Point, ...]
    apex_offset: float
    offsets_a: tuple[float, ...]
    offsets_b: tuple[float, ...]


@dataclass(frozen=True)
class HyperbolicPiece:
    """One branch ``sqrt((x - wx)^2 + wy^2) + offset`` valid on ``[lo, hi]``."""

    anchor: tuple[float, float]
    offset: float
    lo: float
    hi: float
    world_anchor: Point

    def value(self, x: float) -> float:
        wx, wy = self.anchor
        return math.hypot(x - wx, wy) + self.offset

    def to_json(self) -> dict:
        return {"anchor": list(self.anchor), "offset": self.offset, "domain": [self.lo, self.hi]}


@dataclass(frozen=True)
class ChordInterval:
    lo: float
    hi: float
    owner: int


class DistanceFunction:
    """Geodesic distance from a fixed source to the points of a chord."""

    def __init__(self, chord: Chord, pieces: list[HyperbolicPiece]):
        self.chord = chord
        self.pieces = pieces
        self._bounds = [pc.lo for pc in pieces[1:]]
        self._wx = np.array([pc.anchor[0] for pc in pieces])
        self._wy = np.array([pc.anchor[1] for pc in pieces])
        self._off = np.array([pc.offset for pc in pieces])
        minimum = None
        for pc in pieces:
            x = min(max(pc.anchor[0], pc.lo), pc.hi)
            v = pc.value(x)
            if minimum is None or v < minimum[1]:
                minimum = (x, v)
        # projection parameter and its distance
        self.argmin, self.min_value = minimum

    def piece_index(self, x: float) -> int:
        return bisect.bisect_right(self._bounds, x)

    def __call__(self, x: float) -> float:
        return self.pieces[self.piece_index(x)].value(x)

    def evaluate(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        idx = np.searchsorted(np.asarray(self._bounds), xs, side="right")
        return np.hypot(xs - self._wx[idx], self._wy[idx]) + self._off[idx]

    def interval(self, rho: float, owner: int = -1) -> ChordInterval | None:
        """Sub-interval of the chord within distance ``rho``; None when empty."""
        if self.min_value > rho:
            return None
        L = self.chord.length
        xc = self.argmin
        k = self.piece_index(xc)
        lo = 0.0
        if self(0.0) > rho:
            for j in range(k, -1, -1):
                pc = self.pieces[j]
                if pc.value(pc.lo) > rho:
                    r = rho - pc.offset
                    x = pc.anchor[0] - math.sqrt(max(r * r - pc.anchor[1] ** 2, 0.0))
                    lo = min(max(x, pc.lo), min(pc.hi, xc))
                    break
        hi = L
        if self(L) > rho:
            for j in range(k, len(self.pieces)):
                pc = self.pieces[j]
                if pc.value(pc.hi) > rho:
                    r = rho - pc.offset
                    x = pc.anchor[0] + math.sqrt(max(r * r - pc.anchor[1] ** 2, 0.0))
                    hi = max(min(x, pc.hi), max(pc.lo, xc))
                    break
        return ChordInterval(lo, hi, owner)

    def to_json(self) -> list[dict]:
        return [pc.to_json() for pc in self.pieces]


class GeodesicEngine:
    """Shortest-path queries inside one triangulated polygon.

    Each query walks the dual-tree path between the two triangles holding
    the endpoints and runs the funnel algorithm over the portals, O(m).
    """

    def __init__(self, t: Triangulation):
        self.tri = t
        self.polygon: Polygon = t.polygon
        self._verts = t.polygon.vertices
        self._locate_cache: dict[tuple[float, float], int] = {}
        # root the dual tree once so sleeve paths come from parent links
        n = len(t.triangles)
        self._parent = [-1] * n
        self._pedge: list[tuple[int, int] | None] = [None] * n
        self._depth = [0] * n
        seen = [False] * n
        seen[0] = True
        queue = deque([0])
        while queue:
            cur = queue.popleft()
            for nb, e in t.adjacency[cur]:
                if not seen[nb]:
                    seen[nb] = True
                    self._parent[nb] = cur
                    self._pedge[nb] = e
                    self._depth[nb] = self._depth[cur] + 1
                    queue.append(nb)

    def locate(self, p) -> int:
        key = (p[0], p[1])
        tri = self._locate_cache.get(key)
        if tri is None:
            tri = self.tri.locate(p)
            if len(self._locate_cache) < 100_000:
                self._locate_cache[key] = tri
        return tri

    def _sleeve(self, ta: int, tb: int) -> list[int]:
        up, down = [ta], [tb]
        a, b = ta, tb
        while self._depth[a] > self._depth[b]:
            a = self._parent[a]
            up.append(a)
        while self._depth[b] > self._depth[a]:
            b = self._parent[b]
            down.append(b)
        while a != b:
            a = self._parent[a]
            b = self._parent[b]
            up.append(a)
            down.append(b)
        down.pop()
        return up + down[::-1]

    def _portals(self, sleeve: list[int]) -> list[tuple[Point, Point]]:
        v = self._verts
        out = []
        tris = self.tri.triangles
        for t0, t1 in zip(sleeve, sleeve[1:]):
            tri = tris[t0]
            other = set(tris[t1])
            for j in range(3):
                i, k = tri[j], tri[(j + 1) % 3]
                if i in other and k in other:
                    # leaving a CCW triangle through i->k: k is on the left
                    out.append((v[k], v[i]))
                    break
        return out

    def shortest_path(self, a, b) -> GeodesicPath:
        a = as_point(a)
        b = as_point(b)
        if a == b:
            self.locate(a)
            return GeodesicPath((a,), (0.0,))
        sleeve = self._sleeve(self.locate(a), self.locate(b))
        # trim to the last triangle holding a and the first after it holding b
        t = self.tri
        first = 0
        for i in range(len(sleeve) - 1, 0, -1):
            if t.triangle_contains(sleeve[i], a):
                first = i
                break
        last = len(sleeve) - 1
        for i in range(first, len(sleeve)):
            if t.triangle_contains(sleeve[i], b):
                last = i
                break
        sleeve = sleeve[first:last + 1]
        if len(sleeve) == 1:
            return GeodesicPath.from_points((a, b))
        return GeodesicPath.from_points(_string_pull(a, b, self._portals(sleeve)))

    def distance(self, a, b) -> float:
        return self.shortest_path(a, b).length

    def build_funnel(self, u, chord: Chord) -> Funnel:
        pa = self.shortest_path(u, chord.a)
        pb = self.shortest_path(u, chord.b)
        wa, wb = pa.waypoints, pb.waypoints
        c = 0
        while c < len(wa) and c < len(wb) and wa[c] == wb[c]:
            c += 1
        # path endpoints are distinct, so at least the source is shared
        apex = wa[c - 1]
        return Funnel(
            apex=apex,
            chain_to_a=wa[c - 1:],
            chain_to_b=wb[c - 1:],
            apex_offset=pa.cumulative[c - 1],
            offsets_a=pa.cumulative[c - 1:],
            offsets_b=pb.cumulative[c - 1:],
        )

    def distance_function(self, u, chord: Chord) -> DistanceFunction:
        return distance_function(self.build_funnel(u, chord), chord)


def _string_pull(a: Point, b: Point, portals: list[tuple[Point, Point]]) -> list[Point]:
    portals = portals + [(b, b)]
    path = [a]
    apex = left = right = a
    apex_i = left_i = right_i = -1
    i = 0
    while i < len(portals):
        pl, pr = portals[i]
        if orient(apex, right, pr) >= 0:
            if apex == right or orient(apex, left, pr) < 0:
                right, right_i = pr, i
            else:
                apex, apex_i = left, left_i
                if path[-1] != apex:
                    path.append(apex)
                right, right_i = apex, apex_i
                i = apex_i + 1
                continue
        if orient(apex, left, pl) <= 0:
            if apex == left or orient(apex, right, pl) > 0:
                left, left_i = pl, i
            else:
                apex, apex_i = right, right_i
                if path[-1] != apex:
                    path.append(apex)
                left, left_i = apex, apex_i
                i = apex_i + 1
                continue
        i += 1
    if path[-1] != b:
        path.append(b)
    return path


def _chord_frame(chord: Chord):
    ax, ay = chord.a
    L = chord.length
    dx, dy = (chord.b.x - ax) / L, (chord.b.y - ay) / L

    def to_frame(p):
        px, py = p[0] - ax, p[1] - ay
        return px * dx + py * dy, dx * py - dy * px

    return to_frame


def _marker(p, q, L: float) -> float:
    """Where the line through frame points p, q meets the x-axis."""
    (px, py), (qx, qy) = p, q
    if px == qx and py == qy:
        return -math.inf
    if py == qy:
        return -math.inf if qx < px else math.inf
    return px + (qx - px) * (0.0 - py) / (qy - py)


def distance_function(funnel: Funnel, chord: Chord) -> DistanceFunction:
    """Pieces ordered from chord endpoint ``a`` to ``b``, tiling ``[0, |chord|]``."""
    L = chord.length
    frame = _chord_frame(chord)
    ca = [frame(p) for p in funnel.chain_to_a]
    cb = [frame(p) for p in funnel.chain_to_b]
    verts = []
    offs = []
    bounds = []
    # chain to a, from its last bend back to the apex
    pa = len(ca) - 1
    for j in range(pa - 1, 0, -1):
        verts.append((funnel.chain_to_a[j], ca[j]))
        offs.append(funnel.offsets_a[j])
        bounds.append(_marker(ca[j - 1], ca[j], L))
    verts.append((funnel.apex, ca[0]))
    offs.append(funnel.apex_offset)
    qb = len(cb) - 1
    for j in range(1, qb):
        bounds.append(_marker(cb[j - 1], cb[j], L))
        verts.append((funnel.chain_to_b[j], cb[j]))
        offs.append(funnel.offsets_b[j])
    edges = [0.0]
    for m in bounds:
        edges.append(min(max(m, edges[-1]), L))
    edges.append(L)
    pieces = []
    for (world, (wx, wy)), off, lo, hi in zip(verts, offs, edges, edges[1:]):
        if hi > lo:
            pieces.append(HyperbolicPiece((wx, wy), off, lo, hi, world))
    if not pieces:
        world, (wx, wy) = verts[-1]
        pieces.append(HyperbolicPiece((wx, wy), offs[-1], 0.0, L, world))
    return DistanceFunction(chord, pieces)


def project_onto_chord(p: Polygon, t: Triangulation, u, ell: Chord) -> tuple[Point, float]:
    f = t.engine.distance_function(u, ell)
    return ell.point_at(f.argmin), f.min_value


def chord_disc_intersection(p: Polygon, t: Triangulation, u, ell: Chord, rho: float,
                            owner: int = -1) -> ChordInterval | None:
    return t.engine.distance_function(u, ell).interval(rho, owner)


def shortest_path(p: Polygon, t: Triangulation, a, b) -> GeodesicPath:
    return t.engine.shortest_path(a, b)


def geodesic_distance(p: Polygon, t: Triangulation, a, b) -> float:
    return t.engine.distance(a, b)


def build_funnel(p: Polygon, t: Triangulation, u, ell: Chord) -> Funnel:
    return t.engine.build_funnel(u, ell)
