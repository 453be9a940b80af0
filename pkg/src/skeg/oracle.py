"""Brute-force oracles and fixture generators.

Distances here come from a visibility graph on the reflex vertices and the
query points, never from the funnel engine, so the two can check each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .errors import EmptyGrid, KTooLarge, PointOutsidePolygon, PolygonError
from .geometry import (
    EPS,
    Chord,
    Point,
    Polygon,
    Triangulation,
    dist,
    orient,
    points_in_polygon,
    validate_polygon,
)

_CHUNK = 4096


def segment_inside(poly: Polygon, p, q, eps: float = EPS) -> bool:
    """True if the closed segment pq lies in the closed polygon.

    Grazing contact with the boundary is allowed, so segments that bend
    around reflex vertices still count as visible.
    """
    if p[0] == q[0] and p[1] == q[1]:
        return poly.contains(p)
    ts = [0.0, 1.0]
    dx, dy = q[0] - p[0], q[1] - p[1]
    ll = dx * dx + dy * dy
    for a, b in poly.edges:
        o1 = orient(p, q, a)
        o2 = orient(p, q, b)
        o3 = orient(a, b, p)
        o4 = orient(a, b, q)
        if ((o1 > eps and o2 < -eps) or (o1 < -eps and o2 > eps)) and \
                ((o3 > eps and o4 < -eps) or (o3 < -eps and o4 > eps)):
            return False
        if abs(o1) <= eps:
            t = ((a[0] - p[0]) * dx + (a[1] - p[1]) * dy) / ll
            if 0.0 < t < 1.0:
                ts.append(t)
    ts.sort()
    for t0, t1 in zip(ts, ts[1:]):
        if t1 - t0 <= 1e-15:
            continue
        tm = 0.5 * (t0 + t1)
        if not poly.contains((p[0] + tm * dx, p[1] + tm * dy)):
            return False
    return True


def visible_pairs(poly: Polygon, P: np.ndarray, Q: np.ndarray, eps: float = EPS) -> np.ndarray:
    """Vectorized :func:`segment_inside` for paired rows of P and Q."""
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    Q = np.asarray(Q, dtype=float).reshape(-1, 2)
    out = np.empty(len(P), dtype=bool)
    e = poly.edge_array
    A = e[:, 0][None]
    B = e[:, 1][None]
    for s in range(0, len(P), _CHUNK):
        p = P[s:s + _CHUNK, None, :]
        q = Q[s:s + _CHUNK, None, :]
        d = q - p
        o1 = d[..., 0] * (A[..., 1] - p[..., 1]) - d[..., 1] * (A[..., 0] - p[..., 0])
        o2 = d[..., 0] * (B[..., 1] - p[..., 1]) - d[..., 1] * (B[..., 0] - p[..., 0])
        ab = B - A
        o3 = ab[..., 0] * (p[..., 1] - A[..., 1]) - ab[..., 1] * (p[..., 0] - A[..., 0])
        o4 = ab[..., 0] * (q[..., 1] - A[..., 1]) - ab[..., 1] * (q[..., 0] - A[..., 0])
        proper = (((o1 > eps) & (o2 < -eps)) | ((o1 < -eps) & (o2 > eps))) & \
                 (((o3 > eps) & (o4 < -eps)) | ((o3 < -eps) & (o4 > eps)))
        blocked = proper.any(axis=1)
        ll = (d[..., 0] ** 2 + d[..., 1] ** 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = ((A[..., 0] - p[..., 0]) * d[..., 0] + (A[..., 1] - p[..., 1]) * d[..., 1]) / ll
        touch = ((np.abs(o1) <= eps) & (t > 0.0) & (t < 1.0)).any(axis=1)
        mids = 0.5 * (p[:, 0, :] + q[:, 0, :])
        res = ~blocked & points_in_polygon(poly, mids, eps)
        degenerate = np.nonzero(~blocked & (touch | (ll[:, 0] == 0.0)))[0]
        for i in degenerate:
            res[i] = segment_inside(poly, P[s + i], Q[s + i], eps)
        out[s:s + len(res)] = res
    return out


def visibility_matrix(poly: Polygon, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    Q = np.asarray(Q, dtype=float).reshape(-1, 2)
    ii, jj = np.meshgrid(np.arange(len(P)), np.arange(len(Q)), indexing="ij")
    return visible_pairs(poly, P[ii.ravel()], Q[jj.ravel()]).reshape(len(P), len(Q))


def _graph_weights(vis: np.ndarray, nodes: np.ndarray) -> csr_matrix:
    w = np.linalg.norm(nodes[:, None, :] - nodes[None, :, :], axis=-1)
    np.fill_diagonal(vis, False)
    i, j = np.nonzero(vis)
    # sparse storage keeps zero-length edges between coincident nodes
    return csr_matrix((w[i, j], (i, j)), shape=w.shape)


def dijkstra_distance(p: Polygon, a, b) -> float:
    """Visibility-graph shortest path length between two points of ``p``."""
    for q in (a, b):
        if not p.contains(q):
            raise PointOutsidePolygon(q)
    nodes = np.array([a, b] + p.reflex_vertices, dtype=float).reshape(-1, 2)
    vis = visibility_matrix(p, nodes, nodes)
    d = _csgraph_dijkstra(_graph_weights(vis, nodes), indices=0)
    return float(d[1])


class VisibilityOracle:
    """All-pairs site distances plus batched point-to-site distance queries."""

    def __init__(self, p: Polygon, sites: Sequence):
        self.polygon = p
        self.sites = np.asarray(sites, dtype=float).reshape(-1, 2)
        for i, s in enumerate(self.sites):
            if not p.contains(s):
                raise PointOutsidePolygon(s)
        reflex = np.asarray(p.reflex_vertices, dtype=float).reshape(-1, 2)
        self.r = len(reflex)
        self.n = len(self.sites)
        self.nodes = np.vstack([reflex, self.sites])
        vis = visibility_matrix(p, self.nodes, self.nodes)
        vis = vis & vis.T
        if self.n:
            d, pred = _csgraph_dijkstra(
                _graph_weights(vis, self.nodes),
                indices=np.arange(self.r, self.r + self.n),
                return_predecessors=True,
            )
        else:
            d = np.zeros((0, len(self.nodes)))
            pred = np.zeros((0, len(self.nodes)), dtype=int)
        # node_dist[s, v]: geodesic distance from site s to node v
        self.node_dist = d
        self._pred = pred

    @property
    def site_distances(self) -> np.ndarray:
        return self.node_dist[:, self.r:]

    def distances_from(self, Q) -> np.ndarray:
        """(len(Q), n) geodesic distances from each query point to each site."""
        Q = np.asarray(Q, dtype=float).reshape(-1, 2)
        out = np.empty((len(Q), self.n))
        V = len(self.nodes)
        step = max(1, _CHUNK // max(V, 1))
        for s in range(0, len(Q), step):
            q = Q[s:s + step]
            vis = visibility_matrix(self.polygon, q, self.nodes)
            leg = np.linalg.norm(q[:, None, :] - self.nodes[None, :, :], axis=-1)
            leg[~vis] = np.inf
            # min over last visible node v of |q v| + d(v, site)
            out[s:s + len(q)] = np.min(leg[:, :, None] + self.node_dist.T[None, :, :], axis=1)
        return out

    def site_path(self, i: int, j: int) -> list[Point]:
        """Waypoints of the visibility-graph shortest path from site i to site j."""
        src = self.r + i
        cur = self.r + j
        pts = [cur]
        while cur != src:
            cur = int(self._pred[i, cur])
            if cur < 0:
                raise RuntimeError("sites are disconnected in the visibility graph")
            pts.append(cur)
        pts.reverse()
        return [_pt(self.nodes[v]) for v in pts]


def _pt(a) -> Point:
    return Point(float(a[0]), float(a[1]))


def _polyline_midpoint(pts: list[Point]) -> Point:
    lengths = [dist(a, b) for a, b in zip(pts, pts[1:])]
    total = sum(lengths)
    if total == 0.0:
        return pts[0]
    half = total / 2
    for (a, b), seg in zip(zip(pts, pts[1:]), lengths):
        if half <= seg and seg > 0:
            t = half / seg
            return Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
        half -= seg
    return pts[-1]


def kth_smallest_rows(d: np.ndarray, k: int) -> np.ndarray:
    return np.partition(d, k - 1, axis=1)[:, k - 1]


@dataclass(frozen=True)
class OptBracket:
    rho_lo: float
    rho_hi: float
    best_center: Point
    delta: float
    eps: float
    samples: int

    @property
    def width(self) -> float:
        return self.rho_hi - self.rho_lo


def _pair_candidates(oracle: VisibilityOracle) -> np.ndarray:
    mids = [oracle.sites[i] for i in range(oracle.n)]
    for i in range(oracle.n):
        for j in range(i + 1, oracle.n):
            mids.append(_polyline_midpoint(oracle.site_path(i, j)))
    return np.asarray(mids, dtype=float).reshape(-1, 2)


def pair_candidate_oracle(p: Polygon, sites: Sequence, k: int, oracle: VisibilityOracle | None = None):
    """Best disc centred at a site or at the midpoint of a site-to-site geodesic."""
    from .algorithms import Disc

    n = len(sites)
    if not 1 <= k <= n:
        raise KTooLarge(k, n)
    oracle = oracle or VisibilityOracle(p, sites)
    cand = _pair_candidates(oracle)
    radii = kth_smallest_rows(oracle.distances_from(cand), k)
    best = int(np.argmin(radii))
    return Disc(_pt(cand[best]), float(radii[best]))


def pair_candidate_details(p: Polygon, sites: Sequence, k: int, oracle: VisibilityOracle | None = None):
    """Like :func:`pair_candidate_oracle` but also reports the defining pair.

    Returns ``(disc, pair)`` where ``pair`` is ``(i, j)`` for a midpoint
    candidate and ``(i, i)`` for a site candidate.
    """
    from .algorithms import Disc

    n = len(sites)
    if not 1 <= k <= n:
        raise KTooLarge(k, n)
    oracle = oracle or VisibilityOracle(p, sites)
    cand = _pair_candidates(oracle)
    pairs = [(i, i) for i in range(n)] + [(i, j) for i in range(n) for j in range(i + 1, n)]
    radii = kth_smallest_rows(oracle.distances_from(cand), k)
    best = int(np.argmin(radii))
    return Disc(_pt(cand[best]), float(radii[best])), pairs[best]


def grid_oracle(p: Polygon, sites: Sequence, k: int, eps: float,
                oracle: VisibilityOracle | None = None) -> OptBracket:
    """Bracket the optimal radius by evaluating a grid of candidate centres.

    The upper bound is the best k-th neighbour distance over the grid, the
    sites and all site-pair path midpoints.  The lower bound subtracts the
    distance any centre may have to travel to reach a visible grid sample.
    Only lattice points within Euclidean reach of k sites are generated,
    since no other centre can beat the current upper bound.
    """
    n = len(sites)
    if not 1 <= k <= n:
        raise KTooLarge(k, n)
    if not eps > 0:
        raise ValueError("eps must be positive")
    oracle = oracle or VisibilityOracle(p, sites)
    cand = _pair_candidates(oracle)
    f_cand = kth_smallest_rows(oracle.distances_from(cand), k)
    best = int(np.argmin(f_cand))
    rho_hi0 = float(f_cand[best])
    center = _pt(cand[best])
    if rho_hi0 == 0.0:
        return OptBracket(0.0, 0.0, center, 0.0, eps, 0)

    lat = _Lattice(p, eps)
    if not lat.any_inside():
        raise EmptyGrid(f"grid spacing {eps} leaves no samples inside the polygon")
    delta0 = eps * math.sqrt(2.0)
    reach = rho_hi0 + delta0
    keys = lat.keys_near(oracle.sites, reach + eps)
    pts = lat.points(keys)
    ok = lat.inside(pts) & _enough_sites(pts, oracle.sites, k, reach)
    keys, G = keys[ok], pts[ok]
    rho_hi = rho_hi0
    if len(G):
        f_grid = kth_smallest_rows(oracle.distances_from(G), k)
        g = int(np.argmin(f_grid))
        if f_grid[g] < rho_hi:
            rho_hi = float(f_grid[g])
            center = _pt(G[g])
    delta = _coverage_delta(p, lat, keys, oracle.sites, k, rho_hi0)
    rho_lo = max(0.0, rho_hi - delta)
    return OptBracket(rho_lo, rho_hi, center, delta, eps, int(len(G)))


class _Lattice:
    """Square lattice of spacing eps anchored at the polygon's bbox corner."""

    def __init__(self, p: Polygon, eps: float):
        self.p = p
        self.eps = eps
        xmin, ymin, xmax, ymax = p.bbox
        self.origin = np.array([xmin, ymin])
        self.ni = int(math.floor((xmax - xmin) / eps)) + 1
        self.nj = int(math.floor((ymax - ymin) / eps)) + 1

    def points(self, keys: np.ndarray, shift: float = 0.0) -> np.ndarray:
        i, j = np.divmod(keys, self.nj)
        return self.origin + self.eps * (np.column_stack([i, j]).astype(float) + shift)

    def key(self, i, j):
        return i * self.nj + j

    def inside(self, pts: np.ndarray) -> np.ndarray:
        out = np.empty(len(pts), dtype=bool)
        for s in range(0, len(pts), _CHUNK):
            out[s:s + _CHUNK] = points_in_polygon(self.p, pts[s:s + _CHUNK])
        return out

    def any_inside(self) -> bool:
        # the lattice is too coarse only if no vertex-anchored window holds a sample
        verts = np.asarray(self.p.vertices, dtype=float)
        keys = self.keys_near(verts, 2 * self.eps)
        if self.inside(self.points(keys)).any():
            return True
        step = max(1, (self.ni * self.nj) // 200000)
        allk = np.arange(0, self.ni * self.nj, step)
        return bool(self.inside(self.points(allk)).any())

    def keys_near(self, centers: np.ndarray, radius: float) -> np.ndarray:
        out = []
        for cx, cy in np.asarray(centers, dtype=float).reshape(-1, 2):
            i0 = max(0, int(math.floor((cx - radius - self.origin[0]) / self.eps)))
            i1 = min(self.ni - 1, int(math.ceil((cx + radius - self.origin[0]) / self.eps)))
            j0 = max(0, int(math.floor((cy - radius - self.origin[1]) / self.eps)))
            j1 = min(self.nj - 1, int(math.ceil((cy + radius - self.origin[1]) / self.eps)))
            if i1 < i0 or j1 < j0:
                continue
            I, J = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1), indexing="ij")
            out.append(self.key(I.ravel(), J.ravel()))
        if not out:
            return np.zeros(0, dtype=np.int64)
        return np.unique(np.concatenate(out).astype(np.int64))


def _enough_sites(pts: np.ndarray, sites: np.ndarray, k: int, radius: float) -> np.ndarray:
    count = np.zeros(len(pts), dtype=int)
    r2 = radius * radius
    for sx, sy in sites:
        count += ((pts[:, 0] - sx) ** 2 + (pts[:, 1] - sy) ** 2) <= r2
    return count >= k


def _coverage_delta(p: Polygon, lat: _Lattice, keep: np.ndarray, sites, k, radius) -> float:
    """Per-instance travel bound from any relevant centre to a visible sample.

    Probes sit at cell centres; each must see one of its four cell corners,
    otherwise the bound widens to the nearest visible kept sample.
    """
    eps = lat.eps
    nominal = eps * math.sqrt(2.0)
    if len(keep) == 0:
        return nominal
    # every relevant cell has its lower-left corner within the generated window
    cells = lat.keys_near(sites, radius + 2 * eps)
    ci, cj = np.divmod(cells, lat.nj)
    cells = cells[(ci < lat.ni - 1) & (cj < lat.nj - 1)]
    probes = lat.points(cells, shift=0.5)
    ok = lat.inside(probes) & _enough_sites(probes, sites, k, radius)
    cells, probes = cells[ok], probes[ok]
    if len(cells) == 0:
        return nominal
    seen = np.zeros(len(cells), dtype=bool)
    for corner in (0, lat.nj, 1, lat.nj + 1):
        ck = cells + corner
        has = np.isin(ck, keep) & ~seen
        idx = np.nonzero(has)[0]
        if len(idx):
            seen[idx] = visible_pairs(p, probes[idx], lat.points(ck[idx]))
    worst = eps / math.sqrt(2.0)
    blind = np.nonzero(~seen)[0]
    if len(blind):
        samples = lat.points(keep)
        for b in blind:
            q = probes[b]
            d = np.hypot(samples[:, 0] - q[0], samples[:, 1] - q[1])
            order = np.argsort(d)[:64]
            vis = visible_pairs(p, np.repeat(q[None], len(order), axis=0), samples[order])
            hit = d[order][vis]
            worst = max(worst, float(hit[0]) if len(hit) else math.inf)
    return max(nominal, worst + eps / math.sqrt(2.0))


def grid_oracle_auto(p: Polygon, sites: Sequence, k: int, rel_width: float = 0.05,
                     oracle: VisibilityOracle | None = None, max_rounds: int = 4) -> OptBracket:
    """Grid oracle with spacing shrunk until the bracket is within ``rel_width``."""
    oracle = oracle or VisibilityOracle(p, sites)
    cand = _pair_candidates(oracle)
    rho0 = float(np.min(kth_smallest_rows(oracle.distances_from(cand), k)))
    if rho0 == 0.0:
        return grid_oracle(p, sites, k, 1.0, oracle)
    eps = 0.95 * rel_width * rho0 / math.sqrt(2.0)
    for _ in range(max_rounds):
        br = grid_oracle(p, sites, k, eps, oracle)
        if br.width <= rel_width * br.rho_hi:
            return br
        eps *= 0.5 * max(min(rel_width * br.rho_hi / br.width, 1.0), 0.25)
    return br


def brute_depths(p: Polygon, t: Triangulation, sites: Sequence, ell: Chord, rho: float,
                 candidates: Sequence[float]) -> list[int]:
    """Depth of each chord parameter by direct point-to-site distance counting."""
    eng = t.engine
    out = []
    for x in candidates:
        c = ell.point_at(x)
        out.append(sum(1 for s in sites if eng.distance(c, s) <= rho))
    return out


def random_simple_polygon(rng: np.random.Generator, m: int, max_tries: int = 100) -> Polygon:
    """Uniform random vertices untangled with 2-opt moves into a simple polygon."""
    if m < 3:
        raise ValueError("m must be at least 3")
    for _ in range(max_tries):
        pts = rng.random((m, 2))
        order = _two_opt_untangle(pts)
        try:
            return validate_polygon(pts[order])
        except PolygonError:
            continue
    raise RuntimeError(f"could not generate a simple {m}-gon")


def _two_opt_untangle(pts: np.ndarray) -> np.ndarray:
    m = len(pts)
    order = np.arange(m)
    changed = True
    while changed:
        changed = False
        for i in range(m):
            P = pts[order]
            a, b = P[i], P[(i + 1) % m]
            js = np.array([j for j in range(m) if j != i and (j + 1) % m != i and j != (i + 1) % m])
            if js.size == 0:
                continue
            c, d = P[js], P[(js + 1) % m]
            o1 = _ov(a, b, c)
            o2 = _ov(a, b, d)
            o3 = _ov(c, d, a)
            o4 = _ov(c, d, b)
            cross = (o1 * o2 < 0) & (o3 * o4 < 0)
            hit = np.nonzero(cross)[0]
            if hit.size:
                j = int(js[hit[0]])
                lo, hi = sorted((i, j))
                order[lo + 1:hi + 1] = order[lo + 1:hi + 1][::-1].copy()
                changed = True
    return order


def _ov(a, b, c):
    a, b, c = np.broadcast_arrays(np.atleast_2d(a), np.atleast_2d(b), np.atleast_2d(c))
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])


def random_sites(rng: np.random.Generator, p: Polygon, n: int) -> list[Point]:
    """Rejection-sample ``n`` points inside ``p``."""
    xmin, ymin, xmax, ymax = p.bbox
    out: list[Point] = []
    while len(out) < n:
        need = n - len(out)
        cand = np.column_stack([
            rng.uniform(xmin, xmax, 4 * need + 8),
            rng.uniform(ymin, ymax, 4 * need + 8),
        ])
        ok = points_in_polygon(p, cand)
        for x, y in cand[ok][:need]:
            out.append(Point(float(x), float(y)))
    return out
