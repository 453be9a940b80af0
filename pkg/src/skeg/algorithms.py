"""Approximate smallest k-enclosing geodesic discs.

``main_algo`` picks one of three strategies: the planar routine for convex
polygons, random sampling of site-centred discs when k is large, and
divide-and-conquer over the decomposition tree otherwise.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .decomposition import DecompNode, DecompTree, SiteAssignment, build_decomp_tree, locate_sites
from .errors import DuplicateSites, KTooLarge, PointOutsidePolygon, SiteOutsidePolygon
from .geodesic import ChordInterval
from .geometry import Chord, Point, Polygon, Triangulation, as_point, is_convex

log = logging.getLogger(__name__)

COVER_TOL = 1e-9
# slack on the pruning radius so rounding in interval roots cannot
# evict a candidate whose k-th neighbour distance ties rho
_PRUNE_REL = 1e-12


@dataclass(frozen=True)
class Disc:
    center: Point
    radius: float

    def to_json(self) -> dict:
        return {"center": [self.center.x, self.center.y], "radius": self.radius}


@dataclass
class SkegResult:
    disc: Disc
    covered_count: int
    algorithm: str
    seed: int
    stats: dict = field(default_factory=dict)

    @property
    def center(self) -> Point:
        return self.disc.center

    @property
    def radius(self) -> float:
        return self.disc.radius


@dataclass
class MergeResult:
    center: Point
    rho: float
    iterations: int
    owner: int
    x: float
    rho_trace: list[float]


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _node_rng(seed: int, node_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(node_id,)))


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise KTooLarge(k, n)


def _check_distinct(sites: Sequence[Point], tol: float = 1e-12) -> None:
    if len(sites) < 2:
        return
    arr = np.asarray(sites, dtype=float)
    pairs = cKDTree(arr).query_pairs(tol, output_type="ndarray")
    if len(pairs):
        i, j = (int(v) for v in pairs[0])
        raise DuplicateSites(i, j)


def _site_distances(t: Triangulation, c, sites: Sequence) -> np.ndarray:
    eng = t.engine
    return np.array([eng.distance(c, s) for s in sites], dtype=float)


def kth_nn_distance(p: Polygon, t: Triangulation, c, sites: Sequence, k: int) -> tuple[float, int]:
    """k-th smallest geodesic distance from ``c`` to ``sites`` and the site attaining it."""
    _check_k(k, len(sites))
    if not p.contains(c):
        raise PointOutsidePolygon(c)
    d = _site_distances(t, c, sites)
    order = np.argsort(d, kind="stable")
    w = int(order[k - 1])
    return float(d[w]), w


def covered_count(t: Triangulation, disc: Disc, sites: Sequence, tol: float = COVER_TOL) -> int:
    d = _site_distances(t, disc.center, sites)
    return int(np.count_nonzero(d <= disc.radius + tol))


def rs_sample_size(n: int, k: int) -> int:
    if n <= 1:
        return 1
    return max(1, math.ceil((n / k) * math.log(n)))


def rs_algo(p: Polygon, t: Triangulation, sites: Sequence, k: int, rng=0) -> SkegResult:
    """Best site-centred disc over a random sample of centres."""
    sites = [as_point(s) for s in sites]
    n = len(sites)
    _check_k(k, n)
    seed = rng if isinstance(rng, (int, np.integer)) else None
    gen = _as_rng(rng)
    size = rs_sample_size(n, k)
    rows: dict[int, float] = {}
    best_i, best_r = 0, math.inf
    sample = []
    for _ in range(size):
        c = int(gen.integers(n))
        sample.append(c)
        if c not in rows:
            if k == 1:
                rows[c] = 0.0
            else:
                d = _site_distances(t, sites[c], sites)
                d = np.delete(d, c)
                rows[c] = float(np.partition(d, k - 2)[k - 2])
        temp = rows[c]
        if temp < best_r:
            best_r, best_i = temp, c
    disc = Disc(sites[best_i], best_r)
    log.debug("rs: sample=%d best site %d radius %.6g", size, best_i, best_r)
    return SkegResult(
        disc=disc,
        covered_count=covered_count(t, disc, sites),
        algorithm="rs",
        seed=int(seed) if seed is not None else -1,
        stats={"sample_size": size, "sample": sample, "iterations": 0, "recursion_depth": 0},
    )


def planar_2approx(points: Sequence, k: int, rng=None) -> Disc:
    """Euclidean disc with at least k points and radius at most twice optimal.

    Returns the point minimising its k-th nearest neighbour distance (itself
    included).  Any of the k points inside an optimal disc is such a centre
    with radius below 2 rho*, so the minimum is too.  ``rng`` is accepted for
    interface symmetry; the result is deterministic.
    """
    pts = np.asarray([tuple(q) for q in points], dtype=float).reshape(-1, 2)
    _check_k(k, len(pts))
    if k == 1:
        return Disc(Point(*pts[0]), 0.0)
    d, _ = cKDTree(pts).query(pts, k=k)
    kth = d[:, k - 1]
    i = int(np.argmin(kth))
    return Disc(Point(float(pts[i, 0]), float(pts[i, 1])), float(kth[i]))


def interval_depths(intervals: Sequence[ChordInterval | None], candidates: Sequence[float]) -> list[int]:
    """Number of closed intervals containing each candidate parameter."""
    live = [iv for iv in intervals if iv is not None]
    xs = np.asarray(candidates, dtype=float)
    if not live:
        return [0] * len(xs)
    lo = np.sort([iv.lo for iv in live])
    hi = np.sort([iv.hi for iv in live])
    depth = np.searchsorted(lo, xs, side="right") - np.searchsorted(hi, xs, side="left")
    return depth.astype(int).tolist()


def merge_algo(p: Polygon, t: Triangulation, ell: Chord, sites_tau: Sequence, k: int, rng=0) -> MergeResult:
    """Best disc centred at a site projection onto ``ell``.

    Each round evaluates a random surviving candidate, then discards sites
    whose radius-rho disc misses the chord and candidates covered by fewer
    than k such discs.
    """
    sites = [as_point(s) for s in sites_tau]
    n = len(sites)
    _check_k(k, n)
    _check_distinct(sites)
    gen = _as_rng(rng)
    eng = t.engine
    funcs = [eng.distance_function(s, ell) for s in sites]
    proj_x = np.array([f.argmin for f in funcs])
    cand = list(range(n))  # candidates are identified by their owning site
    active = list(range(n))
    trace: list[float] = []
    best = (math.inf, -1)
    iterations = 0
    while cand:
        iterations += 1
        uc = cand[int(gen.integers(len(cand)))]
        xc = float(proj_x[uc])
        vals = np.fromiter((funcs[v](xc) for v in active), float, len(active))
        rho = float(np.partition(vals, k - 1)[k - 1])
        trace.append(rho)
        if rho < best[0]:
            best = (rho, uc)
        # candidates are points of the chord: sites sharing a projection
        # share one k-th neighbour distance, so they leave together
        if all(proj_x[w] == xc for w in cand):
            break
        padded = rho + _PRUNE_REL * (1.0 + rho)
        ivs = {v: funcs[v].interval(padded, owner=v) for v in active}
        active = [v for v in active if ivs[v] is not None]
        depths = interval_depths([ivs[v] for v in active], proj_x[cand])
        cand = [w for w, dep in zip(cand, depths) if dep >= k and proj_x[w] != xc]
    rho, owner = best
    x = float(proj_x[owner])
    return MergeResult(ell.point_at(x), rho, iterations, owner, x, trace)


def di_algo(tree: DecompTree, node: DecompNode, p: Polygon, t: Triangulation, sites: Sequence,
            k: int, seed: int = 0, assignment: SiteAssignment | None = None) -> SkegResult:
    """Divide and conquer on the decomposition subtree rooted at ``node``.

    Each node derives its own generator from ``(seed, node.id)`` so results
    do not depend on evaluation order.
    """
    sites = [as_point(s) for s in sites]
    if assignment is None:
        assignment = locate_sites(p, t, tree, sites)
    _check_k(k, assignment.count(node))
    stats = {"iterations": 0, "merges": 0, "leaves": 0, "recursion_depth": 0}

    def solve(nd: DecompNode, level: int):
        stats["recursion_depth"] = max(stats["recursion_depth"], level)
        gen = _node_rng(seed, nd.id)
        idx = assignment.sites_of(nd)
        if nd.is_leaf:
            stats["leaves"] += 1
            d = planar_2approx([sites[i] for i in idx], k, gen)
            return d.center, d.radius, "planar"
        left = solve(nd.left, level + 1) if assignment.count(nd.left) >= k else (None, math.inf, None)
        right = solve(nd.right, level + 1) if assignment.count(nd.right) >= k else (None, math.inf, None)
        cur = left if left[1] < right[1] else right
        m = merge_algo(p, t, tree.chord(nd), [sites[i] for i in idx], k, gen)
        stats["merges"] += 1
        stats["iterations"] += m.iterations
        if m.rho < cur[1]:
            cur = (m.center, m.rho, "merge")
        return cur

    center, radius, step = solve(node, 0)
    stats["winning_step"] = step
    disc = Disc(center, radius)
    pool = [sites[i] for i in assignment.sites_of(node)]
    return SkegResult(disc, covered_count(t, disc, pool), "di", int(seed), stats)


def dispatch_choice(convex: bool, n: int, k: int) -> str:
    if convex:
        return "planar"
    if k * math.log2(max(n, 2)) > n:
        return "rs"
    return "di"


def main_algo(p: Polygon, t: Triangulation, tree: DecompTree | None, sites: Sequence, k: int,
              seed: int = 0, force: str | None = None) -> SkegResult:
    """Run the strategy selected by :func:`dispatch_choice` (or ``force``)."""
    sites = [as_point(s) for s in sites]
    n = len(sites)
    for i, s in enumerate(sites):
        if not p.contains(s):
            raise SiteOutsidePolygon(s, i)
    _check_k(k, n)
    choice = force or dispatch_choice(is_convex(p), n, k)
    log.info("dispatch: %s (n=%d, k=%d, convex=%s)", choice, n, k, is_convex(p))
    if choice == "planar":
        if not is_convex(p):
            log.warning("planar routine on a non-convex polygon gives Euclidean radii")
        disc = planar_2approx(sites, k, _as_rng(seed))
        return SkegResult(disc, covered_count(t, disc, sites), "planar", int(seed),
                          {"iterations": 0, "sample_size": 0, "recursion_depth": 0})
    if choice == "rs":
        return rs_algo(p, t, sites, k, int(seed))
    if choice == "di":
        tree = tree or build_decomp_tree(p, t)
        _check_distinct(sites)
        return di_algo(tree, tree.root, p, t, sites, k, int(seed))
    raise ValueError(f"unknown algorithm {choice!r}")
