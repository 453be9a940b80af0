"""Command-line front end: ``skeg run`` and ``skeg gen``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time

import numpy as np

from .algorithms import Disc, SkegResult, covered_count, main_algo
from .decomposition import build_decomp_tree
from .errors import DuplicateSites, KTooLarge, PolygonError, SiteOutsidePolygon, SkegError
from .geometry import Point, Polygon, generate_star_polygon, triangulate, validate_polygon
from .oracle import VisibilityOracle, grid_oracle, pair_candidate_oracle, random_simple_polygon, random_sites
from .svg import render_svg

EXIT_SCHEMA = 2
EXIT_OUTSIDE = 3
EXIT_K = 4

ALGOS = ("auto", "rs", "di", "planar", "grid-oracle", "pair-oracle")


class SchemaError(SkegError, ValueError):
    pass


def dumps(obj) -> str:
    """JSON with floats at 17 significant digits so reruns compare byte for byte."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return json.dumps(str(v))
        return format(v, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _read_points(path: str, key: str) -> list[Point]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: {exc}") from None
    if not isinstance(data, dict) or key not in data or not isinstance(data[key], list):
        raise SchemaError(f"{path}: expected an object with a {key!r} list")
    out = []
    for i, item in enumerate(data[key]):
        if (not isinstance(item, (list, tuple)) or len(item) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item)
                or not all(math.isfinite(v) for v in item)):
            raise SchemaError(f"{path}: {key}[{i}] is not a finite [x, y] pair")
        out.append(Point(float(item[0]), float(item[1])))
    return out


def load_polygon(path: str) -> Polygon:
    return validate_polygon(_read_points(path, "vertices"))


def load_sites(path: str) -> list[Point]:
    return _read_points(path, "sites")


def _fail(code: int, kind: str, message: str, **extra) -> int:
    sys.stderr.write(dumps({"error": kind, "message": message, **extra}) + "\n")
    return code


def _setup_logging() -> None:
    level = os.environ.get("SKEG_LOG", "off").lower()
    if level == "off":
        logging.getLogger("skeg").setLevel(logging.CRITICAL + 1)
        return
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("skeg").setLevel(logging.DEBUG if level == "debug" else logging.INFO)


def _result_json(algo: str, k: int, seed: int, center: Point, radius: float, count: int,
                 stats: dict, timings: dict, extra: dict | None = None) -> dict:
    out = {
        "algorithm": algo,
        "k": k,
        "center": [center.x, center.y],
        "radius": radius,
        "coveredCount": count,
        "seed": seed,
        "stats": {
            "iterations": int(stats.get("iterations", 0)),
            "sampleSize": int(stats.get("sample_size", 0)),
            "recursionDepth": int(stats.get("recursion_depth", 0)),
        },
    }
    if extra:
        out.update(extra)
    out["timings"] = timings
    return out


def cmd_run(args) -> int:
    try:
        poly = load_polygon(args.polygon)
        sites = load_sites(args.sites)
    except (SchemaError, PolygonError) as exc:
        return _fail(EXIT_SCHEMA, type(exc).__name__, str(exc))
    if args.k < 1:
        return _fail(EXIT_SCHEMA, "SchemaError", "k must be at least 1")
    if args.algo == "grid-oracle" and not (args.grid_eps and args.grid_eps > 0):
        return _fail(EXIT_SCHEMA, "SchemaError", "--grid-eps must be positive for grid-oracle")
    if not 0 <= args.seed < 2 ** 64:
        return _fail(EXIT_SCHEMA, "SchemaError", "seed must be an unsigned 64-bit integer")
    for i, s in enumerate(sites):
        if not poly.contains(s):
            return _fail(EXIT_OUTSIDE, "SiteOutsidePolygon", f"site {i} {tuple(s)} is outside the polygon", index=i)
    if args.k > len(sites):
        return _fail(EXIT_K, "KTooLarge", f"k={args.k} exceeds the {len(sites)} sites", k=args.k, n=len(sites))

    t0 = time.perf_counter()
    tri = triangulate(poly)
    tree = build_decomp_tree(poly, tri) if args.algo in ("auto", "di") else None
    t1 = time.perf_counter()
    extra = None
    try:
        if args.algo in ("grid-oracle", "pair-oracle"):
            vo = VisibilityOracle(poly, sites)
            if args.algo == "grid-oracle":
                br = grid_oracle(poly, sites, args.k, args.grid_eps, vo)
                disc = Disc(br.best_center, br.rho_hi)
                extra = {"rhoLo": br.rho_lo, "rhoHi": br.rho_hi, "bracketWidth": br.width,
                         "delta": br.delta, "gridEps": br.eps}
            else:
                disc = pair_candidate_oracle(poly, sites, args.k, vo)
            res = SkegResult(disc, covered_count(tri, disc, sites), "oracle", args.seed, {})
        else:
            force = None if args.algo == "auto" else args.algo
            res = main_algo(poly, tri, tree, sites, args.k, args.seed, force=force)
    except KTooLarge as exc:
        return _fail(EXIT_K, "KTooLarge", str(exc))
    except SiteOutsidePolygon as exc:
        return _fail(EXIT_OUTSIDE, "SiteOutsidePolygon", str(exc))
    except DuplicateSites as exc:
        return _fail(EXIT_SCHEMA, "DuplicateSites", str(exc))
    t2 = time.perf_counter()
    timings = {"preprocessMs": (t1 - t0) * 1e3, "solveMs": (t2 - t1) * 1e3}
    out = _result_json(res.algorithm, args.k, args.seed, res.center, res.radius, res.covered_count,
                       res.stats, timings, extra)
    text = dumps(out) + "\n"
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    if args.svg:
        diags = []
        if res.algorithm == "di" and tree is not None:
            diags = [tree.chord(nd) for nd in tree.nodes if not nd.is_leaf]
            diags = [(c.a, c.b) for c in diags]
        with open(args.svg, "w") as fh:
            fh.write(render_svg(poly, sites, res.center, res.radius, tri, diags))
    return 0


def _write(obj: dict, out: str | None) -> None:
    text = dumps(obj) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    if args.fixture == "star":
        if args.spikes < 3:
            return _fail(EXIT_SCHEMA, "SchemaError", "--spikes must be at least 3")
        poly = generate_star_polygon(args.spikes)
        _write(poly.to_json(), args.out)
    elif args.fixture == "random-polygon":
        if args.m < 3:
            return _fail(EXIT_SCHEMA, "SchemaError", "--m must be at least 3")
        poly = random_simple_polygon(np.random.default_rng(args.seed), args.m)
        _write(poly.to_json(), args.out)
    else:
        if args.n < 0:
            return _fail(EXIT_SCHEMA, "SchemaError", "--n must be non-negative")
        if not args.polygon:
            return _fail(EXIT_SCHEMA, "SchemaError", "random-sites needs --polygon")
        try:
            poly = load_polygon(args.polygon)
        except (SchemaError, PolygonError) as exc:
            return _fail(EXIT_SCHEMA, type(exc).__name__, str(exc))
        pts = random_sites(np.random.default_rng(args.seed), poly, args.n)
        _write({"sites": [[q.x, q.y] for q in pts]}, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="skeg", description="Approximate smallest k-enclosing geodesic discs.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve one instance")
    run.add_argument("--polygon", required=True)
    run.add_argument("--sites", required=True)
    run.add_argument("-k", type=int, required=True)
    run.add_argument("--algo", choices=ALGOS, default="auto")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--svg")
    run.add_argument("--json")
    run.add_argument("--grid-eps", type=float, default=None)
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("gen", help="write fixture files")
    gen.add_argument("fixture", choices=("star", "random-polygon", "random-sites"))
    gen.add_argument("--spikes", type=int, default=12)
    gen.add_argument("--m", type=int, default=12)
    gen.add_argument("--n", type=int, default=20)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--polygon")
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse reports usage errors as exit 2 already
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
