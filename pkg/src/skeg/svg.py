"""SVG rendering of a polygon, its sites and a geodesic disc (display only)."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .geometry import Point, Polygon, Triangulation, points_in_polygon

RAYS = 256
_SHADE = 48


def _ray_exit(p: Polygon, c: Point, ux: float, uy: float) -> float:
    """Distance from c along direction (ux, uy) to the first boundary hit."""
    best = math.inf
    for a, b in p.edges:
        ex, ey = b.x - a.x, b.y - a.y
        den = ux * ey - uy * ex
        if abs(den) < 1e-15:
            continue
        wx, wy = a.x - c.x, a.y - c.y
        t = (wx * ey - wy * ex) / den
        s = (wx * uy - wy * ux) / den
        if t > 1e-12 and -1e-12 <= s <= 1 + 1e-12:
            best = min(best, t)
    return best


def disc_outline(p: Polygon, center: Point, radius: float, rays: int = RAYS) -> list[Point]:
    """Visible part of the disc boundary: along each ray d_g equals Euclidean distance."""
    out = []
    for i in range(rays):
        th = 2 * math.pi * i / rays
        ux, uy = math.cos(th), math.sin(th)
        r = min(radius, _ray_exit(p, center, ux, uy))
        out.append(Point(center.x + r * ux, center.y + r * uy))
    return out


def _shade_points(p: Polygon, t: Triangulation, center: Point, radius: float) -> list[Point]:
    xmin, ymin, xmax, ymax = p.bbox
    xs = np.linspace(xmin, xmax, _SHADE)
    ys = np.linspace(ymin, ymax, _SHADE)
    X, Y = np.meshgrid(xs, ys)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    near = np.hypot(pts[:, 0] - center.x, pts[:, 1] - center.y) <= radius
    pts = pts[near & points_in_polygon(p, pts)]
    eng = t.engine
    return [Point(float(x), float(y)) for x, y in pts if eng.distance(center, (x, y)) <= radius]


def render_svg(p: Polygon, sites: Sequence, center: Point | None = None, radius: float | None = None,
               t: Triangulation | None = None, diagonals: Sequence = (), size: int = 600) -> str:
    xmin, ymin, xmax, ymax = p.bbox
    span = max(xmax - xmin, ymax - ymin) or 1.0
    pad = 0.05 * span
    scale = size / (span + 2 * pad)

    def tx(q) -> str:
        return f"{(q[0] - xmin + pad) * scale:.3f},{(ymax - q[1] + pad) * scale:.3f}"

    w = (xmax - xmin + 2 * pad) * scale
    h = (ymax - ymin + 2 * pad) * scale
    dot = max(1.5, size / 250)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}">',
             f'<polygon points="{" ".join(tx(v) for v in p.vertices)}" fill="#f4f4f4" stroke="black" stroke-width="1"/>']
    for a, b in diagonals:
        parts.append(f'<polyline points="{tx(a)} {tx(b)}" stroke="#9ab" stroke-width="0.6" stroke-dasharray="3,2" fill="none"/>')
    if center is not None and radius is not None:
        if t is not None and radius > 0:
            for q in _shade_points(p, t, center, radius):
                parts.append(f'<circle cx="{tx(q).split(",")[0]}" cy="{tx(q).split(",")[1]}" r="{dot * 0.8:.2f}" fill="#f7c6a0"/>')
        ring = disc_outline(p, center, radius)
        parts.append(f'<polygon points="{" ".join(tx(q) for q in ring)}" fill="#e8743b" fill-opacity="0.25" stroke="#e8743b" stroke-width="1"/>')
    for s in sites:
        x, y = tx(s).split(",")
        parts.append(f'<circle cx="{x}" cy="{y}" r="{dot:.2f}" fill="#1f4e9c"/>')
    if center is not None:
        x, y = tx(center).split(",")
        parts.append(f'<circle cx="{x}" cy="{y}" r="{dot * 1.6:.2f}" fill="#c0392b"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
