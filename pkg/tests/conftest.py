import numpy as np
import pytest

from skeg.geometry import triangulate, validate_polygon

SQUARE = [(0, 0), (4, 0), (4, 4), (0, 4)]
L_SHAPE = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
RECT = [(0, 0), (4, 0), (4, 2), (0, 2)]
RECT3 = [(0, 0), (4, 0), (4, 3), (0, 3)]


@pytest.fixture
def square():
    p = validate_polygon(SQUARE)
    return p, triangulate(p)


@pytest.fixture
def lshape():
    p = validate_polygon(L_SHAPE)
    return p, triangulate(p)


@pytest.fixture
def rect():
    p = validate_polygon(RECT)
    return p, triangulate(p)


@pytest.fixture
def rect3():
    p = validate_polygon(RECT3)
    return p, triangulate(p)


def regular_polygon(m, r=1.0):
    th = 2 * np.pi * np.arange(m) / m
    return validate_polygon(np.column_stack([r * np.cos(th), r * np.sin(th)]))


def euclid_kdisc_radius(points, k):
    """Exact Euclidean smallest k-enclosing disc radius by candidate enumeration.

    The optimum has two diametral or three boundary points (or is a point
    when k = 1), so pair midpoints and triple circumcentres suffice.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if k == 1:
        return 0.0
    cands = [pts]
    i, j = np.triu_indices(n, 1)
    cands.append((pts[i] + pts[j]) / 2)
    a, b, c = (pts[idx] for idx in np.array(list(_triples(n))).T) if n >= 3 else (None, None, None)
    if a is not None:
        d = 2 * (a[:, 0] * (b[:, 1] - c[:, 1]) + b[:, 0] * (c[:, 1] - a[:, 1]) + c[:, 0] * (a[:, 1] - b[:, 1]))
        ok = np.abs(d) > 1e-12
        a, b, c, d = a[ok], b[ok], c[ok], d[ok]
        sa, sb, sc = (np.sum(v * v, axis=1) for v in (a, b, c))
        ux = (sa * (b[:, 1] - c[:, 1]) + sb * (c[:, 1] - a[:, 1]) + sc * (a[:, 1] - b[:, 1])) / d
        uy = (sa * (c[:, 0] - b[:, 0]) + sb * (a[:, 0] - c[:, 0]) + sc * (b[:, 0] - a[:, 0])) / d
        cands.append(np.column_stack([ux, uy]))
    C = np.vstack(cands)
    best = np.inf
    for s in range(0, len(C), 2000):
        dd = np.linalg.norm(C[s:s + 2000, None, :] - pts[None], axis=-1)
        # small slack so boundary points of the candidate disc count as inside
        best = min(best, float(np.min(np.partition(dd, k - 1, axis=1)[:, k - 1])))
    return best


def _triples(n):
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                yield a, b, c
