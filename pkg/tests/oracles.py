"""Independent reference computations used to freeze expected test values.

Everything here deliberately avoids the library's own code paths: volumes use
Gram determinants (the library uses Cayley-Menger), thickness enumerates the
face lattice with plain loops, Delaunay triangles come from testing every
triple against every site, and closest points come from dense grid search.
"""

import itertools
import math

import numpy as np


def gram_volume(pts):
    """j-volume via the Gram determinant sqrt(det(V V^T)) / j!."""
    pts = np.asarray(pts, dtype=float)
    k = len(pts) - 1
    if k == 0:
        return 1.0
    v = pts[1:] - pts[0]
    g = v @ v.T
    det = np.linalg.det(g)
    return math.sqrt(max(det, 0.0)) / math.factorial(k)


def brute_diameter(pts):
    pts = np.asarray(pts, dtype=float)
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, float(np.linalg.norm(pts[i] - pts[j])))
    return best


def brute_thickness(pts):
    """Direct face-lattice evaluation of min Vol_j / diam^j, vertices -> 1."""
    pts = np.asarray(pts, dtype=float)
    m = len(pts)
    best = 1.0
    for size in range(2, m + 1):
        for idx in itertools.combinations(range(m), size):
            face = pts[list(idx)]
            j = size - 1
            vol = gram_volume(face)
            diam = brute_diameter(face)
            if vol < 1e-12 * diam**j:
                return 0.0
            best = min(best, vol / diam**j)
    return best


def brute_delaunay_triangles(sites, chunk=40000):
    """All empty-circumcircle triples of 2D sites, via exhaustive testing.

    Vectorized over chunks of triples but logically the plain O(n^4) check:
    a triple is Delaunay iff no other site lies strictly inside its
    circumcircle. Near-degenerate (collinear) triples are skipped.
    """
    sites = np.asarray(sites, dtype=float)
    n = len(sites)
    triples = np.array(list(itertools.combinations(range(n), 3)))
    out = []
    for start in range(0, len(triples), chunk):
        t = triples[start : start + chunk]
        a, b, c = sites[t[:, 0]], sites[t[:, 1]], sites[t[:, 2]]
        # Circumcenter from the perpendicular-bisector linear system.
        d = 2.0 * (
            a[:, 0] * (b[:, 1] - c[:, 1])
            + b[:, 0] * (c[:, 1] - a[:, 1])
            + c[:, 0] * (a[:, 1] - b[:, 1])
        )
        ok = np.abs(d) > 1e-12
        a2 = np.einsum("ij,ij->i", a, a)
        b2 = np.einsum("ij,ij->i", b, b)
        c2 = np.einsum("ij,ij->i", c, c)
        ux = (a2 * (b[:, 1] - c[:, 1]) + b2 * (c[:, 1] - a[:, 1]) + c2 * (a[:, 1] - b[:, 1])) / np.where(ok, d, 1.0)
        uy = (a2 * (c[:, 0] - b[:, 0]) + b2 * (a[:, 0] - c[:, 0]) + c2 * (b[:, 0] - a[:, 0])) / np.where(ok, d, 1.0)
        centers = np.stack([ux, uy], axis=1)
        r2 = np.einsum("ij,ij->i", a - centers, a - centers)
        # Distances of every site to every circumcenter in this chunk.
        dist2 = (
            (sites[None, :, 0] - centers[:, 0, None]) ** 2
            + (sites[None, :, 1] - centers[:, 1, None]) ** 2
        )
        inside = dist2 < r2[:, None] * (1.0 - 1e-12)
        inside[np.arange(len(t))[:, None], t] = False
        empty = ok & ~inside.any(axis=1)
        out.extend(tuple(sorted(tri)) for tri in t[empty])
    return set(out)


def grid_closest_point(param_grid, surface_fn, p):
    """Closest surface point to p over a dense parameter grid (grid search)."""
    pts = surface_fn(param_grid)
    d = np.linalg.norm(pts - np.asarray(p, dtype=float), axis=-1)
    idx = np.unravel_index(np.argmin(d), d.shape)
    return pts[idx], float(d[idx])
