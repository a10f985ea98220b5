"""Dimension-generic simplex arithmetic and simplicial-complex validity.

Volumes come from Cayley-Menger determinants of squared distances, so every
quantity here depends on the vertex coordinates only through mutual distances
and is immune to the ambient embedding. The thickness of a simplex is the
minimum, over its whole face lattice, of j-volume / diameter^j; it is scale
free, lies in [0, 1], and vanishes exactly on degenerate simplices.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import cKDTree

from .errors import EmptyInputError, InvalidInputError

# A face counts as degenerate when Vol_j < DEGENERACY_TOL * diam^j.
DEGENERACY_TOL = 1e-12

# Thickness histogram buckets are fixed so reports are comparable across runs.
HISTOGRAM_BUCKETS = 20


def _pairwise_sq_dists(pts):
    """Squared distance matrices for a batch of point sets (..., m, nu)."""
    diff = pts[..., :, None, :] - pts[..., None, :, :]
    return np.einsum("...ijk,...ijk->...ij", diff, diff)


def _cm_volume_sq(pts):
    """Squared j-volumes of a batch of (j+1)-point sets, shape (..., m, nu).

    Uses the Cayley-Menger determinant; negative values from floating point
    are clamped to 0 so degenerate sets report exactly zero volume.
    """
    pts = np.asarray(pts, dtype=float)
    m = pts.shape[-2]
    k = m - 1
    if k == 0:
        return np.ones(pts.shape[:-2])
    d2 = _pairwise_sq_dists(pts)
    border = np.zeros(pts.shape[:-2] + (m + 1, m + 1))
    border[..., 0, 1:] = 1.0
    border[..., 1:, 0] = 1.0
    border[..., 1:, 1:] = d2
    det = np.linalg.det(border)
    coef = (-1.0) ** (k + 1) / (2.0**k * float(math.factorial(k)) ** 2)
    vol_sq = coef * det
    return np.maximum(vol_sq, 0.0)


class Simplex:
    """An ordered list of k+1 points in R^nu, 0 <= k <= nu."""

    def __init__(self, vertices):
        pts = np.atleast_2d(np.asarray(vertices, dtype=float))
        if pts.ndim != 2:
            raise InvalidInputError("vertices must be a (k+1, nu) array")
        if pts.shape[0] < 1:
            raise InvalidInputError("a simplex needs at least one vertex")
        if pts.shape[0] > pts.shape[1] + 1:
            raise InvalidInputError(
                f"{pts.shape[0]} vertices cannot span a simplex in R^{pts.shape[1]}"
            )
        self.vertices = pts
        self.vertices.setflags(write=False)

    @property
    def dim(self):
        return self.vertices.shape[0] - 1

    @property
    def ambient_dim(self):
        return self.vertices.shape[1]

    def faces(self):
        """Yield every nonempty face (2^(k+1) - 1 of them) as a Simplex."""
        m = self.vertices.shape[0]
        for size in range(1, m + 1):
            for idx in itertools.combinations(range(m), size):
                yield Simplex(self.vertices[list(idx)])

    def __repr__(self):
        return f"Simplex(dim={self.dim}, ambient={self.ambient_dim})"


def simplex_volume(s):
    """j-dimensional volume of a simplex (1.0 for a single vertex, by convention)."""
    pts = s.vertices if isinstance(s, Simplex) else Simplex(s).vertices
    if pts.shape[0] > pts.shape[1] + 1:
        raise InvalidInputError("simplex dimension exceeds ambient dimension")
    return float(np.sqrt(_cm_volume_sq(pts)))


def simplex_diameter(s):
    """Max pairwise vertex distance; 0.0 for a single vertex."""
    pts = s.vertices if isinstance(s, Simplex) else Simplex(s).vertices
    if pts.shape[0] == 1:
        return 0.0
    return float(np.sqrt(_pairwise_sq_dists(pts).max()))


def _face_ratio_min(pts):
    """Min over all faces of Vol_j / diam^j for one simplex, vectorized per face size.

    Vertices contribute exactly 1 (Vol_0 = 1 and diam^0 := 1), so the running
    minimum starts at 1.0.
    """
    m = pts.shape[0]
    best = 1.0
    for size in range(2, m + 1):
        idx = np.array(list(itertools.combinations(range(m), size)))
        face_pts = pts[idx]  # (C, size, nu)
        j = size - 1
        vol = np.sqrt(_cm_volume_sq(face_pts))
        diam = np.sqrt(_pairwise_sq_dists(face_pts).max(axis=(-2, -1)))
        ratio = np.zeros(len(idx))
        ok = vol >= DEGENERACY_TOL * diam**j
        ratio[ok] = vol[ok] / diam[ok] ** j
        best = min(best, float(ratio.min()))
    return best


def thickness(s):
    """Thickness of a simplex: min over faces of j-volume / diam^j.

    Returns a value in [0, 1]; 0 exactly when some face is degenerate at the
    scale-free tolerance DEGENERACY_TOL.
    """
    pts = s.vertices if isinstance(s, Simplex) else Simplex(s).vertices
    return _face_ratio_min(pts)


class SimplicialComplex:
    """Indexed vertex table plus top-dimensional cells as vertex-index tuples.

    Faces are implicit through the index tuples. Geometric validity (pairwise
    intersections are common faces) is checked by :func:`validate_complex`,
    not enforced at construction.
    """

    def __init__(self, vertices, cells):
        self.vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
        cells = np.asarray(cells, dtype=int)
        if cells.size == 0:
            cells = cells.reshape(0, 0)
        if cells.ndim != 2:
            raise InvalidInputError("cells must be a (N, m) index array")
        if cells.size and (cells.min() < 0 or cells.max() >= len(self.vertices)):
            raise InvalidInputError("cell index out of range")
        self.cells = cells

    @property
    def dim(self):
        return self.cells.shape[1] - 1 if self.cells.size else -1

    @property
    def ambient_dim(self):
        return self.vertices.shape[1]

    def cell_points(self):
        """All cell coordinates as an (N, m, nu) array."""
        return self.vertices[self.cells]

    def edges(self):
        """Sorted-unique vertex index pairs appearing in any cell."""
        m = self.cells.shape[1]
        pairs = []
        for i, j in itertools.combinations(range(m), 2):
            pairs.append(np.sort(self.cells[:, [i, j]], axis=1))
        if not pairs:
            return np.zeros((0, 2), dtype=int)
        return np.unique(np.concatenate(pairs, axis=0), axis=0)

    def counts(self):
        """(V, E, F) over referenced vertices; V-E+F is the Euler characteristic for surfaces."""
        v = len(np.unique(self.cells)) if self.cells.size else 0
        return v, len(self.edges()), len(self.cells)

    def boundary_edges(self):
        """Edges incident to exactly one cell (triangle complexes)."""
        if self.cells.shape[1] != 3:
            raise InvalidInputError("boundary_edges expects a triangle complex")
        tri = self.cells
        all_edges = np.sort(
            np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [0, 2]]]), axis=1
        )
        uniq, counts = np.unique(all_edges, axis=0, return_counts=True)
        return uniq[counts == 1]

    def __repr__(self):
        return (
            f"SimplicialComplex(V={len(self.vertices)}, cells={len(self.cells)}, "
            f"dim={self.dim}, ambient={self.ambient_dim})"
        )


@dataclass
class ThicknessReport:
    """Per-complex thickness summary: min, argmin cell, histogram, per-dim minima."""

    min_thickness: float
    argmin_cell: int
    histogram: list
    per_dimension_min: dict
    cell_count: int
    values: np.ndarray = field(repr=False)

    def buckets_total(self):
        return sum(count for _, _, count in self.histogram)


def _cells_thickness(points):
    """Thickness per cell for an (N, m, nu) stack, vectorized per face size."""
    n_cells, m, _ = points.shape
    best = np.ones(n_cells)
    for size in range(2, m + 1):
        for idx in itertools.combinations(range(m), size):
            face = points[:, list(idx), :]
            j = size - 1
            vol = np.sqrt(_cm_volume_sq(face))
            diam = np.sqrt(_pairwise_sq_dists(face).max(axis=(-2, -1)))
            ratio = np.zeros(n_cells)
            ok = vol >= DEGENERACY_TOL * diam**j
            ratio[ok] = vol[ok] / diam[ok] ** j
            np.minimum(best, ratio, out=best)
    return best


def complex_thickness(c):
    """ThicknessReport over all top cells of a complex.

    Each cell's own face lattice realizes the infimum, so shared faces are
    covered without separate bookkeeping. Raises EmptyInputError on an empty
    complex.
    """
    if c.cells.size == 0:
        raise EmptyInputError("cannot report thickness of an empty complex")
    values = _cells_thickness(c.cell_points())
    argmin = int(values.argmin())
    edges_lo = np.linspace(0.0, 1.0, HISTOGRAM_BUCKETS + 1)
    counts, _ = np.histogram(values, bins=edges_lo)
    histogram = [
        (float(edges_lo[i]), float(edges_lo[i + 1]), int(counts[i]))
        for i in range(HISTOGRAM_BUCKETS)
    ]
    k = c.dim
    return ThicknessReport(
        min_thickness=float(values[argmin]),
        argmin_cell=argmin,
        histogram=histogram,
        per_dimension_min={k: float(values.min())},
        cell_count=len(c.cells),
        values=values,
    )


def simplex_circumradius(pts):
    """Circumradius of a nondegenerate k-simplex given as (k+1, nu) points."""
    pts = np.asarray(pts, dtype=float)
    v = pts[1:] - pts[0]
    gram = v @ v.T
    rhs = 0.5 * np.einsum("ij,ij->i", v, v)
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        return float("inf")
    center = pts[0] + coef @ v
    return float(np.linalg.norm(center - pts[0]))


# ---------------------------------------------------------------------------
# Complex validation: pairwise intersections must be common faces.
# ---------------------------------------------------------------------------


@dataclass
class Violation:
    kind: str
    cells: tuple
    detail: str


@dataclass
class ValidityReport:
    valid: bool
    violations: list
    pairs_checked: int

    def __bool__(self):
        return self.valid


def _hull_distance(p, q, iters=60):
    """Distance between convex hulls of two point sets (Gilbert's algorithm).

    Returns (distance, certified). The estimate is only trustworthy when the
    duality-gap certificate triggered; touching hulls converge too slowly to
    certify, and callers must then decide by other means.
    """
    x = p.mean(axis=0) - q.mean(axis=0)
    certified = False
    for _ in range(iters):
        nx = np.dot(x, x)
        if nx < 1e-30:
            return 0.0, True
        s = p[np.argmin(p @ x)] - q[np.argmax(q @ x)]
        gap = nx - np.dot(x, s)
        if gap <= 1e-12 * nx:
            certified = True
            break
        d = s - x
        t = min(1.0, max(0.0, gap / np.dot(d, d)))
        x = x + t * d
    return float(np.linalg.norm(x)), certified


def _lp_improper_mass(p1, p2, shared1, shared2):
    """Max barycentric mass outside the shared face over the hull intersection.

    Solves a small LP: find a common point of both hulls maximizing the total
    coefficient on non-shared vertices. Returns 0 when the intersection is
    contained in the shared face, None when the hulls do not intersect.
    """
    m1, m2 = len(p1), len(p2)
    scale = max(np.abs(p1).max(), np.abs(p2).max(), 1e-30)
    a1, a2 = p1 / scale, p2 / scale
    nu = p1.shape[1]
    cost = np.zeros(m1 + m2)
    cost[: m1] = -1.0
    cost[m1 :] = -1.0
    for i in shared1:
        cost[i] = 0.0
    for j in shared2:
        cost[m1 + j] = 0.0
    a_eq = np.zeros((2 + nu, m1 + m2))
    a_eq[0, :m1] = 1.0
    a_eq[1, m1:] = 1.0
    a_eq[2:, :m1] = a1.T
    a_eq[2:, m1:] = -a2.T
    b_eq = np.zeros(2 + nu)
    b_eq[0] = 1.0
    b_eq[1] = 1.0
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status == 2:  # infeasible: hulls disjoint
        return None
    if not res.success:
        return None
    return float(-res.fun)


def _interval_from_coeffs(alpha):
    """t-interval where t*alpha stays in the barycentric triangle {g>=0, sum<=1}."""
    lo, hi = -np.inf, np.inf
    for a in (alpha[0], alpha[1]):
        if a > 0:
            lo = max(lo, 0.0)
        elif a < 0:
            hi = min(hi, 0.0)
    s = alpha[0] + alpha[1]
    if s > 0:
        hi = min(hi, 1.0 / s)
    elif s < 0:
        lo = max(lo, 1.0 / s)
    return lo, hi


def _angular_sector(p1, p2):
    """(start, width) of the angular sector spanned by two 2D direction vectors."""
    t1 = np.arctan2(p1[1], p1[0])
    t2 = np.arctan2(p2[1], p2[0])
    width = (t2 - t1) % (2 * np.pi)
    if width <= np.pi:
        return t1, width
    return t2, 2 * np.pi - width


def _sector_overlap(lo1, w1, lo2, w2):
    """Overlap length of two angular intervals on the circle."""
    rel = (lo2 - lo1) % (2 * np.pi)
    total = 0.0
    total += max(0.0, min(w1, rel + w2) - rel)
    total += max(0.0, min(w1, rel + w2 - 2 * np.pi))
    return total


def _triangles_shared_vertex_improper(p1, p2, i1, i2, tol_len):
    """Improper-intersection test for two triangles sharing exactly one vertex."""
    a = p1[i1]
    u = np.delete(p1, i1, axis=0) - a
    w = np.delete(p2, i2, axis=0) - a
    scale = max(np.linalg.norm(u, axis=1).max(), np.linalg.norm(w, axis=1).max())
    if scale == 0.0:
        return False
    m = np.stack([u[0], u[1], -w[0], -w[1]], axis=1)
    svals = np.linalg.svd(m, compute_uv=False)
    rank3 = svals[2] > 1e-7 * scale if len(svals) > 2 else False
    rank4 = svals[3] > 1e-7 * scale if len(svals) > 3 else False
    if rank4:
        return False  # affine hulls meet only at the shared vertex
    if rank3:
        # Intersection of the two planes is a line through the shared vertex.
        _, _, vt = np.linalg.svd(m)
        coeff = vt[-1]
        alpha, beta = coeff[:2], coeff[2:]
        d = u.T @ alpha
        nd = np.linalg.norm(d)
        if nd < 1e-12 * scale:
            mass = _lp_improper_mass(p1, p2, [i1], [i2])
            return mass is not None and mass > 1e-6
        lo1, hi1 = _interval_from_coeffs(alpha)
        lo2, hi2 = _interval_from_coeffs(beta)
        lo, hi = max(lo1, lo2), min(hi1, hi2)
        if lo > hi:
            return False
        return max(hi, 0.0) * nd > tol_len or -min(lo, 0.0) * nd > tol_len
    # Coplanar triangles: compare angular wedges at the shared vertex.
    q, r = np.linalg.qr(u.T)
    if abs(r[1, 1]) < 1e-12 * scale:
        mass = _lp_improper_mass(p1, p2, [i1], [i2])
        return mass is not None and mass > 1e-6
    u2d = u @ q
    w2d = w @ q
    ang_tol = max(tol_len / scale, 1e-12)
    lo_a, wid_a = _angular_sector(u2d[0], u2d[1])
    lo_b, wid_b = _angular_sector(w2d[0], w2d[1])
    if _sector_overlap(lo_a, wid_a, lo_b, wid_b) > ang_tol:
        return True
    # Collinear same-direction boundary edges overlap in a segment.
    for uu in u2d:
        tu = np.arctan2(uu[1], uu[0])
        for ww in w2d:
            tw = np.arctan2(ww[1], ww[0])
            if abs((tu - tw + np.pi) % (2 * np.pi) - np.pi) < ang_tol:
                return True
    return False


def _triangles_shared_edge_improper(p1, p2, free1, free2, shared_pts, tol_len):
    """Improper-intersection test for two triangles sharing a full edge."""
    a, b = shared_pts
    e = b - a
    c1 = p1[free1] - a
    c2 = p2[free2] - a
    scale = max(np.linalg.norm(e), np.linalg.norm(c1), np.linalg.norm(c2))
    if scale == 0.0:
        return False
    e1 = e / np.linalg.norm(e)
    y1 = c1 - np.dot(c1, e1) * e1
    ny1 = np.linalg.norm(y1)
    if ny1 < 1e-12 * scale:
        return False  # degenerate cell, reported separately
    e2 = y1 / ny1
    off_plane = c2 - np.dot(c2, e1) * e1 - np.dot(c2, e2) * e2
    if np.linalg.norm(off_plane) > max(tol_len, 1e-7 * scale):
        return False  # non-coplanar: intersection is exactly the shared edge
    side2 = np.dot(c2, e2)
    return side2 > max(tol_len, 1e-9 * scale)


def _segments_shared_vertex_improper(p1, p2, i1, i2, tol_len):
    """Two segments sharing an endpoint: improper iff collinear and overlapping."""
    a = p1[i1]
    u = p1[1 - i1] - a
    w = p2[1 - i2] - a
    nu_, nw = np.linalg.norm(u), np.linalg.norm(w)
    if nu_ < 1e-30 or nw < 1e-30:
        return False
    cosang = np.dot(u, w) / (nu_ * nw)
    sin_part = np.linalg.norm(np.cross(u, w)) if len(u) == 3 else abs(u[0] * w[1] - u[1] * w[0])
    return cosang > 0 and sin_part <= tol_len * max(nu_, nw)


def _pair_improper(p1, p2, cell1, cell2, tol_len):
    """Dispatch the intersection test for one candidate cell pair."""
    shared = set(cell1) & set(cell2)
    n_shared = len(shared)
    m1, m2 = len(cell1), len(cell2)
    if n_shared == 0:
        dist, certified = _hull_distance(p1, p2)
        if certified and dist > tol_len:
            return False
        # Hulls sharing no vertex must not meet at all: any common point
        # (LP feasible) is improper.
        return _lp_improper_mass(p1, p2, [], []) is not None
    if m1 == 3 and m2 == 3:
        if n_shared == 2:
            free1 = next(i for i, v in enumerate(cell1) if v not in shared)
            free2 = next(i for i, v in enumerate(cell2) if v not in shared)
            shared_pts = p1[[i for i in range(3) if i != free1]]
            return _triangles_shared_edge_improper(p1, p2, free1, free2, shared_pts, tol_len)
        if n_shared == 1:
            sv = next(iter(shared))
            i1 = list(cell1).index(sv)
            i2 = list(cell2).index(sv)
            return _triangles_shared_vertex_improper(p1, p2, i1, i2, tol_len)
    if m1 == 2 and m2 == 2 and n_shared == 1:
        sv = next(iter(shared))
        return _segments_shared_vertex_improper(
            p1, p2, list(cell1).index(sv), list(cell2).index(sv), tol_len
        )
    shared1 = [i for i, v in enumerate(cell1) if v in shared]
    shared2 = [j for j, v in enumerate(cell2) if v in shared]
    mass = _lp_improper_mass(p1, p2, shared1, shared2)
    return mass is not None and mass > 1e-6


def validate_complex(c, tol=1e-9, max_violations=50):
    """Check that a complex is a proper Euclidean simplicial complex.

    Verifies: no duplicate cells, no (near-)zero-volume cells, and that any
    two cells intersect in their common face or not at all, geometrically up
    to ``tol`` (a length tolerance relative to local cell size). Violations
    are data, not errors; at most ``max_violations`` are collected.
    """
    violations = []
    cells = c.cells
    n = len(cells)
    if n == 0:
        return ValidityReport(valid=True, violations=[], pairs_checked=0)

    seen = {}
    for i in range(n):
        key = tuple(sorted(cells[i]))
        if key in seen:
            violations.append(Violation("duplicate-cell", (seen[key], i), f"cells {seen[key]} and {i} have identical vertex sets"))
        else:
            seen[key] = i
        if len(set(key)) != len(key):
            violations.append(Violation("degenerate-cell", (i,), "repeated vertex index within cell"))

    points = c.cell_points()
    diam = np.sqrt(_pairwise_sq_dists(points).max(axis=(-2, -1)))
    k = c.dim
    vol = np.sqrt(_cm_volume_sq(points))
    degenerate = vol < DEGENERACY_TOL * np.maximum(diam, 1e-300) ** k
    for i in np.nonzero(degenerate)[0]:
        violations.append(Violation("degenerate-cell", (int(i),), "cell volume below degeneracy tolerance"))

    # Candidate pairs via centroid tree; bounding radii prune the rest.
    centroids = points.mean(axis=1)
    bound = np.linalg.norm(points - centroids[:, None, :], axis=2).max(axis=1)
    tol_len_global = tol * max(diam.max(), 1e-300)
    tree = cKDTree(centroids)
    pairs = tree.query_pairs(r=2.0 * bound.max() + tol_len_global, output_type="ndarray")
    checked = 0
    for i, j in pairs:
        if len(violations) >= max_violations:
            break
        if np.linalg.norm(centroids[i] - centroids[j]) > bound[i] + bound[j] + tol_len_global:
            continue
        if degenerate[i] or degenerate[j]:
            continue
        key_i, key_j = tuple(sorted(cells[i])), tuple(sorted(cells[j]))
        if key_i == key_j:
            continue  # already reported as duplicate
        checked += 1
        tol_len = tol * max(diam[i], diam[j])
        if _pair_improper(points[i], points[j], cells[i], cells[j], tol_len):
            violations.append(
                Violation(
                    "improper-intersection",
                    (int(i), int(j)),
                    f"cells {i} and {j} intersect outside their common face",
                )
            )
    return ValidityReport(valid=not violations, violations=violations, pairs_checked=checked)
