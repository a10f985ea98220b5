"""Sampling regions on manifolds, cutting surfaces, and collar bands.

A region couples a manifold with a membership predicate and a seeded sampler.
Regions can sample with an ``inflate`` margin (points slightly beyond the
nominal boundary) which the triangulator uses so restricted Voronoi walls near
a region boundary are witnessed correctly. Flat unbounded regions additionally
expose a sparse far-field witness tail that catches Voronoi vertices lying far
outside the region.
"""

import numpy as np

from .errors import EmptyRegionError, ProjectionError

_MAX_REJECTION_ROUNDS = 60


class Region:
    manifold = None

    def contains(self, pts, inflate=0.0):
        raise NotImplementedError

    def sample(self, rng, count, inflate=0.0):
        raise NotImplementedError

    def witness_tail(self, rng, count):
        """Optional sparse far-field witness cloud; default none."""
        return np.zeros((0, self.manifold.nu))

    def _rejection_sample(self, rng, count, inflate):
        out = []
        got = 0
        for _ in range(_MAX_REJECTION_ROUNDS):
            batch = self.manifold.sample(rng, max(4 * count, 64))
            keep = batch[self.contains(batch, inflate=inflate)]
            if len(keep):
                out.append(keep)
                got += len(keep)
            if got >= count:
                break
        if got == 0:
            raise EmptyRegionError(f"region {self!r} produced no sample points")
        return np.concatenate(out)[:count]


class FullRegion(Region):
    """The whole (extent-bounded) manifold."""

    def __init__(self, manifold):
        self.manifold = manifold

    def contains(self, pts, inflate=0.0):
        return np.ones(len(np.atleast_2d(pts)), dtype=bool)

    def sample(self, rng, count, inflate=0.0):
        return self.manifold.sample(rng, count)

    def __repr__(self):
        return f"FullRegion({self.manifold.name})"


class BallRegion(Region):
    """Manifold slice by ambient distance from a center: r_lo <= |p-c| <= r_hi."""

    def __init__(self, manifold, center, r_hi, r_lo=0.0):
        self.manifold = manifold
        self.center = np.asarray(center, dtype=float)
        self.r_lo = float(r_lo)
        self.r_hi = float(r_hi)

    def contains(self, pts, inflate=0.0):
        d = np.linalg.norm(np.atleast_2d(pts) - self.center, axis=1)
        lo = max(self.r_lo - inflate, 0.0)
        return (d >= lo) & (d <= self.r_hi + inflate)

    def sample(self, rng, count, inflate=0.0):
        return self._rejection_sample(rng, count, inflate)

    def __repr__(self):
        return (
            f"BallRegion({self.manifold.name}, r=[{self.r_lo:.3g},{self.r_hi:.3g}])"
        )


class BoxRegion(Region):
    """Manifold slice by an ambient axis-aligned box."""

    def __init__(self, manifold, lo, hi):
        self.manifold = manifold
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)

    def contains(self, pts, inflate=0.0):
        pts = np.atleast_2d(pts)
        return np.all(pts >= self.lo - inflate, axis=1) & np.all(
            pts <= self.hi + inflate, axis=1
        )

    def sample(self, rng, count, inflate=0.0):
        return self._rejection_sample(rng, count, inflate)

    def witness_tail(self, rng, count):
        """Far-field cloud on the manifold around the box, log-uniform in radius.

        Flat regions have third-order Voronoi pockets arbitrarily far away;
        a thin heavy-tailed cloud witnesses them cheaply.
        """
        if count <= 0:
            return np.zeros((0, self.manifold.nu))
        center = 0.5 * (self.lo + self.hi)
        diam = float(np.linalg.norm(self.hi - self.lo))
        radius = diam * np.exp(rng.uniform(np.log(0.5), np.log(40.0), count))
        raw = rng.normal(size=(count, self.manifold.nu))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        pts = center + radius[:, None] * raw
        out = []
        for p in pts:
            try:
                out.append(self.manifold.project(p))
            except ProjectionError:
                continue
        return np.array(out) if out else np.zeros((0, self.manifold.nu))


class PointsRegion(Region):
    """A finite, possibly single-point region."""

    def __init__(self, manifold, points):
        self.manifold = manifold
        self.points = np.atleast_2d(np.asarray(points, dtype=float))

    def contains(self, pts, inflate=0.0):
        pts = np.atleast_2d(pts)
        d = np.linalg.norm(pts[:, None, :] - self.points[None, :, :], axis=2)
        return d.min(axis=1) <= max(inflate, 1e-9)

    def sample(self, rng, count, inflate=0.0):
        if len(self.points) == 0:
            raise EmptyRegionError("empty point region")
        idx = np.arange(count) % len(self.points)
        return self.points[idx]


class CutSurface:
    """The (n-1)-manifold M intersected with an ambient sphere |p - c| = R."""

    def __init__(self, manifold, center, radius):
        self.manifold = manifold
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)

    def residual(self, q):
        extra = np.dot(q - self.center, q - self.center) - self.radius**2
        return np.concatenate([self.manifold.residual(q), [extra]])

    def project(self, p, max_iter=60):
        """Least-norm Gauss-Newton onto the cut curve, from a nearby point."""
        q = np.asarray(p, dtype=float).copy()
        scale = 1.0 + np.linalg.norm(q)
        for _ in range(max_iter):
            r = self.residual(q)
            if np.linalg.norm(r) < 1e-12 * scale:
                return q
            j = np.vstack(
                [self.manifold.jacobian(q), 2.0 * (q - self.center).reshape(1, -1)]
            )
            step, *_ = np.linalg.lstsq(j, -r, rcond=None)
            if np.linalg.norm(step) > 0.5 * scale:
                step *= 0.5 * scale / np.linalg.norm(step)
            q = q + step
        raise ProjectionError("cut-surface projection stalled", last_iterate=q)

    def distance(self, pts):
        """Ambient-shell distance | |p-c| - R | of points to the cutting sphere."""
        return np.abs(np.linalg.norm(np.atleast_2d(pts) - self.center, axis=1) - self.radius)


class CollarBand:
    """Shell band | |p-c| - R | <= half_width around a cutting sphere.

    The overlap descriptor used both by the gluing check and by the mash:
    stage meshes meet inside such a band.
    """

    def __init__(self, center, radius, half_width):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.half_width = float(half_width)

    @property
    def width(self):
        return 2.0 * self.half_width

    def contains(self, pts):
        d = np.linalg.norm(np.atleast_2d(pts) - self.center, axis=1)
        return np.abs(d - self.radius) <= self.half_width

    def signed_offset(self, pts):
        """Radial offset from the band center surface (negative = inside R)."""
        d = np.linalg.norm(np.atleast_2d(pts) - self.center, axis=1)
        return d - self.radius

    def __repr__(self):
        return f"CollarBand(R={self.radius:.3g}, hw={self.half_width:.3g})"
