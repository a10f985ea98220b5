"""Analytic embedded manifolds with closest-point projection and tangent frames.

A manifold is given either implicitly, as the zero set of a submersion
F: R^nu -> R^(nu-n) with analytic Jacobian, or parametrically through a chart.
Projection onto an implicit manifold solves the closest-point stationarity
system (point difference parallel to the normal space) with a damped Newton
iteration; inside the tubular neighborhood this lands on the true closest
point.

The catalog at the bottom provides the test surfaces used throughout: sphere,
cylinder, paraboloid, catenoid, plane, torus, circle. Each carries a seeded
area-uniform sampler over a bounded extent and, where known, its analytic
tubular ("reach") radius so estimators can be checked against closed forms.
"""

import numpy as np

from .errors import ConfigError, ProjectionError, SingularPointError

_RANK_TOL = 1e-8  # smallest singular value a constraint Jacobian may have


class EmbeddedManifold:
    """Common interface: projection, tangent frames, membership, sampling."""

    name = "manifold"
    params: dict = {}

    n: int
    nu: int
    compact = False
    known_reach = None  # analytic tubular radius, None when unknown/infinite
    extent_radius = 1.0  # bounding-sphere radius of the sampled portion

    def project(self, p):
        raise NotImplementedError

    def tangent_frame(self, x):
        raise NotImplementedError

    def contains(self, p, tol=1e-8):
        raise NotImplementedError

    def sample(self, rng, count):
        """Approximately area-uniform points on the (bounded) manifold."""
        raise NotImplementedError

    def normal_space(self, x):
        """Orthonormal basis of the normal space at x, shape (nu-n, nu)."""
        frame = self.tangent_frame(x)
        # Complete the tangent frame to a full orthonormal basis.
        full = _complete_basis(frame, self.nu)
        return full[self.n :]

    def __repr__(self):
        return f"{type(self).__name__}({self.name}, n={self.n}, nu={self.nu})"


def _complete_basis(rows, nu):
    basis = [r for r in rows]
    for i in range(nu):
        e = np.zeros(nu)
        e[i] = 1.0
        for b in basis:
            e = e - np.dot(e, b) * b
        norm = np.linalg.norm(e)
        if norm > 1e-8:
            basis.append(e / norm)
        if len(basis) == nu:
            break
    return np.array(basis)


def _fix_signs(frame):
    """Deterministic sign convention: largest-magnitude entry positive."""
    out = np.array(frame)
    for i, v in enumerate(out):
        j = int(np.argmax(np.abs(v)))
        if v[j] < 0:
            out[i] = -v
    return out


class ImplicitManifold(EmbeddedManifold):
    """Zero set of F: R^nu -> R^(nu-n), with analytic Jacobian."""

    def __init__(self, func, jac, n, nu, name="implicit", params=None,
                 sampler=None, compact=False, known_reach=None, extent_radius=1.0):
        self.func = func
        self.jac = jac
        self.n = n
        self.nu = nu
        self.name = name
        self.params = dict(params or {})
        self._sampler = sampler
        self.compact = compact
        self.known_reach = known_reach
        self.extent_radius = extent_radius

    def residual(self, p):
        return np.atleast_1d(np.asarray(self.func(np.asarray(p, dtype=float)), dtype=float))

    def jacobian(self, p):
        return np.atleast_2d(np.asarray(self.jac(np.asarray(p, dtype=float)), dtype=float))

    def contains(self, p, tol=1e-8):
        return bool(np.linalg.norm(self.residual(p)) <= tol)

    def tangent_frame(self, x):
        """Orthonormal basis of the tangent space: null space of the Jacobian."""
        j = self.jacobian(x)
        u, s, vt = np.linalg.svd(j)
        if s.min() <= _RANK_TOL:
            raise SingularPointError(
                f"constraint Jacobian rank-deficient at {np.asarray(x)}"
            )
        return _fix_signs(vt[self.nu - self.n :])

    def project(self, p, max_iter=50, f_tol=1e-13):
        """Closest-point projection via damped Newton on the stationarity system.

        Unknowns are (q, lam); residual R = [q - p + J(q)^T lam, F(q)].
        The J^T lam curvature block is differenced numerically, which keeps
        the catalog free of analytic Hessians. Raises ProjectionError (with
        the last iterate attached) on non-convergence.
        """
        p = np.asarray(p, dtype=float)
        codim = self.nu - self.n
        q = p.copy()
        lam = np.zeros(codim)
        scale = 1.0 + np.linalg.norm(p)

        def full_residual(q, lam):
            return np.concatenate([q - p + self.jacobian(q).T @ lam, self.residual(q)])

        r = full_residual(q, lam)
        for _ in range(max_iter):
            fq = self.residual(q)
            if np.linalg.norm(fq) < f_tol and np.linalg.norm(r) < 1e-11 * scale:
                break
            j = self.jacobian(q)
            # d/dq of J(q)^T lam, by forward differences.
            h = 1e-7 * scale
            curv = np.zeros((self.nu, self.nu))
            if np.any(lam != 0.0):
                base = j.T @ lam
                for i in range(self.nu):
                    qe = q.copy()
                    qe[i] += h
                    curv[:, i] = (self.jacobian(qe).T @ lam - base) / h
            kkt = np.zeros((self.nu + codim, self.nu + codim))
            kkt[: self.nu, : self.nu] = np.eye(self.nu) + curv
            kkt[: self.nu, self.nu :] = j.T
            kkt[self.nu :, : self.nu] = j
            try:
                step = np.linalg.solve(kkt, -r)
            except np.linalg.LinAlgError:
                raise ProjectionError("singular projection system", last_iterate=q)
            # Damped acceptance on the merit |R|.
            t = 1.0
            norm_r = np.linalg.norm(r)
            for _ in range(9):
                q_new = q + t * step[: self.nu]
                lam_new = lam + t * step[self.nu :]
                r_new = full_residual(q_new, lam_new)
                if np.linalg.norm(r_new) < norm_r:
                    break
                t *= 0.5
            else:
                raise ProjectionError("projection line search stalled", last_iterate=q)
            q, lam, r = q_new, lam_new, r_new
        else:
            raise ProjectionError(
                f"projection did not converge within {max_iter} iterations",
                last_iterate=q,
            )
        return q

    def sample(self, rng, count):
        if self._sampler is None:
            raise ConfigError(f"manifold {self.name!r} has no sampler")
        return self._sampler(rng, count)


class ParametricManifold(EmbeddedManifold):
    """Chart map f: domain subset of R^n -> R^nu with analytic differential."""

    def __init__(self, chart, chart_jac, domain_lo, domain_hi, n, nu,
                 name="parametric", params=None, compact=False, known_reach=None,
                 extent_radius=1.0):
        self.chart = chart
        self.chart_jac = chart_jac
        self.domain_lo = np.asarray(domain_lo, dtype=float)
        self.domain_hi = np.asarray(domain_hi, dtype=float)
        self.n = n
        self.nu = nu
        self.name = name
        self.params = dict(params or {})
        self.compact = compact
        self.known_reach = known_reach
        self.extent_radius = extent_radius

    def _best_params(self, p, grid=24):
        axes = [np.linspace(lo, hi, grid) for lo, hi in zip(self.domain_lo, self.domain_hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        uv = np.stack([m.ravel() for m in mesh], axis=1)
        pts = np.array([self.chart(u) for u in uv])
        return uv[np.argmin(np.linalg.norm(pts - p, axis=1))]

    def _refine_params(self, p, u, max_iter=50):
        """Gauss-Newton on the squared distance over chart parameters."""
        for _ in range(max_iter):
            x = np.asarray(self.chart(u), dtype=float)
            j = np.atleast_2d(np.asarray(self.chart_jac(u), dtype=float))  # (nu, n)
            g = j.T @ (x - p)
            if np.linalg.norm(g) < 1e-14 * (1.0 + np.linalg.norm(p)):
                break
            try:
                du = np.linalg.solve(j.T @ j, -g)
            except np.linalg.LinAlgError:
                raise ProjectionError("degenerate chart differential", last_iterate=x)
            u = np.clip(u + du, self.domain_lo, self.domain_hi)
        return u

    def project(self, p, max_iter=50):
        p = np.asarray(p, dtype=float)
        u = self._refine_params(p, self._best_params(p), max_iter)
        return np.asarray(self.chart(u), dtype=float)

    def tangent_frame(self, x):
        x = np.asarray(x, dtype=float)
        u = self._refine_params(x, self._best_params(x))
        j = np.atleast_2d(np.asarray(self.chart_jac(u), dtype=float))
        q, r = np.linalg.qr(j)
        if np.abs(np.diag(r)).min() <= _RANK_TOL:
            raise SingularPointError(f"chart differential rank-deficient near {x}")
        return _fix_signs(q.T)

    def contains(self, p, tol=1e-8):
        q = self.project(np.asarray(p, dtype=float))
        return bool(np.linalg.norm(q - p) <= tol)

    def sample(self, rng, count):
        u = rng.uniform(self.domain_lo, self.domain_hi, size=(count, self.n))
        return np.array([self.chart(ui) for ui in u])


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


def sphere(radius=1.0):
    r = float(radius)

    def sampler(rng, count):
        v = rng.normal(size=(count, 3))
        return r * v / np.linalg.norm(v, axis=1, keepdims=True)

    return ImplicitManifold(
        func=lambda p: np.dot(p, p) - r * r,
        jac=lambda p: 2.0 * p.reshape(1, 3),
        n=2, nu=3, name="sphere", params={"radius": r},
        sampler=sampler, compact=True, known_reach=r, extent_radius=r,
    )


def cylinder(radius=1.0, half_height=None):
    r = float(radius)
    h = float(half_height) if half_height is not None else 2.0 * r

    def sampler(rng, count):
        theta = rng.uniform(0.0, 2.0 * np.pi, count)
        z = rng.uniform(-h, h, count)
        return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)

    return ImplicitManifold(
        func=lambda p: p[0] * p[0] + p[1] * p[1] - r * r,
        jac=lambda p: np.array([[2.0 * p[0], 2.0 * p[1], 0.0]]),
        n=2, nu=3, name="cylinder", params={"radius": r, "half_height": h},
        sampler=sampler, known_reach=r, extent_radius=float(np.hypot(r, h)),
    )


def paraboloid(max_radius=2.0):
    rmax = float(max_radius)
    wmax = np.sqrt(1.0 + 4.0 * rmax * rmax)

    def sampler(rng, count):
        # Rejection against the area element sqrt(1+4r^2) over the disk.
        out = np.zeros((0, 3))
        while len(out) < count:
            m = 2 * (count - len(out)) + 16
            u = rng.uniform(0.0, 1.0, m)
            theta = rng.uniform(0.0, 2.0 * np.pi, m)
            rad = rmax * np.sqrt(u)
            keep = rng.uniform(0.0, 1.0, m) < np.sqrt(1.0 + 4.0 * rad**2) / wmax
            rad, theta = rad[keep], theta[keep]
            pts = np.stack([rad * np.cos(theta), rad * np.sin(theta), rad * rad], axis=1)
            out = np.concatenate([out, pts])
        return out[:count]

    return ImplicitManifold(
        func=lambda p: p[2] - p[0] * p[0] - p[1] * p[1],
        jac=lambda p: np.array([[-2.0 * p[0], -2.0 * p[1], 1.0]]),
        n=2, nu=3, name="paraboloid", params={"max_radius": rmax},
        sampler=sampler, known_reach=0.5, extent_radius=float(np.hypot(rmax, rmax * rmax)),
    )


def catenoid(waist=1.0, half_height=None):
    a = float(waist)
    h = float(half_height) if half_height is not None else 1.2 * a
    wmax = np.cosh(h / a) ** 2

    def sampler(rng, count):
        out = np.zeros((0, 3))
        while len(out) < count:
            m = 2 * (count - len(out)) + 16
            t = rng.uniform(-h, h, m)
            keep = rng.uniform(0.0, 1.0, m) < np.cosh(t / a) ** 2 / wmax
            t = t[keep]
            theta = rng.uniform(0.0, 2.0 * np.pi, len(t))
            rad = a * np.cosh(t / a)
            pts = np.stack([rad * np.cos(theta), rad * np.sin(theta), t], axis=1)
            out = np.concatenate([out, pts])
        return out[:count]

    return ImplicitManifold(
        func=lambda p: p[0] * p[0] + p[1] * p[1] - (a * np.cosh(p[2] / a)) ** 2,
        jac=lambda p: np.array(
            [[2.0 * p[0], 2.0 * p[1], -2.0 * a * np.cosh(p[2] / a) * np.sinh(p[2] / a)]]
        ),
        n=2, nu=3, name="catenoid", params={"waist": a, "half_height": h},
        sampler=sampler, extent_radius=float(np.hypot(a * np.cosh(h / a), h)),
    )


def plane(half_size=2.0):
    s = float(half_size)

    def sampler(rng, count):
        xy = rng.uniform(-s, s, size=(count, 2))
        return np.concatenate([xy, np.zeros((count, 1))], axis=1)

    return ImplicitManifold(
        func=lambda p: p[2],
        jac=lambda p: np.array([[0.0, 0.0, 1.0]]),
        n=2, nu=3, name="plane", params={"half_size": s},
        sampler=sampler, known_reach=None, extent_radius=float(np.sqrt(2.0) * s),
    )


def torus(major_radius=2.0, minor_radius=0.5):
    big, small = float(major_radius), float(minor_radius)

    def sampler(rng, count):
        out = np.zeros((0, 3))
        while len(out) < count:
            m = 2 * (count - len(out)) + 16
            v = rng.uniform(0.0, 2.0 * np.pi, m)
            keep = rng.uniform(0.0, 1.0, m) < (big + small * np.cos(v)) / (big + small)
            v = v[keep]
            u = rng.uniform(0.0, 2.0 * np.pi, len(v))
            rad = big + small * np.cos(v)
            pts = np.stack([rad * np.cos(u), rad * np.sin(u), small * np.sin(v)], axis=1)
            out = np.concatenate([out, pts])
        return out[:count]

    def func(p):
        rho = np.hypot(p[0], p[1])
        return (rho - big) ** 2 + p[2] * p[2] - small * small

    def jac(p):
        rho = np.hypot(p[0], p[1])
        if rho < 1e-12:
            return np.array([[0.0, 0.0, 2.0 * p[2]]])
        f = 2.0 * (rho - big) / rho
        return np.array([[f * p[0], f * p[1], 2.0 * p[2]]])

    return ImplicitManifold(
        func=func, jac=jac, n=2, nu=3, name="torus",
        params={"major_radius": big, "minor_radius": small},
        sampler=sampler, compact=True,
        known_reach=min(small, big - small), extent_radius=big + small,
    )


def circle(radius=1.0):
    r = float(radius)

    def sampler(rng, count):
        theta = rng.uniform(0.0, 2.0 * np.pi, count)
        return r * np.stack([np.cos(theta), np.sin(theta)], axis=1)

    return ImplicitManifold(
        func=lambda p: np.dot(p, p) - r * r,
        jac=lambda p: 2.0 * p.reshape(1, 2),
        n=1, nu=2, name="circle", params={"radius": r},
        sampler=sampler, compact=True, known_reach=r, extent_radius=r,
    )


CATALOG = {
    "sphere": sphere,
    "cylinder": cylinder,
    "paraboloid": paraboloid,
    "catenoid": catenoid,
    "plane": plane,
    "torus": torus,
    "circle": circle,
}


def make_manifold(name, params=None):
    """Instantiate a catalog manifold by name; unknown names raise ConfigError."""
    if name not in CATALOG:
        raise ConfigError(
            f"unknown manifold {name!r}; catalog: {sorted(CATALOG)}", field="manifold"
        )
    try:
        return CATALOG[name](**(params or {}))
    except TypeError as exc:
        raise ConfigError(f"bad parameters for manifold {name!r}: {exc}", field="manifold")
