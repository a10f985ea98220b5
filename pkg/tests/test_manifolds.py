import numpy as np
import pytest

from fatmesh.errors import ConfigError, SingularPointError
from fatmesh.manifolds import (
    ImplicitManifold,
    ParametricManifold,
    make_manifold,
    paraboloid,
    sphere,
)

from oracles import grid_closest_point


@pytest.fixture(scope="module")
def test_surfaces():
    return [make_manifold(n) for n in ("sphere", "cylinder", "paraboloid", "torus")]


class TestProjection:
    def test_sphere_radial(self):
        m = sphere()
        q = m.project(np.array([2.0, 0.0, 0.0]))
        assert np.allclose(q, [1.0, 0.0, 0.0], atol=1e-10)

    def test_point_already_on_surface(self):
        m = sphere()
        p = np.array([0.0, 0.6, 0.8])
        assert np.linalg.norm(m.project(p) - p) < 1e-12

    def test_paraboloid_below_apex(self):
        m = paraboloid()
        q = m.project(np.array([0.0, 0.0, -1.0]))
        assert np.allclose(q, [0.0, 0.0, 0.0], atol=1e-8)
        # grid-search oracle over the surface parameters
        grid = np.meshgrid(np.linspace(-2, 2, 401), np.linspace(-2, 2, 401), indexing="ij")

        def surf(g):
            x, y = g
            return np.stack([x, y, x * x + y * y], axis=-1)

        q_oracle, _ = grid_closest_point(grid, surf, [0.0, 0.0, -1.0])
        assert np.linalg.norm(q - q_oracle) < 2e-2

    def test_idempotence(self, test_surfaces):
        rng = np.random.default_rng(42)
        for m in test_surfaces:
            pts = m.sample(rng, 250)
            noise = 0.05 * m.known_reach * rng.normal(size=pts.shape)
            for p in pts + noise:
                q = m.project(p)
                q2 = m.project(q)
                assert np.linalg.norm(q2 - q) <= 1e-10
                assert np.linalg.norm(m.residual(q)) < 1e-10

    def test_orthogonality_at_solution(self, test_surfaces):
        rng = np.random.default_rng(3)
        for m in test_surfaces:
            pts = m.sample(rng, 50)
            for p in pts + 0.1 * m.known_reach * rng.normal(size=pts.shape):
                q = m.project(p)
                gap = p - q
                norm = np.linalg.norm(gap)
                if norm < 1e-12:
                    continue
                frame = m.tangent_frame(q)
                assert np.linalg.norm(frame @ gap) <= 1e-8 * norm

    def test_optimality_against_dense_sample(self):
        m = make_manifold("torus")
        rng = np.random.default_rng(17)
        dense = m.sample(rng, 20000)
        for p in m.sample(rng, 30) + 0.2 * rng.normal(size=(30, 3)):
            q = m.project(p)
            d_proj = np.linalg.norm(p - q)
            d_best = np.linalg.norm(dense - p, axis=1).min()
            assert d_proj <= d_best + 1e-6


class TestTangentFrame:
    def test_sphere_pole(self):
        m = sphere()
        f = m.tangent_frame(np.array([0.0, 0.0, 1.0]))
        assert f.shape == (2, 3)
        assert np.allclose(f @ f.T, np.eye(2), atol=1e-12)
        assert np.allclose(f[:, 2], 0.0, atol=1e-12)

    def test_cylinder_contains_axis_and_circumference(self):
        m = make_manifold("cylinder")
        f = m.tangent_frame(np.array([1.0, 0.0, 5.0]))
        # tangent plane at (1,0,z) is spanned by (0,1,0) and (0,0,1)
        for v in ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]):
            coeff = f @ np.array(v)
            recon = coeff @ f
            assert np.allclose(recon, v, atol=1e-10)

    def test_paraboloid_normal(self):
        m = paraboloid()
        f = m.tangent_frame(np.array([1.0, 0.0, 1.0]))
        normal = np.array([2.0, 0.0, -1.0]) / np.sqrt(5.0)
        assert np.allclose(f @ normal, 0.0, atol=1e-10)

    def test_orthonormality_random(self, test_surfaces):
        rng = np.random.default_rng(7)
        for m in test_surfaces:
            for x in m.sample(rng, 100):
                f = m.tangent_frame(x)
                assert np.allclose(f @ f.T, np.eye(m.n), atol=1e-10)
                assert np.max(np.abs(m.jacobian(x) @ f.T)) <= 1e-6

    def test_singular_point_raises(self):
        cone = ImplicitManifold(
            func=lambda p: p[0] ** 2 + p[1] ** 2 - p[2] ** 2,
            jac=lambda p: np.array([[2 * p[0], 2 * p[1], -2 * p[2]]]),
            n=2, nu=3, name="cone",
        )
        with pytest.raises(SingularPointError):
            cone.tangent_frame(np.zeros(3))


class TestParametric:
    def sphere_chart(self):
        def chart(u):
            th, ph = u
            return np.array(
                [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]
            )

        def chart_jac(u):
            th, ph = u
            return np.array(
                [
                    [np.cos(th) * np.cos(ph), -np.sin(th) * np.sin(ph)],
                    [np.cos(th) * np.sin(ph), np.sin(th) * np.cos(ph)],
                    [-np.sin(th), 0.0],
                ]
            )

        return ParametricManifold(
            chart, chart_jac, [0.3, 0.3], [np.pi - 0.3, 2 * np.pi - 0.3],
            n=2, nu=3, name="sphere-chart", known_reach=1.0,
        )

    def test_projection_is_radial(self):
        m = self.sphere_chart()
        p = np.array([0.0, 1.5, 0.3])
        q = m.project(p)
        assert np.linalg.norm(q) == pytest.approx(1.0, abs=1e-8)
        assert np.linalg.norm(np.cross(q, p)) < 1e-6

    def test_frame_orthonormal(self):
        m = self.sphere_chart()
        x = m.chart(np.array([1.0, 1.0]))
        f = m.tangent_frame(x)
        assert np.allclose(f @ f.T, np.eye(2), atol=1e-8)
        assert np.abs(f @ x).max() < 1e-6  # tangent plane of sphere is normal to x


class TestCatalog:
    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            make_manifold("klein")

    def test_bad_params(self):
        with pytest.raises(ConfigError):
            make_manifold("sphere", {"radii": 2})

    def test_samplers_land_on_surface(self):
        rng = np.random.default_rng(0)
        for name in ("sphere", "cylinder", "paraboloid", "catenoid", "plane", "torus", "circle"):
            m = make_manifold(name)
            pts = m.sample(rng, 200)
            for p in pts:
                assert np.linalg.norm(m.residual(p)) < 1e-9
