import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kontsevich_weights import (GaugeFixedConfig, angle, angle_gradient, edge_jacobian, edge_list,
                                indicator_boundary, sign_bulk, wedge_factor_boundary,
                                wedge_factor_bulk)
from kontsevich_weights.errors import CoincidentPoints, DimensionOverflow, EqualRealParts
from kontsevich_weights.geometry import TWO_PI, batch_edge_jacobian

coord = st.floats(-3, 3, allow_nan=False)
height = st.floats(0.05, 3, allow_nan=False)


def bulk_points():
    return st.builds(complex, coord, height)


class TestAngle:
    def test_vertical(self):
        assert angle(1j, 2j) == pytest.approx(0.0, abs=1e-15)

    def test_to_boundary(self):
        assert angle(1j, 0) == pytest.approx(math.pi)

    def test_boundary_pair(self):
        assert angle(0, 1) == TWO_PI
        assert angle(1, 0) == 0.0

    def test_coincident(self):
        with pytest.raises(CoincidentPoints):
            angle(1j, 1j)

    def test_boundary_equal_real(self):
        with pytest.raises(EqualRealParts):
            angle(0, 2j)

    @given(bulk_points(), bulk_points())
    def test_range_and_phase(self, u, v):
        if abs(u - v) < 1e-6:
            return
        a = angle(u, v)
        assert 0.0 <= a < TWO_PI
        expected = (v - u) * abs(v - u.conjugate()) / ((v - u.conjugate()) * abs(v - u))
        assert abs(cmath.exp(1j * a) - expected) < 1e-12

    def test_vectorized(self):
        u = np.array([1j, 1 + 1j])
        v = np.array([2j, 1j])
        out = angle(u, v)
        assert out.shape == (2,)


def central_difference(u, v, h=1e-5):
    out = []
    for which, step in ((0, h), (0, 1j * h), (1, h), (1, 1j * h)):
        if which == 0:
            out.append((angle(u + step, v) - angle(u - step, v)) / (2 * h))
        else:
            out.append((angle(u, v + step) - angle(u, v - step)) / (2 * h))
    return np.array(out)


class TestGradient:
    def test_fixed_point(self):
        u, v = 1 + 2j, -1 + 1j
        assert np.allclose(angle_gradient(u, v), central_difference(u, v), atol=1e-7)

    def test_random_pairs(self):
        rng = np.random.default_rng(0)
        u = rng.uniform(-2, 2, 10_000) + 1j * rng.uniform(0.2, 2, 10_000)
        v = rng.uniform(-2, 2, 10_000) + 1j * rng.uniform(0.2, 2, 10_000)
        keep = np.abs(u - v) > 0.1
        u, v = u[keep], v[keep]
        h = 1e-6
        grad = angle_gradient(u, v)
        # differences of the unwrapped phase avoid the branch cut
        def phase(a, b):
            return np.angle((b - a) / (b - np.conj(a)))
        fd = np.stack([
            np.angle(np.exp(1j * (phase(u + h, v) - phase(u - h, v)))) / (2 * h),
            np.angle(np.exp(1j * (phase(u + 1j * h, v) - phase(u - 1j * h, v)))) / (2 * h),
            np.angle(np.exp(1j * (phase(u, v + h) - phase(u, v - h)))) / (2 * h),
            np.angle(np.exp(1j * (phase(u, v + 1j * h) - phase(u, v - 1j * h)))) / (2 * h),
        ], axis=-1)
        rel = np.abs(grad - fd) / np.maximum(np.abs(fd), 1.0)
        assert rel.max() < 1e-6

    def test_boundary_source(self):
        assert np.all(angle_gradient(0.0, 1 + 1j) == 0)

    def test_mirror(self):
        # v -> -conj(v) flips the angle and Re v together, so the Re v partial
        # is preserved and the Im v partial changes sign
        g1 = angle_gradient(1j, 1 + 1j)
        g2 = angle_gradient(1j, -1 + 1j)
        assert g1[2] == pytest.approx(g2[2])
        assert g1[3] == pytest.approx(-g2[3])
        assert np.allclose(g2, central_difference(1j, -1 + 1j), atol=1e-7)


class TestSigns:
    def test_sign_bulk(self):
        assert sign_bulk(1 + 1j, 1j) == 1
        assert sign_bulk(1j, 1 + 1j) == -1

    @given(bulk_points(), bulk_points())
    def test_sign_antisymmetric(self, x, y):
        if x.real == y.real:
            return
        assert sign_bulk(x, y) == -sign_bulk(y, x)

    def test_equal_real(self):
        with pytest.raises(EqualRealParts):
            sign_bulk(1j, 2j)

    def test_indicator(self):
        assert indicator_boundary(1 + 1j, 0) == 1
        assert indicator_boundary(-1 + 1j, 0) == 0
        for x in (1 + 1j, -1 + 1j, 0.3 + 2j):
            assert sign_bulk(x, 0) == 2 * indicator_boundary(x, 0) - 1
        with pytest.raises(EqualRealParts):
            indicator_boundary(2j, 0)


class TestWedgeFactors:
    def test_boundary_limit(self):
        # x -> p = 0, y -> q = 1 from inside
        eps = 1e-9
        assert wedge_factor_bulk(eps * 1j, 1 + eps * 1j) == pytest.approx(0.5, abs=1e-6)

    @given(bulk_points(), bulk_points())
    def test_antisymmetric(self, x, y):
        if abs(x - y) < 1e-6 or x.real == y.real:
            return
        assert wedge_factor_bulk(x, y) == pytest.approx(-wedge_factor_bulk(y, x), abs=1e-12)

    def test_matches_mc(self):
        # integrate dphi(z,x) dphi(z,y) / (2 pi)^2 over z in the half-plane
        x, y = 1 + 1j, -1 + 1j
        rng = np.random.default_rng(3)
        n = 400_000
        r = rng.random(n)
        rad = r / (1 - r)
        th = np.pi * rng.random(n)
        z = rad * np.exp(1j * th)
        dens = 1.0 / (np.pi * rad * (1 + rad) ** 2)
        ga = angle_gradient(z, x, check=False)
        gb = angle_gradient(z, y, check=False)
        det = ga[:, 0] * gb[:, 1] - ga[:, 1] * gb[:, 0]
        vals = det / TWO_PI**2 / dens
        est = vals.mean()
        se = vals.std() / math.sqrt(n)
        assert abs(est - wedge_factor_bulk(x, y)) < max(1e-3, 4 * se)

    def test_boundary_formula(self):
        for theta in np.linspace(0.1, 3.0, 13):
            if abs(theta - np.pi / 2) < 1e-12:
                continue
            x = np.exp(1j * theta)
            assert wedge_factor_boundary(x, 0.0) == pytest.approx((2 * theta - np.pi) / (2 * np.pi))
            assert wedge_factor_boundary(x, 0.0) == pytest.approx((angle(x, 0) - np.pi) / TWO_PI)

    def test_symmetric_point(self):
        assert wedge_factor_boundary(np.exp(1j * (np.pi / 2 + 1e-9)), 0.0) == pytest.approx(0.0, abs=1e-8)

    def test_boundary_is_bulk_limit(self):
        x = 0.4 + 0.9j
        assert wedge_factor_boundary(x, 0.0) == pytest.approx(wedge_factor_bulk(x, 1e-10j), abs=1e-8)


class TestConfigurations:
    @pytest.mark.parametrize("family,dim", [("gamma", 2), ("upsilon", 1), ("lambda", 0)])
    def test_edge_counts(self, family, dim):
        for n in range(5):
            assert len(edge_list(family, n)) == 2 * n + dim

    def test_gamma_edge_order(self):
        assert edge_list("gamma", 2) == [("x", "y"), ("y", "x"), ("z1", "x"), ("z1", "y"),
                                         ("z2", "x"), ("z2", "y")]

    def test_dimension_check(self):
        with pytest.raises(DimensionOverflow):
            GaugeFixedConfig("gamma", 1, (0.5, 1.0, 0.2))

    def test_coincident(self):
        with pytest.raises(CoincidentPoints):
            GaugeFixedConfig("gamma", 0, (0.0, 1.0))

    def test_theta_range(self):
        with pytest.raises(ValueError):
            GaugeFixedConfig("upsilon", 0, (4.0,))

    def test_points(self):
        cfg = GaugeFixedConfig("lambda", 1, (0.5, 0.5))
        assert cfg.points() == {"p": 0j, "q": 1 + 0j, "z1": 0.5 + 0.5j}

    def test_jacobian_shape_and_fd(self):
        cfg = GaugeFixedConfig("gamma", 1, (0.7, 0.4, -0.3, 1.2))
        jac = edge_jacobian(cfg)
        assert jac.shape == (4, 4)
        h = 1e-6
        base = np.asarray(cfg.coords)
        from kontsevich_weights.geometry import vertex_positions

        def angles(c):
            pos = vertex_positions("gamma", 1, c)
            return np.array([np.angle((pos[t] - pos[s]) / (pos[t] - np.conj(pos[s])))
                             for s, t in edge_list("gamma", 1)])
        for k in range(4):
            e = np.zeros(4)
            e[k] = h
            fd = np.angle(np.exp(1j * (angles(base + e) - angles(base - e)))) / (2 * h)
            assert np.allclose(jac[:, k], fd, atol=1e-6)

    def test_batch(self):
        coords = np.array([[0.3], [2.0]])
        jac = batch_edge_jacobian("upsilon", 0, coords)
        # d phi(x, 0) / d theta = 2 for x = exp(i theta)
        assert np.allclose(jac[:, 0, 0], 2.0)
