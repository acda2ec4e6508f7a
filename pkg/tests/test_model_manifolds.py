"""Tests for the model manifold families: chart tensors against
finite-difference oracles, curvature symmetries and signs, and geodesic
sphere closed forms."""

import math

import numpy as np
import pytest

from curvatura.errors import ChartSingularityError
from curvatura.model_manifolds import (
    WarpingProfile,
    christoffel_at,
    constant_curvature,
    euclidean,
    linear_profile,
    metric_at,
    metric_diag,
    poly3_profile,
    riemann_at,
    sinh_profile,
    sphere_data,
    sphere_total_mean_curvature,
    unit_sphere_volume,
    warped,
)


def fd_christoffel(M, p, h):
    """Finite-difference Levi-Civita symbols from metric_at (test oracle)."""
    n = M.dim
    p = np.asarray(p, dtype=float)
    dg = np.zeros((n, n, n))  # dg[k] = d_k g
    for k in range(n):
        q = p.copy(); q[k] += h
        gp = metric_at(M, q)
        q = p.copy(); q[k] -= h
        gm = metric_at(M, q)
        dg[k] = (gp - gm) / (2 * h)
    ginv = np.linalg.inv(metric_at(M, p))
    G = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                G[k, i, j] = 0.5 * sum(
                    ginv[k, l] * (dg[i][j, l] + dg[j][i, l] - dg[l][i, j])
                    for l in range(n))
    return G


def orthonormal_frame(M, p):
    return np.diag(1.0 / np.sqrt(metric_diag(M, p)))


SAMPLE_POINTS = {
    3: [np.array([0.8, 0.9, 0.3]), np.array([1.4, 2.2, 5.1]), np.array([0.5, 1.5708, 1.0])],
    4: [np.array([0.8, 0.9, 1.2, 0.3]), np.array([1.2, 2.0, 0.7, 4.0])],
}


class TestMetric:
    def test_euclidean_identity(self):
        M = euclidean(3)
        np.testing.assert_array_equal(metric_at(M, [0.3, -1.0, 2.0]), np.eye(3))

    def test_linear_profile_is_flat_polar(self):
        M = warped(linear_profile(), 3)
        p = np.array([1.3, 0.7, 2.0])
        expected = np.diag([1.0, 1.3 ** 2, (1.3 * math.sin(0.7)) ** 2])
        np.testing.assert_allclose(metric_at(M, p), expected, rtol=1e-14)

    def test_sinh_polar_n2(self):
        M = warped(sinh_profile(), 2)
        np.testing.assert_allclose(metric_at(M, [1.0, 0.4]),
                                   np.diag([1.0, math.sinh(1.0) ** 2]), rtol=1e-14)

    def test_singular_at_origin(self):
        M = constant_curvature(-1.0, 3)
        with pytest.raises(ChartSingularityError):
            metric_at(M, [0.0, 1.0, 1.0])
        with pytest.raises(ChartSingularityError):
            metric_at(M, [1.0, 0.0, 1.0])


class TestChristoffel:
    def test_euclidean_zero(self):
        M = euclidean(4)
        assert np.max(np.abs(christoffel_at(M, [1.0, 0.2, -0.3, 0.9]))) == 0.0

    def test_warped_radial_angular_symbol(self):
        # Gamma^r_{theta theta} = -f f' in dimension 2
        prof = poly3_profile()
        M = warped(prof, 2)
        r = 1.1
        G = christoffel_at(M, [r, 0.7])
        assert G[0, 1, 1] == pytest.approx(-prof.f(r) * prof.df(r), rel=1e-13)

    @pytest.mark.parametrize("make", [lambda: constant_curvature(-1.0, 3),
                                      lambda: warped(poly3_profile(), 3),
                                      lambda: warped(sinh_profile(), 4)])
    def test_matches_fd_oracle(self, make):
        M = make()
        for p in SAMPLE_POINTS[M.dim]:
            G = christoffel_at(M, p)
            G_fd = fd_christoffel(M, p, 1e-5)
            np.testing.assert_allclose(G, G_fd, atol=5e-9)

    def test_fd_convergence_order(self):
        # analytic symbols vs O(h^2) differences: observed order >= 1.9
        M = warped(poly3_profile(), 3)
        p = np.array([0.9, 1.1, 0.4])
        G = christoffel_at(M, p)
        errs = [np.max(np.abs(G - fd_christoffel(M, p, h)))
                for h in (1e-2, 5e-3, 2.5e-3)]
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 1.9

    def test_constant_equals_sinh_profile(self):
        Mc = constant_curvature(-1.0, 3)
        Mw = warped(sinh_profile(), 3)
        for p in SAMPLE_POINTS[3]:
            np.testing.assert_allclose(christoffel_at(Mc, p), christoffel_at(Mw, p),
                                       atol=1e-10)


class TestRiemann:
    def test_constant_sectional(self):
        for a in (-0.5, -1.0):
            M = constant_curvature(a, 3)
            p = SAMPLE_POINTS[3][0]
            rd = riemann_at(M, p, orthonormal_frame(M, p))
            off = ~np.eye(3, dtype=bool)
            np.testing.assert_allclose(rd.K[off], a, rtol=1e-14)
            assert rd.ricci_n == pytest.approx(2 * a, rel=1e-14)

    def test_euclidean_zero(self):
        M = euclidean(3)
        rd = riemann_at(M, np.array([1.0, 0.3, 0.2]), np.eye(3))
        assert np.max(np.abs(rd.R)) == 0.0

    def test_warped_sinh_is_hyperbolic(self):
        M = warped(sinh_profile(), 3)
        for p in SAMPLE_POINTS[3]:
            rd = riemann_at(M, p, orthonormal_frame(M, p))
            off = ~np.eye(3, dtype=bool)
            np.testing.assert_allclose(rd.K[off], -1.0, atol=1e-12)

    def test_warped_adapted_curvatures(self):
        prof = poly3_profile()
        M = warped(prof, 4)
        p = SAMPLE_POINTS[4][0]
        rd = riemann_at(M, p, orthonormal_frame(M, p))
        r = p[0]
        k_rad = -prof.d2f(r) / prof.f(r)
        k_tan = (1 - prof.df(r) ** 2) / prof.f(r) ** 2
        # frame vector 0 is radial in the adapted (diagonal) frame
        for i in range(1, 4):
            assert rd.K[0, i] == pytest.approx(k_rad, rel=1e-12)
            for j in range(1, 4):
                if i != j:
                    assert rd.K[i, j] == pytest.approx(k_tan, rel=1e-12)

    @pytest.mark.parametrize("make", [lambda: constant_curvature(-0.5, 4),
                                      lambda: warped(poly3_profile(), 4)])
    def test_symmetries_and_sign(self, make):
        M = make()
        rng = np.random.default_rng(4)
        for p in SAMPLE_POINTS[4]:
            F = orthonormal_frame(M, p)
            Q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
            F = F @ Q  # random g-orthonormal frame
            rd = riemann_at(M, p, F)
            R = rd.R
            assert np.max(np.abs(R + np.swapaxes(R, 0, 1))) < 1e-10
            assert np.max(np.abs(R + np.swapaxes(R, 2, 3))) < 1e-10
            assert np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1)))) < 1e-10
            assert np.max(rd.K) <= 1e-12  # nonpositive curvature
            np.testing.assert_allclose(rd.K, np.einsum("ijij->ij", R), atol=1e-14)

    def test_rejects_non_orthonormal_frame(self):
        M = constant_curvature(-1.0, 3)
        p = SAMPLE_POINTS[3][0]
        with pytest.raises(ValueError):
            riemann_at(M, p, 2.0 * orthonormal_frame(M, p))


class TestSphereClosedForms:
    def test_unit_sphere_volume(self):
        assert unit_sphere_volume(2) == pytest.approx(2 * math.pi, rel=1e-15)
        assert unit_sphere_volume(3) == pytest.approx(4 * math.pi, rel=1e-15)
        assert unit_sphere_volume(4) == pytest.approx(2 * math.pi ** 2, rel=1e-15)

    def test_sphere_data_euclidean(self):
        kappa, area_factor = sphere_data(euclidean(3), 2.0)
        assert kappa == pytest.approx(0.5)
        assert area_factor == pytest.approx(4.0)

    def test_sphere_data_hyperbolic(self):
        kappa, A = sphere_data(constant_curvature(-1.0, 3), 1.0)
        assert kappa == pytest.approx(1 / math.tanh(1.0), rel=1e-14)
        assert A == pytest.approx(math.sinh(1.0) ** 2, rel=1e-14)

    def test_sphere_data_scaled_curvature(self):
        a = -0.5
        s = math.sqrt(-a)
        kappa, _ = sphere_data(constant_curvature(a, 3), 1.3)
        assert kappa == pytest.approx(s / math.tanh(s * 1.3), rel=1e-13)

    def test_warped_sinh_matches_constant(self):
        Mw, Mc = warped(sinh_profile(), 3), constant_curvature(-1.0, 3)
        for rho in (0.3, 1.0, 2.5):
            np.testing.assert_allclose(sphere_data(Mw, rho), sphere_data(Mc, rho),
                                       rtol=1e-12)
            for r in range(3):
                assert sphere_total_mean_curvature(Mw, r, rho) == pytest.approx(
                    sphere_total_mean_curvature(Mc, r, rho), rel=1e-10)

    def test_total_mean_curvature_euclidean(self):
        M = euclidean(3)
        assert sphere_total_mean_curvature(M, 1, 1.0) == pytest.approx(8 * math.pi, rel=1e-14)
        for rho in (0.5, 1.0, 3.0):
            assert sphere_total_mean_curvature(M, 2, rho) == pytest.approx(
                4 * math.pi, rel=1e-14)

    def test_hyperbolic_r2_quadrature_oracle(self):
        # 1-d quadrature of coth^2 * (4 pi sinh^2) vs the closed form
        M = constant_curvature(-1.0, 3)
        rho = 1.0
        x, w = np.polynomial.legendre.leggauss(60)
        assert sphere_total_mean_curvature(M, 2, rho) == pytest.approx(
            4 * math.pi * math.cosh(rho) ** 2, rel=1e-13)

    def test_small_radius_slopes(self):
        # closed-form log-log slope over a small-radius grid is n - 1 - r
        grid = np.geomspace(0.01, 0.08, 6)
        for M in (euclidean(3), constant_curvature(-1.0, 3), warped(poly3_profile(), 3)):
            for r in range(3):
                vals = [sphere_total_mean_curvature(M, r, rho) for rho in grid]
                slope = np.polyfit(np.log(grid), np.log(vals), 1)[0]
                assert abs(slope - (2 - r)) <= 0.02
            gauss = sphere_total_mean_curvature(M, 2, 0.01)
            assert abs(gauss - 4 * math.pi) <= 0.01 * 4 * math.pi

    def test_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            sphere_data(euclidean(3), 0.0)
        with pytest.raises(ValueError):
            sphere_total_mean_curvature(euclidean(3), 3, 1.0)


class TestProfiles:
    def test_inconsistent_derivatives_rejected(self):
        with pytest.raises(ValueError):
            WarpingProfile("broken", math.sinh, math.sinh, math.sinh)

    def test_positive_curvature_rejected(self):
        good = WarpingProfile("sin", math.sin, math.cos, lambda r: -math.sin(r))
        with pytest.raises(ValueError):
            warped(good, 3)

    def test_bad_origin_behavior_rejected(self):
        prof = WarpingProfile("shifted", lambda r: r + 1.0, lambda r: 1.0, lambda r: 0.0)
        with pytest.raises(ValueError):
            warped(prof, 3)

    def test_constant_requires_nonpositive(self):
        with pytest.raises(ValueError):
            constant_curvature(0.5, 3)

    def test_dim_bounds(self):
        with pytest.raises(ValueError):
            euclidean(7)
        with pytest.raises(ValueError):
            euclidean(1)
