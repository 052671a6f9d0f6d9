import numpy as np
import pytest

from hardylab.circle import CircleFn, CircleGrid, DiskScan
from hardylab.disk import (DiskField, DiskQuadrature, finite_difference_gradient,
                           gradient_of_extension, gradient_on_quadrature, grad_norm2,
                           green_corpus, greens_identity_check, littlewood_paley_weighted,
                           u_function)
from hardylab.oscillation import garsia_norm
from hardylab.symbols import random_antianalytic
from hardylab.weights import WeightFn


def random_trig(grid, degree, rng):
    k = np.arange(-degree, degree + 1)
    c = rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size)
    return CircleFn.from_coefficients(grid, dict(zip(k.tolist(), c)))


class TestQuadrature:
    def test_area(self, quad):
        assert abs(quad.integrate(1.0) - 0.5) < 1e-10

    def test_log_kernel(self, quad):
        assert abs(quad.integrate(4 * quad.log_kernel) - 1) < 1e-8

    def test_radial_moments(self, quad):
        for k in range(0, 20, 3):
            assert quad.integrate(np.abs(quad.points) ** k) == pytest.approx(1 / (k + 2), rel=1e-12)

    def test_nodes_avoid_origin(self, quad):
        assert np.min(quad.radii) > 0 and np.max(quad.radii) < 1


class TestGreen:
    def test_corpus(self, quad):
        corpus = green_corpus()
        assert len(corpus) == 5
        for f in corpus:
            res, lhs, rhs = greens_identity_check(f, quad)
            assert res < 1e-6

    def test_abs2_lhs_exact(self, quad):
        f = next(f for f in green_corpus() if f.name == "abs2")
        _, lhs, rhs = greens_identity_check(f, quad)
        assert lhs == 1.0
        assert rhs == pytest.approx(1.0, abs=1e-12)

    def test_numerical_boundary_mean(self, quad):
        f = DiskField("re_z2_numeric", lambda z: np.real(z**2), lambda z: np.zeros(z.shape))
        assert greens_identity_check(f, quad)[0] < 1e-12


class TestGradients:
    def test_constant(self, grid):
        d, db = gradient_of_extension(CircleFn.constant(grid, 2.0), np.array([0.3, 0.5j]))
        assert np.all(d == 0) and np.all(db == 0)

    def test_conjugate_monomial(self, grid):
        d, db = gradient_of_extension(CircleFn.from_coefficients(grid, {-1: 1.0}), np.array([0.2, -0.7j]))
        assert np.allclose(db, 1) and np.allclose(d, 0)

    def test_finite_difference_single_point(self, grid, rng):
        phi = random_trig(grid, 16, rng)
        z = 0.4 + 0.1j
        d, db = gradient_of_extension(phi, z)
        fd, fdb = finite_difference_gradient(phi, z)
        assert abs(d - fd[0]) / abs(d) < 1e-6
        assert abs(db - fdb[0]) / abs(db) < 1e-6

    def test_quadrature_path_matches_pointwise(self, grid, rng):
        q = DiskQuadrature(16, 32)
        phi = random_trig(grid, 12, rng)
        d, db = gradient_on_quadrature(phi, q)
        d2, db2 = gradient_of_extension(phi, q.points)
        assert np.max(np.abs(d - d2)) < 1e-11
        assert np.max(np.abs(db - db2)) < 1e-11

    def test_real_function_euclidean_norm(self, grid):
        phi = CircleFn.from_zeta(grid, np.real)
        d, db = gradient_of_extension(phi, np.array([0.3]))
        assert grad_norm2(d, db)[0] == pytest.approx(1.0)


class TestLittlewoodPaley:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_monomials_unit_weight(self, quad, grid, n):
        r = littlewood_paley_weighted(CircleFn.from_coefficients(grid, {n: 1.0}), None, quad)
        assert r.boundary == pytest.approx(1.0)
        assert r.ratio == pytest.approx(0.5, rel=1e-8)

    def test_zero(self, grid, quad):
        r = littlewood_paley_weighted(CircleFn.constant(grid, 0.0), None, quad)
        assert (r.boundary, r.disk, r.ratio) == (0.0, 0.0, 1.0)

    def test_weighted_ratio_bounded(self, grid, quad, weights):
        rng = np.random.default_rng(8)
        for w in weights.values():
            f = random_trig(grid, 8, rng)
            r = littlewood_paley_weighted(f, w, quad)
            assert 0.25 < r.ratio < 1.0


class TestU:
    def test_bounds_when_garsia_at_most_one(self, grid):
        rng = np.random.default_rng(2)
        scan = DiskScan()
        for _ in range(3):
            phi = random_antianalytic(grid, 16, rng)
            phi = phi * (1 / garsia_norm(phi, scan).value)
            u = u_function(phi, scan.points)
            assert np.min(u) >= -1e-12 and np.max(u) <= 1 + 1e-12
