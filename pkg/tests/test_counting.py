import math

import numpy as np
import pytest

import geocount as gc
from geocount.errors import CatalogError, InputError


def _sphere_setup(n=2, order=64):
    spec = gc.constant_curvature(1.0, n)
    x = gc.canonical_point(spec)
    quad = gc.unit_sphere_quadrature(n, "product_gauss", order)
    return spec, x, quad


def _torus_setup(n=2, order=64):
    spec = gc.flat_torus(np.eye(n))
    x = gc.canonical_point(spec)
    quad = gc.unit_sphere_quadrature(n, "product_gauss", order)
    return spec, x, quad


class TestIntegrand:
    def test_round_sphere_unit_value(self):
        spec, x, _ = _sphere_setup(2)
        theta = gc.tangent_frame(spec, x)[0]
        traj = gc.integrate_geodesic(spec, x, theta, 2.0, 1e-3)
        js = gc.propagate_jacobi(spec, traj)
        # linear interpolation between samples: O(step^2) at the maximum
        assert abs(gc.berger_bott_integrand(js, math.pi / 2) - 1.0) < 1e-6

    def test_flat_power_value(self):
        spec = gc.constant_curvature(0.0, 3)
        x = gc.canonical_point(spec)
        theta = gc.tangent_frame(spec, x)[0]
        traj = gc.integrate_geodesic(spec, x, theta, 3.0, 1e-3)
        js = gc.propagate_jacobi(spec, traj)
        assert abs(gc.berger_bott_integrand(js, 2.0) - 4.0) < 1e-8

    def test_vanishes_at_zero(self):
        spec = gc.warped_product("two_plus_cos", 3)
        x = gc.canonical_point(spec)
        traj = gc.integrate_geodesic(spec, x, np.array([1.0, 0, 0, 0]), 1.0, 1e-3)
        js = gc.propagate_jacobi(spec, traj)
        assert gc.berger_bott_integrand(js, 0.0) == 0.0


class TestTotals:
    def test_round_sphere_vs_antiderivative_oracle(self):
        # oracle: 2*pi * integral_0^pi sin = 2*pi*(1 - cos(pi)) = 4*pi
        spec, x, quad = _sphere_setup()
        total = gc.berger_bott_total(spec, x, math.pi, quad, 1e-3)
        assert abs(total - 4 * math.pi) <= 1e-4

    def test_torus_area_identity(self):
        spec, x, quad = _torus_setup()
        total = gc.berger_bott_total(spec, x, 5.0, quad, 1e-3)
        assert abs(total - math.pi * 25.0) <= 1e-3 * math.pi * 25.0

    def test_zero_cutoff(self):
        spec, x, quad = _torus_setup()
        assert gc.berger_bott_total(spec, x, 0.0, quad, 1e-3) == 0.0

    def test_curve_monotone_with_zero_start(self):
        spec, x, quad = _sphere_setup()
        T = np.concatenate([[0.0], np.linspace(0.5, 8.0, 16)])
        curve = gc.berger_bott_curve(spec, x, T, quad, 1e-2)
        assert curve.values[0] == 0.0
        assert np.all(np.diff(curve.values) >= 0)

    def test_curve_matches_pointwise_totals(self):
        spec, x, quad = _torus_setup()
        curve = gc.berger_bott_curve(spec, x, [1.0, 2.0, 4.0], quad, 1e-3)
        single = gc.berger_bott_total(spec, x, 2.0, quad, 1e-3)
        assert abs(curve.values[1] - single) < 1e-9

    def test_dimension_mismatch(self):
        spec, x, _ = _torus_setup(2)
        quad3 = gc.unit_sphere_quadrature(3, "product_gauss", 8)
        with pytest.raises(gc.ConfigurationError):
            gc.berger_bott_total(spec, x, 1.0, quad3, 1e-2)

    def test_warped_products_unsupported(self):
        spec = gc.warped_product("one_plus_r2", 3)
        quad = gc.unit_sphere_quadrature(3, "product_gauss", 8)
        with pytest.raises(gc.ConfigurationError):
            gc.berger_bott_total(spec, gc.canonical_point(spec), 1.0, quad, 1e-2)


class TestCountingCurveInvariants:
    def test_rejects_decreasing_values(self):
        with pytest.raises(InputError):
            gc.CountingCurve(np.array([1.0, 2.0]), np.array([2.0, 1.0]), "m", "oracle")

    def test_rejects_nonzero_at_origin(self):
        with pytest.raises(InputError):
            gc.CountingCurve(np.array([0.0, 1.0]), np.array([0.5, 1.0]), "m", "oracle")

    def test_rejects_unsorted_T(self):
        with pytest.raises(InputError):
            gc.CountingCurve(np.array([2.0, 1.0]), np.array([1.0, 2.0]), "m", "oracle")


class TestSphereArcOracle:
    def test_frozen_examples(self):
        assert gc.count_sphere_arcs(math.pi / 2, 2 * math.pi) == 2
        assert gc.count_sphere_arcs(1.0, 0.5) == 0
        assert gc.count_sphere_arcs(1.0, 100.0) == 32

    def test_matches_enumeration(self):
        # independent oracle: enumerate arc lengths d+2k*pi and 2k*pi-d
        rng = np.random.default_rng(3)
        for _ in range(50):
            d = float(rng.uniform(0.05, math.pi - 0.05))
            T = float(rng.uniform(0.1, 60.0))
            expect = sum(1 for k in range(100) if 2 * k * math.pi + d <= T)
            expect += sum(1 for k in range(1, 100) if 2 * k * math.pi - d <= T)
            assert gc.count_sphere_arcs(d, T) == expect

    def test_input_validation(self):
        with pytest.raises(InputError):
            gc.count_sphere_arcs(0.0, 1.0)
        with pytest.raises(InputError):
            gc.count_sphere_arcs(math.pi, 1.0)


class TestTorusLatticeOracle:
    def test_frozen_examples(self):
        eye = np.eye(2)
        zero = np.zeros(2)
        assert gc.count_torus_lattice(eye, zero, zero, 1.0) == 5
        assert gc.count_torus_lattice(eye, zero, np.array([0.5, 0.0]), 0.4) == 0
        assert gc.count_torus_lattice(eye, zero, zero, 2.0) == 13

    def test_skew_basis_vs_brute_force(self):
        basis = np.array([[1.0, 0.3], [-0.2, 0.8]])
        x = np.array([0.1, 0.05])
        y = np.array([0.4, -0.3])
        diff = y - x
        brute = 0
        for i in range(-20, 21):
            for j in range(-20, 21):
                if np.linalg.norm(diff + i * basis[0] + j * basis[1]) <= 3.0:
                    brute += 1
        assert gc.count_torus_lattice(basis, x, y, 3.0) == brute

    def test_monte_carlo_matches_disk_area(self):
        # each target contributes the lattice points of a disk: the mean
        # count times the cell volume is Vol(B_T)
        val = gc.torus_count_integral_oracle(np.eye(2), 5.0, 100000, seed=0)
        assert abs(val - math.pi * 25.0) <= 0.01 * math.pi * 25.0
        val1 = gc.torus_count_integral_oracle(np.eye(2), 1.0, 100000, seed=0)
        assert abs(val1 - math.pi) <= 0.02 * math.pi

    def test_monte_carlo_deterministic(self):
        a = gc.torus_count_integral_oracle(np.eye(2), 2.0, 5000, seed=11)
        b = gc.torus_count_integral_oracle(np.eye(2), 2.0, 5000, seed=11)
        assert a == b

    def test_zero_cutoff_limit(self):
        assert gc.torus_count_integral_oracle(np.eye(2), 0.0, 100, seed=0) == 0.0

    def test_oracle_equivalence_with_integral(self):
        spec, x, quad = _torus_setup()
        for T in (1.0, 2.0, 5.0, 10.0):
            bb = gc.berger_bott_total(spec, x, T, quad, 1e-3)
            orc = gc.torus_count_integral_oracle(np.eye(2), T, 100000, seed=0)
            assert abs(bb - orc) / max(1.0, orc) <= 0.02


class TestClassifyGrowth:
    def test_exact_power_law(self):
        T = np.arange(1.0, 31.0)
        report = gc.classify_growth(gc.CountingCurve(T, math.pi * T**2, "m", "oracle"))
        assert report.kind == "polynomial" and report.degree == 2

    def test_hyperbolic_curve_is_exponential(self):
        # oracle: integral of 2*pi*sinh from 0 to T
        T = np.arange(1.0, 31.0)
        vals = 2 * math.pi * (np.cosh(T) - 1.0)
        report = gc.classify_growth(gc.CountingCurve(T, vals, "m", "oracle"))
        assert report.kind == "exponential"
        assert abs(report.rate - 1.0) < 0.05

    def test_round_sphere_linear(self):
        spec, x, quad = _sphere_setup()
        curve = gc.berger_bott_curve(spec, x, np.arange(1.0, 31.0), quad, 1e-2)
        report = gc.classify_growth(curve)
        assert report.kind == "polynomial" and report.degree == 1

    def test_minimum_sample_count_classifies(self):
        T = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 9.0, 12.0])
        report = gc.classify_growth(gc.CountingCurve(T, T**2, "m", "oracle"))
        assert report.kind == "polynomial" and report.degree == 2

    @pytest.mark.parametrize("scale", [0.1, 10.0])
    def test_scaling_invariance(self, scale):
        T = np.arange(1.0, 31.0)
        base = gc.classify_growth(gc.CountingCurve(T, T**3, "m", "oracle"))
        scaled = gc.classify_growth(
            gc.CountingCurve(T, scale * T**3, "m", "oracle"))
        assert (base.kind, base.degree) == (scaled.kind, scaled.degree)

    def test_preconditions(self):
        with pytest.raises(InputError):
            gc.classify_growth(gc.CountingCurve(
                np.arange(1.0, 7.0), np.arange(1.0, 7.0), "m", "oracle"))
        with pytest.raises(InputError):
            gc.classify_growth(gc.CountingCurve(
                np.linspace(1.0, 5.0, 12), np.linspace(1.0, 5.0, 12), "m", "oracle"))


class TestBettiSums:
    def test_catalog_values(self):
        assert gc.loop_space_betti_partial_sums("sphere", 2, 5) == 5
        assert gc.loop_space_betti_partial_sums("sphere", 3, 5) == 3
        for n in (2, 3, 4, 7):
            assert gc.loop_space_betti_partial_sums("sphere", n, 1) == 1

    def test_matches_degree_enumeration(self):
        for n in (2, 3, 5):
            for k in range(1, 40):
                expect = sum(1 for j in range(k) if j % (n - 1) == 0)
                assert gc.loop_space_betti_partial_sums("sphere", n, k) == expect

    def test_out_of_catalog(self):
        with pytest.raises(CatalogError):
            gc.loop_space_betti_partial_sums("projective_plane", 2, 3)
        with pytest.raises(InputError):
            gc.loop_space_betti_partial_sums("sphere", 1, 3)


class TestGromov:
    def test_generous_constant_holds(self):
        chk = gc.check_gromov_inequality(2, 20, 10.0, quad_order=32, step=2e-2)
        assert chk.holds and chk.first_failure_k is None

    def test_tiny_constant_fails(self):
        chk = gc.check_gromov_inequality(2, 20, 0.1, quad_order=32, step=1e-3)
        assert not chk.holds
        assert chk.first_failure_k is not None

    def test_single_step_with_huge_constant(self):
        chk = gc.check_gromov_inequality(2, 1, 50.0, quad_order=16, step=2e-2)
        assert chk.holds

    def test_search_reports_minimal(self):
        res = gc.search_gromov_constant(2, 20, (0.5, 5.0), quad_order=32, step=2e-2)
        assert res["minimal_passing_C"] == 5.0
        assert [chk.holds for chk in res["checks"]] == [False, True]
