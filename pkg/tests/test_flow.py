import math

import numpy as np
import pytest

import geocount as gc
from geocount.errors import ConfigurationError, DomainError, InputError


def _traj_and_system(spec, T=3.0, step=1e-3, direction=0):
    x = gc.canonical_point(spec)
    theta = gc.tangent_frame(spec, x)[direction]
    traj = gc.integrate_geodesic(spec, x, theta, T, step)
    return traj, gc.propagate_jacobi(spec, traj)


class TestClosedForm:
    def test_initial_conditions_any_curvature(self):
        for c in (-2.0, -1.0, 0.0, 1.0, 3.5):
            xi, dxi, h, dh = gc.closed_form_jacobi(c, 0.0, 4)
            assert np.allclose(xi, np.eye(3))
            assert np.allclose(dxi, 0.0)
            assert np.allclose(h, 0.0)
            assert np.allclose(dh, np.eye(3))

    def test_round_sphere_quarter_period(self):
        xi, _, h, _ = gc.closed_form_jacobi(1.0, math.pi / 2, 3)
        assert np.max(np.abs(xi)) < 1e-15
        assert np.allclose(h, np.eye(2))

    def test_flat_solution_is_linear(self):
        xi, dxi, h, dh = gc.closed_form_jacobi(0.0, 3.0, 3)
        assert np.allclose(xi, np.eye(2))
        assert np.allclose(h, 3.0 * np.eye(2))

    def test_hyperbolic_oracle(self):
        # independent oracle: solve Y'' = Y with the stated initial data
        s = 1.7
        xi, dxi, h, dh = gc.closed_form_jacobi(-1.0, s, 2)
        assert abs(xi[0, 0] - math.cosh(s)) < 1e-15
        assert abs(h[0, 0] - math.sinh(s)) < 1e-15


class TestIntegrateGeodesic:
    def test_torus_wraps_straight_line(self):
        spec = gc.flat_torus(np.eye(2))
        traj = gc.integrate_geodesic(spec, np.zeros(2), np.array([1.0, 0.0]),
                                     2.5, 1e-2)
        assert np.allclose(traj.positions[-1], [0.5, 0.0], atol=1e-12)

    def test_great_circle_antipodal(self):
        spec = gc.constant_curvature(1.0, 2)
        x = gc.canonical_point(spec)
        theta = gc.tangent_frame(spec, x)[0]
        traj = gc.integrate_geodesic(spec, x, theta, math.pi, 1e-3)
        assert np.max(np.abs(traj.positions[-1] + x)) < 1e-8
        assert np.max(np.abs(traj.velocities[-1] + theta)) < 1e-8

    def test_flat_is_straight_line(self):
        spec = gc.constant_curvature(0.0, 3)
        x = np.array([0.5, -1.0, 2.0])
        theta = np.array([0.0, 1.0, 0.0])
        traj = gc.integrate_geodesic(spec, x, theta, 4.2, 1e-2)
        assert np.allclose(traj.positions[-1], x + 4.2 * theta, atol=1e-10)

    def test_warped_radial_ray(self):
        spec = gc.warped_product("one_plus_r2", 3)
        x = gc.canonical_point(spec)
        theta = np.array([1.0, 0.0, 0.0, 0.0])
        traj = gc.integrate_geodesic(spec, x, theta, 2.0, 1e-2)
        assert abs(traj.positions[-1][0] - 3.0) < 1e-12

    def test_identity_warp_is_flat_ray(self):
        # w(r) = r is Euclidean space in polar form: the radial ray is the
        # straight line x + T * theta in the r coordinate, curvature 0
        spec = gc.warped_product("identity", 2)
        x = gc.canonical_point(spec)
        theta = np.array([1.0, 0.0, 0.0])
        traj = gc.integrate_geodesic(spec, x, theta, 3.7, 1e-2)
        assert abs(traj.positions[-1][0] - (1.0 + 3.7)) < 1e-12
        js = gc.propagate_jacobi(spec, traj)
        exact = gc.closed_form_jacobi(0.0, 3.7, 2)
        assert abs(js.h[-1][0, 0] - exact[2][0, 0]) < 1e-10

    def test_unit_speed_conservation(self):
        from geocount.manifolds import metric_dot
        spec = gc.constant_curvature(-1.0, 3)
        x = gc.canonical_point(spec)
        theta = gc.tangent_frame(spec, x)[0]
        traj = gc.integrate_geodesic(spec, x, theta, 5.0, 1e-3)
        for j in (0, len(traj.sigma) // 2, -1):
            g = metric_dot(spec, traj.positions[j], traj.velocities[j],
                           traj.velocities[j])
            assert abs(g - 1.0) < 1e-8

    def test_input_validation(self):
        spec = gc.constant_curvature(1.0, 2)
        x = gc.canonical_point(spec)
        theta = gc.tangent_frame(spec, x)[0]
        with pytest.raises(InputError):
            gc.integrate_geodesic(spec, x, theta, -1.0, 1e-2)
        with pytest.raises(InputError):
            gc.integrate_geodesic(spec, x, theta, 1.0, 0.0)
        with pytest.raises(InputError):
            gc.integrate_geodesic(spec, x, theta, 1.0, 2.0)
        with pytest.raises(InputError):
            gc.integrate_geodesic(spec, x, 0.5 * theta, 1.0, 1e-2)

    def test_warped_rejects_fiber_directions(self):
        spec = gc.warped_product("one_plus_r2", 2)
        x = gc.canonical_point(spec)
        with pytest.raises(ConfigurationError):
            gc.integrate_geodesic(spec, x, gc.tangent_frame(spec, x)[1], 1.0, 1e-2)

    def test_warped_domain_violation(self):
        spec = gc.warped_product("identity", 2)
        x = gc.canonical_point(spec)
        inward = -gc.tangent_frame(spec, x)[0]
        with pytest.raises(DomainError):
            gc.integrate_geodesic(spec, x, inward, 1.5, 1e-2)


class TestPropagateJacobi:
    @pytest.mark.parametrize("c", [-1.0, 0.0, 1.0])
    def test_matches_closed_form(self, c):
        spec = gc.constant_curvature(c, 3)
        _, js = _traj_and_system(spec, T=3.0)
        worst = 0.0
        for j in range(0, len(js.sigma), 77):
            exact = gc.closed_form_jacobi(c, js.sigma[j], 3)
            approx = (js.xi[j], js.dxi[j], js.h[j], js.dh[j])
            worst = max(worst, max(float(np.max(np.abs(a - e)))
                                   for a, e in zip(approx, exact)))
        assert worst <= 1e-6

    @pytest.mark.parametrize("spec", [
        gc.constant_curvature(1.0, 3),
        gc.constant_curvature(-1.0, 2),
        gc.flat_torus(np.eye(2)),
        gc.warped_product("two_plus_cos", 3),
    ], ids=lambda s: s.label)
    def test_conservation_everywhere(self, spec):
        _, js = _traj_and_system(spec, T=4.0)
        assert gc.wronskian_drift(js) <= 1e-8
        assert gc.jacobi_residual(js) <= 1e-4 * js.step

    @pytest.mark.parametrize("spec", [
        gc.constant_curvature(1.0, 2),
        gc.constant_curvature(-1.0, 3),
        gc.flat_torus(np.eye(3)),
        gc.warped_product("one_plus_r2", 3),
    ], ids=lambda s: s.label)
    def test_det_h_positive_near_zero(self, spec):
        _, js = _traj_and_system(spec, T=1.0)
        for s in (0.002, 0.005, 0.01):
            _, _, h, _ = js.eval_at(s)
            assert np.linalg.det(h) > 0

    def test_substep_integration(self):
        spec = gc.constant_curvature(1.0, 2)
        x = gc.canonical_point(spec)
        theta = gc.tangent_frame(spec, x)[0]
        traj = gc.integrate_geodesic(spec, x, theta, 2.0, 1e-2)
        js = gc.propagate_jacobi(spec, traj, step=1e-3)
        exact = gc.closed_form_jacobi(1.0, 2.0, 2)
        assert abs(js.h[-1][0, 0] - exact[2][0, 0]) < 1e-9

    def test_dense_output_matches_grid(self):
        spec = gc.constant_curvature(1.0, 3)
        _, js = _traj_and_system(spec, T=2.0)
        j = 500
        xi, dxi, h, dh = js.eval_at(float(js.sigma[j]))
        assert np.allclose(xi, js.xi[j], atol=1e-12)
        assert np.allclose(dh, js.dh[j], atol=1e-12)
        # between nodes the dense output stays at the closed form
        s = float(js.sigma[j]) + 0.4 * js.step
        exact = gc.closed_form_jacobi(1.0, s, 3)
        approx = js.eval_at(s)
        assert max(float(np.max(np.abs(a - e)))
                   for a, e in zip(approx, exact)) < 1e-10


class TestSingularSet:
    def test_sign_change_zeros_round_sphere(self):
        # n=2: det H = sin(sigma) changes sign at pi, 2pi
        spec = gc.constant_curvature(1.0, 2)
        _, js = _traj_and_system(spec, T=7.0)
        expected_h = np.array([0.0, math.pi, 2 * math.pi])
        assert len(js.h_zeros) == 3
        assert np.max(np.abs(js.h_zeros - expected_h)) < 1e-9
        expected_xi = np.array([math.pi / 2, 3 * math.pi / 2])
        assert len(js.xi_zeros) == 2
        assert np.max(np.abs(js.xi_zeros - expected_xi)) < 1e-9

    def test_even_multiplicity_zeros(self):
        # n=3: det H = sin^2 touches zero at pi without a sign change
        spec = gc.constant_curvature(1.0, 3)
        _, js = _traj_and_system(spec, T=4.0)
        assert len(js.h_zeros) == 2
        assert abs(js.h_zeros[1] - math.pi) < 1e-5
        assert abs(js.xi_zeros[0] - math.pi / 2) < 1e-5

    def test_no_spurious_zeros_hyperbolic(self):
        spec = gc.constant_curvature(-1.0, 3)
        _, js = _traj_and_system(spec, T=10.0)
        assert np.allclose(js.h_zeros, [0.0])
        assert len(js.xi_zeros) == 0

    def test_warped_ode_zero_detection(self):
        # sin warp has curvature profile exactly 1; det Xi = cos^2 vanishes
        # at pi/2 on the propagated system
        spec = gc.warped_product("sin", 3)
        x = gc.canonical_point(spec)
        traj = gc.integrate_geodesic(spec, x, np.array([1.0, 0, 0, 0]), 2.0, 1e-3)
        js = gc.propagate_jacobi(spec, traj)
        assert len(js.xi_zeros) == 1
        assert abs(js.xi_zeros[0] - math.pi / 2) < 1e-5
        xi, _, _, _ = js.eval_at(float(js.xi_zeros[0]))
        assert abs(np.linalg.det(xi)) < 1e-10

    def test_singular_set_merges_families(self):
        spec = gc.constant_curvature(1.0, 2)
        _, js = _traj_and_system(spec, T=7.0)
        assert len(js.singular_set) == len(js.h_zeros) + len(js.xi_zeros)
        assert np.all(np.diff(js.singular_set) > 0)


class TestSerialization:
    def test_jacobi_csv_roundtrip(self, tmp_path):
        spec = gc.constant_curvature(1.0, 2)
        _, js = _traj_and_system(spec, T=1.0, step=1e-2)
        path = tmp_path / "jacobi.csv"
        gc.write_jacobi_csv(js, path, metadata={"tag": "test"})
        lines = path.read_text().splitlines()
        assert lines[0] == "# tag=test"
        header = lines[1].split(",")
        assert header[0] == "sigma" and header[-2:] == ["det_xi", "det_h"]
        row = lines[2].split(",")
        assert float(row[0]) == 0.0
        assert float(row[-1]) == 0.0  # det H(0)
        assert len(lines) == 2 + len(js.sigma)
