import math

import numpy as np
import pytest

from conecbf.errors import DomainError, GimbalError
from conecbf.sampling import random_input, random_params, random_state
from conecbf.vehicles import (
    BicycleInput,
    BicycleParams,
    BicycleState,
    PointMassState,
    QuadrotorInput,
    QuadrotorParams,
    QuadrotorState,
    UnicycleInput,
    UnicycleState,
    bicycle_dynamics,
    dynamics_array,
    euler_rate_map,
    point_mass_dynamics,
    quadrotor_dynamics,
    rotation_matrix,
    skew,
    slip_from_steering,
    unicycle_dynamics,
)


class TestUnicycle:
    def test_pure_forward_roll(self):
        d = unicycle_dynamics(UnicycleState(0, 0, 0, 1, 0), UnicycleInput(0, 0))
        assert np.allclose(d, [1, 0, 0, 0, 0])

    def test_axis_aligned_heading(self):
        d = unicycle_dynamics(UnicycleState(0, 0, math.pi / 2, 2, 0), UnicycleInput(1, 0.5))
        assert np.allclose(d, [0, 2, 0, 1, 0.5], atol=1e-15)

    def test_spin_in_place(self):
        d = unicycle_dynamics(UnicycleState(3, -1, math.pi, 0, 1), UnicycleInput(0, 0))
        assert np.allclose(d, [0, 0, 1, 0, 0], atol=1e-15)

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            UnicycleState(0, 0, float("nan"), 0, 0)


class TestBicycle:
    def test_zero_steer_slip(self):
        assert slip_from_steering(0.0, BicycleParams(0.15, 0.15, 0.2)) == 0.0

    def test_slip_value(self):
        # frozen from atan(0.5 * tan(0.2)) evaluated at double precision
        beta = slip_from_steering(0.2, BicycleParams(0.15, 0.15, 0.2))
        assert beta == pytest.approx(0.10101007345816129, abs=1e-15)

    def test_slip_small_angle_ratio(self):
        # first-order slope of the slip map is l_r / (l_f + l_r) = 0.5
        p = BicycleParams(0.15, 0.15, 0.2)
        delta = 1e-8
        assert slip_from_steering(delta, p) / delta == pytest.approx(0.5, rel=1e-6)

    def test_slip_domain(self):
        with pytest.raises(DomainError):
            slip_from_steering(math.pi / 2, BicycleParams(0.15, 0.15, 0.2))

    def test_straight_line(self):
        d = bicycle_dynamics(
            BicycleState(0, 0, 0, 1), BicycleInput(0, 0), BicycleParams(0.15, 0.15, 0.2)
        )
        assert np.allclose(d, [1, 0, 0, 0])

    def test_turning_rates(self):
        d = bicycle_dynamics(
            BicycleState(0, 0, 0, 2), BicycleInput(0, 0.1), BicycleParams(0.15, 0.15, 0.2)
        )
        assert np.allclose(d, [2.0, 0.2, 2 * 0.1 / 0.15, 0.0])

    def test_zero_speed_kills_steering(self):
        d = bicycle_dynamics(
            BicycleState(0, 0, 0, 0), BicycleInput(1, 0.1), BicycleParams(0.15, 0.15, 0.2)
        )
        assert np.allclose(d, [0, 0, 0, 1])

    def test_beta_bound_enforced(self):
        with pytest.raises(DomainError):
            bicycle_dynamics(
                BicycleState(0, 0, 0, 1),
                BicycleInput(0, 0.6),
                BicycleParams(0.15, 0.15, 0.2),
            )


class TestRotations:
    def test_identity(self):
        assert np.allclose(rotation_matrix([0, 0, 0]), np.eye(3))

    def test_pure_yaw(self):
        r = rotation_matrix([0, 0, math.pi / 2])
        assert np.allclose(r @ np.array([1, 0, 0]), [0, 1, 0], atol=1e-15)

    def test_orthonormal_random(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            euler = rng.uniform(-3, 3, 3)
            r = rotation_matrix(euler)
            assert np.max(np.abs(r.T @ r - np.eye(3))) < 1e-12
            assert abs(np.linalg.det(r) - 1.0) < 1e-12

    def test_rate_map_identity_at_level(self):
        w, w_inv = euler_rate_map([0, 0, 0])
        assert np.allclose(w, np.eye(3))
        assert np.allclose(w_inv, np.eye(3))

    def test_rate_map_gimbal(self):
        with pytest.raises(GimbalError):
            euler_rate_map([0, math.pi / 2, 0])

    def test_rate_map_inverse(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            euler = np.array([rng.uniform(-3, 3), rng.uniform(-1.4, 1.4), rng.uniform(-3, 3)])
            w, w_inv = euler_rate_map(euler)
            assert np.max(np.abs(w @ w_inv - np.eye(3))) < 1e-10

    def test_rate_map_consistent_with_rotation_flow(self):
        # central difference of R along integrated Euler rates must match
        # R @ skew(omega_body)
        rng = np.random.default_rng(3)
        for _ in range(100):
            euler = np.array([rng.uniform(-2, 2), rng.uniform(-1.2, 1.2), rng.uniform(-2, 2)])
            omega = rng.uniform(-1, 1, 3)
            _, w_inv = euler_rate_map(euler)
            rates = w_inv @ omega
            eps = 1e-6
            numeric = (
                rotation_matrix(euler + eps * rates) - rotation_matrix(euler - eps * rates)
            ) / (2 * eps)
            analytic = rotation_matrix(euler) @ skew(omega)
            scale = max(1.0, np.max(np.abs(analytic)))
            assert np.max(np.abs(numeric - analytic)) / scale < 1e-5


class TestQuadrotor:
    def test_hover_equilibrium(self):
        p = QuadrotorParams()
        s = QuadrotorState(pos=[0, 0, 1], vel=[0, 0, 0], euler=[0, 0, 0], omega_body=[0, 0, 0])
        f = p.mass * p.g / 4
        d = quadrotor_dynamics(s, QuadrotorInput(f, f, f, f), p)
        assert np.allclose(d, np.zeros(12), atol=1e-14)

    def test_free_fall(self):
        p = QuadrotorParams()
        s = QuadrotorState(pos=[0, 0, 1], vel=[0, 0, 0], euler=[0, 0, 0], omega_body=[0, 0, 0])
        d = quadrotor_dynamics(s, QuadrotorInput(0, 0, 0, 0), p)
        assert np.allclose(d[3:6], [0, 0, -p.g])

    def test_differential_thrust_torques(self):
        p = QuadrotorParams()
        s = QuadrotorState(pos=[0, 0, 1], vel=[0, 0, 0], euler=[0, 0, 0], omega_body=[0, 0, 0])
        d = quadrotor_dynamics(s, QuadrotorInput(2, 1, 1, 1), p)
        ixx, _, izz = p.inertia_diag
        assert d[9] == pytest.approx(p.L * (2 - 1) / ixx)
        assert d[10] == pytest.approx(0.0)
        assert d[11] == pytest.approx(p.L * p.c_tau * (2 - 1 + 1 - 1) / izz)

    def test_gimbal_guard(self):
        p = QuadrotorParams()
        s = QuadrotorState(
            pos=[0, 0, 1], vel=[0, 0, 0], euler=[0, math.pi / 2, 0], omega_body=[0, 0, 0]
        )
        with pytest.raises(GimbalError):
            quadrotor_dynamics(s, QuadrotorInput(1, 1, 1, 1), p)


class TestPointMass:
    def test_coasting(self):
        d = point_mass_dynamics(PointMassState([0, 0], [1, 2]), np.zeros(2))
        assert np.allclose(d, [1, 2, 0, 0])

    def test_pure_acceleration(self):
        d = point_mass_dynamics(PointMassState([5, 5], [0, 0]), np.array([1, -1]))
        assert np.allclose(d, [0, 0, 1, -1])


@pytest.mark.parametrize("tag", ["unicycle", "bicycle", "point_mass", "quadrotor"])
def test_dynamics_affine_in_input(tag):
    rng = np.random.default_rng(11)
    for _ in range(200):
        state = random_state(tag, rng)
        params = random_params(tag, rng)
        u1 = random_input(tag, rng) * 0.45
        u2 = random_input(tag, rng) * 0.45
        x = state.as_array()
        lhs = dynamics_array(tag, x, u1 + u2, params) - dynamics_array(tag, x, u2, params)
        rhs = dynamics_array(tag, x, u1, params) - dynamics_array(tag, x, np.zeros_like(u1), params)
        assert np.max(np.abs(lhs - rhs)) < 1e-12
