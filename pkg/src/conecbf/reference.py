"""Reference controllers the safety filter minimally modifies.

Ground vehicles use PD tracking of a target speed and heading; the
quadrotor uses a cascaded PD: position/velocity PD with gravity feedforward
to a desired acceleration, small-angle conversion to desired roll/pitch at
fixed yaw, attitude PD to body torques, and the mixer inverse to
per-propeller forces. All controllers are memoryless functions of
(state, target).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .vehicles import (
    BicycleInput,
    BicycleParams,
    BicycleState,
    PointMassState,
    QuadrotorInput,
    QuadrotorParams,
    QuadrotorState,
    UnicycleInput,
    UnicycleState,
)


@dataclass(frozen=True)
class ConstantVelocity:
    """Track a constant speed along a fixed heading."""

    speed: float
    heading: float = 0.0


@dataclass(frozen=True)
class Waypoint:
    """Drive toward a fixed point at a cruise speed."""

    point: np.ndarray
    speed: float

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        if self.speed < 0:
            raise ValueError("Waypoint speed must be >= 0")


Target = ConstantVelocity | Waypoint


@dataclass(frozen=True)
class Gains:
    """PD gains; defaults keep unfiltered tracking stable at dt = 0.01."""

    kp_v: float = 1.0
    kp_heading: float = 2.0
    kd_heading: float = 0.5
    pos_kp: float = 2.0
    pos_kd: float = 1.5
    att_kp: float = 20.0
    att_kd: float = 4.0


def wrap_angle(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = (angle + math.pi) % (2.0 * math.pi) - math.pi
    if wrapped == -math.pi:
        return math.pi
    return wrapped


def _planar_goal(state_xy: np.ndarray, target: Target) -> tuple[float, float]:
    """Desired (speed, heading) for a planar vehicle."""
    if isinstance(target, ConstantVelocity):
        return target.speed, target.heading
    delta = target.point[:2] - state_xy
    dist = float(np.linalg.norm(delta))
    if dist < 1e-9:
        return 0.0, 0.0
    return target.speed, math.atan2(delta[1], delta[0])


def pd_unicycle(s: UnicycleState, target: Target, gains: Gains) -> UnicycleInput:
    v_des, heading_des = _planar_goal(np.array([s.x, s.y]), target)
    a = gains.kp_v * (v_des - s.v)
    alpha = gains.kp_heading * wrap_angle(heading_des - s.theta) - gains.kd_heading * s.omega
    return UnicycleInput(a=a, alpha=alpha)


def pd_bicycle(
    s: BicycleState, target: Target, gains: Gains, params: BicycleParams
) -> BicycleInput:
    v_des, heading_des = _planar_goal(np.array([s.x, s.y]), target)
    a = gains.kp_v * (v_des - s.v)
    beta = gains.kp_heading * wrap_angle(heading_des - s.theta)
    beta = max(-params.beta_max, min(params.beta_max, beta))
    return BicycleInput(a=a, beta=beta)


def pd_point_mass(s: PointMassState, target: Target, gains: Gains) -> np.ndarray:
    if isinstance(target, ConstantVelocity):
        v_cmd = target.speed * np.array(
            [math.cos(target.heading), math.sin(target.heading)]
        )
        return gains.kp_v * (v_cmd - s.vel)
    delta = target.point[:2] - s.pos
    dist = float(np.linalg.norm(delta))
    v_cmd = target.speed * delta / dist if dist > 1e-9 else np.zeros(2)
    return gains.pos_kp * delta + gains.pos_kd * (v_cmd - s.vel)


def mixer_matrix(p: QuadrotorParams) -> np.ndarray:
    """Map per-propeller forces to (total thrust, body torques).

    Row order: total thrust, roll torque L(f1-f3), pitch torque L(f2-f4),
    yaw torque L c_tau (f1-f2+f3-f4). Invertible for L, c_tau > 0.
    """
    lc = p.L * p.c_tau
    return np.array(
        [
            [1.0, 1.0, 1.0, 1.0],
            [p.L, 0.0, -p.L, 0.0],
            [0.0, p.L, 0.0, -p.L],
            [lc, -lc, lc, -lc],
        ]
    )


def forces_from_wrench(
    thrust: float, torque: np.ndarray, p: QuadrotorParams
) -> np.ndarray:
    """Invert the mixer: per-propeller forces for a thrust/torque command."""
    wrench = np.array([thrust, torque[0], torque[1], torque[2]])
    return np.linalg.solve(mixer_matrix(p), wrench)


def pd_quadrotor(
    s: QuadrotorState, target: Target, gains: Gains, params: QuadrotorParams
) -> QuadrotorInput:
    """Cascaded position -> attitude -> mixer reference controller.

    ConstantVelocity targets command a horizontal velocity (zero vertical
    rate); Waypoint targets a cruise velocity toward the point that decays
    to hover at the point.
    """
    if isinstance(target, ConstantVelocity):
        v_cmd = target.speed * np.array(
            [math.cos(target.heading), math.sin(target.heading), 0.0]
        )
        acc_des = gains.pos_kd * (v_cmd - s.vel)
    else:
        delta = target.point - s.pos
        dist = float(np.linalg.norm(delta))
        v_cmd = target.speed * delta / dist if dist > 1e-9 else np.zeros(3)
        acc_des = gains.pos_kp * delta + gains.pos_kd * (v_cmd - s.vel)
    acc_des = acc_des + np.array([0.0, 0.0, params.g])

    thrust = params.mass * acc_des[2]
    psi = s.euler[2]
    cpsi, spsi = math.cos(psi), math.sin(psi)
    # small-angle inversion of the lateral acceleration at fixed yaw
    pitch_des = (acc_des[0] * cpsi + acc_des[1] * spsi) / params.g
    roll_des = (acc_des[0] * spsi - acc_des[1] * cpsi) / params.g
    att_err = np.array(
        [
            wrap_angle(roll_des - s.euler[0]),
            wrap_angle(pitch_des - s.euler[1]),
            wrap_angle(0.0 - s.euler[2]),
        ]
    )
    torque = params.inertia * (gains.att_kp * att_err - gains.att_kd * s.omega_body)
    forces = forces_from_wrench(thrust, torque, params)
    return QuadrotorInput(*forces)
