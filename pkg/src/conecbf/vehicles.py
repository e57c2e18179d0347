"""Control-affine vehicle dynamics: unicycle, bicycle, quadrotor, point mass.

All models are written as xdot = f(x) + g(x) u with strict SI units. States
are small frozen dataclasses; every dynamics function returns the time
derivative of the flat state vector as an ndarray so fixed-step integrators
can operate on arrays. Headings are kept unwrapped (no modular reduction
inside dynamics).

The quadrotor uses the ZYX (yaw-pitch-roll) Euler convention; the rotation
matrix, the Euler-rate map, and the motor mixer are all derived under that
convention and cross-checked numerically against Rdot = R * skew(omega).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GimbalError

BETA_MAX_DEFAULT = math.pi / 6
GIMBAL_MARGIN = 1e-3
GRAVITY = 9.81

MODEL_TAGS = ("unicycle", "bicycle", "point_mass", "quadrotor")


def _check_finite(name: str, *values) -> None:
    for v in values:
        arr = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise DomainError(f"{name}: non-finite component {arr}")


def _vec(value, n: int, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float).reshape(-1)
    if arr.size != n:
        raise DomainError(f"{name}: expected length {n}, got {arr.size}")
    _check_finite(name, arr)
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# states and inputs


@dataclass(frozen=True)
class UnicycleState:
    """Pose, linear velocity, and angular velocity of a unicycle."""

    x: float
    y: float
    theta: float
    v: float
    omega: float

    def __post_init__(self):
        _check_finite("UnicycleState", self.x, self.y, self.theta, self.v, self.omega)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta, self.v, self.omega])

    @classmethod
    def from_array(cls, arr) -> "UnicycleState":
        x, y, theta, v, omega = np.asarray(arr, dtype=float)
        return cls(x, y, theta, v, omega)


@dataclass(frozen=True)
class UnicycleInput:
    """Linear acceleration and angular acceleration."""

    a: float
    alpha: float

    def __post_init__(self):
        _check_finite("UnicycleInput", self.a, self.alpha)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.alpha])


@dataclass(frozen=True)
class UnicycleParams:
    """Geometry of the unicycle: body-center offset and body width."""

    l: float = 0.1
    width: float = 0.3

    def __post_init__(self):
        _check_finite("UnicycleParams", self.l, self.width)
        if self.l < 0 or self.width < 0:
            raise DomainError("UnicycleParams: l and width must be >= 0")


@dataclass(frozen=True)
class BicycleState:
    """Planar pose and forward speed of the center of mass."""

    x: float
    y: float
    theta: float
    v: float

    def __post_init__(self):
        _check_finite("BicycleState", self.x, self.y, self.theta, self.v)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta, self.v])

    @classmethod
    def from_array(cls, arr) -> "BicycleState":
        x, y, theta, v = np.asarray(arr, dtype=float)
        return cls(x, y, theta, v)


@dataclass(frozen=True)
class BicycleInput:
    """Linear acceleration and slip angle at the center of mass."""

    a: float
    beta: float

    def __post_init__(self):
        _check_finite("BicycleInput", self.a, self.beta)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.beta])


@dataclass(frozen=True)
class BicycleParams:
    """Axle distances from the center of mass, body width, slip bound."""

    l_f: float
    l_r: float
    width: float
    beta_max: float = BETA_MAX_DEFAULT

    def __post_init__(self):
        _check_finite("BicycleParams", self.l_f, self.l_r, self.width, self.beta_max)
        if self.l_f <= 0 or self.l_r <= 0 or self.width <= 0:
            raise DomainError("BicycleParams: l_f, l_r, width must be > 0")
        if self.beta_max <= 0:
            raise DomainError("BicycleParams: beta_max must be > 0")


@dataclass(frozen=True)
class PointMassState:
    """Planar double integrator: position and velocity."""

    pos: np.ndarray
    vel: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pos", _vec(self.pos, 2, "PointMassState.pos"))
        object.__setattr__(self, "vel", _vec(self.vel, 2, "PointMassState.vel"))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.pos, self.vel])

    @classmethod
    def from_array(cls, arr) -> "PointMassState":
        arr = np.asarray(arr, dtype=float)
        return cls(arr[:2], arr[2:4])


@dataclass(frozen=True)
class PointMassParams:
    """Footprint width of the point-mass agent (0 for a true point)."""

    width: float = 0.0

    def __post_init__(self):
        _check_finite("PointMassParams", self.width)
        if self.width < 0:
            raise DomainError("PointMassParams: width must be >= 0")


@dataclass(frozen=True)
class QuadrotorState:
    """Position, velocity, ZYX Euler angles, and body angular rates."""

    pos: np.ndarray
    vel: np.ndarray
    euler: np.ndarray
    omega_body: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pos", _vec(self.pos, 3, "QuadrotorState.pos"))
        object.__setattr__(self, "vel", _vec(self.vel, 3, "QuadrotorState.vel"))
        object.__setattr__(self, "euler", _vec(self.euler, 3, "QuadrotorState.euler"))
        object.__setattr__(
            self, "omega_body", _vec(self.omega_body, 3, "QuadrotorState.omega_body")
        )

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.pos, self.vel, self.euler, self.omega_body])

    @classmethod
    def from_array(cls, arr) -> "QuadrotorState":
        arr = np.asarray(arr, dtype=float)
        return cls(arr[0:3], arr[3:6], arr[6:9], arr[9:12])


@dataclass(frozen=True)
class QuadrotorInput:
    """Individual propeller thrusts."""

    f1: float
    f2: float
    f3: float
    f4: float

    def __post_init__(self):
        _check_finite("QuadrotorInput", self.f1, self.f2, self.f3, self.f4)

    def as_array(self) -> np.ndarray:
        return np.array([self.f1, self.f2, self.f3, self.f4])


@dataclass(frozen=True)
class QuadrotorParams:
    """Mass, diagonal inertia, arm length, torque coefficient, geometry.

    ``l`` is the distance of the body center from the base along the body
    z-axis; ``l_sign`` selects which way the offset points (+1 toward the
    rotor plane).
    """

    mass: float = 0.8
    inertia_diag: tuple = (5.0e-3, 5.0e-3, 9.0e-3)
    L: float = 0.2
    c_tau: float = 0.01
    l: float = 0.05
    g: float = GRAVITY
    width: float = 0.3
    l_sign: float = 1.0

    def __post_init__(self):
        _check_finite(
            "QuadrotorParams",
            self.mass,
            self.inertia_diag,
            self.L,
            self.c_tau,
            self.l,
            self.g,
            self.width,
            self.l_sign,
        )
        if min(self.mass, self.L, self.c_tau, self.g, self.width) <= 0:
            raise DomainError("QuadrotorParams: mass, L, c_tau, g, width must be > 0")
        if any(i <= 0 for i in self.inertia_diag):
            raise DomainError("QuadrotorParams: inertia entries must be > 0")
        if self.l < 0:
            raise DomainError("QuadrotorParams: l must be >= 0")
        if self.l_sign not in (-1.0, 1.0):
            raise DomainError("QuadrotorParams: l_sign must be +1 or -1")

    @property
    def inertia(self) -> np.ndarray:
        return np.array(self.inertia_diag, dtype=float)

    @property
    def offset(self) -> float:
        """Signed body-center offset along the body z-axis."""
        return self.l_sign * self.l


# ---------------------------------------------------------------------------
# rotations


def skew(w) -> np.ndarray:
    """Cross-product matrix: skew(w) @ v == cross(w, v)."""
    wx, wy, wz = np.asarray(w, dtype=float)
    return np.array([[0.0, -wz, wy], [wz, 0.0, -wx], [-wy, wx, 0.0]])


def rotation_matrix(euler) -> np.ndarray:
    """Body-to-inertial rotation for ZYX Euler angles (roll, pitch, yaw).

    R = Rz(yaw) @ Ry(pitch) @ Rx(roll); proper orthonormal by construction.
    """
    phi, theta, psi = np.asarray(euler, dtype=float)
    _check_finite("rotation_matrix", phi, theta, psi)
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cpsi * cth, cpsi * sth * sphi - spsi * cphi, cpsi * sth * cphi + spsi * sphi],
            [spsi * cth, spsi * sth * sphi + cpsi * cphi, spsi * sth * cphi - cpsi * sphi],
            [-sth, cth * sphi, cth * cphi],
        ]
    )


def euler_rate_map(euler) -> tuple[np.ndarray, np.ndarray]:
    """Map W with omega_body = W @ euler_rates, and its inverse.

    Euler-angle rates are recovered as W^-1 @ omega_body. Raises GimbalError
    when the pitch is within GIMBAL_MARGIN of +/-pi/2, where W is singular.
    """
    phi, theta, _ = np.asarray(euler, dtype=float)
    _check_finite("euler_rate_map", phi, theta)
    if abs(theta) >= math.pi / 2 - GIMBAL_MARGIN:
        raise GimbalError(f"pitch {theta:.6f} rad too close to +/-pi/2")
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    tth = sth / cth
    w = np.array(
        [
            [1.0, 0.0, -sth],
            [0.0, cphi, sphi * cth],
            [0.0, -sphi, cphi * cth],
        ]
    )
    w_inv = np.array(
        [
            [1.0, sphi * tth, cphi * tth],
            [0.0, cphi, -sphi],
            [0.0, sphi / cth, cphi / cth],
        ]
    )
    return w, w_inv


# ---------------------------------------------------------------------------
# dynamics


def unicycle_dynamics(s: UnicycleState, u: UnicycleInput) -> np.ndarray:
    """xdot = (v cos(theta), v sin(theta), omega, a, alpha)."""
    return np.array(
        [s.v * math.cos(s.theta), s.v * math.sin(s.theta), s.omega, u.a, u.alpha]
    )


def slip_from_steering(delta: float, p: BicycleParams) -> float:
    """Slip angle at the center of mass for a steering angle delta.

    beta = atan(l_r / (l_f + l_r) * tan(delta)); requires |delta| < pi/2.
    """
    _check_finite("slip_from_steering", delta)
    if abs(delta) >= math.pi / 2:
        raise DomainError(f"steering angle {delta:.4f} must satisfy |delta| < pi/2")
    return math.atan(p.l_r / (p.l_f + p.l_r) * math.tan(delta))


def bicycle_dynamics(s: BicycleState, u: BicycleInput, p: BicycleParams) -> np.ndarray:
    """Small-slip bicycle model.

    xdot = (v cos(theta) - v beta sin(theta),
            v sin(theta) + v beta cos(theta),
            v beta / l_r,
            a)
    """
    if abs(u.beta) > p.beta_max:
        raise DomainError(f"slip angle {u.beta:.4f} exceeds beta_max {p.beta_max:.4f}")
    ct, st = math.cos(s.theta), math.sin(s.theta)
    return np.array(
        [
            s.v * ct - s.v * u.beta * st,
            s.v * st + s.v * u.beta * ct,
            s.v * u.beta / p.l_r,
            u.a,
        ]
    )


def point_mass_dynamics(s: PointMassState, u) -> np.ndarray:
    """Double integrator: xdot = (vel, u)."""
    u = _vec(u, 2, "point mass input")
    return np.concatenate([s.vel, u])


def quadrotor_dynamics(s: QuadrotorState, u: QuadrotorInput, p: QuadrotorParams) -> np.ndarray:
    """Rigid-body quadrotor with thrust inputs.

    Position rate is the velocity; velocity rate is gravity plus the total
    thrust rotated into the inertial frame; Euler rates come from the
    inverse rate map; body-rate dynamics follow Euler's equation with the
    plus-configuration mixer
        torque = L * (f1 - f3, f2 - f4, c_tau * (f1 - f2 + f3 - f4)).
    """
    rot = rotation_matrix(s.euler)
    _, w_inv = euler_rate_map(s.euler)
    thrust = u.f1 + u.f2 + u.f3 + u.f4
    acc = np.array([0.0, 0.0, -p.g]) + (thrust / p.mass) * rot[:, 2]
    euler_rate = w_inv @ s.omega_body
    inertia = p.inertia
    torque = p.L * np.array(
        [u.f1 - u.f3, u.f2 - u.f4, p.c_tau * (u.f1 - u.f2 + u.f3 - u.f4)]
    )
    omega_dot = (torque - np.cross(s.omega_body, inertia * s.omega_body)) / inertia
    return np.concatenate([s.vel, acc, euler_rate, omega_dot])


# ---------------------------------------------------------------------------
# flat-array dispatch used by integrators and finite-difference oracles

_STATE_CLS = {
    "unicycle": UnicycleState,
    "bicycle": BicycleState,
    "point_mass": PointMassState,
    "quadrotor": QuadrotorState,
}

_STATE_DIM = {"unicycle": 5, "bicycle": 4, "point_mass": 4, "quadrotor": 12}
_INPUT_DIM = {"unicycle": 2, "bicycle": 2, "point_mass": 2, "quadrotor": 4}


def state_dim(model_tag: str) -> int:
    return _STATE_DIM[model_tag]


def input_dim(model_tag: str) -> int:
    return _INPUT_DIM[model_tag]


def state_from_array(model_tag: str, arr):
    return _STATE_CLS[model_tag].from_array(arr)


def default_params(model_tag: str):
    return {
        "unicycle": UnicycleParams,
        "bicycle": lambda: BicycleParams(l_f=0.15, l_r=0.15, width=0.2),
        "point_mass": PointMassParams,
        "quadrotor": QuadrotorParams,
    }[model_tag]()


def dynamics_array(model_tag: str, state_arr, input_arr, params) -> np.ndarray:
    """Evaluate xdot for a flat state/input pair of the given model."""
    state_arr = np.asarray(state_arr, dtype=float)
    input_arr = np.asarray(input_arr, dtype=float)
    if model_tag == "unicycle":
        s = UnicycleState.from_array(state_arr)
        return unicycle_dynamics(s, UnicycleInput(*input_arr))
    if model_tag == "bicycle":
        s = BicycleState.from_array(state_arr)
        return bicycle_dynamics(s, BicycleInput(*input_arr), params)
    if model_tag == "point_mass":
        s = PointMassState.from_array(state_arr)
        return point_mass_dynamics(s, input_arr)
    if model_tag == "quadrotor":
        s = QuadrotorState.from_array(state_arr)
        return quadrotor_dynamics(s, QuadrotorInput(*input_arr), params)
    raise DomainError(f"unknown model tag {model_tag!r}")
