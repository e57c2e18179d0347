"""Obstacle shapes, the conservative encompassing radius, and kinematics.

Obstacles translate at constant velocity. For the cone constraint every
shape is over-approximated by a circle/sphere of effective radius
r = (largest relevant semi-axis) + vehicle_width / 2; cylinders use their
cross-section radius and the constraint is applied in the plane
perpendicular to the axis.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import AxisVelocityError, DomainError
from .vehicles import _check_finite, _vec

AXIS_TOL = 1e-9

SPHERE_LIKE = "sphere"
CYLINDER_LIKE = "cylinder"


@dataclass(frozen=True)
class PlanarEllipse:
    """Planar obstacle with semi-axes c1, c2."""

    c1: float
    c2: float

    def __post_init__(self):
        _check_finite("PlanarEllipse", self.c1, self.c2)
        if self.c1 <= 0 or self.c2 <= 0:
            raise DomainError("PlanarEllipse: semi-axes must be > 0")


@dataclass(frozen=True)
class Ellipsoid:
    """Spatial obstacle with semi-axes c1, c2, c3."""

    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        _check_finite("Ellipsoid", self.c1, self.c2, self.c3)
        if min(self.c1, self.c2, self.c3) <= 0:
            raise DomainError("Ellipsoid: semi-axes must be > 0")


@dataclass(frozen=True)
class Cylinder:
    """Elongated obstacle: unit axis, height, and cross-section semi-axes."""

    axis: np.ndarray
    height: float
    radii: tuple

    def __post_init__(self):
        axis = _vec(self.axis, 3, "Cylinder.axis")
        if abs(np.linalg.norm(axis) - 1.0) > AXIS_TOL:
            raise DomainError("Cylinder: axis must have unit norm")
        object.__setattr__(self, "axis", axis)
        _check_finite("Cylinder", self.height, self.radii)
        if self.height <= 0 or min(self.radii) <= 0:
            raise DomainError("Cylinder: height and radii must be > 0")


ObstacleShape = PlanarEllipse | Ellipsoid | Cylinder


@dataclass(frozen=True)
class ObstacleState:
    """Center position and constant translational velocity (3D; planar
    models read only the x, y components)."""

    center: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, 3, "ObstacleState.center"))
        object.__setattr__(
            self, "velocity", _vec(self.velocity, 3, "ObstacleState.velocity")
        )


@dataclass(frozen=True)
class Obstacle:
    shape: ObstacleShape
    state: ObstacleState
    id: str = "obstacle"

    def __post_init__(self):
        if isinstance(self.shape, Cylinder):
            along = float(np.dot(self.state.velocity, self.shape.axis))
            if abs(along) > AXIS_TOL:
                raise AxisVelocityError(
                    f"cylinder velocity component along axis is {along:.3e}"
                )

    @property
    def center(self) -> np.ndarray:
        return self.state.center

    @property
    def velocity(self) -> np.ndarray:
        return self.state.velocity


def effective_radius(shape: ObstacleShape, vehicle_width: float) -> float:
    """Conservative circle radius for the cone constraint.

    Planar ellipse: max(c1, c2) + w/2. Ellipsoid (sphere case):
    max(c1, c2, c3) + w/2. Cylinder: largest cross-section semi-axis + w/2.
    """
    _check_finite("effective_radius", vehicle_width)
    if vehicle_width < 0:
        raise DomainError("vehicle_width must be >= 0")
    half = vehicle_width / 2.0
    if isinstance(shape, PlanarEllipse):
        return max(shape.c1, shape.c2) + half
    if isinstance(shape, Ellipsoid):
        return max(shape.c1, shape.c2, shape.c3) + half
    if isinstance(shape, Cylinder):
        return max(shape.radii) + half
    raise DomainError(f"unknown shape {type(shape).__name__}")


def advance(obstacle: Obstacle, dt: float) -> Obstacle:
    """Translate the obstacle center by velocity * dt."""
    _check_finite("advance", dt)
    if dt < 0:
        raise DomainError("dt must be >= 0")
    state = ObstacleState(
        center=obstacle.state.center + obstacle.state.velocity * dt,
        velocity=obstacle.state.velocity,
    )
    return replace(obstacle, state=state)


def classify_shape(c1: float, c2: float, c3: float, ratio_threshold: float = 3.0) -> str:
    """Classify semi-axes as sphere-like or cylinder-like.

    Cylinder-like iff the largest axis is at least ratio_threshold times the
    second largest.
    """
    _check_finite("classify_shape", c1, c2, c3, ratio_threshold)
    if min(c1, c2, c3) <= 0:
        raise DomainError("semi-axes must be > 0")
    if ratio_threshold <= 1:
        raise DomainError("ratio_threshold must be > 1")
    ordered = sorted((c1, c2, c3), reverse=True)
    return CYLINDER_LIKE if ordered[0] / ordered[1] >= ratio_threshold else SPHERE_LIKE


def ellipsoid_as_cylinder(shape: Ellipsoid) -> Cylinder:
    """Rewrite an elongated ellipsoid as a cylinder along its longest axis.

    Height is the largest semi-axis; the cross-section keeps the other two.
    """
    axes = np.array([shape.c1, shape.c2, shape.c3])
    k = int(np.argmax(axes))
    axis = np.zeros(3)
    axis[k] = 1.0
    radii = tuple(float(a) for i, a in enumerate(axes) if i != k)
    return Cylinder(axis=axis, height=float(axes[k]), radii=radii)
