"""Random state/obstacle generators for property checks.

Samplers draw vehicle states, obstacle shapes, and constant velocities from
moderate SI ranges and reject pairs whose relative position is too close to
the conservative circle, so that barrier gradients stay well conditioned for
finite-difference comparison.
"""

from __future__ import annotations

import numpy as np

from .barriers import C3BF, ELLIPSE, HOCBF, BarrierKind
from .obstacles import Cylinder, Ellipsoid, Obstacle, ObstacleState, PlanarEllipse
from .vehicles import (
    BicycleParams,
    BicycleState,
    PointMassParams,
    PointMassState,
    QuadrotorParams,
    QuadrotorState,
    UnicycleParams,
    UnicycleState,
    input_dim,
)

# keep sampled states comfortably outside the circle so 1/sqrt(d^2 - r^2)
# terms stay moderate
_CLEARANCE = 1.3


def split_variant(model_tag: str) -> tuple[str, bool]:
    """Map a sampling variant tag to (base model tag, wants_cylinder)."""
    if model_tag == "quadrotor_sphere":
        return "quadrotor", False
    if model_tag == "quadrotor_projection":
        return "quadrotor", True
    return model_tag, False


def random_state(model_tag: str, rng: np.random.Generator):
    if model_tag == "unicycle":
        return UnicycleState(
            x=rng.uniform(-5, 5),
            y=rng.uniform(-5, 5),
            theta=rng.uniform(-np.pi, np.pi),
            v=rng.uniform(-2.5, 2.5),
            omega=rng.uniform(-1.5, 1.5),
        )
    if model_tag == "bicycle":
        return BicycleState(
            x=rng.uniform(-5, 5),
            y=rng.uniform(-5, 5),
            theta=rng.uniform(-np.pi, np.pi),
            v=rng.uniform(-2.5, 2.5),
        )
    if model_tag == "point_mass":
        return PointMassState(pos=rng.uniform(-5, 5, 2), vel=rng.uniform(-2.5, 2.5, 2))
    if model_tag == "quadrotor":
        return QuadrotorState(
            pos=rng.uniform(-5, 5, 3),
            vel=rng.uniform(-2.0, 2.0, 3),
            euler=np.array(
                [rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-np.pi, np.pi)]
            ),
            omega_body=rng.uniform(-1.0, 1.0, 3),
        )
    raise ValueError(f"unknown model tag {model_tag!r}")


def random_params(model_tag: str, rng: np.random.Generator):
    if model_tag == "unicycle":
        return UnicycleParams(l=rng.uniform(0.05, 0.3), width=rng.uniform(0.1, 0.5))
    if model_tag == "bicycle":
        return BicycleParams(
            l_f=rng.uniform(0.1, 0.5),
            l_r=rng.uniform(0.1, 0.5),
            width=rng.uniform(0.1, 0.5),
        )
    if model_tag == "point_mass":
        return PointMassParams(width=rng.uniform(0.0, 0.4))
    if model_tag == "quadrotor":
        return QuadrotorParams(
            mass=rng.uniform(0.4, 1.5),
            inertia_diag=tuple(rng.uniform(3e-3, 2e-2, 3)),
            L=rng.uniform(0.1, 0.3),
            c_tau=rng.uniform(0.005, 0.05),
            l=rng.uniform(0.02, 0.1),
            width=rng.uniform(0.1, 0.4),
        )
    raise ValueError(f"unknown model tag {model_tag!r}")


def random_input(model_tag: str, rng: np.random.Generator) -> np.ndarray:
    if model_tag == "bicycle":
        # keep the slip column inside the small-slip bound
        return np.array([rng.uniform(-3, 3), rng.uniform(-0.5, 0.5)])
    if model_tag == "quadrotor":
        return rng.uniform(0.0, 6.0, 4)
    return rng.uniform(-3, 3, input_dim(model_tag))


def _random_planar_obstacle(rng: np.random.Generator, moving: bool) -> Obstacle:
    shape = PlanarEllipse(c1=rng.uniform(0.3, 1.2), c2=rng.uniform(0.3, 1.2))
    vel = np.array([rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0]) if moving else np.zeros(3)
    center = np.array([rng.uniform(-8, 8), rng.uniform(-8, 8), 0.0])
    return Obstacle(shape=shape, state=ObstacleState(center=center, velocity=vel))


def _random_sphere_obstacle(rng: np.random.Generator, moving: bool) -> Obstacle:
    shape = Ellipsoid(
        c1=rng.uniform(0.3, 1.2), c2=rng.uniform(0.3, 1.2), c3=rng.uniform(0.3, 1.2)
    )
    vel = rng.uniform(-2, 2, 3) if moving else np.zeros(3)
    center = rng.uniform(-8, 8, 3)
    return Obstacle(shape=shape, state=ObstacleState(center=center, velocity=vel))


def _random_cylinder_obstacle(rng: np.random.Generator, moving: bool) -> Obstacle:
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    shape = Cylinder(
        axis=axis,
        height=rng.uniform(2.0, 8.0),
        radii=(rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0)),
    )
    if moving:
        raw = rng.uniform(-2, 2, 3)
        vel = raw - (raw @ axis) * axis
    else:
        vel = np.zeros(3)
    center = rng.uniform(-8, 8, 3)
    return Obstacle(shape=shape, state=ObstacleState(center=center, velocity=vel))


def random_obstacle(model_tag: str, rng: np.random.Generator, *, cylinder=False,
                    moving: bool | None = None) -> Obstacle:
    if moving is None:
        moving = bool(rng.integers(0, 2))
    if model_tag in ("unicycle", "bicycle", "point_mass"):
        return _random_planar_obstacle(rng, moving)
    if cylinder:
        return _random_cylinder_obstacle(rng, moving)
    return _random_sphere_obstacle(rng, moving)


def random_safe_pair(
    model_tag: str,
    kind: BarrierKind,
    rng: np.random.Generator,
    *,
    min_v_rel: float = 0.0,
):
    """Sample (state, obstacle, params) with the vehicle well outside the
    conservative circle (the projected circle for cylinder obstacles).

    ``model_tag`` may be a base tag or one of the variants
    'quadrotor_sphere' / 'quadrotor_projection'.
    """
    from .barriers import evaluate_barrier
    from .obstacles import effective_radius

    base_tag, cylinder = split_variant(model_tag)
    for _ in range(1000):
        state = random_state(base_tag, rng)
        params = random_params(base_tag, rng)
        obstacle = random_obstacle(base_tag, rng, cylinder=cylinder)
        width = getattr(params, "width", 0.0)
        r = effective_radius(obstacle.shape, width)
        try:
            ev = evaluate_barrier(
                kind if kind.kind != ELLIPSE else BarrierKind(C3BF),
                base_tag,
                state,
                obstacle,
                params,
            )
        except Exception:
            continue
        geom = ev.geometry
        if geom is None:
            continue
        if np.linalg.norm(geom.p_rel) <= _CLEARANCE * r:
            continue
        if min_v_rel > 0.0 and np.linalg.norm(geom.v_rel) <= min_v_rel:
            continue
        return state, obstacle, params
    raise RuntimeError("failed to sample a safe state/obstacle pair")
