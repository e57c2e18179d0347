"""Barrier candidates for vehicle-obstacle pairs.

Every evaluator returns the triple (h, L_f h, L_g h) so the filter layer can
rearrange hdot = L_f h + L_g h u into a linear constraint on the input.

The collision-cone barrier is
    h = <p_rel, v_rel> + ||v_rel|| * sqrt(||p_rel||^2 - r^2)
with cos(phi) = sqrt(||p_rel||^2 - r^2) / ||p_rel|| the cosine of the cone
half-angle. h >= 0 keeps the relative velocity outside the cone of
directions that intersect the conservative circle of radius r.

The higher-order baseline replaces the ||v_rel|| weight by a constant:
    h_ho = <p_rel, v_rel> + gamma * sqrt(||p_rel||^2 - r^2)

so h - h_ho = (||v_rel|| - gamma) * sqrt(||p_rel||^2 - r^2) identically.

Derivatives are assembled analytically from the chain rule
    hdot = <dh/dp, pdot_rel> + <dh/dv, vdot_rel>
with per-model drift/input splits of pdot_rel and vdot_rel; the only
runtime numerics are dot products. ``numeric_hdot`` provides an independent
finite-difference oracle for tests.

Relative kinematics per model (obstacle acceleration is zero):

  unicycle (body center offset l ahead of the axle):
    p_rel = c - (x + l cos(th), y + l sin(th))
    v_rel = cdot - (v cos(th) - l w sin(th), v sin(th) + l w cos(th))
    pdot_rel = v_rel
    vdot_rel = (-a cos + v w sin + l w^2 cos + l alpha sin,
                -a sin - v w cos + l w^2 sin - l alpha cos)

  bicycle (small slip; v_rel is the along-body velocity mismatch, which is
  NOT pdot_rel):
    p_rel = c - (x, y);  v_rel = cdot - v (cos(th), sin(th))
    pdot_rel = v_rel + beta * (v sin(th), -v cos(th))
    vdot_rel = [[-cos, v sin], [-sin, -v cos]] @ (a, v beta / l_r)

  point mass:
    p_rel = c - pos;  v_rel = cdot - vel = pdot_rel;  vdot_rel = -u

  quadrotor (body center offset l along body z):
    p_rel = c - (pos + R l e3);  v_rel = pdot_rel
    vdot_rel input part = -R @ B @ u with
      B = [[0, Ll/Iyy, 0, -Ll/Iyy], [-Ll/Ixx, 0, Ll/Ixx, 0], [1/m x4]]
    and drift terms from gravity and the omega x (omega x .) products.

  cylinder obstacles use the same quantities projected onto the plane
  perpendicular to the axis; the projector is constant because cylinder
  translation is restricted to that plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AxisVelocityError, DomainError, InsideObstacleError
from .obstacles import (
    AXIS_TOL,
    Cylinder,
    Ellipsoid,
    Obstacle,
    PlanarEllipse,
    effective_radius,
)
from .vehicles import (
    BicycleParams,
    BicycleState,
    PointMassState,
    QuadrotorParams,
    QuadrotorState,
    UnicycleState,
    dynamics_array,
    input_dim,
    rotation_matrix,
    state_from_array,
)

C3BF = "c3bf"
ELLIPSE = "ellipse"
HOCBF = "hocbf"

DEGENERATE = "DEGENERATE"
NONDEGENERATE = "NONDEGENERATE"
MIXED = "MIXED"

NO_CONE_SIGNAL = "no-cone"

LGH_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class BarrierKind:
    """Barrier selector: 'c3bf', 'ellipse', or 'hocbf' (with gamma > 0)."""

    kind: str
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in (C3BF, ELLIPSE, HOCBF):
            raise DomainError(f"unknown barrier kind {self.kind!r}")
        if self.kind == HOCBF:
            if self.gamma is None or not math.isfinite(self.gamma) or self.gamma <= 0:
                raise DomainError("hocbf barrier requires gamma > 0")


@dataclass(frozen=True)
class ConeGeometry:
    """Relative position/velocity, effective radius, cone half-angle cosine."""

    p_rel: np.ndarray
    v_rel: np.ndarray
    r: float
    cos_phi: float


@dataclass(frozen=True)
class BarrierEval:
    """h and its Lie-derivative split hdot = lfh + lgh @ u."""

    h: float
    lfh: float
    lgh: np.ndarray
    kind: BarrierKind
    geometry: ConeGeometry | None = None


@dataclass(frozen=True)
class _RelativeKinematics:
    """Drift/input split of the relative position and velocity rates."""

    p_rel: np.ndarray
    v_rel: np.ndarray
    p_dot_drift: np.ndarray
    p_dot_input: np.ndarray
    v_dot_drift: np.ndarray
    v_dot_input: np.ndarray


def _safe_sqrt_term(p_rel: np.ndarray, r: float) -> tuple[float, float]:
    dist = float(np.linalg.norm(p_rel))
    if dist <= r:
        raise InsideObstacleError(
            f"||p_rel|| = {dist:.6f} <= effective radius {r:.6f}"
        )
    return dist, math.sqrt(dist * dist - r * r)


def cone_terms(p_rel, v_rel, r: float) -> tuple[float, float]:
    """Barrier value and cone half-angle cosine for a relative state.

    h = <p_rel, v_rel> + ||v_rel|| sqrt(||p_rel||^2 - r^2);
    cos_phi = sqrt(||p_rel||^2 - r^2) / ||p_rel||. Requires ||p_rel|| > r.
    """
    p_rel = np.asarray(p_rel, dtype=float)
    v_rel = np.asarray(v_rel, dtype=float)
    dist, sq = _safe_sqrt_term(p_rel, r)
    h = float(p_rel @ v_rel) + float(np.linalg.norm(v_rel)) * sq
    return h, sq / dist


def _cone_eval(rel: _RelativeKinematics, r: float, kind: BarrierKind) -> BarrierEval:
    """Assemble (h, lfh, lgh) for the cone barrier or its HO baseline.

    dh/dp = v_rel + g * p_rel / s and dh/dv = p_rel + s * dg/dv, where
    g = ||v_rel|| (cone) or gamma (HO baseline), s = sqrt(||p_rel||^2 - r^2).
    A vanishing v_rel uses the continuous extension dg/dv = 0.
    """
    p, v = rel.p_rel, rel.v_rel
    dist, sq = _safe_sqrt_term(p, r)
    vnorm = float(np.linalg.norm(v))
    if kind.kind == C3BF:
        weight = vnorm
        dweight = v / vnorm if vnorm > 0.0 else np.zeros_like(v)
    else:
        weight = kind.gamma
        dweight = np.zeros_like(v)
    h = float(p @ v) + weight * sq
    grad_p = v + (weight / sq) * p
    grad_v = p + sq * dweight
    lfh = float(grad_p @ rel.p_dot_drift) + float(grad_v @ rel.v_dot_drift)
    lgh = grad_p @ rel.p_dot_input + grad_v @ rel.v_dot_input
    return BarrierEval(
        h=h,
        lfh=lfh,
        lgh=np.asarray(lgh, dtype=float),
        kind=kind,
        geometry=ConeGeometry(p_rel=p, v_rel=v, r=r, cos_phi=sq / dist),
    )


# ---------------------------------------------------------------------------
# per-model relative kinematics


def _unicycle_rel(s: UnicycleState, l: float, obstacle: Obstacle) -> _RelativeKinematics:
    c = obstacle.center[:2]
    cdot = obstacle.velocity[:2]
    ct, st = math.cos(s.theta), math.sin(s.theta)
    heading = np.array([ct, st])
    left = np.array([-st, ct])
    p_rel = c - (np.array([s.x, s.y]) + l * heading)
    v_rel = cdot - (s.v * heading + l * s.omega * left)
    v_dot_drift = np.array(
        [
            s.v * s.omega * st + l * s.omega**2 * ct,
            -s.v * s.omega * ct + l * s.omega**2 * st,
        ]
    )
    v_dot_input = np.array([[-ct, l * st], [-st, -l * ct]])
    return _RelativeKinematics(
        p_rel=p_rel,
        v_rel=v_rel,
        p_dot_drift=v_rel,
        p_dot_input=np.zeros((2, 2)),
        v_dot_drift=v_dot_drift,
        v_dot_input=v_dot_input,
    )


def _bicycle_rel(s: BicycleState, p: BicycleParams, obstacle: Obstacle) -> _RelativeKinematics:
    c = obstacle.center[:2]
    cdot = obstacle.velocity[:2]
    ct, st = math.cos(s.theta), math.sin(s.theta)
    p_rel = c - np.array([s.x, s.y])
    v_rel = cdot - s.v * np.array([ct, st])
    # pdot_rel = v_rel + beta * (v sin, -v cos): the beta column lands in
    # the input part of pdot_rel, not of vdot_rel.
    p_dot_input = np.array([[0.0, s.v * st], [0.0, -s.v * ct]])
    v_dot_input = np.array(
        [
            [-ct, s.v**2 / p.l_r * st],
            [-st, -(s.v**2) / p.l_r * ct],
        ]
    )
    return _RelativeKinematics(
        p_rel=p_rel,
        v_rel=v_rel,
        p_dot_drift=v_rel,
        p_dot_input=p_dot_input,
        v_dot_drift=np.zeros(2),
        v_dot_input=v_dot_input,
    )


def _point_mass_rel(s: PointMassState, obstacle: Obstacle) -> _RelativeKinematics:
    p_rel = obstacle.center[:2] - s.pos
    v_rel = obstacle.velocity[:2] - s.vel
    return _RelativeKinematics(
        p_rel=p_rel,
        v_rel=v_rel,
        p_dot_drift=v_rel,
        p_dot_input=np.zeros((2, 2)),
        v_dot_drift=np.zeros(2),
        v_dot_input=-np.eye(2),
    )


def _quadrotor_rel(
    s: QuadrotorState, p: QuadrotorParams, obstacle: Obstacle
) -> _RelativeKinematics:
    rot = rotation_matrix(s.euler)
    off = p.offset
    w = s.omega_body
    ixx, iyy, izz = p.inertia
    # omega x e3 and its derivative pieces
    w_cross_e3 = np.array([w[1], -w[0], 0.0])
    p_rel = obstacle.center - (s.pos + off * rot[:, 2])
    v_rel = obstacle.velocity - (s.vel + off * (rot @ w_cross_e3))
    # drift of vdot_rel: gravity, centripetal omega x (omega x e3), and the
    # drift part of omega_dot crossed with e3
    omega_dot_drift = -np.cross(w, p.inertia * w) / p.inertia
    centripetal = np.cross(w, w_cross_e3)
    wd_cross_e3 = np.array([omega_dot_drift[1], -omega_dot_drift[0], 0.0])
    v_dot_drift = -(
        np.array([0.0, 0.0, -p.g]) + off * (rot @ (centripetal + wd_cross_e3))
    )
    ll = p.L * off
    mixer = np.array(
        [
            [0.0, ll / iyy, 0.0, -ll / iyy],
            [-ll / ixx, 0.0, ll / ixx, 0.0],
            [1.0 / p.mass] * 4,
        ]
    )
    return _RelativeKinematics(
        p_rel=p_rel,
        v_rel=v_rel,
        p_dot_drift=v_rel,
        p_dot_input=np.zeros((3, 4)),
        v_dot_drift=v_dot_drift,
        v_dot_input=-(rot @ mixer),
    )


def project_out_axis(x, axis) -> np.ndarray:
    """Component of x in the plane perpendicular to the unit axis."""
    x = np.asarray(x, dtype=float)
    axis = np.asarray(axis, dtype=float)
    return x - (x @ axis) * axis


def _project_rel(rel: _RelativeKinematics, axis: np.ndarray) -> _RelativeKinematics:
    proj = np.eye(3) - np.outer(axis, axis)
    return _RelativeKinematics(
        p_rel=proj @ rel.p_rel,
        v_rel=proj @ rel.v_rel,
        p_dot_drift=proj @ rel.p_dot_drift,
        p_dot_input=proj @ rel.p_dot_input,
        v_dot_drift=proj @ rel.v_dot_drift,
        v_dot_input=proj @ rel.v_dot_input,
    )


# ---------------------------------------------------------------------------
# public barrier evaluators


def cone_barrier_unicycle(
    s: UnicycleState, l: float, obstacle: Obstacle, width: float
) -> BarrierEval:
    """Collision-cone barrier for the acceleration-controlled unicycle."""
    r = effective_radius(obstacle.shape, width)
    return _cone_eval(_unicycle_rel(s, l, obstacle), r, BarrierKind(C3BF))


def cone_barrier_bicycle(
    s: BicycleState, p: BicycleParams, obstacle: Obstacle
) -> BarrierEval:
    """Collision-cone barrier for the small-slip bicycle."""
    r = effective_radius(obstacle.shape, p.width)
    return _cone_eval(_bicycle_rel(s, p, obstacle), r, BarrierKind(C3BF))


def cone_barrier_point_mass(
    s: PointMassState, obstacle: Obstacle, width: float = 0.0
) -> BarrierEval:
    """Collision-cone barrier for the planar double integrator."""
    r = effective_radius(obstacle.shape, width)
    return _cone_eval(_point_mass_rel(s, obstacle), r, BarrierKind(C3BF))


def cone_barrier_quadrotor_sphere(
    s: QuadrotorState, p: QuadrotorParams, obstacle: Obstacle
) -> BarrierEval:
    """Collision-cone barrier against a sphere-like obstacle in 3D."""
    r = effective_radius(obstacle.shape, p.width)
    return _cone_eval(_quadrotor_rel(s, p, obstacle), r, BarrierKind(C3BF))


def cone_barrier_quadrotor_projection(
    s: QuadrotorState, p: QuadrotorParams, obstacle: Obstacle
) -> BarrierEval:
    """Collision-cone barrier against a cylinder, applied in the plane
    perpendicular to the cylinder axis."""
    if not isinstance(obstacle.shape, Cylinder):
        raise DomainError("projection barrier requires a cylinder obstacle")
    axis = obstacle.shape.axis
    along = float(np.dot(obstacle.velocity, axis))
    if abs(along) > AXIS_TOL:
        raise AxisVelocityError(
            f"cylinder velocity component along axis is {along:.3e}"
        )
    r = effective_radius(obstacle.shape, p.width)
    rel = _project_rel(_quadrotor_rel(s, p, obstacle), axis)
    return _cone_eval(rel, r, BarrierKind(C3BF))


def ellipse_barrier(model_tag: str, state, obstacle: Obstacle) -> BarrierEval:
    """Diagnostic distance barrier h = sum((c_i - x_i)/a_i)^2 - 1.

    Exposes the input-degeneracy of the plain distance candidate: the input
    row is identically zero for the unicycle and the quadrotor, and only the
    slip column survives for the bicycle.
    """
    kind = BarrierKind(ELLIPSE)
    if model_tag == "unicycle":
        if not isinstance(obstacle.shape, PlanarEllipse):
            raise DomainError("ellipse barrier on a planar model needs PlanarEllipse")
        c1, c2 = obstacle.shape.c1, obstacle.shape.c2
        dx = obstacle.center[0] - state.x
        dy = obstacle.center[1] - state.y
        h = (dx / c1) ** 2 + (dy / c2) ** 2 - 1.0
        ct, st = math.cos(state.theta), math.sin(state.theta)
        lfh = (
            2.0 * dx * (obstacle.velocity[0] - state.v * ct) / c1**2
            + 2.0 * dy * (obstacle.velocity[1] - state.v * st) / c2**2
        )
        return BarrierEval(h=float(h), lfh=float(lfh), lgh=np.zeros(2), kind=kind)
    if model_tag == "bicycle":
        if not isinstance(obstacle.shape, PlanarEllipse):
            raise DomainError("ellipse barrier on a planar model needs PlanarEllipse")
        c1, c2 = obstacle.shape.c1, obstacle.shape.c2
        dx = obstacle.center[0] - state.x
        dy = obstacle.center[1] - state.y
        h = (dx / c1) ** 2 + (dy / c2) ** 2 - 1.0
        ct, st = math.cos(state.theta), math.sin(state.theta)
        lfh = (
            2.0 * dx * (obstacle.velocity[0] - state.v * ct) / c1**2
            + 2.0 * dy * (obstacle.velocity[1] - state.v * st) / c2**2
        )
        beta_col = 2.0 * dx * state.v * st / c1**2 - 2.0 * dy * state.v * ct / c2**2
        return BarrierEval(
            h=float(h), lfh=float(lfh), lgh=np.array([0.0, beta_col]), kind=kind
        )
    if model_tag == "quadrotor":
        if not isinstance(obstacle.shape, Ellipsoid):
            raise DomainError("ellipse barrier on the quadrotor needs Ellipsoid")
        axes = np.array([obstacle.shape.c1, obstacle.shape.c2, obstacle.shape.c3])
        d = obstacle.center - state.pos
        h = float(np.sum((d / axes) ** 2) - 1.0)
        lfh = float(np.sum(2.0 * d * (obstacle.velocity - state.vel) / axes**2))
        return BarrierEval(h=h, lfh=lfh, lgh=np.zeros(4), kind=kind)
    raise DomainError(f"ellipse barrier not defined for model {model_tag!r}")


_HOCBF_MODELS = ("point_mass", "unicycle", "quadrotor")


def hocbf_barrier(
    model_tag: str,
    state,
    obstacle: Obstacle,
    gamma: float,
    *,
    l: float = 0.0,
    width: float = 0.0,
    params: QuadrotorParams | None = None,
) -> BarrierEval:
    """Square-root higher-order baseline h = <p,v> + gamma sqrt(||p||^2-r^2).

    Uses the same per-model relative kinematics as the cone barrier, with
    the velocity-norm weight replaced by the constant gamma.
    """
    kind = BarrierKind(HOCBF, gamma=gamma)
    if model_tag == "point_mass":
        r = effective_radius(obstacle.shape, width)
        return _cone_eval(_point_mass_rel(state, obstacle), r, kind)
    if model_tag == "unicycle":
        r = effective_radius(obstacle.shape, width)
        return _cone_eval(_unicycle_rel(state, l, obstacle), r, kind)
    if model_tag == "quadrotor":
        if params is None:
            raise DomainError("hocbf on the quadrotor requires params")
        if isinstance(obstacle.shape, Cylinder):
            raise DomainError("hocbf baseline is defined for sphere-like obstacles")
        r = effective_radius(obstacle.shape, params.width)
        return _cone_eval(_quadrotor_rel(state, params, obstacle), r, kind)
    raise DomainError(f"hocbf baseline not defined for model {model_tag!r}")


def hocbf_effective_angle(gamma: float, v_rel_norm: float, cos_phi: float):
    """Cone half-angle cosine implied by the higher-order baseline.

    cos(phi') = (gamma / ||v_rel||) cos(phi); returns NO_CONE_SIGNAL when
    the product exceeds 1 (the implied cone is empty).
    """
    if v_rel_norm <= 0:
        raise DomainError("v_rel_norm must be > 0")
    if not 0.0 < cos_phi < 1.0:
        raise DomainError("cos_phi must lie in (0, 1)")
    value = gamma / v_rel_norm * cos_phi
    return value if value <= 1.0 else NO_CONE_SIGNAL


def evaluate_barrier(
    kind: BarrierKind, model_tag: str, state, obstacle: Obstacle, params
) -> BarrierEval:
    """Dispatch a barrier evaluation for the given model and obstacle.

    Cylinder obstacles route the quadrotor cone barrier through the
    projection variant automatically.
    """
    if kind.kind == C3BF:
        if model_tag == "unicycle":
            return cone_barrier_unicycle(state, params.l, obstacle, params.width)
        if model_tag == "bicycle":
            return cone_barrier_bicycle(state, params, obstacle)
        if model_tag == "point_mass":
            return cone_barrier_point_mass(state, obstacle, params.width)
        if model_tag == "quadrotor":
            if isinstance(obstacle.shape, Cylinder):
                return cone_barrier_quadrotor_projection(state, params, obstacle)
            return cone_barrier_quadrotor_sphere(state, params, obstacle)
        raise DomainError(f"unknown model tag {model_tag!r}")
    if kind.kind == HOCBF:
        if model_tag == "unicycle":
            return hocbf_barrier(
                model_tag, state, obstacle, kind.gamma, l=params.l, width=params.width
            )
        if model_tag == "point_mass":
            return hocbf_barrier(
                model_tag, state, obstacle, kind.gamma, width=params.width
            )
        if model_tag == "quadrotor":
            return hocbf_barrier(model_tag, state, obstacle, kind.gamma, params=params)
        raise DomainError(f"hocbf baseline not defined for model {model_tag!r}")
    if kind.kind == ELLIPSE:
        return ellipse_barrier(model_tag, state, obstacle)
    raise DomainError(f"unknown barrier kind {kind.kind!r}")


# ---------------------------------------------------------------------------
# validation oracle and degeneracy report


def numeric_hdot(
    model_tag: str,
    kind: BarrierKind,
    state,
    obstacle: Obstacle,
    input_arr,
    eps: float,
    params,
    barrier_fn=None,
) -> float:
    """Central finite difference of h along the closed-loop flow.

    Both the vehicle state and the obstacle center are advanced by
    +/- eps along their exact derivatives under the (constant) input.
    Exists purely as a test oracle for the analytic lfh/lgh.
    """
    if eps <= 0:
        raise DomainError("eps must be > 0")
    if barrier_fn is None:
        barrier_fn = evaluate_barrier
    state_arr = state.as_array()
    deriv = dynamics_array(model_tag, state_arr, input_arr, params)
    values = []
    for sign in (1.0, -1.0):
        shifted = state_from_array(model_tag, state_arr + sign * eps * deriv)
        moved = Obstacle(
            shape=obstacle.shape,
            state=type(obstacle.state)(
                center=obstacle.center + sign * eps * obstacle.velocity,
                velocity=obstacle.velocity,
            ),
            id=obstacle.id,
        )
        values.append(barrier_fn(kind, model_tag, shifted, moved, params).h)
    return (values[0] - values[1]) / (2.0 * eps)


@dataclass(frozen=True)
class DegeneracyReport:
    """Sampled statistics of ||lgh|| for one (model, barrier) pair."""

    model_tag: str
    kind: BarrierKind
    sample_count: int
    min_lgh_norm: float
    max_lgh_norm: float
    fraction_below: float
    classification: str


def lgh_degeneracy_report(
    model_tag: str,
    kind: BarrierKind,
    sample_count: int,
    seed: int,
    threshold: float = LGH_ZERO_TOL,
) -> DegeneracyReport:
    """Sample random safe states and classify the input row of the barrier.

    DEGENERATE if ||lgh|| stays below the threshold on every sample,
    NONDEGENERATE if on none, MIXED otherwise. ``model_tag`` accepts the
    'quadrotor_sphere' / 'quadrotor_projection' variants.
    """
    from .sampling import random_safe_pair, split_variant

    if sample_count <= 0:
        raise DomainError("sample_count must be > 0")
    base_tag, _ = split_variant(model_tag)
    rng = np.random.default_rng(seed)
    norms = np.empty(sample_count)
    for i in range(sample_count):
        state, obstacle, params = random_safe_pair(model_tag, kind, rng)
        ev = evaluate_barrier(kind, base_tag, state, obstacle, params)
        norms[i] = np.linalg.norm(ev.lgh)
    below = norms < threshold
    if np.all(below):
        classification = DEGENERATE
    elif not np.any(below):
        classification = NONDEGENERATE
    else:
        classification = MIXED
    return DegeneracyReport(
        model_tag=model_tag,
        kind=kind,
        sample_count=sample_count,
        min_lgh_norm=float(norms.min()),
        max_lgh_norm=float(norms.max()),
        fraction_below=float(below.mean()),
        classification=classification,
    )
