"""Fixed-step closed-loop simulation of filtered vehicles.

Per step: build the reference input, filter it through the barrier QP,
integrate the vehicle under the filtered input (zero-order hold), advance
the obstacles, and log everything. Obstacle centers are recomputed from the
initial state each step so logged centers equal initial + velocity * t to
machine precision. Runs stop at the configured duration or on the first
failure (penetration, infeasible QP, or non-finite state).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .barriers import BarrierKind, evaluate_barrier, project_out_axis
from .errors import NumericError
from .obstacles import Cylinder, Obstacle, ObstacleState, PlanarEllipse, advance, effective_radius
from .qp import INFEASIBLE, ClassK, FilterProblem, constraint_from_barrier, solve_active_set
from .reference import Gains, Target, pd_bicycle, pd_point_mass, pd_quadrotor, pd_unicycle
from .vehicles import dynamics_array, rotation_matrix, state_from_array

COMPLETED = "COMPLETED"
FAILED_INFEASIBLE = "FAILED-INFEASIBLE"
FAILED_PENETRATION = "FAILED-PENETRATION"
FAILED_NUMERIC = "FAILED-NUMERIC"

STEP_OK = "ok"
STEP_INFEASIBLE = "infeasible"
STEP_PENETRATION = "penetration"


@dataclass(frozen=True)
class SimConfig:
    duration: float
    dt: float = 0.01
    integrator: str = "rk4"
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0 or self.duration <= 0:
            raise ValueError("dt and duration must be > 0")
        if self.integrator not in ("rk4", "euler"):
            raise ValueError("integrator must be 'rk4' or 'euler'")


@dataclass(frozen=True)
class AgentSpec:
    model_tag: str
    initial_state: object
    target: Target
    radius: float
    params: object


@dataclass(frozen=True)
class Scenario:
    label: str
    model_tag: str
    params: object
    initial_state: object
    obstacles: tuple
    barrier: BarrierKind
    class_k: ClassK
    target: Target | None
    gains: Gains
    sim: SimConfig
    bounds: tuple | None = None
    start_unsafe: bool = False
    agents: tuple = ()


@dataclass(frozen=True)
class StepRecord:
    t: float
    state: object
    u_ref: np.ndarray
    u_star: np.ndarray
    h: np.ndarray            # per obstacle
    lfh: np.ndarray          # per obstacle
    lgh_u: np.ndarray        # per obstacle, lgh @ u_star
    distances: np.ndarray    # per obstacle ||p_rel||
    obstacle_centers: np.ndarray  # (n_obstacles, 3)
    status: str
    active_set: tuple


@dataclass
class TrajectoryLog:
    label: str
    model_tag: str
    records: list = field(default_factory=list)
    status: str = COMPLETED
    effective_radii: tuple = ()
    obstacle_ids: tuple = ()

    def min_h(self) -> float:
        values = [r.h for r in self.records if r.h.size]
        if not values:
            return math.inf
        return float(np.nanmin(np.array(values)))

    def min_margin(self) -> float:
        if not self.records or not self.effective_radii:
            return math.inf
        dists = np.array([r.distances for r in self.records])
        margins = dists - np.array(self.effective_radii)
        return float(margins.min())


@dataclass(frozen=True)
class CollisionReport:
    obstacle_ids: tuple
    min_margin: np.ndarray
    min_h: np.ndarray
    first_violation_time: float | None


# ---------------------------------------------------------------------------
# integrators


def rk4_core(deriv_fn, x: np.ndarray, dt: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta step of xdot = deriv_fn(x)."""
    k1 = deriv_fn(x)
    k2 = deriv_fn(x + 0.5 * dt * k1)
    k3 = deriv_fn(x + 0.5 * dt * k2)
    k4 = deriv_fn(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(model_tag: str, state, input_arr, params, dt: float):
    """RK4 step of the vehicle model with the input held constant."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    x = state.as_array()
    nxt = rk4_core(lambda arr: dynamics_array(model_tag, arr, input_arr, params), x, dt)
    if not np.all(np.isfinite(nxt)):
        raise NumericError(f"non-finite state after rk4 step: {nxt}")
    return state_from_array(model_tag, nxt)


def euler_step(model_tag: str, state, input_arr, params, dt: float):
    if dt <= 0:
        raise ValueError("dt must be > 0")
    x = state.as_array()
    nxt = x + dt * dynamics_array(model_tag, x, input_arr, params)
    if not np.all(np.isfinite(nxt)):
        raise NumericError(f"non-finite state after euler step: {nxt}")
    return state_from_array(model_tag, nxt)


def integrate_step(model_tag: str, state, input_arr, params, dt: float, method: str):
    if method == "rk4":
        return rk4_step(model_tag, state, input_arr, params, dt)
    return euler_step(model_tag, state, input_arr, params, dt)


# ---------------------------------------------------------------------------
# geometry helpers


def vehicle_reference_point(model_tag: str, state, params) -> np.ndarray:
    """Point the barrier measures distances from, in the obstacle frame
    dimension (2D for planar models, 3D for the quadrotor)."""
    if model_tag == "unicycle":
        return np.array(
            [
                state.x + params.l * math.cos(state.theta),
                state.y + params.l * math.sin(state.theta),
            ]
        )
    if model_tag == "bicycle":
        return np.array([state.x, state.y])
    if model_tag == "point_mass":
        return state.pos.copy()
    if model_tag == "quadrotor":
        rot = rotation_matrix(state.euler)
        return state.pos + params.offset * rot[:, 2]
    raise ValueError(f"unknown model tag {model_tag!r}")


def vehicle_obstacle_distance(model_tag: str, state, obstacle: Obstacle, params) -> float:
    """||p_rel|| as the constraint sees it (projected for cylinders)."""
    point = vehicle_reference_point(model_tag, state, params)
    if model_tag == "quadrotor":
        p_rel = obstacle.center - point
        if isinstance(obstacle.shape, Cylinder):
            p_rel = project_out_axis(p_rel, obstacle.shape.axis)
        return float(np.linalg.norm(p_rel))
    return float(np.linalg.norm(obstacle.center[:2] - point))


def reference_input(model_tag: str, state, target: Target, gains: Gains, params) -> np.ndarray:
    if model_tag == "unicycle":
        return pd_unicycle(state, target, gains).as_array()
    if model_tag == "bicycle":
        return pd_bicycle(state, target, gains, params).as_array()
    if model_tag == "point_mass":
        return pd_point_mass(state, target, gains)
    if model_tag == "quadrotor":
        return pd_quadrotor(state, target, gains, params).as_array()
    raise ValueError(f"unknown model tag {model_tag!r}")


# ---------------------------------------------------------------------------
# single-vehicle run


def _filter_step(scenario: Scenario, model_tag, state, obstacles, params, u_ref):
    evals = [
        evaluate_barrier(scenario.barrier, model_tag, state, ob, params)
        for ob in obstacles
    ]
    constraints = [constraint_from_barrier(ev, scenario.class_k) for ev in evals]
    problem = FilterProblem(u_ref=u_ref, constraints=constraints, bounds=scenario.bounds)
    return solve_active_set(problem), evals


def run(scenario: Scenario) -> TrajectoryLog:
    """Simulate one vehicle through the scenario and return its log."""
    params = scenario.params
    model_tag = scenario.model_tag
    state = scenario.initial_state
    initial_obstacles = list(scenario.obstacles)
    radii = tuple(
        effective_radius(ob.shape, getattr(params, "width", 0.0))
        for ob in initial_obstacles
    )
    log = TrajectoryLog(
        label=scenario.label,
        model_tag=model_tag,
        effective_radii=radii,
        obstacle_ids=tuple(ob.id for ob in initial_obstacles),
    )
    dt = scenario.sim.dt
    n_steps = int(round(scenario.sim.duration / dt))
    for k in range(n_steps + 1):
        t = k * dt
        obstacles = [advance(ob, t) for ob in initial_obstacles]
        centers = np.array([ob.center for ob in obstacles]) if obstacles else np.zeros((0, 3))
        dists = np.array(
            [
                vehicle_obstacle_distance(model_tag, state, ob, params)
                for ob in obstacles
            ]
        )
        u_ref = reference_input(model_tag, state, scenario.target, scenario.gains, params)
        if obstacles and bool(np.any(dists < np.array(radii))):
            log.records.append(
                StepRecord(
                    t=t,
                    state=state,
                    u_ref=u_ref,
                    u_star=u_ref.copy(),
                    h=_h_where_defined(scenario, model_tag, state, obstacles, params),
                    lfh=np.full(len(obstacles), np.nan),
                    lgh_u=np.full(len(obstacles), np.nan),
                    distances=dists,
                    obstacle_centers=centers,
                    status=STEP_PENETRATION,
                    active_set=(),
                )
            )
            log.status = FAILED_PENETRATION
            return log
        result, evals = _filter_step(scenario, model_tag, state, obstacles, params, u_ref)
        infeasible = result.status == INFEASIBLE
        u_star = u_ref.copy() if infeasible else result.u_star
        log.records.append(
            StepRecord(
                t=t,
                state=state,
                u_ref=u_ref,
                u_star=u_star,
                h=np.array([ev.h for ev in evals]),
                lfh=np.array([ev.lfh for ev in evals]),
                lgh_u=np.array([float(ev.lgh @ u_star) for ev in evals]),
                distances=dists,
                obstacle_centers=centers,
                status=STEP_INFEASIBLE if infeasible else STEP_OK,
                active_set=result.active_set,
            )
        )
        if infeasible:
            log.status = FAILED_INFEASIBLE
            if k < n_steps:
                # the unfiltered input is still applied for this step
                try:
                    integrate_step(
                        model_tag, state, u_star, params, dt, scenario.sim.integrator
                    )
                except (NumericError, ValueError):
                    pass
            return log
        if k == n_steps:
            break
        try:
            state = integrate_step(
                model_tag, state, u_star, params, dt, scenario.sim.integrator
            )
        except (NumericError, ValueError):
            log.status = FAILED_NUMERIC
            return log
    return log


def _h_where_defined(scenario, model_tag, state, obstacles, params) -> np.ndarray:
    values = np.full(len(obstacles), np.nan)
    for i, ob in enumerate(obstacles):
        try:
            values[i] = evaluate_barrier(
                scenario.barrier, model_tag, state, ob, params
            ).h
        except Exception:
            pass
    return values


# ---------------------------------------------------------------------------
# multi-agent run


def _agent_velocity(model_tag: str, state) -> np.ndarray:
    if model_tag == "point_mass":
        return state.vel.copy()
    return state.v * np.array([math.cos(state.theta), math.sin(state.theta)])


def _agent_as_obstacle(spec: AgentSpec, state, index: int) -> Obstacle:
    point = vehicle_reference_point(spec.model_tag, state, spec.params)
    vel = _agent_velocity(spec.model_tag, state)
    return Obstacle(
        shape=PlanarEllipse(c1=spec.radius, c2=spec.radius),
        state=ObstacleState(
            center=np.array([point[0], point[1], 0.0]),
            velocity=np.array([vel[0], vel[1], 0.0]),
        ),
        id=f"agent-{index}",
    )


def multi_agent_run(scenario: Scenario) -> list[TrajectoryLog]:
    """Synchronous multi-agent simulation; every agent runs its own filter.

    At each step an agent sees the true obstacles plus every other agent as
    a circular obstacle at its current position carrying its current
    velocity (constant-velocity extrapolation for the step).
    """
    agents = list(scenario.agents)
    if len(agents) < 2:
        raise ValueError("multi_agent_run requires at least two agents")
    states = [spec.initial_state for spec in agents]
    initial_obstacles = list(scenario.obstacles)
    logs = []
    for i, spec in enumerate(agents):
        others = [j for j in range(len(agents)) if j != i]
        radii = tuple(
            effective_radius(ob.shape, getattr(spec.params, "width", 0.0))
            for ob in initial_obstacles
        ) + tuple(
            effective_radius(
                PlanarEllipse(agents[j].radius, agents[j].radius),
                getattr(spec.params, "width", 0.0),
            )
            for j in others
        )
        logs.append(
            TrajectoryLog(
                label=f"{scenario.label}/agent{i}",
                model_tag=spec.model_tag,
                effective_radii=radii,
                obstacle_ids=tuple(ob.id for ob in initial_obstacles)
                + tuple(f"agent-{j}" for j in others),
            )
        )
    dt = scenario.sim.dt
    n_steps = int(round(scenario.sim.duration / dt))
    failed = False
    for k in range(n_steps + 1):
        t = k * dt
        world = [advance(ob, t) for ob in initial_obstacles]
        agent_obstacles = [
            _agent_as_obstacle(spec, states[i], i) for i, spec in enumerate(agents)
        ]
        u_stars = []
        step_status = []
        for i, spec in enumerate(agents):
            obstacles = world + [agent_obstacles[j] for j in range(len(agents)) if j != i]
            centers = (
                np.array([ob.center for ob in obstacles])
                if obstacles
                else np.zeros((0, 3))
            )
            dists = np.array(
                [
                    vehicle_obstacle_distance(spec.model_tag, states[i], ob, spec.params)
                    for ob in obstacles
                ]
            )
            u_ref = reference_input(
                spec.model_tag, states[i], spec.target, scenario.gains, spec.params
            )
            radii = np.array(logs[i].effective_radii)
            if obstacles and bool(np.any(dists < radii)):
                logs[i].records.append(
                    StepRecord(
                        t=t,
                        state=states[i],
                        u_ref=u_ref,
                        u_star=u_ref.copy(),
                        h=np.full(len(obstacles), np.nan),
                        lfh=np.full(len(obstacles), np.nan),
                        lgh_u=np.full(len(obstacles), np.nan),
                        distances=dists,
                        obstacle_centers=centers,
                        status=STEP_PENETRATION,
                        active_set=(),
                    )
                )
                logs[i].status = FAILED_PENETRATION
                failed = True
                u_stars.append(u_ref)
                step_status.append(STEP_PENETRATION)
                continue
            evals = [
                evaluate_barrier(scenario.barrier, spec.model_tag, states[i], ob, spec.params)
                for ob in obstacles
            ]
            constraints = [constraint_from_barrier(ev, scenario.class_k) for ev in evals]
            problem = FilterProblem(
                u_ref=u_ref, constraints=constraints, bounds=scenario.bounds
            )
            result = solve_active_set(problem)
            infeasible = result.status == INFEASIBLE
            u_star = u_ref.copy() if infeasible else result.u_star
            u_stars.append(u_star)
            step_status.append(STEP_INFEASIBLE if infeasible else STEP_OK)
            logs[i].records.append(
                StepRecord(
                    t=t,
                    state=states[i],
                    u_ref=u_ref,
                    u_star=u_star,
                    h=np.array([ev.h for ev in evals]),
                    lfh=np.array([ev.lfh for ev in evals]),
                    lgh_u=np.array([float(ev.lgh @ u_star) for ev in evals]),
                    distances=dists,
                    obstacle_centers=centers,
                    status=step_status[-1],
                    active_set=result.active_set,
                )
            )
            if infeasible:
                logs[i].status = FAILED_INFEASIBLE
                failed = True
        if failed or k == n_steps:
            break
        for i, spec in enumerate(agents):
            states[i] = integrate_step(
                spec.model_tag, states[i], u_stars[i], spec.params, dt,
                scenario.sim.integrator,
            )
    return logs


def collision_report(log: TrajectoryLog, obstacles) -> CollisionReport:
    """Minimum margins, minimum h, and first circle violation in a log."""
    if not log.records:
        raise ValueError("collision_report requires a non-empty log")
    n = len(log.effective_radii)
    dists = np.array([rec.distances for rec in log.records])
    h = np.array([rec.h for rec in log.records])
    times = np.array([rec.t for rec in log.records])
    radii = np.array(log.effective_radii)
    margins = dists - radii
    min_margin = margins.min(axis=0) if n else np.zeros(0)
    with np.errstate(invalid="ignore"):
        min_h = np.nanmin(h, axis=0) if n else np.zeros(0)
    first_violation = None
    if n:
        violated = np.any(dists < radii, axis=1)
        if np.any(violated):
            first_violation = float(times[int(np.argmax(violated))])
    return CollisionReport(
        obstacle_ids=log.obstacle_ids,
        min_margin=min_margin,
        min_h=min_h,
        first_violation_time=first_violation,
    )
