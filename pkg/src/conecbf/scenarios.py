"""Scenario documents: JSON schema validation and the built-in corpus.

A scenario file is a JSON object with keys

    label           optional string
    model           "unicycle" | "bicycle" | "point_mass" | "quadrotor"
    params          optional model-specific geometry/inertia overrides
    initial_state   model-specific state object (single-vehicle mode)
    agents          list of agent objects (multi-agent mode, planar models)
    obstacles       list of {id?, shape, center, velocity?}
    barrier         {kind, gamma (hocbf only), class_k_gamma?}
    target          {type: constant_velocity|waypoint, ...}
    gains           optional PD gain overrides
    bounds          optional {lo: [...], hi: [...]}, null entries unbounded
    sim             {duration, dt?, seed?, integrator?}
    flags           optional {start_unsafe}

Unknown keys are rejected at every level (SchemaError); physically
inconsistent documents (obstacle z on a planar model, cylinder velocity
with an axis component, initial state inside or on a collision course with
an obstacle without the start_unsafe flag) raise SemanticError.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .barriers import C3BF, ELLIPSE, HOCBF, BarrierKind, evaluate_barrier
from .errors import (
    AxisVelocityError,
    DomainError,
    ParseError,
    SchemaError,
    SemanticError,
)
from .obstacles import (
    Cylinder,
    Ellipsoid,
    Obstacle,
    ObstacleState,
    PlanarEllipse,
    effective_radius,
)
from .qp import ClassK
from .reference import ConstantVelocity, Gains, Waypoint
from .sim import AgentSpec, Scenario, SimConfig, vehicle_obstacle_distance
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

_PLANAR_MODELS = ("unicycle", "bicycle", "point_mass")
_MODELS = _PLANAR_MODELS + ("quadrotor",)


def _expect_keys(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object")
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        raise SchemaError(f"{path}.{unknown[0]}: unknown key")
    missing = sorted(set(required) - set(obj))
    if missing:
        raise SchemaError(f"{path}.{missing[0]}: missing required key")


def _number(obj, key, path, default=None):
    if key not in obj:
        if default is not None:
            return default
        raise SchemaError(f"{path}.{key}: missing required key")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{path}.{key}: expected a number")
    return float(value)


def _vector(obj, key, path, lengths, default=None):
    if key not in obj:
        if default is not None:
            return np.asarray(default, dtype=float)
        raise SchemaError(f"{path}.{key}: missing required key")
    value = obj[key]
    if not isinstance(value, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise SchemaError(f"{path}.{key}: expected a list of numbers")
    if len(value) not in lengths:
        raise SchemaError(f"{path}.{key}: expected length in {sorted(lengths)}")
    return np.asarray(value, dtype=float)


def _parse_params(model: str, doc, path):
    doc = doc or {}
    try:
        if model == "unicycle":
            _expect_keys(doc, path, (), ("l", "width"))
            return UnicycleParams(
                l=_number(doc, "l", path, 0.1), width=_number(doc, "width", path, 0.3)
            )
        if model == "bicycle":
            _expect_keys(doc, path, (), ("l_f", "l_r", "width", "beta_max"))
            return BicycleParams(
                l_f=_number(doc, "l_f", path, 0.15),
                l_r=_number(doc, "l_r", path, 0.15),
                width=_number(doc, "width", path, 0.2),
                beta_max=_number(doc, "beta_max", path, math.pi / 6),
            )
        if model == "point_mass":
            _expect_keys(doc, path, (), ("width",))
            return PointMassParams(width=_number(doc, "width", path, 0.0))
        _expect_keys(
            doc, path, (), ("mass", "inertia", "L", "c_tau", "l", "g", "width", "l_sign")
        )
        inertia = _vector(doc, "inertia", path, (3,), default=(5e-3, 5e-3, 9e-3))
        return QuadrotorParams(
            mass=_number(doc, "mass", path, 0.8),
            inertia_diag=tuple(inertia),
            L=_number(doc, "L", path, 0.2),
            c_tau=_number(doc, "c_tau", path, 0.01),
            l=_number(doc, "l", path, 0.05),
            g=_number(doc, "g", path, 9.81),
            width=_number(doc, "width", path, 0.3),
            l_sign=_number(doc, "l_sign", path, 1.0),
        )
    except DomainError as exc:
        raise SemanticError(f"{path}: {exc}") from exc


def _parse_state(model: str, doc, path):
    if doc is None:
        raise SchemaError(f"{path}: missing required key")
    if model == "unicycle":
        _expect_keys(doc, path, ("x", "y", "theta", "v"), ("omega",))
        return UnicycleState(
            x=_number(doc, "x", path),
            y=_number(doc, "y", path),
            theta=_number(doc, "theta", path),
            v=_number(doc, "v", path),
            omega=_number(doc, "omega", path, 0.0),
        )
    if model == "bicycle":
        _expect_keys(doc, path, ("x", "y", "theta", "v"))
        return BicycleState(
            x=_number(doc, "x", path),
            y=_number(doc, "y", path),
            theta=_number(doc, "theta", path),
            v=_number(doc, "v", path),
        )
    if model == "point_mass":
        _expect_keys(doc, path, ("x", "y", "vx", "vy"))
        return PointMassState(
            pos=[_number(doc, "x", path), _number(doc, "y", path)],
            vel=[_number(doc, "vx", path), _number(doc, "vy", path)],
        )
    _expect_keys(doc, path, ("pos", "vel"), ("euler", "omega"))
    return QuadrotorState(
        pos=_vector(doc, "pos", path, (3,)),
        vel=_vector(doc, "vel", path, (3,)),
        euler=_vector(doc, "euler", path, (3,), default=(0.0, 0.0, 0.0)),
        omega_body=_vector(doc, "omega", path, (3,), default=(0.0, 0.0, 0.0)),
    )


def _parse_shape(doc, path, model):
    _expect_keys(doc, path, ("type",), ("c1", "c2", "c3", "axis", "height", "radii"))
    kind = doc.get("type")
    try:
        if kind == "ellipse":
            _expect_keys(doc, path, ("type", "c1", "c2"))
            shape = PlanarEllipse(c1=_number(doc, "c1", path), c2=_number(doc, "c2", path))
        elif kind == "ellipsoid":
            _expect_keys(doc, path, ("type", "c1", "c2", "c3"))
            shape = Ellipsoid(
                c1=_number(doc, "c1", path),
                c2=_number(doc, "c2", path),
                c3=_number(doc, "c3", path),
            )
        elif kind == "cylinder":
            _expect_keys(doc, path, ("type", "axis", "height", "radii"))
            radii = _vector(doc, "radii", path, (2,))
            shape = Cylinder(
                axis=_vector(doc, "axis", path, (3,)),
                height=_number(doc, "height", path),
                radii=(float(radii[0]), float(radii[1])),
            )
        else:
            raise SchemaError(f"{path}.type: expected ellipse | ellipsoid | cylinder")
    except DomainError as exc:
        raise SemanticError(f"{path}: {exc}") from exc
    if model in _PLANAR_MODELS and not isinstance(shape, PlanarEllipse):
        raise SemanticError(f"{path}: planar model {model!r} requires an ellipse shape")
    if model == "quadrotor" and isinstance(shape, PlanarEllipse):
        raise SemanticError(f"{path}: quadrotor requires ellipsoid or cylinder shapes")
    return shape


def _parse_obstacle(doc, path, model, index):
    _expect_keys(doc, path, ("shape", "center"), ("velocity", "id"))
    shape = _parse_shape(doc["shape"], f"{path}.shape", model)
    center = _vector(doc, "center", path, (2, 3))
    velocity = _vector(doc, "velocity", path, (2, 3), default=(0.0, 0.0, 0.0))
    if model in _PLANAR_MODELS:
        for key, vec in (("center", center), ("velocity", velocity)):
            if vec.size == 3 and vec[2] != 0.0:
                raise SemanticError(
                    f"{path}.{key}: nonzero z on a planar model scenario"
                )
    else:
        for key, vec in (("center", center), ("velocity", velocity)):
            if vec.size != 3:
                raise SemanticError(f"{path}.{key}: quadrotor obstacles need 3 components")
    center3 = np.zeros(3)
    center3[: center.size] = center
    velocity3 = np.zeros(3)
    velocity3[: velocity.size] = velocity
    obstacle_id = doc.get("id", f"obstacle-{index}")
    if not isinstance(obstacle_id, str):
        raise SchemaError(f"{path}.id: expected a string")
    try:
        return Obstacle(
            shape=shape,
            state=ObstacleState(center=center3, velocity=velocity3),
            id=obstacle_id,
        )
    except AxisVelocityError as exc:
        raise SemanticError(f"{path}.velocity: {exc}") from exc


def _parse_target(doc, path):
    if doc is None:
        raise SchemaError(f"{path}: missing required key")
    _expect_keys(doc, path, ("type",), ("speed", "heading", "point"))
    kind = doc.get("type")
    if kind == "constant_velocity":
        _expect_keys(doc, path, ("type", "speed"), ("heading",))
        return ConstantVelocity(
            speed=_number(doc, "speed", path), heading=_number(doc, "heading", path, 0.0)
        )
    if kind == "waypoint":
        _expect_keys(doc, path, ("type", "point", "speed"))
        return Waypoint(point=_vector(doc, "point", path, (2, 3)), speed=_number(doc, "speed", path))
    raise SchemaError(f"{path}.type: expected constant_velocity | waypoint")


def _parse_gains(doc, path):
    doc = doc or {}
    fields = ("kp_v", "kp_heading", "kd_heading", "pos_kp", "pos_kd", "att_kp", "att_kd")
    _expect_keys(doc, path, (), fields)
    defaults = Gains()
    return Gains(
        **{f: _number(doc, f, path, getattr(defaults, f)) for f in fields}
    )


def _parse_bounds(doc, path, m):
    if doc is None:
        return None
    _expect_keys(doc, path, (), ("lo", "hi"))

    def side(key):
        if key not in doc or doc[key] is None:
            return [None] * m
        value = doc[key]
        if not isinstance(value, list) or len(value) != m:
            raise SchemaError(f"{path}.{key}: expected a list of {m} numbers/nulls")
        out = []
        for v in value:
            if v is None:
                out.append(None)
            elif isinstance(v, (int, float)) and not isinstance(v, bool):
                out.append(float(v))
            else:
                raise SchemaError(f"{path}.{key}: expected numbers or nulls")
        return out

    lo, hi = side("lo"), side("hi")
    for j in range(m):
        if lo[j] is not None and hi[j] is not None and lo[j] > hi[j]:
            raise SemanticError(f"{path}: lo[{j}] > hi[{j}]")
    return (lo, hi)


def _parse_barrier(doc, path):
    if doc is None:
        raise SchemaError(f"{path}: missing required key")
    _expect_keys(doc, path, ("kind",), ("gamma", "class_k_gamma"))
    kind = doc.get("kind")
    if kind not in (C3BF, HOCBF, ELLIPSE):
        raise SchemaError(f"{path}.kind: expected c3bf | hocbf | ellipse")
    gamma = None
    if kind == HOCBF:
        if "gamma" not in doc:
            raise SchemaError(f"{path}.gamma: required when kind is 'hocbf'")
        gamma = _number(doc, "gamma", path)
        if gamma <= 0:
            raise SemanticError(f"{path}.gamma: must be > 0")
    elif "gamma" in doc:
        raise SchemaError(f"{path}.gamma: only valid when kind is 'hocbf'")
    class_k_gamma = _number(doc, "class_k_gamma", path, 1.0)
    if class_k_gamma <= 0:
        raise SemanticError(f"{path}.class_k_gamma: must be > 0")
    return BarrierKind(kind, gamma=gamma), ClassK(gamma=class_k_gamma)


def _parse_sim(doc, path):
    if doc is None:
        raise SchemaError(f"{path}: missing required key")
    _expect_keys(doc, path, ("duration",), ("dt", "seed", "integrator"))
    integrator = doc.get("integrator", "rk4")
    if integrator not in ("rk4", "euler"):
        raise SchemaError(f"{path}.integrator: expected rk4 | euler")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise SchemaError(f"{path}.seed: expected an integer")
    try:
        return SimConfig(
            duration=_number(doc, "duration", path),
            dt=_number(doc, "dt", path, 0.01),
            integrator=integrator,
            seed=seed,
        )
    except ValueError as exc:
        raise SemanticError(f"{path}: {exc}") from exc


def _check_initial_safety(scenario: Scenario):
    """Reject starts inside an obstacle, and unsafe starts without the flag."""
    checks = []
    if scenario.agents:
        agents = list(scenario.agents)
        from .sim import _agent_as_obstacle  # circular at module load otherwise

        virtual = [
            _agent_as_obstacle(spec, spec.initial_state, i)
            for i, spec in enumerate(agents)
        ]
        for i, spec in enumerate(agents):
            obstacles = list(scenario.obstacles) + [
                virtual[j] for j in range(len(agents)) if j != i
            ]
            checks.append((spec.model_tag, spec.initial_state, spec.params, obstacles))
    else:
        checks.append(
            (
                scenario.model_tag,
                scenario.initial_state,
                scenario.params,
                list(scenario.obstacles),
            )
        )
    for model, state, params, obstacles in checks:
        for ob in obstacles:
            r = effective_radius(ob.shape, getattr(params, "width", 0.0))
            dist = vehicle_obstacle_distance(model, state, ob, params)
            if dist <= r:
                raise SemanticError(
                    f"initial state is inside obstacle {ob.id!r} "
                    f"(distance {dist:.3f} <= effective radius {r:.3f})"
                )
            if scenario.start_unsafe:
                continue
            h0 = evaluate_barrier(scenario.barrier, model, state, ob, params).h
            if h0 < 0:
                raise SemanticError(
                    f"initial barrier value h = {h0:.4f} < 0 for obstacle {ob.id!r};"
                    " set flags.start_unsafe to allow this"
                )


def load_scenario(doc: dict, label: str | None = None) -> Scenario:
    """Validate a scenario document and build the Scenario value."""
    top_keys = (
        "label",
        "model",
        "params",
        "initial_state",
        "agents",
        "obstacles",
        "barrier",
        "target",
        "gains",
        "bounds",
        "sim",
        "flags",
    )
    _expect_keys(doc, "scenario", ("model", "obstacles", "barrier", "sim"), top_keys)
    model = doc.get("model")
    if model not in _MODELS:
        raise SchemaError("scenario.model: expected one of " + ", ".join(_MODELS))
    flags = doc.get("flags") or {}
    _expect_keys(flags, "scenario.flags", (), ("start_unsafe",))
    start_unsafe = flags.get("start_unsafe", False)
    if not isinstance(start_unsafe, bool):
        raise SchemaError("scenario.flags.start_unsafe: expected a boolean")

    if not isinstance(doc.get("obstacles"), list):
        raise SchemaError("scenario.obstacles: expected a list")
    obstacles = tuple(
        _parse_obstacle(ob, f"scenario.obstacles[{i}]", model, i)
        for i, ob in enumerate(doc["obstacles"])
    )
    barrier, class_k = _parse_barrier(doc.get("barrier"), "scenario.barrier")
    if barrier.kind == HOCBF and model == "bicycle":
        raise SemanticError("scenario.barrier: hocbf baseline is not defined for the bicycle")
    if barrier.kind == HOCBF and any(isinstance(o.shape, Cylinder) for o in obstacles):
        raise SemanticError("scenario.barrier: hocbf baseline requires sphere-like obstacles")
    if barrier.kind == ELLIPSE and model == "point_mass":
        raise SemanticError("scenario.barrier: ellipse diagnostic is not defined for point_mass")
    sim = _parse_sim(doc.get("sim"), "scenario.sim")
    gains = _parse_gains(doc.get("gains"), "scenario.gains")

    agents_doc = doc.get("agents")
    if agents_doc is not None:
        if doc.get("initial_state") is not None or doc.get("target") is not None:
            raise SchemaError(
                "scenario.agents: multi-agent scenarios must not set initial_state/target"
            )
        if not isinstance(agents_doc, list) or len(agents_doc) < 2:
            raise SchemaError("scenario.agents: expected a list of at least two agents")
        agents = []
        for i, agent_doc in enumerate(agents_doc):
            path = f"scenario.agents[{i}]"
            _expect_keys(
                agent_doc,
                path,
                ("model", "initial_state", "target", "radius"),
                ("params",),
            )
            agent_model = agent_doc.get("model")
            if agent_model not in _PLANAR_MODELS:
                raise SchemaError(f"{path}.model: agents must use planar models")
            params = _parse_params(agent_model, agent_doc.get("params"), f"{path}.params")
            agents.append(
                AgentSpec(
                    model_tag=agent_model,
                    initial_state=_parse_state(
                        agent_model, agent_doc.get("initial_state"), f"{path}.initial_state"
                    ),
                    target=_parse_target(agent_doc.get("target"), f"{path}.target"),
                    radius=_number(agent_doc, "radius", path),
                    params=params,
                )
            )
        bounds = _parse_bounds(doc.get("bounds"), "scenario.bounds", input_dim(model))
        scenario = Scenario(
            label=label or doc.get("label", "scenario"),
            model_tag=model,
            params=_parse_params(model, doc.get("params"), "scenario.params"),
            initial_state=None,
            obstacles=obstacles,
            barrier=barrier,
            class_k=class_k,
            target=None,
            gains=gains,
            sim=sim,
            bounds=bounds,
            start_unsafe=start_unsafe,
            agents=tuple(agents),
        )
        _check_initial_safety(scenario)
        return scenario

    params = _parse_params(model, doc.get("params"), "scenario.params")
    initial_state = _parse_state(model, doc.get("initial_state"), "scenario.initial_state")
    target = _parse_target(doc.get("target"), "scenario.target")
    bounds = _parse_bounds(doc.get("bounds"), "scenario.bounds", input_dim(model))
    scenario = Scenario(
        label=label or doc.get("label", "scenario"),
        model_tag=model,
        params=params,
        initial_state=initial_state,
        obstacles=obstacles,
        barrier=barrier,
        class_k=class_k,
        target=target,
        gains=gains,
        sim=sim,
        bounds=bounds,
        start_unsafe=start_unsafe,
    )
    _check_initial_safety(scenario)
    return scenario


def load_scenario_file(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("scenario: expected a JSON object")
    return load_scenario(doc)


# ---------------------------------------------------------------------------
# built-in scenario corpus


def _static_ellipse(center, c=0.6, oid="obstacle"):
    return {
        "id": oid,
        "shape": {"type": "ellipse", "c1": c, "c2": c},
        "center": list(center),
        "velocity": [0.0, 0.0],
    }


def _moving_ellipse(center, velocity, c=0.6, oid="obstacle"):
    return {
        "id": oid,
        "shape": {"type": "ellipse", "c1": c, "c2": c},
        "center": list(center),
        "velocity": list(velocity),
    }


def builtin_scenarios() -> dict:
    """The scenario corpus, as schema-level documents keyed by name.

    Every safe-start scenario aims its reference target at (or through) the
    obstacle so the filter has to produce the avoidance behavior; starts are
    chosen with the relative velocity outside the collision cone (h(0) >= 0).
    """
    uni = {"l": 0.1, "width": 0.4}
    bic = {"l_f": 0.15, "l_r": 0.15, "width": 0.2}
    quad = {"width": 0.3}
    sim12 = {"dt": 0.01, "duration": 12.0, "seed": 0}
    corpus = {}

    corpus["unicycle-static-turn"] = {
        "model": "unicycle",
        "params": uni,
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 1.0, "omega": 0},
        "obstacles": [_static_ellipse([5.0, 0.9])],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.2, "heading": math.atan2(0.9, 5.0)},
        "sim": sim12,
    }
    corpus["unicycle-static-brake"] = {
        "model": "unicycle",
        "params": {"l": 0.02, "width": 0.4},
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 1.0, "omega": 0},
        "obstacles": [_static_ellipse([5.0, 0.85])],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.4, "heading": math.atan2(0.85, 5.0)},
        "sim": sim12,
    }
    corpus["unicycle-head-on-reverse"] = {
        "model": "unicycle",
        "params": uni,
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 0.0, "omega": 0},
        "obstacles": [_moving_ellipse([8.0, 0.85], [-1.2, 0.0])],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 0.6, "heading": math.atan2(0.85, 8.0)},
        "sim": sim12,
    }
    corpus["unicycle-overtake"] = {
        "model": "unicycle",
        "params": uni,
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 1.5, "omega": 0},
        "obstacles": [_moving_ellipse([4.0, 0.85], [0.5, 0.0])],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.5, "heading": math.atan2(0.85, 4.0)},
        "sim": {"dt": 0.01, "duration": 15.0, "seed": 0},
    }
    corpus["unicycle-perpendicular"] = {
        "model": "unicycle",
        "params": uni,
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 0.3, "omega": 0},
        "obstacles": [_moving_ellipse([5.0, -6.0], [0.0, 1.0])],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 0.85, "heading": 0.0},
        "sim": {"dt": 0.01, "duration": 14.0, "seed": 0},
    }

    corpus["bicycle-static-turn"] = {
        "model": "bicycle",
        "params": bic,
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 1.0},
        "obstacles": [_static_ellipse([5.0, 0.8])],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.2, "heading": math.atan2(0.8, 5.0)},
        "sim": sim12,
    }
    corpus["bicycle-static-brake"] = {
        "model": "bicycle",
        "params": bic,
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 1.0},
        "obstacles": [_static_ellipse([5.0, 0.75])],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.4, "heading": math.atan2(0.75, 5.0)},
        "sim": sim12,
    }
    corpus["bicycle-head-on-reverse"] = {
        "model": "bicycle",
        "params": bic,
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 0.5},
        "obstacles": [_moving_ellipse([8.0, 0.75], [-1.2, 0.0])],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 0.6, "heading": math.atan2(0.75, 8.0)},
        "sim": sim12,
    }
    corpus["bicycle-overtake"] = {
        "model": "bicycle",
        "params": bic,
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 1.5},
        "obstacles": [_moving_ellipse([4.0, 0.75], [0.5, 0.0])],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.5, "heading": math.atan2(0.75, 4.0)},
        "sim": {"dt": 0.01, "duration": 15.0, "seed": 0},
    }
    corpus["bicycle-perpendicular"] = {
        "model": "bicycle",
        "params": bic,
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 0.3},
        "obstacles": [_moving_ellipse([5.0, -6.0], [0.0, 1.0])],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 0.85, "heading": 0.0},
        "sim": {"dt": 0.01, "duration": 14.0, "seed": 0},
    }

    corpus["point-mass-head-on"] = {
        "model": "point_mass",
        "initial_state": {"x": 0, "y": 0, "vx": 0.0, "vy": 0.0},
        "obstacles": [_moving_ellipse([8.0, 1.05], [-1.5, 0.0], c=1.0)],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 0.8, "heading": math.atan2(1.05, 8.0)},
        "sim": sim12,
    }
    corpus["point-mass-crossing"] = {
        "model": "point_mass",
        "initial_state": {"x": 0, "y": 0, "vx": 1.0, "vy": 0.0},
        "obstacles": [_moving_ellipse([6.0, -7.6], [0.0, 1.0], c=1.0)],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 0.79, "heading": 0.0},
        "sim": {"dt": 0.01, "duration": 14.0, "seed": 0},
    }

    corpus["quadrotor-static-sphere"] = {
        "model": "quadrotor",
        "params": quad,
        "initial_state": {"pos": [0, 0, 1], "vel": [1, 0, 0]},
        "obstacles": [
            {
                "shape": {"type": "ellipsoid", "c1": 0.5, "c2": 0.5, "c3": 0.5},
                "center": [5.0, 0.8, 1.0],
                "velocity": [0.0, 0.0, 0.0],
            }
        ],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.0, "heading": math.atan2(0.8, 5.0)},
        "sim": sim12,
    }
    corpus["quadrotor-static-cylinder"] = {
        "model": "quadrotor",
        "params": quad,
        "initial_state": {"pos": [0, 0, 1], "vel": [1, 0, 0]},
        "obstacles": [
            {
                "shape": {
                    "type": "cylinder",
                    "axis": [0.0, 0.0, 1.0],
                    "height": 4.0,
                    "radii": [0.5, 0.5],
                },
                "center": [5.0, 0.8, 2.0],
                "velocity": [0.0, 0.0, 0.0],
            }
        ],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.0, "heading": math.atan2(0.8, 5.0)},
        "sim": sim12,
    }
    corpus["quadrotor-moving-sphere"] = {
        "model": "quadrotor",
        "params": quad,
        "initial_state": {"pos": [0, 0, 1], "vel": [0, 0, 0]},
        "obstacles": [
            {
                "shape": {"type": "ellipsoid", "c1": 0.5, "c2": 0.5, "c3": 0.5},
                "center": [8.0, 0.75, 1.0],
                "velocity": [-1.5, 0.0, 0.0],
            }
        ],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 0.8, "heading": math.atan2(0.75, 8.0)},
        "sim": sim12,
    }

    corpus["multi-obstacle"] = {
        "model": "point_mass",
        "initial_state": {"x": 0, "y": 0, "vx": 0.0, "vy": 0.0},
        "obstacles": [
            _static_ellipse([3.0, 0.15], c=0.8, oid="first"),
            _static_ellipse([6.0, -0.5], c=0.8, oid="second"),
            _static_ellipse([9.0, 0.4], c=0.8, oid="third"),
        ],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.2, "heading": 0.0},
        "sim": {"dt": 0.01, "duration": 15.0, "seed": 0},
    }
    corpus["multi-agent"] = {
        "model": "point_mass",
        "obstacles": [],
        "barrier": {"kind": "c3bf"},
        "agents": [
            {
                "model": "point_mass",
                "initial_state": {"x": 0, "y": 0.25, "vx": 1.0, "vy": 0.0},
                "target": {
                    "type": "constant_velocity",
                    "speed": 1.0,
                    "heading": math.atan2(-0.5, 12.0),
                },
                "radius": 0.45,
            },
            {
                "model": "point_mass",
                "initial_state": {"x": 12.0, "y": -0.25, "vx": -1.0, "vy": 0.0},
                "target": {
                    "type": "constant_velocity",
                    "speed": 1.0,
                    "heading": math.pi - math.atan2(-0.5, 12.0),
                },
                "radius": 0.45,
            },
        ],
        "sim": sim12,
    }

    corpus["unsafe-start-unicycle"] = {
        "model": "unicycle",
        "params": {"l": 0.1, "width": 0.4},
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 1.0, "omega": 0},
        "obstacles": [_static_ellipse([5.0, 0.0], c=2.8)],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.0, "heading": 0.0},
        "sim": {"dt": 0.01, "duration": 10.0, "seed": 0},
        "flags": {"start_unsafe": True},
    }
    corpus["unsafe-start-point-mass"] = {
        "model": "point_mass",
        "initial_state": {"x": 0, "y": 0, "vx": 1.0, "vy": 0.0},
        "obstacles": [_static_ellipse([5.0, 0.0], c=3.0)],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.0, "heading": 0.0},
        "sim": {"dt": 0.01, "duration": 10.0, "seed": 0},
        "flags": {"start_unsafe": True},
    }
    corpus["unsafe-start-quadrotor"] = {
        "model": "quadrotor",
        "params": quad,
        "initial_state": {"pos": [0, 0, 1], "vel": [0, 0, 0]},
        "obstacles": [
            {
                "shape": {"type": "ellipsoid", "c1": 2.85, "c2": 2.85, "c3": 2.85},
                "center": [5.0, 0.0, 1.0],
                "velocity": [-1.0, 0.0, 0.0],
            }
        ],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "waypoint", "point": [0, 0, 1], "speed": 0.0},
        "sim": {"dt": 0.01, "duration": 10.0, "seed": 0},
        "flags": {"start_unsafe": True},
    }

    # Conservativeness comparison: an obstacle on a true collision course at
    # 4.5 m/s (>= 4 cos(phi) at range 5, r = 1). The cone filter recovers
    # from the slightly unsafe start (kappa gain 4 bounds the violation
    # decay) and dodges; the square-root baseline starts with h about -17
    # and its constraint cannot be met within the actuation bounds.
    corpus["high-speed-approach"] = {
        "model": "point_mass",
        "initial_state": {"x": 0, "y": 0, "vx": 0.0, "vy": 0.0},
        "obstacles": [
            _moving_ellipse([4.918333050943175, 0.9], [-4.5, 0.0], c=1.0)
        ],
        "barrier": {"kind": "c3bf", "class_k_gamma": 4.0},
        "target": {"type": "constant_velocity", "speed": 0.0, "heading": 0.0},
        "bounds": {"lo": [-2.5, -2.5], "hi": [2.5, 2.5]},
        "sim": {"dt": 0.01, "duration": 6.0, "seed": 0},
        "flags": {"start_unsafe": True},
    }
    return corpus


CORPUS_SAFE_SET = (
    "unicycle-static-turn",
    "unicycle-static-brake",
    "unicycle-head-on-reverse",
    "unicycle-overtake",
    "unicycle-perpendicular",
    "bicycle-static-turn",
    "bicycle-static-brake",
    "bicycle-head-on-reverse",
    "bicycle-overtake",
    "bicycle-perpendicular",
    "point-mass-head-on",
    "point-mass-crossing",
    "quadrotor-static-sphere",
    "quadrotor-static-cylinder",
    "quadrotor-moving-sphere",
    "multi-obstacle",
    "multi-agent",
)

CORPUS_UNSAFE_SET = (
    "unsafe-start-unicycle",
    "unsafe-start-point-mass",
    "unsafe-start-quadrotor",
)


def load_builtin(name: str) -> Scenario:
    corpus = builtin_scenarios()
    if name not in corpus:
        raise KeyError(f"unknown builtin scenario {name!r}")
    return load_scenario(corpus[name], label=name)
