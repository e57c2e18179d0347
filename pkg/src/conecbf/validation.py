"""Named property and acceptance checks, runnable via `conecbf validate`.

Each check returns a CheckResult; `run_all` prints one pass/fail line per
check and succeeds only if every check passes. The same functions back the
pytest acceptance suite so the CLI gate and the test gate agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import csvlog
from .barriers import (
    C3BF,
    DEGENERATE,
    ELLIPSE,
    HOCBF,
    NO_CONE_SIGNAL,
    NONDEGENERATE,
    BarrierKind,
    cone_terms,
    evaluate_barrier,
    hocbf_effective_angle,
    lgh_degeneracy_report,
    numeric_hdot,
    project_out_axis,
)
from .obstacles import PlanarEllipse, advance, classify_shape, effective_radius
from .qp import (
    INFEASIBLE,
    OPTIMAL,
    ClassK,
    FilterProblem,
    LinearConstraint,
    constraint_from_barrier,
    solve_active_set,
    solve_single_constraint,
)
from .sampling import (
    random_input,
    random_obstacle,
    random_params,
    random_safe_pair,
    random_state,
    split_variant,
)
from .scenarios import (
    CORPUS_SAFE_SET,
    CORPUS_UNSAFE_SET,
    builtin_scenarios,
    load_scenario,
)
from .sim import (
    COMPLETED,
    FAILED_INFEASIBLE,
    FAILED_PENETRATION,
    multi_agent_run,
    rk4_core,
    run,
)
from .vehicles import (
    QuadrotorInput,
    QuadrotorParams,
    QuadrotorState,
    dynamics_array,
    euler_rate_map,
    quadrotor_dynamics,
    rotation_matrix,
    skew,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _result(name, passed, detail=""):
    return CheckResult(name=name, passed=bool(passed), detail=detail)


# ---------------------------------------------------------------------------
# vehicle model properties


def check_dynamics_affine(seed=0, samples=200) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for tag in ("unicycle", "bicycle", "point_mass", "quadrotor"):
        for _ in range(samples):
            state = random_state(tag, rng)
            params = random_params(tag, rng)
            u1 = random_input(tag, rng) * 0.45
            u2 = random_input(tag, rng) * 0.45
            x = state.as_array()
            lhs = dynamics_array(tag, x, u1 + u2, params) - dynamics_array(tag, x, u2, params)
            rhs = dynamics_array(tag, x, u1, params) - dynamics_array(
                tag, x, np.zeros_like(u1), params
            )
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return _result("dynamics-affine-in-input", worst < 1e-12, f"worst={worst:.2e}")


def check_rotation_orthonormal(seed=0, samples=1000) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_orth = worst_det = 0.0
    for _ in range(samples):
        euler = np.array(
            [rng.uniform(-3, 3), rng.uniform(-1.45, 1.45), rng.uniform(-3, 3)]
        )
        rot = rotation_matrix(euler)
        worst_orth = max(worst_orth, float(np.max(np.abs(rot.T @ rot - np.eye(3)))))
        worst_det = max(worst_det, abs(float(np.linalg.det(rot)) - 1.0))
    ok = worst_orth < 1e-12 and worst_det < 1e-12
    return _result("rotation-orthonormal", ok, f"orth={worst_orth:.2e} det={worst_det:.2e}")


def check_euler_rate_map(seed=0, samples=500) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_inv = worst_cons = 0.0
    for _ in range(samples):
        euler = np.array(
            [rng.uniform(-3, 3), rng.uniform(-1.4, 1.4), rng.uniform(-3, 3)]
        )
        w, w_inv = euler_rate_map(euler)
        worst_inv = max(worst_inv, float(np.max(np.abs(w @ w_inv - np.eye(3)))))
        omega = rng.uniform(-1, 1, 3)
        rates = w_inv @ omega
        eps = 1e-6
        num = (rotation_matrix(euler + eps * rates) - rotation_matrix(euler - eps * rates)) / (
            2 * eps
        )
        ana = rotation_matrix(euler) @ skew(omega)
        scale = max(1.0, float(np.max(np.abs(ana))))
        worst_cons = max(worst_cons, float(np.max(np.abs(num - ana))) / scale)
    ok = worst_inv < 1e-10 and worst_cons < 1e-5
    return _result("euler-rate-map", ok, f"inv={worst_inv:.2e} consistency={worst_cons:.2e}")


def check_hover_equilibrium() -> CheckResult:
    params = QuadrotorParams()
    state = QuadrotorState(pos=[0, 0, 1], vel=[0.3, -0.2, 0.1], euler=[0, 0, 0], omega_body=[0, 0, 0])
    f = params.mass * params.g / 4.0
    deriv = quadrotor_dynamics(state, QuadrotorInput(f, f, f, f), params)
    kinematic = np.zeros(12)
    kinematic[:3] = state.vel
    worst = float(np.max(np.abs(deriv - kinematic)))
    return _result("quadrotor-hover-equilibrium", worst < 1e-12, f"worst={worst:.2e}")


# ---------------------------------------------------------------------------
# obstacle properties


def check_radius_monotone(seed=0, samples=500) -> CheckResult:
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(samples):
        c1, c2 = rng.uniform(0.2, 2.0, 2)
        w = rng.uniform(0.0, 1.0)
        base = effective_radius(PlanarEllipse(c1, c2), w)
        grow = rng.uniform(0.0, 1.0, 3)
        ok = ok and effective_radius(PlanarEllipse(c1 + grow[0], c2), w) >= base
        ok = ok and effective_radius(PlanarEllipse(c1, c2 + grow[1]), w) >= base
        ok = ok and effective_radius(PlanarEllipse(c1, c2), w + grow[2]) >= base
    return _result("effective-radius-monotone", ok)


def check_advance_linear(seed=0, samples=200) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        ob = random_obstacle("point_mass", rng, moving=True)
        dt = rng.uniform(0.0, 2.0)
        one = advance(advance(ob, dt), dt).center
        two = advance(ob, 2 * dt).center
        worst = max(worst, float(np.max(np.abs(one - two))))
    return _result("obstacle-advance-compose", worst < 1e-12, f"worst={worst:.2e}")


# ---------------------------------------------------------------------------
# barrier properties


def check_cone_membership(seed=0, samples=10_000) -> CheckResult:
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(samples):
        p = rng.uniform(-8, 8, 2)
        r = rng.uniform(0.2, 2.0)
        if np.linalg.norm(p) <= r * 1.05:
            continue
        v = rng.uniform(-3, 3, 2)
        if np.linalg.norm(v) < 1e-9:
            continue
        h, cos_phi = cone_terms(p, v, r)
        cos_angle = float(p @ v) / (np.linalg.norm(p) * np.linalg.norm(v))
        ok = ok and ((h >= 0) == (cos_angle >= -cos_phi - 1e-12) or abs(h) < 1e-9)
    return _result("cone-membership-equivalence", ok)


def check_cone_scale_covariance(seed=0, samples=10_000) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        p = rng.uniform(-8, 8, 2)
        r = rng.uniform(0.2, 2.0)
        if np.linalg.norm(p) <= r * 1.05:
            continue
        v = rng.uniform(-3, 3, 2)
        lam = rng.uniform(0.1, 5.0)
        h1, _ = cone_terms(p, v, r)
        h2, _ = cone_terms(p, lam * v, r)
        worst = max(worst, abs(h2 - lam * h1) / max(1.0, abs(h2)))
    return _result("cone-scale-covariance", worst < 1e-12, f"worst={worst:.2e}")


_DERIVATIVE_PAIRS = (
    ("unicycle", BarrierKind(C3BF)),
    ("bicycle", BarrierKind(C3BF)),
    ("point_mass", BarrierKind(C3BF)),
    ("quadrotor_sphere", BarrierKind(C3BF)),
    ("quadrotor_projection", BarrierKind(C3BF)),
    ("unicycle", BarrierKind(HOCBF, 1.0)),
    ("point_mass", BarrierKind(HOCBF, 0.7)),
    ("quadrotor_sphere", BarrierKind(HOCBF, 1.3)),
    ("unicycle", BarrierKind(ELLIPSE)),
    ("bicycle", BarrierKind(ELLIPSE)),
    ("quadrotor_sphere", BarrierKind(ELLIPSE)),
)


def check_derivative_correctness(seed=0, samples=1000, barrier_fn=None) -> list[CheckResult]:
    """Acceptance 1: |numeric hdot - (lfh + lgh u)| <= 1e-4 relative."""
    results = []
    for tag, kind in _DERIVATIVE_PAIRS:
        rng = np.random.default_rng(seed)
        base, _ = split_variant(tag)
        worst = 0.0
        for _ in range(samples):
            state, obstacle, params = random_safe_pair(tag, kind, rng)
            u = random_input(base, rng)
            ev = evaluate_barrier(kind, base, state, obstacle, params)
            analytic = ev.lfh + float(ev.lgh @ u)
            numeric = numeric_hdot(base, kind, state, obstacle, u, 1e-6, params,
                                   barrier_fn=barrier_fn)
            worst = max(worst, abs(numeric - analytic) / max(1.0, abs(analytic)))
        label = kind.kind if kind.gamma is None else f"{kind.kind}({kind.gamma})"
        results.append(
            _result(f"derivative-correctness[{tag},{label}]", worst <= 1e-4, f"worst={worst:.2e}")
        )
    return results


def check_nondegeneracy(seed=0, samples=10_000) -> list[CheckResult]:
    """Acceptance 2: cone-barrier input rows stay bounded away from zero."""
    results = []
    kind = BarrierKind(C3BF)
    for tag in ("unicycle", "point_mass", "quadrotor_sphere", "quadrotor_projection"):
        rng = np.random.default_rng(seed)
        base, _ = split_variant(tag)
        min_norm = math.inf
        for _ in range(samples):
            state, obstacle, params = random_safe_pair(tag, kind, rng, min_v_rel=1e-6)
            ev = evaluate_barrier(kind, base, state, obstacle, params)
            min_norm = min(min_norm, float(np.linalg.norm(ev.lgh)))
        results.append(
            _result(f"nondegenerate-lgh[{tag}]", min_norm > 1e-10, f"min={min_norm:.2e}")
        )
    return results


def check_ellipse_exact_zero(seed=0, samples=10_000) -> list[CheckResult]:
    results = []
    for tag, dim in (("unicycle", 2), ("quadrotor_sphere", 4)):
        rng = np.random.default_rng(seed)
        base, _ = split_variant(tag)
        ok = True
        for _ in range(samples):
            state, obstacle, params = random_safe_pair(tag, BarrierKind(ELLIPSE), rng)
            ev = evaluate_barrier(BarrierKind(ELLIPSE), base, state, obstacle, params)
            ok = ok and ev.lgh.shape == (dim,) and not np.any(ev.lgh)
        results.append(_result(f"ellipse-lgh-exact-zero[{tag}]", ok))
    return results


def check_table_classifications(seed=0, samples=400) -> CheckResult:
    """Acceptance 2: degeneracy report matches the published comparison."""
    expectations = (
        ("unicycle", BarrierKind(ELLIPSE), (DEGENERATE,)),
        ("quadrotor_sphere", BarrierKind(ELLIPSE), (DEGENERATE,)),
        ("unicycle", BarrierKind(C3BF), (NONDEGENERATE,)),
        ("point_mass", BarrierKind(C3BF), (NONDEGENERATE,)),
        ("quadrotor_sphere", BarrierKind(C3BF), (NONDEGENERATE,)),
        ("quadrotor_projection", BarrierKind(C3BF), (NONDEGENERATE,)),
        ("bicycle", BarrierKind(C3BF), (NONDEGENERATE,)),
    )
    details = []
    ok = True
    for tag, kind, allowed in expectations:
        report = lgh_degeneracy_report(tag, kind, samples, seed)
        ok = ok and report.classification in allowed
        details.append(f"{tag}/{kind.kind}={report.classification}")
    # bicycle ellipse: only the slip column is ever nonzero
    rng = np.random.default_rng(seed)
    slip_only = True
    for _ in range(samples):
        state, obstacle, params = random_safe_pair("bicycle", BarrierKind(ELLIPSE), rng)
        ev = evaluate_barrier(BarrierKind(ELLIPSE), "bicycle", state, obstacle, params)
        slip_only = slip_only and ev.lgh[0] == 0.0
    ok = ok and slip_only
    details.append(f"bicycle/ellipse slip-only={slip_only}")
    return _result("degeneracy-table", ok, "; ".join(details))


def check_identities(seed=0, samples=10_000) -> list[CheckResult]:
    """Acceptance 3: algebraic identities to 1e-12."""
    rng = np.random.default_rng(seed)
    worst_cons = worst_rewrite = worst_boundary = worst_proj = 0.0
    for _ in range(samples):
        p = rng.uniform(-8, 8, 2)
        r = rng.uniform(0.2, 2.0)
        dist = float(np.linalg.norm(p))
        if dist <= r * 1.05:
            continue
        v = rng.uniform(-3, 3, 2)
        gamma = rng.uniform(0.1, 3.0)
        sq = math.sqrt(dist * dist - r * r)
        h_cone, _ = cone_terms(p, v, r)
        h_ho = float(p @ v) + gamma * sq
        vnorm = float(np.linalg.norm(v))
        lhs = h_cone - h_ho
        rhs = (vnorm - gamma) * sq
        worst_cons = max(worst_cons, abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))
        # boundary-direction construction: v on the cone edge gives h = 0
        phat = p / dist
        perp = np.array([-phat[1], phat[0]])
        cos_phi = sq / dist
        sin_phi = r / dist
        speed = rng.uniform(0.1, 3.0)
        v_edge = speed * (-cos_phi * phat + sin_phi * perp)
        h_edge, _ = cone_terms(p, v_edge, r)
        worst_boundary = max(worst_boundary, abs(h_edge) / max(1.0, speed * dist))
        if vnorm > 1e-9:
            lhs2 = vnorm * vnorm + float(p @ v) * vnorm / sq
            rhs2 = (vnorm / sq) * h_cone
            worst_rewrite = max(worst_rewrite, abs(lhs2 - rhs2) / max(1.0, abs(lhs2), abs(rhs2)))
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        x = rng.uniform(-5, 5, 3)
        px = project_out_axis(x, axis)
        worst_proj = max(
            worst_proj,
            float(np.max(np.abs(project_out_axis(px, axis) - px))),
            abs(float(px @ axis)),
        )
    return [
        _result("identity-conservativeness", worst_cons < 1e-12, f"worst={worst_cons:.2e}"),
        _result("identity-bicycle-rewrite", worst_rewrite < 1e-12, f"worst={worst_rewrite:.2e}"),
        _result("identity-cone-boundary", worst_boundary < 1e-12, f"worst={worst_boundary:.2e}"),
        _result("identity-projector", worst_proj < 1e-12, f"worst={worst_proj:.2e}"),
    ]


def check_effective_angle(seed=0, samples=10_000) -> CheckResult:
    """Acceptance 6b: cos(phi') < cos(phi) whenever ||v_rel|| > gamma."""
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(samples):
        gamma = rng.uniform(0.1, 3.0)
        vnorm = gamma * rng.uniform(1.0 + 1e-6, 5.0)
        cos_phi = rng.uniform(1e-6, 1.0 - 1e-9)
        value = hocbf_effective_angle(gamma, vnorm, cos_phi)
        ok = ok and value != NO_CONE_SIGNAL and value < cos_phi
    return _result("hocbf-effective-angle", ok)


# ---------------------------------------------------------------------------
# QP checks


def _kkt_residuals(problem: FilterProblem, res) -> float:
    u = res.u_star
    stationarity = (u - problem.u_ref).copy()
    worst = 0.0
    for lam, con in zip(res.multipliers, problem.constraints):
        stationarity -= lam * con.a
        worst = max(worst, -min(lam, 0.0))
        slack = float(con.a @ u) - con.b
        if np.any(con.a):
            worst = max(worst, -min(slack + 1e-9, 0.0))
        worst = max(worst, abs(lam * slack))
    if problem.bounds is not None:
        lo, hi = problem.bounds
        for j in range(u.size):
            stationarity[j] -= res.lo_multipliers[j]
            stationarity[j] += res.hi_multipliers[j]
            worst = max(worst, -min(res.lo_multipliers[j], 0.0), -min(res.hi_multipliers[j], 0.0))
            if math.isfinite(lo[j]):
                worst = max(worst, -min(u[j] - lo[j] + 1e-9, 0.0))
                worst = max(worst, abs(res.lo_multipliers[j] * (u[j] - lo[j])))
            if math.isfinite(hi[j]):
                worst = max(worst, -min(hi[j] - u[j] + 1e-9, 0.0))
                worst = max(worst, abs(res.hi_multipliers[j] * (hi[j] - u[j])))
    worst = max(worst, float(np.linalg.norm(stationarity)))
    return worst


def _grid_argmin(u_ref, constraints, bounds, lo=-3.0, hi=3.0, step=0.01):
    xs = np.arange(lo, hi + step / 2, step)
    u1, u2 = np.meshgrid(xs, xs, indexing="ij")
    feas = np.ones_like(u1, dtype=bool)
    for c in constraints:
        feas &= c.a[0] * u1 + c.a[1] * u2 >= c.b - 1e-9
    if bounds is not None:
        blo, bhi = bounds
        feas &= (u1 >= blo[0] - 1e-12) & (u1 <= bhi[0] + 1e-12)
        feas &= (u2 >= blo[1] - 1e-12) & (u2 <= bhi[1] + 1e-12)
    if not feas.any():
        return None
    d2 = (u1 - u_ref[0]) ** 2 + (u2 - u_ref[1]) ** 2
    d2[~feas] = np.inf
    k = np.unravel_index(int(np.argmin(d2)), d2.shape)
    return np.array([u1[k], u2[k]])


def check_qp_kkt(seed=0, samples=500) -> CheckResult:
    """Acceptance 4: KKT certificates on random problems."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    n_optimal = 0
    for _ in range(samples):
        m = int(rng.integers(1, 5))
        u_ref = rng.normal(size=m)
        constraints = [
            LinearConstraint(rng.normal(size=m), rng.normal())
            for _ in range(int(rng.integers(1, 5)))
        ]
        bounds = (np.full(m, -2.0), np.full(m, 2.0)) if rng.random() < 0.5 else None
        problem = FilterProblem(u_ref, constraints, bounds=bounds)
        res = solve_active_set(problem)
        if res.status == OPTIMAL:
            n_optimal += 1
            worst = max(worst, _kkt_residuals(problem, res))
    ok = worst <= 1e-8 and n_optimal > 0
    return _result("qp-kkt-certificates", ok, f"optimal={n_optimal}/{samples} worst={worst:.2e}")


def check_qp_grid_oracle(seed=0, samples=150) -> list[CheckResult]:
    """Acceptance 4: brute-force grid cross-checks on 2-input problems.

    Oblique random rows: the solver point must be feasible and at least as
    close to u_ref as the best strictly feasible grid point. Axis-aligned
    rows (faces populated by grid points): the argmin agrees within two
    grid steps.
    """
    rng = np.random.default_rng(seed)
    step = 0.01
    ok_oblique = True
    for _ in range(samples):
        u_ref = rng.uniform(-1.5, 1.5, 2)
        constraints = [
            LinearConstraint(rng.normal(size=2), rng.uniform(-1.5, 1.5))
            for _ in range(int(rng.integers(1, 4)))
        ]
        bounds = (np.full(2, -2.5), np.full(2, 2.5))
        res = solve_active_set(FilterProblem(u_ref, constraints, bounds=bounds))
        grid = _grid_argmin(u_ref, constraints, bounds, step=step)
        if res.status == OPTIMAL:
            feasible = all(
                float(c.a @ res.u_star) >= c.b - 1e-9 for c in constraints
            ) and bool(np.all(np.abs(res.u_star) <= 2.5 + 1e-9))
            no_worse = grid is None or np.linalg.norm(res.u_star - u_ref) <= np.linalg.norm(
                grid - u_ref
            ) + 1e-9
            ok_oblique = ok_oblique and feasible and no_worse
        else:
            ok_oblique = ok_oblique and grid is None
    worst_axis = 0.0
    for _ in range(samples):
        u_ref = rng.uniform(-2, 2, 2)
        constraints = []
        for _ in range(int(rng.integers(1, 5))):
            a = np.zeros(2)
            a[int(rng.integers(0, 2))] = 1.0 if rng.random() < 0.5 else -1.0
            constraints.append(LinearConstraint(a, rng.uniform(-1.5, 1.5)))
        bounds = (np.full(2, -2.9), np.full(2, 2.9))
        res = solve_active_set(FilterProblem(u_ref, constraints, bounds=bounds))
        grid = _grid_argmin(u_ref, constraints, bounds, step=step)
        if res.status == OPTIMAL and grid is not None:
            worst_axis = max(worst_axis, float(np.max(np.abs(res.u_star - grid))))
    return [
        _result("qp-grid-oracle-oblique", ok_oblique),
        _result("qp-grid-oracle-axis", worst_axis <= 2 * step, f"worst={worst_axis:.4f}"),
    ]


def check_qp_minimal_intervention(seed=0, samples=200) -> CheckResult:
    """Acceptance 4: feasible u_ref comes back unchanged, bit for bit."""
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(samples):
        m = int(rng.integers(1, 5))
        u_ref = rng.normal(size=m)
        constraints = []
        for _ in range(int(rng.integers(1, 5))):
            a = rng.normal(size=m)
            slack = rng.uniform(0.0, 2.0)
            constraints.append(LinearConstraint(a, float(a @ u_ref) - slack))
        bounds = (u_ref - rng.uniform(0.1, 2.0, m), u_ref + rng.uniform(0.1, 2.0, m))
        res = solve_active_set(FilterProblem(u_ref, constraints, bounds=bounds))
        ok = ok and res.status == OPTIMAL and np.array_equal(res.u_star, u_ref)
    return _result("qp-minimal-intervention", ok)


def check_qp_projection_contraction(seed=0, samples=100, probes=100) -> CheckResult:
    """||u* - u_ref|| <= ||u' - u_ref|| for every sampled feasible u'."""
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(samples):
        m = int(rng.integers(1, 4))
        u_ref = rng.normal(size=m)
        constraints = [
            LinearConstraint(rng.normal(size=m), rng.uniform(-2.0, 0.5))
            for _ in range(int(rng.integers(1, 4)))
        ]
        res = solve_active_set(FilterProblem(u_ref, constraints))
        if res.status != OPTIMAL:
            continue
        d_star = np.linalg.norm(res.u_star - u_ref)
        for _ in range(probes):
            probe = rng.uniform(-4, 4, m)
            if all(float(c.a @ probe) >= c.b for c in constraints):
                ok = ok and d_star <= np.linalg.norm(probe - u_ref) + 1e-9
    return _result("qp-projection-contraction", ok)


def check_qp_single_consistency(seed=0, samples=300) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        m = int(rng.integers(1, 5))
        u_ref = rng.normal(size=m)
        con = LinearConstraint(rng.normal(size=m), rng.normal())
        direct = solve_single_constraint(u_ref, con)
        via_set = solve_active_set(FilterProblem(u_ref, [con])).u_star
        worst = max(worst, float(np.max(np.abs(direct - via_set))))
    return _result("qp-single-constraint-consistency", worst <= 1e-12, f"worst={worst:.2e}")


def check_qp_lipschitz(seed=0, threshold=1e4) -> CheckResult:
    """Sensitivity of the filtered input to state perturbations stays
    bounded along a sampled trajectory, including steps with an active
    constraint (away from degenerate rows)."""
    scenario = load_scenario(builtin_scenarios()["point-mass-head-on"], label="lipschitz")
    log = run(scenario)
    rng = np.random.default_rng(seed)
    from .qp import filter_control

    active_records = [rec for rec in log.records if rec.active_set]
    sampled = active_records[:: max(1, len(active_records) // 30)] + log.records[
        :: max(1, len(log.records) // 10)
    ]
    worst = 0.0
    n_active = 0
    for rec in sampled:
        obstacles = [advance(ob, rec.t) for ob in scenario.obstacles]
        base, _ = filter_control(
            scenario.model_tag,
            rec.state,
            obstacles,
            scenario.barrier,
            rec.u_ref,
            scenario.class_k,
            bounds=scenario.bounds,
            params=scenario.params,
        )
        if base.status != OPTIMAL:
            continue
        if base.active_set:
            n_active += 1
        for _ in range(5):
            delta = rng.normal(size=4) * 1e-5
            state = type(rec.state)(pos=rec.state.pos + delta[:2], vel=rec.state.vel + delta[2:])
            pert, _ = filter_control(
                scenario.model_tag,
                state,
                obstacles,
                scenario.barrier,
                rec.u_ref,
                scenario.class_k,
                bounds=scenario.bounds,
                params=scenario.params,
            )
            if pert.status != OPTIMAL:
                continue
            ratio = float(
                np.linalg.norm(pert.u_star - base.u_star) / np.linalg.norm(delta)
            )
            worst = max(worst, ratio)
    ok = worst < threshold and n_active > 0
    return _result(
        "qp-lipschitz-spot-check", ok, f"worst ratio={worst:.2f} active steps={n_active}"
    )


# ---------------------------------------------------------------------------
# simulation checks


def check_rk4_exponential() -> CheckResult:
    x = np.array([1.0])
    nxt = rk4_core(lambda arr: -arr, x, 0.1)
    err = abs(float(nxt[0]) - math.exp(-0.1))
    return _result("rk4-exponential", err < 1e-7, f"err={err:.2e}")


def check_rk4_order(seed=0) -> CheckResult:
    """Acceptance 8: one-step error drops >= 15x when dt halves."""
    from .vehicles import UnicycleState

    state = UnicycleState(x=0.1, y=-0.2, theta=0.3, v=1.1, omega=0.4)
    u = np.array([0.6, -0.8])
    params = random_params("unicycle", np.random.default_rng(seed))

    def deriv(arr):
        return dynamics_array("unicycle", arr, u, params)

    def reference(x0, dt, n):
        x = x0
        for _ in range(n):
            x = rk4_core(deriv, x, dt)
        return x

    x0 = state.as_array()
    dt = 0.2
    exact_full = reference(x0, dt / 64, 64)
    exact_half = reference(x0, dt / 64, 32)
    err_full = float(np.max(np.abs(rk4_core(deriv, x0, dt) - exact_full)))
    err_half = float(np.max(np.abs(rk4_core(deriv, x0, dt / 2) - exact_half)))
    ratio = err_full / err_half if err_half > 0 else math.inf
    return _result("rk4-order", ratio >= 15.0, f"ratio={ratio:.1f}")


def check_obstacle_kinematics() -> CheckResult:
    scenario = load_scenario(builtin_scenarios()["unicycle-perpendicular"], label="kin")
    log = run(scenario)
    ob = scenario.obstacles[0]
    worst = 0.0
    for k, rec in enumerate(log.records):
        expected = ob.center + ob.velocity * rec.t
        worst = max(worst, float(np.max(np.abs(rec.obstacle_centers[0] - expected))))
    return _result("obstacle-kinematics-exact", worst == 0.0, f"worst={worst:.2e}")


def check_no_obstacle_passthrough() -> CheckResult:
    doc = {
        "model": "unicycle",
        "initial_state": {"x": 0, "y": 0, "theta": 0, "v": 1.0, "omega": 0},
        "obstacles": [],
        "barrier": {"kind": "c3bf"},
        "target": {"type": "constant_velocity", "speed": 1.0, "heading": 0.0},
        "sim": {"dt": 0.01, "duration": 3.0, "seed": 0},
    }
    log = run(load_scenario(doc, label="empty"))
    ok = log.status == COMPLETED and all(
        np.array_equal(rec.u_ref, rec.u_star) for rec in log.records
    )
    return _result("no-obstacle-zero-intervention", ok)


def _interventions(log) -> int:
    return sum(1 for rec in log.records if not np.array_equal(rec.u_ref, rec.u_star))


def check_scenario_corpus() -> list[CheckResult]:
    """Acceptance 5: every corpus scenario completes inside the bounds and
    the filter actually engages (the references aim at the obstacles)."""
    corpus = builtin_scenarios()
    results = []
    for name in CORPUS_SAFE_SET:
        scenario = load_scenario(corpus[name], label=name)
        if scenario.agents:
            logs = multi_agent_run(scenario)
            status_ok = all(log.status == COMPLETED for log in logs)
            min_h = min(log.min_h() for log in logs)
            min_margin = min(log.min_margin() for log in logs)
            engaged = sum(_interventions(log) for log in logs)
        else:
            log = run(scenario)
            status_ok = log.status == COMPLETED
            min_h = log.min_h()
            min_margin = log.min_margin()
            engaged = _interventions(log)
        ok = status_ok and min_h >= -1e-2 and min_margin >= -1e-3 and engaged > 0
        results.append(
            _result(
                f"scenario[{name}]",
                ok,
                f"min_h={min_h:.4f} min_margin={min_margin:.4f} interventions={engaged}",
            )
        )
    return results


def check_dt_refinement() -> CheckResult:
    """Tightening dt by 10x must not worsen the observed safety minima."""
    corpus = builtin_scenarios()
    scenario = load_scenario(corpus["point-mass-crossing"], label="dt-refine")
    coarse = run(scenario)
    fine = run(replace(scenario, sim=replace(scenario.sim, dt=scenario.sim.dt / 10)))
    viol_h_coarse = max(0.0, -coarse.min_h())
    viol_h_fine = max(0.0, -fine.min_h())
    viol_m_coarse = max(0.0, -coarse.min_margin())
    viol_m_fine = max(0.0, -fine.min_margin())
    ok = (
        coarse.status == COMPLETED
        and fine.status == COMPLETED
        and viol_h_fine <= viol_h_coarse + 1e-12
        and viol_m_fine <= viol_m_coarse + 1e-12
    )
    return _result(
        "dt-refinement",
        ok,
        f"min_h {coarse.min_h():.5f}->{fine.min_h():.5f} "
        f"min_margin {coarse.min_margin():.5f}->{fine.min_margin():.5f}",
    )


def check_violation_envelopes() -> list[CheckResult]:
    """Acceptance 7: h(t) >= h(0) exp(-gamma t) - 1e-2 on unsafe starts."""
    corpus = builtin_scenarios()
    results = []
    for name in CORPUS_UNSAFE_SET:
        scenario = load_scenario(corpus[name], label=name)
        log = run(scenario)
        gamma = scenario.class_k.gamma
        h0 = float(log.records[0].h.min())
        worst = 0.0
        for rec in log.records:
            envelope = h0 * math.exp(-gamma * rec.t) - 1e-2
            worst = max(worst, envelope - float(rec.h.min()))
        ok = log.status == COMPLETED and h0 < 0 and worst <= 0.0
        results.append(
            _result(f"envelope[{name}]", ok, f"h0={h0:.3f} worst shortfall={worst:.2e}")
        )
    return results


def check_hocbf_comparison() -> CheckResult:
    """Acceptance 6: cone filter completes where the baseline fails."""
    corpus = builtin_scenarios()
    scenario = load_scenario(corpus["high-speed-approach"], label="high-speed-approach")
    log_cone = run(scenario)
    log_ho = run(replace(scenario, barrier=BarrierKind(HOCBF, gamma=1.0)))
    speed = float(np.linalg.norm(scenario.obstacles[0].velocity))
    ev = evaluate_barrier(
        scenario.barrier, scenario.model_tag, scenario.initial_state,
        scenario.obstacles[0], scenario.params,
    )
    geometry_ok = speed >= 4.0 * 1.0 * ev.geometry.cos_phi and abs(
        float(np.linalg.norm(ev.geometry.p_rel)) - 5.0
    ) < 0.05
    ok = (
        geometry_ok
        and log_cone.status == COMPLETED
        and log_ho.status in (FAILED_INFEASIBLE, FAILED_PENETRATION)
    )
    return _result(
        "hocbf-conservativeness",
        ok,
        f"c3bf={log_cone.status} hocbf={log_ho.status} speed={speed:.2f}",
    )


def check_determinism(tmp_dir=None) -> CheckResult:
    """Acceptance 8: identical runs produce byte-identical CSV files."""
    import tempfile
    import os

    corpus = builtin_scenarios()
    scenario = load_scenario(corpus["point-mass-crossing"], label="determinism")
    with tempfile.TemporaryDirectory(dir=tmp_dir) as tmp:
        paths = [os.path.join(tmp, f"run{i}.csv") for i in range(2)]
        for path in paths:
            log = run(scenario)
            csvlog.write_trajectory_csv(path, log)
        with open(paths[0], "rb") as fh:
            first = fh.read()
        with open(paths[1], "rb") as fh:
            second = fh.read()
    return _result("determinism-byte-identical", first == second, f"bytes={len(first)}")


def check_csv_roundtrip() -> CheckResult:
    import tempfile
    import os

    corpus = builtin_scenarios()
    scenario = load_scenario(corpus["unicycle-static-turn"], label="roundtrip")
    scenario = replace(scenario, sim=replace(scenario.sim, duration=1.0))
    log = run(scenario)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "log.csv")
        csvlog.write_trajectory_csv(path, log)
        header, rows = csvlog.read_trajectory_csv(path)
    ok = len(rows) == len(log.records)
    for rec, row in zip(log.records, rows):
        values = [rec.t, *rec.state.as_array(), *rec.u_ref, *rec.u_star]
        for i in range(len(log.effective_radii)):
            values += [rec.h[i], rec.distances[i]]
        for expected, actual in zip(values, row):
            ok = ok and (expected == actual or (math.isnan(expected) and math.isnan(actual)))
        ok = ok and row[len(values)] == rec.status
        ok = ok and row[len(values) + 1] == len(rec.active_set)
    return _result("csv-roundtrip-bit-exact", ok)


def check_shape_classification() -> CheckResult:
    ok = classify_shape(1, 1, 1, 3.0) == "sphere"
    ok = ok and classify_shape(0.3, 0.4, 5.0, 3.0) == "cylinder"
    ok = ok and classify_shape(1, 1, 2.9, 3.0) == "sphere"
    return _result("shape-classification", ok)


# ---------------------------------------------------------------------------
# runner


def all_checks(seed=0):
    checks = [
        check_dynamics_affine(seed),
        check_rotation_orthonormal(seed),
        check_euler_rate_map(seed),
        check_hover_equilibrium(),
        check_radius_monotone(seed),
        check_advance_linear(seed),
        check_shape_classification(),
        check_cone_membership(seed),
        check_cone_scale_covariance(seed),
    ]
    checks += check_derivative_correctness(seed)
    checks += check_nondegeneracy(seed)
    checks += check_ellipse_exact_zero(seed)
    checks.append(check_table_classifications(seed))
    checks += check_identities(seed)
    checks.append(check_effective_angle(seed))
    checks.append(check_qp_kkt(seed))
    checks += check_qp_grid_oracle(seed)
    checks.append(check_qp_minimal_intervention(seed))
    checks.append(check_qp_projection_contraction(seed))
    checks.append(check_qp_single_consistency(seed))
    checks.append(check_qp_lipschitz(seed))
    checks.append(check_rk4_exponential())
    checks.append(check_rk4_order(seed))
    checks.append(check_obstacle_kinematics())
    checks.append(check_no_obstacle_passthrough())
    checks += check_scenario_corpus()
    checks.append(check_dt_refinement())
    checks += check_violation_envelopes()
    checks.append(check_hocbf_comparison())
    checks.append(check_determinism())
    checks.append(check_csv_roundtrip())
    return checks


def run_all(seed=0) -> bool:
    import time

    start = time.perf_counter()
    results = all_checks(seed)
    ok = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        detail = f"  ({res.detail})" if res.detail else ""
        print(f"[{status}] {res.name}{detail}")
        ok = ok and res.passed
    wall = time.perf_counter() - start
    print(f"{'OK' if ok else 'FAILED'}: {sum(r.passed for r in results)}/{len(results)} "
          f"checks passed in {wall:.1f}s (seed={seed})")
    return ok
