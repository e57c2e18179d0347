"""Minimal-intervention safety filter: exact small dense QP.

The filter solves
    min ||u - u_ref||^2   s.t.  a_i . u >= b_i  (one row per obstacle),
                                lo <= u <= hi   (optional box bounds)
where each row comes from a barrier constraint
    L_f h + L_g h u + kappa(h) >= 0   ->   a = L_g h, b = -(L_f h + kappa(h)).

A single constraint admits the closed-form half-space projection. The
general case uses a dual active-set iteration specialised to the identity
Hessian: start from the unconstrained optimum u_ref, repeatedly add the most
violated row, stepping in the null-space direction of the active normals and
dropping rows whose multiplier would go negative. The iteration is exact
(small dense linear solves), terminates finitely, and certifies
infeasibility when a violated row is a nonnegative combination of active
ones.

Zero rows (L_g h = 0, the degenerate barrier case) are handled before the
iteration: dropped when vacuous (b <= 0), reported infeasible otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateConstraintError, DomainError, IterationLimitError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"

_ZERO_ROW_TOL = 1e-13
_DUAL_TOL = 1e-12


@dataclass(frozen=True)
class ClassK:
    """Linear extended class-K function kappa(h) = gamma * h."""

    gamma: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.gamma) or self.gamma <= 0:
            raise DomainError("ClassK gamma must be > 0")


def kappa(k: ClassK, h: float) -> float:
    return k.gamma * h


@dataclass(frozen=True)
class LinearConstraint:
    """Half-space a . u >= b."""

    a: np.ndarray
    b: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(-1)
        if not np.all(np.isfinite(a)) or not math.isfinite(self.b):
            raise DomainError("LinearConstraint: non-finite data")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))


def constraint_from_barrier(ev, k: ClassK) -> LinearConstraint:
    """Rearrange L_f h + L_g h u + kappa(h) >= 0 into a . u >= b."""
    return LinearConstraint(a=ev.lgh, b=-(ev.lfh + kappa(k, ev.h)))


@dataclass(frozen=True)
class FilterProblem:
    u_ref: np.ndarray
    constraints: list
    bounds: tuple | None = None  # (lo, hi) arrays; None entries mean unbounded

    def __post_init__(self):
        u = np.asarray(self.u_ref, dtype=float).reshape(-1)
        if not np.all(np.isfinite(u)):
            raise DomainError("FilterProblem: non-finite u_ref")
        object.__setattr__(self, "u_ref", u)
        for c in self.constraints:
            if c.a.size != u.size:
                raise DomainError("FilterProblem: constraint dimension mismatch")
        if self.bounds is not None:
            lo, hi = self.bounds
            lo = _bound_array(lo, u.size, -np.inf)
            hi = _bound_array(hi, u.size, np.inf)
            if np.any(lo > hi):
                raise DomainError("FilterProblem: lo > hi")
            object.__setattr__(self, "bounds", (lo, hi))


def _bound_array(values, m: int, fill: float) -> np.ndarray:
    if values is None:
        return np.full(m, fill)
    arr = np.array(
        [fill if v is None else float(v) for v in np.atleast_1d(values)], dtype=float
    )
    if arr.size != m:
        raise DomainError("FilterProblem: bound length mismatch")
    return arr


@dataclass(frozen=True)
class FilterResult:
    """Exact QP solution with multipliers.

    ``multipliers`` has one nonnegative entry per constraint in the problem
    (zero for inactive or dropped rows); ``lo_multipliers``/``hi_multipliers``
    cover the box bounds. ``active_set`` lists indices of constraints active
    at the solution.
    """

    u_star: np.ndarray
    status: str
    multipliers: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lo_multipliers: np.ndarray = field(default_factory=lambda: np.zeros(0))
    hi_multipliers: np.ndarray = field(default_factory=lambda: np.zeros(0))
    active_set: tuple = ()


def solve_single_constraint(u_ref, c: LinearConstraint) -> np.ndarray:
    """Euclidean projection of u_ref onto a . u >= b.

    Returns u_ref unchanged when it already satisfies the constraint,
    otherwise u_ref + (b - a.u_ref)/||a||^2 * a.
    """
    u_ref = np.asarray(u_ref, dtype=float)
    norm2 = float(c.a @ c.a)
    if norm2 == 0.0:
        if c.b > 0.0:
            raise DegenerateConstraintError(
                f"zero constraint row with b = {c.b:.3e} > 0"
            )
        return u_ref.copy()
    if float(c.a @ u_ref) >= c.b:
        return u_ref.copy()
    return u_ref + ((c.b - float(c.a @ u_ref)) / norm2) * c.a


def solve_active_set(problem: FilterProblem, max_pivots: int = 1000) -> FilterResult:
    """Exact minimizer of ||u - u_ref||^2 under all rows and bounds.

    Small dense regime only (input dimension <= 8, <= 32 constraint rows).
    Returns status 'infeasible' when the rows are contradictory; raises
    IterationLimitError if the pivot cap is hit (a numerics bug, not an
    expected outcome).
    """
    u_ref = problem.u_ref
    m = u_ref.size
    n_cons = len(problem.constraints)
    if m > 8:
        raise DomainError("solve_active_set: input dimension must be <= 8")
    if n_cons > 32:
        raise DomainError("solve_active_set: at most 32 constraints supported")

    def _result(status, u=None, rows=None, lam=None):
        mult = np.zeros(n_cons)
        lo_m = np.zeros(m)
        hi_m = np.zeros(m)
        act = []
        if rows is not None:
            for lam_i, (kind_tag, idx) in zip(lam, rows):
                if kind_tag == "c":
                    mult[idx] = lam_i
                    act.append(idx)
                elif kind_tag == "lo":
                    lo_m[idx] = lam_i
                else:
                    hi_m[idx] = lam_i
        return FilterResult(
            u_star=u if u is not None else u_ref.copy(),
            status=status,
            multipliers=mult,
            lo_multipliers=lo_m,
            hi_multipliers=hi_m,
            active_set=tuple(sorted(act)),
        )

    # fold constraints and finite bounds into rows (normal, rhs, tag)
    normals, rhs, tags = [], [], []
    for i, c in enumerate(problem.constraints):
        if np.linalg.norm(c.a) <= _ZERO_ROW_TOL:
            if c.b > 1e-12:
                return _result(INFEASIBLE)
            continue  # vacuous row
        normals.append(c.a)
        rhs.append(c.b)
        tags.append(("c", i))
    if problem.bounds is not None:
        lo, hi = problem.bounds
        for j in range(m):
            if np.isfinite(lo[j]):
                e = np.zeros(m)
                e[j] = 1.0
                normals.append(e)
                rhs.append(lo[j])
                tags.append(("lo", j))
            if np.isfinite(hi[j]):
                e = np.zeros(m)
                e[j] = -1.0
                normals.append(e)
                rhs.append(-hi[j])
                tags.append(("hi", j))

    if not normals:
        return _result(OPTIMAL)

    N = np.array(normals)
    b = np.array(rhs)
    feas_tol = 1e-11 * (1.0 + np.abs(b))

    u = u_ref.copy()
    work: list[int] = []  # active row indices into N
    lam: list[float] = []
    pivots = 0

    while True:
        viol = b - N @ u
        j = int(np.argmax(viol))
        if viol[j] <= feas_tol[j]:
            if not work:
                # nothing ever activated: u_ref itself is feasible
                return _result(OPTIMAL, u=u_ref.copy())
            rows = [tags[i] for i in work]
            return _result(OPTIMAL, u=u, rows=rows, lam=lam)

        n_j = N[j]
        lam_plus = 0.0
        while True:
            pivots += 1
            if pivots > max_pivots:
                raise IterationLimitError(f"active-set pivot cap {max_pivots} hit")
            if work:
                nw = N[work]
                gram = nw @ nw.T
                try:
                    r = np.linalg.solve(gram, nw @ n_j)
                except np.linalg.LinAlgError:
                    r = np.linalg.lstsq(gram, nw @ n_j, rcond=None)[0]
                z = n_j - nw.T @ r
            else:
                r = np.zeros(0)
                z = n_j.copy()
            zn = float(z @ z)
            if zn <= 1e-14 * float(n_j @ n_j):
                zn = 0.0  # n_j linearly dependent on the active normals
            t_full = (b[j] - float(n_j @ u)) / zn if zn > 0.0 else np.inf
            t_drop = np.inf
            blocker = -1
            for idx in range(len(work)):
                if r[idx] > _DUAL_TOL:
                    cand = lam[idx] / r[idx]
                    if cand < t_drop:
                        t_drop = cand
                        blocker = idx
            if not np.isfinite(t_full) and not np.isfinite(t_drop):
                return _result(INFEASIBLE)
            t = min(t_full, t_drop)
            if zn > 0.0:
                u = u + t * z
            for idx in range(len(work)):
                lam[idx] -= t * r[idx]
            lam_plus += t
            if t_full <= t_drop:
                work.append(j)
                lam.append(lam_plus)
                break
            # drop the blocking row and keep working on j
            work.pop(blocker)
            lam.pop(blocker)


def filter_control(
    model_tag: str,
    state,
    obstacles,
    kind,
    u_ref,
    class_k: ClassK,
    bounds=None,
    params=None,
):
    """Assemble one barrier constraint per obstacle and solve the QP.

    Returns (FilterResult, list[BarrierEval]) so callers can log the
    per-obstacle barrier values alongside the filtered input.
    """
    from .barriers import evaluate_barrier

    evals = [
        evaluate_barrier(kind, model_tag, state, obstacle, params)
        for obstacle in obstacles
    ]
    constraints = [constraint_from_barrier(ev, class_k) for ev in evals]
    problem = FilterProblem(
        u_ref=np.asarray(u_ref, dtype=float), constraints=constraints, bounds=bounds
    )
    return solve_active_set(problem), evals
