"""Command-line interface: run, compare, validate.

    conecbf run <scenario.json> --out <file.csv> [--dt X] [--duration X] [--seed N]
    conecbf compare <scenario.json> --barriers c3bf,hocbf[,ellipse] --out-dir <dir>
    conecbf validate [--seed N]

Exit codes: 0 success, 1 usage/parse error, 2 safety failure
(FAILED-* terminal status).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import replace

import numpy as np

from .barriers import C3BF, ELLIPSE, HOCBF, BarrierKind
from .csvlog import write_trajectory_csv
from .errors import ScenarioError
from .scenarios import load_scenario_file
from .sim import COMPLETED, multi_agent_run, run


def _summary_line(label, log):
    return (
        f"{label}: {log.status}  min_h={log.min_h():.6g}  "
        f"min_margin={log.min_margin():.6g}  steps={len(log.records)}"
    )


def _apply_overrides(scenario, args):
    sim = scenario.sim
    if args.dt is not None:
        sim = replace(sim, dt=args.dt)
    if args.duration is not None:
        sim = replace(sim, duration=args.duration)
    if args.seed is not None:
        sim = replace(sim, seed=args.seed)
    return replace(scenario, sim=sim)


def cmd_run(args) -> int:
    try:
        scenario = load_scenario_file(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    scenario = _apply_overrides(scenario, args)
    start = time.perf_counter()
    if scenario.agents:
        logs = multi_agent_run(scenario)
        wall = time.perf_counter() - start
        base, ext = os.path.splitext(args.out)
        status_ok = True
        for i, log in enumerate(logs):
            path = f"{base}.agent{i}{ext}" if len(logs) > 1 else args.out
            write_trajectory_csv(path, log)
            print(_summary_line(log.label, log) + f"  wall={wall:.2f}s -> {path}")
            status_ok = status_ok and log.status == COMPLETED
        return 0 if status_ok else 2
    log = run(scenario)
    wall = time.perf_counter() - start
    write_trajectory_csv(args.out, log)
    print(_summary_line(scenario.label, log) + f"  wall={wall:.2f}s -> {args.out}")
    return 0 if log.status == COMPLETED else 2


def cmd_compare(args) -> int:
    try:
        scenario = load_scenario_file(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    scenario = _apply_overrides(scenario, args)
    names = [b.strip() for b in args.barriers.split(",") if b.strip()]
    if not names:
        print("error: --barriers must list at least one barrier", file=sys.stderr)
        return 1
    kinds = {}
    for name in names:
        if name == C3BF:
            kinds[name] = BarrierKind(C3BF)
        elif name == HOCBF:
            gamma = scenario.barrier.gamma if scenario.barrier.kind == HOCBF else args.hocbf_gamma
            kinds[name] = BarrierKind(HOCBF, gamma=gamma)
        elif name == ELLIPSE:
            kinds[name] = BarrierKind(ELLIPSE)
        else:
            print(f"error: unknown barrier {name!r}", file=sys.stderr)
            return 1
    os.makedirs(args.out_dir, exist_ok=True)
    any_failed = False
    rows = []
    for name, kind in kinds.items():
        variant = replace(scenario, barrier=kind)
        log = run(variant) if not scenario.agents else None
        if log is None:
            logs = multi_agent_run(variant)
            log = logs[0]
        path = os.path.join(args.out_dir, f"{scenario.label}.{name}.csv")
        write_trajectory_csv(path, log)
        # fraction of logged rows whose filter saw an all-zero input row
        zero_fraction = _zero_lgh_fraction(variant, log)
        rows.append((name, log.status, log.min_h(), log.min_margin(), zero_fraction, path))
        any_failed = any_failed or log.status != COMPLETED
    print(f"{'barrier':10s} {'status':22s} {'min_h':>12s} {'min_margin':>12s} {'zero_lgh':>9s}")
    for name, status, min_h, min_margin, zero_fraction, path in rows:
        print(
            f"{name:10s} {status:22s} {min_h:12.5g} {min_margin:12.5g} "
            f"{zero_fraction:9.3f}  -> {path}"
        )
    return 2 if any_failed else 0


def _zero_lgh_fraction(scenario, log) -> float:
    """Fraction of logged (step, obstacle) rows with an identically zero
    input row; 1.0 reproduces the degenerate-candidate diagnosis."""
    from .barriers import evaluate_barrier
    from .obstacles import advance

    if scenario.agents or not log.records or not scenario.obstacles:
        return 0.0
    zero = 0
    total = 0
    for rec in log.records:
        if rec.status != "ok":
            continue
        for ob in scenario.obstacles:
            moved = advance(ob, rec.t)
            try:
                ev = evaluate_barrier(
                    scenario.barrier, scenario.model_tag, rec.state, moved, scenario.params
                )
            except ScenarioError:
                continue
            except Exception:
                continue
            total += 1
            if not np.any(ev.lgh):
                zero += 1
    return zero / total if total else 0.0


def cmd_validate(args) -> int:
    from .validation import run_all

    ok = run_all(seed=args.seed)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="conecbf",
        description="Collision-cone barrier safety-filter simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write a trajectory CSV")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--dt", type=float, default=None)
    p_run.add_argument("--duration", type=float, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run a scenario once per barrier")
    p_cmp.add_argument("scenario")
    p_cmp.add_argument("--barriers", required=True)
    p_cmp.add_argument("--out-dir", required=True)
    p_cmp.add_argument("--hocbf-gamma", type=float, default=1.0)
    p_cmp.add_argument("--dt", type=float, default=None)
    p_cmp.add_argument("--duration", type=float, default=None)
    p_cmp.add_argument("--seed", type=int, default=None)
    p_cmp.set_defaults(func=cmd_compare)

    p_val = sub.add_parser("validate", help="run the full property/acceptance suite")
    p_val.add_argument("--seed", type=int, default=0)
    p_val.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
