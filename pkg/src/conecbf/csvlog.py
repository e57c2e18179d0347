"""Trajectory CSV emission and parsing.

One header row, then one row per step. Column order: t, state components
(model-specific), u_ref components, u_star components, then per obstacle i
the pair h_i, dist_i, then filter_status and active_count. Floats are
serialized with 17 significant digits so parsing recovers every value
bit-exactly.
"""

from __future__ import annotations

import numpy as np

STATE_COLUMNS = {
    "unicycle": ("x", "y", "theta", "v", "omega"),
    "bicycle": ("x", "y", "theta", "v"),
    "point_mass": ("x", "y", "vx", "vy"),
    "quadrotor": (
        "x", "y", "z", "vx", "vy", "vz",
        "roll", "pitch", "yaw", "wx", "wy", "wz",
    ),
}

INPUT_COLUMNS = {
    "unicycle": ("a", "alpha"),
    "bicycle": ("a", "beta"),
    "point_mass": ("ax", "ay"),
    "quadrotor": ("f1", "f2", "f3", "f4"),
}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def csv_header(model_tag: str, n_obstacles: int) -> list[str]:
    cols = ["t"]
    cols += list(STATE_COLUMNS[model_tag])
    cols += [f"u_ref_{c}" for c in INPUT_COLUMNS[model_tag]]
    cols += [f"u_star_{c}" for c in INPUT_COLUMNS[model_tag]]
    for i in range(n_obstacles):
        cols += [f"h_{i}", f"dist_{i}"]
    cols += ["filter_status", "active_count"]
    return cols


def write_trajectory_csv(path, log) -> None:
    n_obstacles = len(log.effective_radii)
    header = csv_header(log.model_tag, n_obstacles)
    lines = [",".join(header)]
    for rec in log.records:
        row = [_fmt(rec.t)]
        row += [_fmt(v) for v in rec.state.as_array()]
        row += [_fmt(v) for v in rec.u_ref]
        row += [_fmt(v) for v in rec.u_star]
        for i in range(n_obstacles):
            row.append(_fmt(rec.h[i]))
            row.append(_fmt(rec.distances[i]))
        row.append(rec.status)
        row.append(str(len(rec.active_set)))
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def read_trajectory_csv(path) -> tuple[list[str], list[list]]:
    """Parse a trajectory CSV back into (header, rows).

    Numeric fields come back as floats (bit-exact for finite values), the
    status column as a string, active_count as an int.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = lines[0].split(",")
    status_idx = header.index("filter_status")
    count_idx = header.index("active_count")
    rows = []
    for ln in lines[1:]:
        fields = ln.split(",")
        row = []
        for i, field in enumerate(fields):
            if i == status_idx:
                row.append(field)
            elif i == count_idx:
                row.append(int(field))
            else:
                row.append(float(field))
        rows.append(row)
    return header, rows
