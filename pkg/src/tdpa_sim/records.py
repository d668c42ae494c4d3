"""Per-sample simulation records and their delimited on-disk form.

The CSV layout is the external contract: fixed column order, floats at nine
significant digits, flags as integers.  Identical configurations must produce
byte-identical files, so formatting lives here in exactly one place.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np

CSV_COLUMNS = (
    "t",
    "q1", "q2", "q3",
    "qd1", "qd2", "qd3",
    "x", "y", "z",
    "vx", "vy", "vz",
    "fhx", "fhy", "fhz",
    "fcx", "fcy", "fcz",
    "tau1", "tau2", "tau3",
    "tauap1", "tauap2", "tauap3",
    "alpha", "alphao",
    "eobs", "epc", "ediss",
    "sat_alpha", "sat_alphao", "joint_viol",
)

FLAG_COLUMNS = ("sat_alpha", "sat_alphao", "joint_viol")


@dataclass(frozen=True)
class SampleLog:
    """Everything observable about one control sample."""

    t: float
    q: np.ndarray
    qd: np.ndarray
    x: np.ndarray
    v: np.ndarray
    f_hat: np.ndarray
    f_cmd: np.ndarray
    tau_cmd: np.ndarray
    tau_applied: np.ndarray
    alpha: float
    alpha_o: float
    e_obs: float
    e_pc: float
    dissipated: float
    sat_alpha: bool
    sat_alpha_o: bool
    joint_viol: int


def _fmt(value: float) -> str:
    # Normalise -0.0 so equal runs stay byte-identical regardless of sign zeros.
    if value == 0.0:
        value = 0.0
    return format(value, ".9g")


def log_to_row(log: SampleLog) -> str:
    cells: List[str] = [_fmt(log.t)]
    for vec in (
        log.q, log.qd, log.x, log.v, log.f_hat, log.f_cmd, log.tau_cmd,
        log.tau_applied,
    ):
        cells.extend(_fmt(float(c)) for c in vec)
    cells.extend(
        _fmt(s) for s in (log.alpha, log.alpha_o, log.e_obs, log.e_pc, log.dissipated)
    )
    cells.append("1" if log.sat_alpha else "0")
    cells.append("1" if log.sat_alpha_o else "0")
    cells.append(str(int(log.joint_viol)))
    return ",".join(cells)


def write_csv(rows: Sequence[SampleLog], path) -> Path:
    """Write sample logs to ``path`` in the fixed delimited layout."""
    path = Path(path)
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(log_to_row(r) for r in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path) -> Dict[str, np.ndarray]:
    """Read a log file back into column arrays (flags as integer arrays)."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected column layout in {path}")
        raw = [line.strip().split(",") for line in fh if line.strip()]
    data: Dict[str, np.ndarray] = {}
    for idx, name in enumerate(CSV_COLUMNS):
        column = [row[idx] for row in raw]
        if name in FLAG_COLUMNS:
            data[name] = np.array([int(c) for c in column], dtype=int)
        else:
            data[name] = np.array([float(c) for c in column])
    return data


def logs_to_arrays(rows: Sequence[SampleLog]) -> Dict[str, np.ndarray]:
    """Stack sample logs into the same column-array form as ``read_csv``."""
    data: Dict[str, np.ndarray] = {}
    data["t"] = np.array([r.t for r in rows])
    for name, attr in (
        ("q", "q"), ("qd", "qd"), ("tau", "tau_cmd"), ("tauap", "tau_applied"),
    ):
        stacked = np.array([getattr(r, attr) for r in rows])
        for i in range(3):
            data[f"{name}{i + 1}"] = stacked[:, i]
    for names, attr in (
        (("x", "y", "z"), "x"),
        (("vx", "vy", "vz"), "v"),
        (("fhx", "fhy", "fhz"), "f_hat"),
        (("fcx", "fcy", "fcz"), "f_cmd"),
    ):
        stacked = np.array([getattr(r, attr) for r in rows])
        for i, col in enumerate(names):
            data[col] = stacked[:, i]
    data["alpha"] = np.array([r.alpha for r in rows])
    data["alphao"] = np.array([r.alpha_o for r in rows])
    data["eobs"] = np.array([r.e_obs for r in rows])
    data["epc"] = np.array([r.e_pc for r in rows])
    data["ediss"] = np.array([r.dissipated for r in rows])
    data["sat_alpha"] = np.array([int(r.sat_alpha) for r in rows], dtype=int)
    data["sat_alphao"] = np.array([int(r.sat_alpha_o) for r in rows], dtype=int)
    data["joint_viol"] = np.array([r.joint_viol for r in rows], dtype=int)
    return data
