"""Run metrics: computed from the column arrays a log file parses into.

Every number in a report is recomputable from the emitted CSV plus the
torque limits and wall height echoed inside the report itself; the
recompute path relies on that.  Contact samples are those with positive
wall penetration (platform below the wall height), whether or not the
clamped rendered force is zero there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Dict

import numpy as np

# A command counts as sign-inverted when it pushes measurably against the
# rendered force; matches the no-inversion guarantee tolerance.
INVERSION_TOL = 1e-9

# Settling detector: trailing window length [s] and force-spread threshold [N].
SETTLE_WINDOW = 1.0
SETTLE_THRESHOLD = 1.0


@dataclass(frozen=True)
class MetricsReport:
    """Flat summary of one closed-loop run."""

    samples: int
    ts: float
    contact_samples: int
    mean_contact_force: float
    contact_force_variance: float
    mean_alpha: float
    mean_alpha_o: float
    mean_total_damping: float
    sign_inversions: int
    joint_violation_samples: int
    joint_violation_total: int
    max_torque_ratio_1: float
    max_torque_ratio_2: float
    max_torque_ratio_3: float
    tau_max_1: float
    tau_max_2: float
    tau_max_3: float
    wall_height: float
    trailing_force_std: float
    settled: int
    total_dissipated: float
    final_e_obs: float
    final_e_pc: float


def compute_metrics(
    data: Dict[str, np.ndarray], tau_max, wall_height: float = 0.0
) -> MetricsReport:
    """Summarise column arrays (from ``read_csv`` or ``logs_to_arrays``)."""
    tau_max = np.asarray(tau_max, dtype=float)
    n = data["t"].shape[0]
    if n == 0:
        raise ValueError("cannot summarise an empty run")
    ts = float(data["t"][1] - data["t"][0]) if n > 1 else float(data["t"][0])

    f_hat = np.stack([data["fhx"], data["fhy"], data["fhz"]], axis=1)
    f_cmd = np.stack([data["fcx"], data["fcy"], data["fcz"]], axis=1)
    f_norm = np.linalg.norm(f_hat, axis=1)
    contact = data["z"] < wall_height
    n_contact = int(np.count_nonzero(contact))
    mean_force = float(f_norm[contact].mean()) if n_contact else 0.0
    var_force = float(f_norm[contact].var()) if n_contact else 0.0

    inversions = int(
        np.count_nonzero(np.einsum("ij,ij->i", f_hat, f_cmd) < -INVERSION_TOL)
    )

    tau = np.stack([data["tau1"], data["tau2"], data["tau3"]], axis=1)
    ratios = np.max(np.abs(tau), axis=0) / tau_max
    viol = data["joint_viol"]

    window = max(1, min(n, int(round(SETTLE_WINDOW / ts)))) if ts > 0 else n
    trailing_std = float(np.std(data["fhz"][n - window:]))

    return MetricsReport(
        samples=n,
        ts=ts,
        contact_samples=n_contact,
        mean_contact_force=mean_force,
        contact_force_variance=var_force,
        mean_alpha=float(data["alpha"].mean()),
        mean_alpha_o=float(data["alphao"].mean()),
        mean_total_damping=float((data["alpha"] + data["alphao"]).mean()),
        sign_inversions=inversions,
        joint_violation_samples=int(np.count_nonzero(viol > 0)),
        joint_violation_total=int(viol.sum()),
        max_torque_ratio_1=float(ratios[0]),
        max_torque_ratio_2=float(ratios[1]),
        max_torque_ratio_3=float(ratios[2]),
        tau_max_1=float(tau_max[0]),
        tau_max_2=float(tau_max[1]),
        tau_max_3=float(tau_max[2]),
        wall_height=float(wall_height),
        trailing_force_std=trailing_std,
        settled=int(trailing_std < SETTLE_THRESHOLD),
        total_dissipated=float(data["ediss"].sum()),
        final_e_obs=float(data["eobs"][-1]),
        final_e_pc=float(data["epc"][-1]),
    )


def format_report(report: MetricsReport) -> str:
    lines = []
    for f in fields(report):
        value = getattr(report, f.name)
        if isinstance(value, float):
            lines.append(f"{f.name} = {format(value, '.9g')}")
        else:
            lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> Dict[str, float]:
    values: Dict[str, float] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, _, raw = line.partition("=")
        values[key.strip()] = float(raw.strip())
    return values


def report_from_values(values: Dict[str, float]) -> MetricsReport:
    kwargs = {}
    for f in fields(MetricsReport):
        if f.name not in values:
            raise ValueError(f"report is missing key {f.name!r}")
        raw = values[f.name]
        kwargs[f.name] = int(raw) if f.type == "int" else float(raw)
    return MetricsReport(**kwargs)


def reports_match(
    a: MetricsReport, b: MetricsReport, tol: float = 1e-9
) -> Dict[str, tuple]:
    """Field-by-field comparison; returns the mismatches (empty means equal)."""
    bad = {}
    for f in fields(MetricsReport):
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if isinstance(va, int) and isinstance(vb, int):
            if va != vb:
                bad[f.name] = (va, vb)
        else:
            scale = max(abs(float(va)), abs(float(vb)), 1.0)
            if not math.isclose(float(va), float(vb), rel_tol=tol, abs_tol=tol * scale):
                bad[f.name] = (va, vb)
    return bad


def delta_report(a: MetricsReport, b: MetricsReport, label_a: str, label_b: str) -> str:
    """Side-by-side comparison text for two runs of one scenario."""
    lines = [f"# a = {label_a}", f"# b = {label_b}"]
    for f in fields(MetricsReport):
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if isinstance(va, float):
            lines.append(f"a_{f.name} = {format(va, '.9g')}")
            lines.append(f"b_{f.name} = {format(vb, '.9g')}")
            lines.append(f"delta_{f.name} = {format(vb - va, '.9g')}")
        else:
            lines.append(f"a_{f.name} = {va}")
            lines.append(f"b_{f.name} = {vb}")
            lines.append(f"delta_{f.name} = {vb - va}")
    return "\n".join(lines) + "\n"
