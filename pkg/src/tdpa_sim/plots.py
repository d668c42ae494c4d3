"""Figure rendering for run and comparison reports.

The delimited log remains the authoritative output; these figures are
derived views saved next to it for quick inspection.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def _new_axes(n_rows: int = 1):
    fig, axes = plt.subplots(n_rows, 1, figsize=(8.0, 2.6 * n_rows), sharex=True)
    return fig, np.atleast_1d(axes)


def _finish(fig, axes, path: Path) -> Path:
    for ax in axes:
        ax.grid(True, alpha=0.3)
        ax.legend(loc="upper right", fontsize=8)
    axes[-1].set_xlabel("t [s]")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def render_run_figures(
    data: Dict[str, np.ndarray], out_dir, stem: str, tau_max
) -> List[Path]:
    """Save force, damping, torque and energy figures for one run."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tau_max = np.asarray(tau_max, dtype=float)
    t = data["t"]
    saved: List[Path] = []

    fig, axes = _new_axes(2)
    axes[0].plot(t, data["fhz"], label="rendered fz [N]", lw=0.8)
    axes[0].plot(t, data["fcz"], label="commanded fz [N]", lw=0.8)
    axes[1].plot(t, data["z"], label="z [m]", lw=0.8)
    saved.append(_finish(fig, axes, out_dir / f"{stem}_forces.png"))

    fig, axes = _new_axes(1)
    axes[0].plot(t, data["alpha"], label="alpha [N.s/m]", lw=0.8)
    axes[0].plot(t, data["alphao"], label="alpha_o [N.s/m]", lw=0.8)
    saved.append(_finish(fig, axes, out_dir / f"{stem}_damping.png"))

    fig, axes = _new_axes(3)
    for i in range(3):
        axes[i].plot(t, np.abs(data[f"tau{i + 1}"]), label=f"|tau{i + 1}| [N.m]",
                     lw=0.8)
        axes[i].axhline(tau_max[i], color="tab:red", ls="--", lw=0.8,
                        label=f"limit {tau_max[i]:g}")
    saved.append(_finish(fig, axes, out_dir / f"{stem}_torques.png"))

    fig, axes = _new_axes(1)
    axes[0].plot(t, data["eobs"], label="observed energy [J]", lw=0.8)
    axes[0].plot(t, data["epc"], label="dissipated total [J]", lw=0.8)
    saved.append(_finish(fig, axes, out_dir / f"{stem}_energy.png"))
    return saved


def render_compare_figures(
    data_a: Dict[str, np.ndarray],
    data_b: Dict[str, np.ndarray],
    label_a: str,
    label_b: str,
    out_dir,
    stem: str = "compare",
) -> List[Path]:
    """Save overlay figures contrasting two runs of one scenario."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    saved: List[Path] = []

    fig, axes = _new_axes(2)
    axes[0].plot(data_a["t"], data_a["fhz"], label=f"{label_a} fz [N]", lw=0.8)
    axes[0].plot(data_b["t"], data_b["fhz"], label=f"{label_b} fz [N]", lw=0.8)
    axes[1].plot(data_a["t"], data_a["z"], label=f"{label_a} z [m]", lw=0.8)
    axes[1].plot(data_b["t"], data_b["z"], label=f"{label_b} z [m]", lw=0.8)
    saved.append(_finish(fig, axes, out_dir / f"{stem}_forces.png"))

    fig, axes = _new_axes(1)
    total_a = data_a["alpha"] + data_a["alphao"]
    total_b = data_b["alpha"] + data_b["alphao"]
    axes[0].plot(data_a["t"], total_a, label=f"{label_a} damping [N.s/m]", lw=0.8)
    axes[0].plot(data_b["t"], total_b, label=f"{label_b} damping [N.s/m]", lw=0.8)
    saved.append(_finish(fig, axes, out_dir / f"{stem}_damping.png"))

    fig, axes = _new_axes(1)
    for data, label in ((data_a, label_a), (data_b, label_b)):
        tau = np.stack([data["tau1"], data["tau2"], data["tau3"]], axis=1)
        axes[0].plot(data["t"], np.linalg.norm(tau, axis=1),
                     label=f"{label} ||tau|| [N.m]", lw=0.8)
    saved.append(_finish(fig, axes, out_dir / f"{stem}_torques.png"))
    return saved
