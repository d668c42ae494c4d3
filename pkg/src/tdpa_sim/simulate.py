"""Fixed-step closed loop: operator, rendered wall, damping strategy, device.

Per sample k (time t = k ts), in order:

1. read the device state x(k), v(k);
2. render the wall force from that state;
3. advance the energy observer, crediting the damping energy removed at k-1;
4. run the configured damping strategy to get the commanded force;
5. map the command to joint torques and saturate them;
6. integrate the device mass under hand force, applied force and viscous
   drag (semi-implicit Euler: velocity first, then position);
7. emit the sample record.

The device is modelled as a point mass in task space; the actuators act on it
through the model Jacobian, the hand directly.  The observer watches the
port power of the rendered wall, while saturation happens downstream, so a
strategy that books energy the motors cannot exert is found out by the loop
dynamics rather than by its own ledger.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Tuple

import numpy as np

from .core import FORCE, VELOCITY, EnergyLedger, TaskVector
from .environment import OperatorModel, WallParams, operator_force, wall_force
from .records import SampleLog
from .robot import (
    ActuatorLimits,
    KinematicsError,
    RobotModel,
    f_max_from_limits,
    saturate_torque,
    torque_from_force,
)
from .strategies import (
    DISSIPATION_SIGN,
    PcInput,
    StrategyKind,
    observe,
    run_strategy,
)

logger = logging.getLogger(__name__)

# Slack on the per-joint limit check; flags only clear exceedances.
JOINT_VIOL_RTOL = 1e-6


class SimulationAbort(RuntimeError):
    """Loop stopped early: singular pose, unreachable pose or runaway state."""


@dataclass(frozen=True)
class SimConfig:
    """Complete closed-loop scenario description.

    ts: sample time [s]; duration: run length [s].
    mass / damping: device point-mass parameters [kg, N.s/m].
    strategy: damping-limitation strategy to run.
    robot / limits / wall / operator: the loop's four subsystems.
    x0: initial platform position [m]; v0: initial velocity [m/s].
    seed: reserved for stochastic extensions; part of the reproducibility
        contract (identical config and seed give byte-identical logs).
    """

    ts: float
    duration: float
    mass: float
    damping: float
    strategy: StrategyKind
    robot: RobotModel
    limits: ActuatorLimits
    wall: WallParams
    operator: OperatorModel
    x0: np.ndarray = field(default_factory=lambda: np.zeros(3))
    v0: np.ndarray = field(default_factory=lambda: np.zeros(3))
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.ts) and self.ts > 0.0):
            raise ValueError(f"ts must be positive, got {self.ts}")
        if not (math.isfinite(self.duration) and self.duration > 0.0):
            raise ValueError(f"duration must be positive, got {self.duration}")
        if not (math.isfinite(self.mass) and self.mass > 0.0):
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not (math.isfinite(self.damping) and self.damping >= 0.0):
            raise ValueError(f"damping must be >= 0, got {self.damping}")
        object.__setattr__(self, "x0", np.asarray(self.x0, dtype=float))
        object.__setattr__(self, "v0", np.asarray(self.v0, dtype=float))

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.ts))


@dataclass(frozen=True)
class SimState:
    """Device and bookkeeping state entering sample ``k``."""

    k: int
    x: np.ndarray
    v: np.ndarray
    ledger: EnergyLedger
    prev_dissipated: float = 0.0


def initial_state(config: SimConfig) -> SimState:
    return SimState(
        k=0, x=config.x0.copy(), v=config.v0.copy(), ledger=EnergyLedger()
    )


def step(state: SimState, config: SimConfig) -> Tuple[SimState, SampleLog]:
    """Advance the loop by one sample; returns the new state and its record."""
    ts = config.ts
    t = state.k * ts
    x = state.x
    v = state.v
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
        raise SimulationAbort(f"non-finite device state at t={t:.6g} s")

    try:
        q, jac = config.robot.pose_state(x, t)
    except KinematicsError as exc:
        raise SimulationAbort(f"kinematics failed at t={t:.6g} s: {exc}") from exc
    qd = np.linalg.solve(jac, v)

    f_hat = wall_force(x, v, config.wall)
    # Port power: positive when the device feeds energy into the wall.
    port_v = TaskVector(DISSIPATION_SIGN * v, VELOCITY)
    ledger = observe(state.ledger, f_hat, port_v, ts, state.prev_dissipated)

    f_max = f_max_from_limits(jac, config.limits)
    decision = run_strategy(
        config.strategy,
        PcInput(
            f_hat=f_hat,
            v=TaskVector(v, VELOCITY),
            f_max=TaskVector(f_max, FORCE),
            e_obs=ledger.e_obs,
            ts=ts,
        ),
    )
    ledger = replace(
        ledger,
        e_pc=ledger.e_pc + decision.dissipated_energy,
        e_res=min(0.0, ledger.e_obs + decision.dissipated_energy),
    )

    tau_cmd = torque_from_force(jac, decision.f_cmd)
    tau_applied = saturate_torque(tau_cmd, config.limits)
    f_applied = np.linalg.solve(jac.T, tau_applied)
    joint_viol = int(
        np.count_nonzero(
            np.abs(tau_cmd) > config.limits.tau_max * (1.0 + JOINT_VIOL_RTOL)
        )
    )

    f_hand = operator_force(t, x, v, config.operator)
    accel = (f_hand.components + f_applied - config.damping * v) / config.mass
    v_next = v + ts * accel
    x_next = x + ts * v_next

    log = SampleLog(
        t=t,
        q=q,
        qd=qd,
        x=x.copy(),
        v=v.copy(),
        f_hat=f_hat.components,
        f_cmd=decision.f_cmd.components,
        tau_cmd=tau_cmd,
        tau_applied=tau_applied,
        alpha=decision.alpha,
        alpha_o=decision.alpha_o,
        e_obs=ledger.e_obs,
        e_pc=ledger.e_pc,
        dissipated=decision.dissipated_energy,
        sat_alpha=decision.alpha_saturated,
        sat_alpha_o=decision.alpha_o_saturated,
        joint_viol=joint_viol,
    )
    next_state = SimState(
        k=state.k + 1,
        x=x_next,
        v=v_next,
        ledger=ledger,
        prev_dissipated=decision.dissipated_energy,
    )
    return next_state, log


def run(config: SimConfig) -> List[SampleLog]:
    """Run the full scenario; returns one record per sample."""
    state = initial_state(config)
    rows: List[SampleLog] = []
    for _ in range(config.n_steps):
        state, log = step(state, config)
        rows.append(log)
    return rows
