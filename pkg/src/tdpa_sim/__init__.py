"""Time-domain passivity control with priority-direction damping limitation.

A library and command line for studying how a variable damper should be
limited when a haptic device's actuators cannot exert arbitrary forces, with
a closed-loop simulation of a three-arm parallel device pressing into an
actively rendered wall.
"""

from .core import (
    FORCE,
    JOINT_VELOCITY,
    POSITION,
    TORQUE,
    VELOCITY,
    EnergyLedger,
    JointVector,
    Projector,
    TaskVector,
    complement,
    make_projector,
)
from .environment import (
    OperatorModel,
    WallMode,
    WallParams,
    operator_force,
    wall_force,
)
from .robot import (
    ActuatorLimits,
    DeltaModel,
    KinematicsError,
    SingularityError,
    SyntheticModel,
    f_max_from_limits,
    saturate_torque,
    torque_from_force,
)
from .simulate import SimConfig, SimState, SimulationAbort, initial_state, run, step
from .strategies import (
    DISSIPATION_SIGN,
    DampingDecision,
    PcInput,
    StrategyKind,
    alpha_max_norm,
    alpha_max_priority,
    alpha_o_max,
    observe,
    oracle_max_dissipation,
    pc_direction_only,
    pc_norm_limited,
    pc_prioritized,
    pc_unlimited,
    run_strategy,
)

__version__ = "0.1.0"
