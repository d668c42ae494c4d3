"""Scenario files: flat INI text mapping one-to-one onto ``SimConfig``.

Example::

    [sim]
    ts = 0.0002
    duration = 5.0
    mass = 0.5
    damping = 2.0
    strategy = prioritized
    seed = 0

    [robot]
    model = synthetic
    jacobian = 0.2 0 0 ; 0 0.2 0 ; 0 0 0.2
    x_ref = 0 0 -0.25

    [limits]
    tau_max = 8 8 8

    [wall]
    stiffness = 20000
    damping = 130
    mode = active
    height = -0.25

    [operator]
    k_hand = 500
    b_hand = 20
    waypoints =
        0.0  0 0 -0.22
        0.5  0 0 -0.29
        5.0  0 0 -0.29

The ``[sim] x0`` key defaults to the first waypoint target so scenarios start
at rest in the operator's hand.
"""

from __future__ import annotations

import configparser
from pathlib import Path

import numpy as np

from .environment import OperatorModel, WallMode, WallParams, waypoints_from_rows
from .robot import ActuatorLimits, DeltaModel, SyntheticModel
from .simulate import SimConfig
from .strategies import StrategyKind


class ConfigError(ValueError):
    """Scenario file missing, unreadable or inconsistent."""


def _floats(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.replace(",", " ").split()])
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {text!r} as numbers") from exc


def _matrix(text: str, name: str) -> np.ndarray:
    rows = [r for r in (part.strip() for part in text.split(";")) if r]
    values = [_floats(r, name) for r in rows]
    if len(values) != 3 or any(v.shape[0] != 3 for v in values):
        raise ConfigError(f"{name}: expected 3 rows of 3 numbers")
    return np.stack(values)


def _get(section, key: str, where: str) -> str:
    if key not in section:
        raise ConfigError(f"missing key {key!r} in section [{where}]")
    return section[key]


def _robot_from(section) -> object:
    model = _get(section, "model", "robot").strip().lower()
    if model == "delta":
        return DeltaModel(
            base_radius=float(section.get("base_radius", 0.2)),
            platform_radius=float(section.get("platform_radius", 0.05)),
            upper_arm=float(section.get("upper_arm", 0.2)),
            forearm=float(section.get("forearm", 0.3)),
        )
    if model == "synthetic":
        jac = _matrix(_get(section, "jacobian", "robot"), "robot.jacobian")
        x_ref = _floats(section.get("x_ref", "0 0 0"), "robot.x_ref")
        q_ref = _floats(section.get("q_ref", "0 0 0"), "robot.q_ref")
        return SyntheticModel(jacobian_schedule=jac, x_ref=x_ref, q_ref=q_ref)
    raise ConfigError(f"unknown robot model {model!r}; expected delta or synthetic")


def _waypoints_from(text: str):
    rows = []
    for line in text.strip().splitlines():
        values = _floats(line, "operator.waypoints")
        if values.shape[0] != 4:
            raise ConfigError(
                f"operator.waypoints: each row needs 't x y z', got {line!r}"
            )
        rows.append(values)
    if not rows:
        raise ConfigError("operator.waypoints: at least one row required")
    return waypoints_from_rows(rows)


def load_config(path) -> SimConfig:
    """Parse a scenario file into a ``SimConfig``; raises ``ConfigError``."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"scenario file not found: {path}")
    # ';' separates jacobian rows, so only '#' may introduce a comment.
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(path.read_text(), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    for section in ("sim", "robot", "limits", "wall", "operator"):
        if section not in parser:
            raise ConfigError(f"missing section [{section}] in {path}")
    sim = parser["sim"]
    try:
        strategy = StrategyKind.from_name(_get(sim, "strategy", "sim"))
        wall_sec = parser["wall"]
        wall = WallParams(
            stiffness=float(_get(wall_sec, "stiffness", "wall")),
            damping=float(_get(wall_sec, "damping", "wall")),
            mode=WallMode.from_name(_get(wall_sec, "mode", "wall")),
            height=float(_get(wall_sec, "height", "wall")),
        )
        op_sec = parser["operator"]
        operator = OperatorModel(
            k_hand=float(_get(op_sec, "k_hand", "operator")),
            b_hand=float(_get(op_sec, "b_hand", "operator")),
            waypoints=_waypoints_from(_get(op_sec, "waypoints", "operator")),
        )
        limits = ActuatorLimits(
            tau_max=_floats(_get(parser["limits"], "tau_max", "limits"), "tau_max")
        )
        robot = _robot_from(parser["robot"])
        x0_text = sim.get("x0", "")
        x0 = _floats(x0_text, "sim.x0") if x0_text else operator.waypoints[0][1]
        v0_text = sim.get("v0", "")
        v0 = _floats(v0_text, "sim.v0") if v0_text else np.zeros(3)
        config = SimConfig(
            ts=float(_get(sim, "ts", "sim")),
            duration=float(_get(sim, "duration", "sim")),
            mass=float(_get(sim, "mass", "sim")),
            damping=float(_get(sim, "damping", "sim")),
            strategy=strategy,
            robot=robot,
            limits=limits,
            wall=wall,
            operator=operator,
            x0=x0,
            v0=v0,
            seed=int(sim.get("seed", "0")),
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid value in {path}: {exc}") from exc
    return config
