"""Rendered wall and scripted operator hand.

The wall lies in the xy-plane at a configurable height and pushes along +z
with a spring-damper law while the platform penetrates it.  In active mode
the damper sign is inverted, which feeds energy into the device on the way
out of the wall; this is the disturbance the damping strategies must absorb.
The operator is a positional spring-damper hand tracking a piecewise-linear
waypoint schedule.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .core import FORCE, ArrayLike, TaskVector, as_components


class WallMode(enum.Enum):
    PASSIVE = "passive"
    ACTIVE = "active"

    @classmethod
    def from_name(cls, name: str) -> "WallMode":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown wall mode {name!r}; expected one of: {valid}")


@dataclass(frozen=True)
class WallParams:
    """Spring-damper wall in the xy-plane.

    stiffness: spring constant [N/m].
    damping: damper constant [N.s/m]; its sign is inverted in active mode.
    mode: PASSIVE dissipates, ACTIVE injects energy on withdrawal.
    height: wall plane z-coordinate [m]; penetration is height - z.
    """

    stiffness: float = 20000.0
    damping: float = 130.0
    mode: WallMode = WallMode.PASSIVE
    height: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.stiffness) and self.stiffness >= 0.0):
            raise ValueError(f"stiffness must be >= 0, got {self.stiffness}")
        if not (math.isfinite(self.damping) and self.damping >= 0.0):
            raise ValueError(f"damping must be >= 0, got {self.damping}")
        if not math.isfinite(self.height):
            raise ValueError(f"height must be finite, got {self.height}")


def wall_force(x: ArrayLike, v: ArrayLike, wall: WallParams) -> TaskVector:
    """Rendered wall force at platform position ``x`` and velocity ``v``.

    Zero out of contact.  In contact the damper term ``-b vz`` opposes the
    platform in passive mode; active mode flips it, so the wall does net
    positive work over a press-release cycle.  The passive wall is clamped
    to push only (never pulls); the active wall is left unclamped, its pull
    transients are part of the injected disturbance.
    """
    p = as_components(x, "x")
    w = as_components(v, "v")
    penetration = wall.height - float(p[2])
    fz = 0.0
    if penetration > 0.0:
        sign = 1.0 if wall.mode is WallMode.PASSIVE else -1.0
        fz = wall.stiffness * penetration - sign * wall.damping * float(w[2])
        if wall.mode is WallMode.PASSIVE:
            fz = max(fz, 0.0)
    f = np.zeros(p.shape[0])
    f[2] = fz
    return TaskVector(f, FORCE)


@dataclass(frozen=True)
class OperatorModel:
    """Spring-damper hand tracking a waypoint schedule.

    k_hand: hand stiffness [N/m].
    b_hand: hand damping [N.s/m].
    waypoints: (time, target position) pairs with strictly increasing times;
        targets interpolate linearly and hold at both ends.
    """

    k_hand: float = 500.0
    b_hand: float = 20.0
    waypoints: Tuple[Tuple[float, np.ndarray], ...] = ()

    def __post_init__(self):
        if not (math.isfinite(self.k_hand) and self.k_hand >= 0.0):
            raise ValueError(f"k_hand must be >= 0, got {self.k_hand}")
        if not (math.isfinite(self.b_hand) and self.b_hand >= 0.0):
            raise ValueError(f"b_hand must be >= 0, got {self.b_hand}")
        if not self.waypoints:
            raise ValueError("at least one waypoint is required")
        parsed = []
        last_t = -math.inf
        for entry in self.waypoints:
            t, target = entry
            t = float(t)
            if not math.isfinite(t) or t <= last_t:
                raise ValueError("waypoint times must be finite and strictly increasing")
            last_t = t
            parsed.append((t, as_components(target, "waypoint target")))
        object.__setattr__(self, "waypoints", tuple(parsed))
        object.__setattr__(self, "_times", [t for t, _ in parsed])

    def target(self, t: float) -> Tuple[np.ndarray, np.ndarray]:
        """(target position, target velocity) at time ``t``; held at the ends."""
        times = self._times
        pts = self.waypoints
        if t <= times[0]:
            return pts[0][1], np.zeros_like(pts[0][1])
        if t >= times[-1]:
            return pts[-1][1], np.zeros_like(pts[-1][1])
        i = bisect.bisect_right(times, t)
        t0, p0 = pts[i - 1]
        t1, p1 = pts[i]
        rate = (p1 - p0) / (t1 - t0)
        return p0 + rate * (t - t0), rate


def operator_force(
    t: float, x: ArrayLike, v: ArrayLike, operator: OperatorModel
) -> TaskVector:
    """Hand force pulling the platform toward the scheduled target."""
    p = as_components(x, "x")
    w = as_components(v, "v")
    target, target_rate = operator.target(float(t))
    f = operator.k_hand * (target - p) + operator.b_hand * (target_rate - w)
    return TaskVector(f, FORCE)


def waypoints_from_rows(rows: Sequence[Sequence[float]]):
    """Convert ``(t, x, y, z)`` rows into the waypoint tuple format."""
    return tuple((float(r[0]), np.asarray(r[1:4], dtype=float)) for r in rows)
