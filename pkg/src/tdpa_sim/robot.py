"""Device models: a three-arm parallel linkage and a synthetic stand-in.

The parallel device has three actuated arms at 120 degree spacing, each
driving a parallelogram forearm onto a common platform, so the platform
translates without rotating.  Closed-form inverse kinematics solve each arm
independently; forward kinematics intersect three spheres.  The synthetic
model wires an arbitrary (optionally time-varying) Jacobian straight through
and exists to isolate strategy behaviour from linkage geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .core import ArrayLike, as_components

# Condition-number threshold treated as a kinematic singularity.
SINGULARITY_COND = 1e6


class KinematicsError(ValueError):
    """Pose outside the solvable workspace."""


class SingularityError(KinematicsError):
    """Jacobian too ill-conditioned to invert meaningfully."""


@dataclass(frozen=True)
class ActuatorLimits:
    """Per-joint torque magnitudes the motors can sustain [N.m]."""

    tau_max: np.ndarray

    def __post_init__(self):
        tau = as_components(self.tau_max, "tau_max")
        if np.any(tau <= 0.0):
            raise ValueError(f"tau_max must be strictly positive, got {tau}")
        object.__setattr__(self, "tau_max", tau)

    @property
    def n(self) -> int:
        return self.tau_max.shape[0]


def f_max_from_limits(jacobian: np.ndarray, limits: ActuatorLimits) -> np.ndarray:
    """Per-axis task-force magnitudes exertable within the torque limits.

    Componentwise magnitude of the torque limits mapped through the inverse
    transpose Jacobian.
    """
    j = np.asarray(jacobian, dtype=float)
    try:
        f = np.linalg.solve(j.T, limits.tau_max)
    except np.linalg.LinAlgError as exc:
        raise SingularityError(f"Jacobian is singular: {exc}") from exc
    return np.abs(f)


def torque_from_force(jacobian: np.ndarray, force: ArrayLike) -> np.ndarray:
    """Joint torques statically equivalent to a task-space force."""
    return np.asarray(jacobian, dtype=float).T @ as_components(force, "force")


def saturate_torque(tau: ArrayLike, limits: ActuatorLimits) -> np.ndarray:
    """Clip a torque command into the actuator limits, componentwise."""
    return np.clip(as_components(tau, "tau"), -limits.tau_max, limits.tau_max)


def _check_condition(j: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(j)
    if not np.isfinite(cond) or cond >= SINGULARITY_COND:
        raise SingularityError(f"Jacobian condition number {cond:.3g} at singularity")
    return j


@dataclass(frozen=True)
class DeltaModel:
    """Three-arm parallel linkage with closed-form kinematics.

    base_radius: pivot circle radius on the fixed base [m].
    platform_radius: anchor circle radius on the moving platform [m].
    upper_arm: actuated arm length [m].
    forearm: parallelogram forearm length [m].

    Joint angle convention: zero is horizontal outward, positive tilts the
    arm downward (platform workspace lies below the base, z negative).
    """

    base_radius: float = 0.2
    platform_radius: float = 0.05
    upper_arm: float = 0.2
    forearm: float = 0.3

    def __post_init__(self):
        for name in ("base_radius", "platform_radius", "upper_arm", "forearm"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @property
    def n_joints(self) -> int:
        return 3

    # Arm azimuths, fixed at 120 degree spacing.
    _PHI = (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)

    def _radial(self, i: int) -> np.ndarray:
        return np.array([math.cos(self._PHI[i]), math.sin(self._PHI[i]), 0.0])

    def _elbow(self, i: int, theta: float) -> np.ndarray:
        u = self._radial(i)
        return self.base_radius * u + self.upper_arm * (
            math.cos(theta) * u - math.sin(theta) * np.array([0.0, 0.0, 1.0])
        )

    def inverse_kinematics(self, x: ArrayLike) -> np.ndarray:
        """Joint angles reaching platform position ``x``; elbow-out branch."""
        p = as_components(x, "x")
        if p.shape[0] != 3:
            raise ValueError(f"x must have 3 components, got {p.shape[0]}")
        r = self.base_radius - self.platform_radius
        la, lf = self.upper_arm, self.forearm
        q = np.empty(3)
        for i in range(3):
            u = self._radial(i)
            d = p - r * u
            a = float(d @ u)
            h = float(d[2])
            g = (float(d @ d) + la * la - lf * lf) / (2.0 * la)
            reach = math.hypot(a, h)
            if reach < 1e-12 or abs(g) > reach:
                raise KinematicsError(f"position {p} unreachable by arm {i + 1}")
            psi = math.atan2(h, a)
            theta = -psi - math.acos(g / reach)
            # Wrap into (-pi, pi] for a stable branch.
            theta = math.atan2(math.sin(theta), math.cos(theta))
            q[i] = theta
        return q

    def forward_kinematics(self, q: ArrayLike) -> np.ndarray:
        """Platform position for joint angles ``q``; lower intersection branch."""
        angles = as_components(q, "q")
        if angles.shape[0] != 3:
            raise ValueError(f"q must have 3 components, got {angles.shape[0]}")
        # Shift each elbow inward by the platform radius: the platform centre
        # then lies on a sphere of forearm radius around each shifted centre.
        centres = [
            self._elbow(i, float(angles[i])) - self.platform_radius * self._radial(i)
            for i in range(3)
        ]
        c0, c1, c2 = centres
        lin = 2.0 * np.stack([c0 - c1, c0 - c2])
        rhs = np.array(
            [float(c0 @ c0 - c1 @ c1), float(c0 @ c0 - c2 @ c2)]
        )
        normal = np.cross(c0 - c1, c0 - c2)
        n_norm = float(np.linalg.norm(normal))
        if n_norm < 1e-12:
            raise KinematicsError("sphere centres are collinear; no unique pose")
        normal = normal / n_norm
        x0, *_ = np.linalg.lstsq(lin, rhs, rcond=None)
        # Intersect the centre line with the first sphere.
        delta = x0 - c0
        b = float(normal @ delta)
        c = float(delta @ delta) - self.forearm**2
        disc = b * b - c
        if disc < 0.0:
            raise KinematicsError(f"joint angles {angles} close no pose")
        root = math.sqrt(disc)
        low = x0 + (-b - root) * normal
        high = x0 + (-b + root) * normal
        return low if low[2] <= high[2] else high

    def jacobian(self, q: ArrayLike) -> np.ndarray:
        """Task-velocity map ``v = J qd`` at joint angles ``q``."""
        angles = as_components(q, "q")
        x = self.forward_kinematics(angles)
        rows = np.empty((3, 3))
        gains = np.empty(3)
        for i in range(3):
            theta = float(angles[i])
            u = self._radial(i)
            elbow = self._elbow(i, theta)
            s = (x + self.platform_radius * u - elbow) / self.forearm
            d_elbow = self.upper_arm * (
                -math.sin(theta) * u - math.cos(theta) * np.array([0.0, 0.0, 1.0])
            )
            rows[i] = s
            gains[i] = float(s @ d_elbow)
        try:
            j = np.linalg.solve(rows, np.diag(gains))
        except np.linalg.LinAlgError as exc:
            raise SingularityError(f"arm directions degenerate: {exc}") from exc
        return _check_condition(j)

    def pose_state(self, x: ArrayLike, t: float = 0.0):
        """(joint angles, Jacobian) for a platform position; ``t`` unused."""
        q = self.inverse_kinematics(x)
        return q, self.jacobian(q)


@dataclass(frozen=True)
class SyntheticModel:
    """Pass-through device defined directly by a Jacobian schedule.

    ``jacobian_schedule`` is a constant 3x3 matrix or a callable of time.
    Poses relate linearly through the scheduled Jacobian around the
    reference pose (exact for a constant schedule).
    """

    jacobian_schedule: Union[np.ndarray, Callable[[float], np.ndarray]]
    x_ref: np.ndarray = field(default_factory=lambda: np.zeros(3))
    q_ref: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "x_ref", as_components(self.x_ref, "x_ref"))
        object.__setattr__(self, "q_ref", as_components(self.q_ref, "q_ref"))
        if not callable(self.jacobian_schedule):
            j = np.asarray(self.jacobian_schedule, dtype=float)
            if j.shape != (self.x_ref.shape[0],) * 2:
                raise ValueError(f"jacobian must be square, got shape {j.shape}")
            if not np.all(np.isfinite(j)):
                raise ValueError("jacobian must be finite")
            object.__setattr__(self, "jacobian_schedule", j)

    @property
    def n_joints(self) -> int:
        return self.x_ref.shape[0]

    def jacobian(self, q: ArrayLike = None, t: float = 0.0) -> np.ndarray:
        if callable(self.jacobian_schedule):
            j = np.asarray(self.jacobian_schedule(float(t)), dtype=float)
        else:
            j = self.jacobian_schedule
        return _check_condition(j)

    def forward_kinematics(self, q: ArrayLike, t: float = 0.0) -> np.ndarray:
        angles = as_components(q, "q")
        return self.x_ref + self.jacobian(t=t) @ (angles - self.q_ref)

    def inverse_kinematics(self, x: ArrayLike, t: float = 0.0) -> np.ndarray:
        p = as_components(x, "x")
        return self.q_ref + np.linalg.solve(self.jacobian(t=t), p - self.x_ref)

    def pose_state(self, x: ArrayLike, t: float = 0.0):
        """(joint coordinates, Jacobian) at time ``t`` for position ``x``."""
        j = self.jacobian(t=t)
        q = self.q_ref + np.linalg.solve(j, as_components(x, "x") - self.x_ref)
        return q, j


RobotModel = Union[DeltaModel, SyntheticModel]
