"""Shared value types: unit-tagged vectors, orthogonal projectors, energy ledger.

The damping strategies, device models and the closed-loop engine exchange data
through the small immutable types defined here.  Numeric payloads are plain
float arrays; the unit tags are metadata and are checked with assertions at
module boundaries, never at arithmetic time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

FORCE = "N"
VELOCITY = "m/s"
POSITION = "m"
TORQUE = "N.m"
JOINT_VELOCITY = "rad/s"

# Squared-norm threshold below which a direction carries no usable information.
DIRECTION_EPS = 1e-12

ArrayLike = Union["TaskVector", "JointVector", np.ndarray, Iterable[float]]


def as_components(value: ArrayLike, name: str = "vector") -> np.ndarray:
    """Return the raw float array behind a tagged vector or array-like.

    Raises ValueError for non-1-D or non-finite input.
    """
    if isinstance(value, (TaskVector, JointVector)):
        return value.components
    arr = np.asarray(value, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {arr}")
    return arr


@dataclass(frozen=True)
class TaskVector:
    """Cartesian-space vector (force, velocity or position) with a unit tag."""

    components: np.ndarray
    unit: str = FORCE

    def __post_init__(self):
        object.__setattr__(
            self, "components", as_components(self.components, "components")
        )

    @property
    def n(self) -> int:
        return self.components.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)


@dataclass(frozen=True)
class JointVector:
    """Joint-space vector (torque, angle or rate) with a unit tag."""

    components: np.ndarray
    unit: str = TORQUE

    def __post_init__(self):
        object.__setattr__(
            self, "components", as_components(self.components, "components")
        )

    @property
    def n(self) -> int:
        return self.components.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)


@dataclass(frozen=True)
class Projector:
    """Symmetric idempotent matrix selecting a subspace of task space."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"projector matrix must be square, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("projector matrix must be finite")
        object.__setattr__(self, "matrix", m)
        # Structural invariants; cheap for the 3x3 matrices used here.
        assert np.max(np.abs(m - m.T)) <= 1e-12, "projector must be symmetric"
        assert np.max(np.abs(m @ m - m)) <= 1e-12, "projector must be idempotent"

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v: ArrayLike) -> np.ndarray:
        return self.matrix @ as_components(v)


def make_projector(direction: ArrayLike) -> Projector:
    """Orthogonal projector onto the span of ``direction``.

    A direction with squared norm at or below ``DIRECTION_EPS`` carries no
    usable information and yields the zero projector, so both the projector
    and its complement stay well defined.
    """
    d = as_components(direction, "direction")
    s = float(d @ d)
    if s <= DIRECTION_EPS:
        return Projector(np.zeros((d.shape[0], d.shape[0])))
    return Projector(np.outer(d, d) / s)


def complement(p: Projector) -> Projector:
    """Projector onto the orthogonal complement of ``p``'s range."""
    return Projector(np.eye(p.n) - p.matrix)


@dataclass(frozen=True)
class EnergyLedger:
    """Energy bookkeeping for one control port.

    e_obs: observed net energy at the port [J]; negative means the rendered
        environment has injected energy that is not yet dissipated.
    e_pc: cumulative energy dissipated by the damping controller [J].
    e_res: residual deficit left after the last damping decision [J];
        zero or negative by construction.
    """

    e_obs: float = 0.0
    e_pc: float = 0.0
    e_res: float = 0.0

    def __post_init__(self):
        for name in ("e_obs", "e_pc", "e_res"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.e_res > 0.0:
            raise ValueError(f"e_res must be <= 0, got {self.e_res}")
