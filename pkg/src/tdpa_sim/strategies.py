"""Passivity observer and the damping-limitation strategy family.

A rendered environment that turns active injects energy into the device; the
observer tracks that energy and a variable damper burns it off.  The four
strategies differ only in how the damping gain is limited to what the
actuators can actually exert:

* ``pc_unlimited``      - no limitation; the textbook variable damper.
* ``pc_norm_limited``   - caps the damping force by the norm of the per-axis
                          force limits, ignoring how those limits distribute
                          over axes.
* ``pc_direction_only`` - damps only along the rendered force direction with
                          no gain cap at all.
* ``pc_prioritized``    - damps along the rendered force direction first,
                          bounded so the command can never flip sign, then
                          routes the remaining deficit into the orthogonal
                          complement under per-axis force limits.

Sign convention: the observer integrates the power flowing into the rendered
environment port.  In device coordinates (rendered force f, device velocity v)
that power is ``DISSIPATION_SIGN * f.v``, and every strategy's damping term
enters the commanded force as ``DISSIPATION_SIGN * alpha * v`` so it opposes
the energy-injecting flow.  The constant below is the single place where the
convention is fixed.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Tuple

import numpy as np

from .core import (
    FORCE,
    VELOCITY,
    ArrayLike,
    EnergyLedger,
    TaskVector,
    as_components,
    complement,
    make_projector,
)

logger = logging.getLogger(__name__)

# Device-frame sign of every dissipative term (see module docstring).
DISSIPATION_SIGN = -1.0

# Squared-velocity guard below which damping against a subspace is skipped.
VELOCITY_EPS = 1e-12
# Per-axis velocity guard for the orthogonal per-axis gain bound [m/s].
AXIS_VELOCITY_EPS = 1e-9


class StrategyKind(enum.Enum):
    UNLIMITED = "unlimited"
    NORM_LIMITED = "norm_limited"
    DIRECTION_ONLY = "direction_only"
    PRIORITIZED = "prioritized"

    @classmethod
    def from_name(cls, name: str) -> "StrategyKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown strategy {name!r}; expected one of: {valid}")


@dataclass(frozen=True)
class PcInput:
    """One damping decision's inputs.

    f_hat: rendered environment force [N].
    v: device velocity [m/s].
    f_max: per-axis exertable force magnitudes [N], all >= 0.
    e_obs: observed port energy [J]; negative demands dissipation.
    ts: sample time [s].
    """

    f_hat: TaskVector
    v: TaskVector
    f_max: TaskVector
    e_obs: float
    ts: float

    def __post_init__(self):
        for name, unit in (("f_hat", FORCE), ("v", VELOCITY), ("f_max", FORCE)):
            value = getattr(self, name)
            if not isinstance(value, TaskVector):
                value = TaskVector(as_components(value, name), unit)
                object.__setattr__(self, name, value)
            assert value.unit == unit, f"{name} must carry unit {unit!r}"
        if self.f_hat.n != self.v.n or self.f_hat.n != self.f_max.n:
            raise ValueError("f_hat, v and f_max must share one dimension")
        if np.any(self.f_max.components < 0.0):
            raise ValueError("f_max must be non-negative")
        e = float(self.e_obs)
        ts = float(self.ts)
        if not math.isfinite(e):
            raise ValueError(f"e_obs must be finite, got {e}")
        if not (math.isfinite(ts) and ts > 0.0):
            raise ValueError(f"ts must be positive and finite, got {ts}")
        object.__setattr__(self, "e_obs", e)
        object.__setattr__(self, "ts", ts)


@dataclass(frozen=True)
class DampingDecision:
    """One damping decision's outputs.

    alpha / alpha_o: applied damping gains [N.s/m], primary and orthogonal.
    f_cmd: commanded force [N].
    dissipated_energy: energy the damping terms remove this sample [J].
    alpha_saturated / alpha_o_saturated: whether the respective gain was
        clipped by its limitation rule.
    """

    alpha: float
    alpha_o: float
    f_cmd: TaskVector
    dissipated_energy: float
    alpha_saturated: bool = False
    alpha_o_saturated: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not (math.isfinite(self.alpha_o) and self.alpha_o >= 0.0):
            raise ValueError(f"alpha_o must be finite and >= 0, got {self.alpha_o}")
        if not (
            math.isfinite(self.dissipated_energy) and self.dissipated_energy >= 0.0
        ):
            raise ValueError(
                f"dissipated_energy must be finite and >= 0, "
                f"got {self.dissipated_energy}"
            )
        assert self.f_cmd.unit == FORCE


def observe(
    ledger: EnergyLedger,
    f_hat: ArrayLike,
    v: ArrayLike,
    ts: float,
    e_pc_prev_step: float,
) -> EnergyLedger:
    """Advance the observed port energy by one sample.

    ``v`` is the port-side velocity: the caller orients it so positive
    ``f_hat . v`` is power absorbed by the rendered environment.
    ``e_pc_prev_step`` credits back the energy the damper removed on the
    previous sample.
    """
    f = as_components(f_hat, "f_hat")
    w = as_components(v, "v")
    ts = float(ts)
    e_prev = float(e_pc_prev_step)
    if not (math.isfinite(ts) and ts > 0.0):
        raise ValueError(f"ts must be positive and finite, got {ts}")
    if not math.isfinite(e_prev):
        raise ValueError(f"e_pc_prev_step must be finite, got {e_prev}")
    return replace(ledger, e_obs=ledger.e_obs + ts * float(f @ w) + e_prev)


# First clamp event per process is surfaced loudly; the rest go to debug so
# a scenario that rides the limit does not flood the log.
_clamp_warned = False


def _feasible_reference(pc_in: PcInput) -> np.ndarray:
    """Rendered force clamped into the per-axis exertable range.

    The rendered reference is expected to be mostly exertable; clamping keeps
    the strategies' bookkeeping consistent when a scenario exceeds the
    actuators, and the first occurrence is logged as a warning.
    """
    global _clamp_warned
    f = pc_in.f_hat.components
    f_max = pc_in.f_max.components
    clipped = np.clip(f, -f_max, f_max)
    if not np.array_equal(clipped, f):
        level = logging.DEBUG if _clamp_warned else logging.WARNING
        _clamp_warned = True
        logger.log(
            level, "rendered force %s exceeds per-axis limits %s; clamping", f, f_max
        )
    return clipped


def pc_unlimited(pc_in: PcInput) -> DampingDecision:
    """Variable damper with no gain limitation."""
    f = _feasible_reference(pc_in)
    v = pc_in.v.components
    vv = float(v @ v)
    if pc_in.e_obs < 0.0 and vv > VELOCITY_EPS:
        alpha = -pc_in.e_obs / (pc_in.ts * vv)
    else:
        alpha = 0.0
    f_cmd = f + DISSIPATION_SIGN * alpha * v
    return DampingDecision(
        alpha=alpha,
        alpha_o=0.0,
        f_cmd=TaskVector(f_cmd, FORCE),
        dissipated_energy=pc_in.ts * alpha * vv,
    )


def alpha_max_norm(pc_in: PcInput) -> float:
    """Largest gain keeping ``||alpha * v|| <= ||f_max||``.

    Undefined for vanishing velocity; callers must guard.
    """
    v = pc_in.v.components
    vv = float(v @ v)
    if vv <= VELOCITY_EPS:
        raise ValueError("alpha_max_norm is undefined for vanishing velocity")
    f_max = pc_in.f_max.components
    return math.sqrt(float(f_max @ f_max) / vv)


def pc_norm_limited(pc_in: PcInput) -> DampingDecision:
    """Variable damper along the full velocity, capped by the limit norm.

    The cap only constrains the norm of the damping force, so single axes can
    still be driven past their individual limits when the velocity or the
    limits are anisotropic.
    """
    f = _feasible_reference(pc_in)
    v = pc_in.v.components
    vv = float(v @ v)
    alpha = 0.0
    saturated = False
    if pc_in.e_obs < 0.0 and vv > VELOCITY_EPS:
        demand = -pc_in.e_obs / (pc_in.ts * vv)
        limit = alpha_max_norm(pc_in)
        saturated = demand > limit
        alpha = min(demand, limit)
    f_cmd = f + DISSIPATION_SIGN * alpha * v
    return DampingDecision(
        alpha=alpha,
        alpha_o=0.0,
        f_cmd=TaskVector(f_cmd, FORCE),
        dissipated_energy=pc_in.ts * alpha * vv,
        alpha_saturated=saturated,
    )


def pc_direction_only(pc_in: PcInput) -> DampingDecision:
    """Variable damper restricted to the rendered force direction, uncapped.

    Demonstrates why direction restriction alone is not enough: with no gain
    bound the damping term can overwhelm the reference and flip the commanded
    force against it.
    """
    f = _feasible_reference(pc_in)
    proj = make_projector(f)
    v = pc_in.v.components
    pv = proj.matrix @ v
    vpv = float(v @ pv)
    alpha = 0.0
    if pc_in.e_obs < 0.0 and vpv > VELOCITY_EPS:
        alpha = -pc_in.e_obs / (pc_in.ts * vpv)
    f_cmd = f + DISSIPATION_SIGN * alpha * pv
    return DampingDecision(
        alpha=alpha,
        alpha_o=0.0,
        f_cmd=TaskVector(f_cmd, FORCE),
        dissipated_energy=pc_in.ts * alpha * vpv,
    )


def alpha_max_priority(f_hat: ArrayLike, v: ArrayLike) -> float:
    """Largest primary gain whose damping force stays within the reference.

    Guarantees ``||alpha * P v|| <= ||f_hat||`` for the projector P onto the
    reference direction, which is what rules out a sign flip of the command.
    Undefined when the velocity has no component along the reference; callers
    skip the primary stage in that case.
    """
    f = as_components(f_hat, "f_hat")
    w = as_components(v, "v")
    proj = make_projector(f)
    pv = proj.matrix @ w
    vpv = float(w @ pv)
    if vpv <= VELOCITY_EPS:
        raise ValueError(
            "alpha_max_priority is undefined for velocity orthogonal to f_hat"
        )
    return math.sqrt(float(f @ f) / vpv)


def alpha_o_max(f_hat: ArrayLike, v: ArrayLike, f_max: ArrayLike) -> float:
    """Largest orthogonal gain respecting every per-axis force limit.

    The bound is ``min_i f_max_i / |v_o_i|`` over the axes where the
    orthogonal velocity is resolvable; when no axis is, there is nothing to
    bound and the sentinel ``math.inf`` is returned (the orthogonal stage is
    then skipped by its own velocity guard).
    """
    f = as_components(f_hat, "f_hat")
    w = as_components(v, "v")
    fm = as_components(f_max, "f_max")
    v_o = complement(make_projector(f)).matrix @ w
    bound = math.inf
    for i in range(v_o.shape[0]):
        mag = abs(float(v_o[i]))
        if mag > AXIS_VELOCITY_EPS:
            bound = min(bound, float(fm[i]) / mag)
    return bound


def pc_prioritized(pc_in: PcInput) -> DampingDecision:
    """Two-stage damper: reference direction first, orthogonal complement second.

    The primary gain is capped so its damping force never exceeds the rendered
    force in magnitude (no sign flip); whatever deficit remains is routed into
    the orthogonal complement, capped axis by axis at the exertable force.
    Any deficit that still remains stays in the ledger for later samples.
    """
    f = _feasible_reference(pc_in)
    v = pc_in.v.components
    ts = pc_in.ts
    proj = make_projector(f)
    pv = proj.matrix @ v
    vpv = float(v @ pv)

    alpha = 0.0
    saturated = False
    if pc_in.e_obs < 0.0 and vpv > VELOCITY_EPS:
        demand = -pc_in.e_obs / (ts * vpv)
        limit = math.sqrt(float(f @ f) / vpv)
        saturated = demand > limit
        alpha = min(demand, limit)
    e_res = pc_in.e_obs + ts * alpha * vpv

    v_o = v - pv
    vov = float(v_o @ v_o)
    alpha_o = 0.0
    saturated_o = False
    if e_res < 0.0 and vov > VELOCITY_EPS:
        demand_o = -e_res / (ts * vov)
        limit_o = math.inf
        for i in range(v_o.shape[0]):
            mag = abs(float(v_o[i]))
            if mag > AXIS_VELOCITY_EPS:
                limit_o = min(limit_o, float(pc_in.f_max.components[i]) / mag)
        saturated_o = demand_o > limit_o
        alpha_o = min(demand_o, limit_o)

    f_cmd = f + DISSIPATION_SIGN * (alpha * pv + alpha_o * v_o)
    return DampingDecision(
        alpha=alpha,
        alpha_o=alpha_o,
        f_cmd=TaskVector(f_cmd, FORCE),
        dissipated_energy=ts * (alpha * vpv + alpha_o * vov),
        alpha_saturated=saturated,
        alpha_o_saturated=saturated_o,
    )


STRATEGIES: dict[StrategyKind, Callable[[PcInput], DampingDecision]] = {
    StrategyKind.UNLIMITED: pc_unlimited,
    StrategyKind.NORM_LIMITED: pc_norm_limited,
    StrategyKind.DIRECTION_ONLY: pc_direction_only,
    StrategyKind.PRIORITIZED: pc_prioritized,
}


def run_strategy(kind: StrategyKind, pc_in: PcInput) -> DampingDecision:
    return STRATEGIES[kind](pc_in)


def oracle_max_dissipation(
    pc_in: PcInput, grid: int = 201, refine: int = 2
) -> Tuple[float, float, float]:
    """Brute-force reference for the prioritized damping decision.

    Searches a dense grid of gain pairs (alpha, alpha_o) for the one
    dissipating the most energy subject only to the stated constraints:

    * primary damping force within the rendered force norm,
    * orthogonal damping force within every per-axis limit,
    * total dissipated energy at most the observed deficit.

    Ties in dissipated energy prefer the largest primary gain, then the
    smallest orthogonal gain.  ``refine`` extra passes zoom the grid around
    the incumbent so the returned gains resolve well below one grid cell.
    Returns ``(alpha, alpha_o, dissipated_energy)``.  Deliberately
    independent of the closed-form strategy implementations.
    """
    f = np.clip(pc_in.f_hat.components, -pc_in.f_max.components, pc_in.f_max.components)
    v = pc_in.v.components
    ts = pc_in.ts
    deficit = -pc_in.e_obs
    if deficit <= 0.0:
        return 0.0, 0.0, 0.0

    ff = float(f @ f)
    proj = make_projector(f)
    pv = proj.matrix @ v
    vpv = float(v @ pv)
    v_o = v - pv
    vov = float(v_o @ v_o)
    f_norm = math.sqrt(ff)
    pv_norm = math.sqrt(max(vpv, 0.0))
    fm = pc_in.f_max.components
    axes = [i for i in range(v_o.shape[0]) if abs(float(v_o[i])) > AXIS_VELOCITY_EPS]

    a_hi = deficit / (ts * vpv) if vpv > VELOCITY_EPS else 0.0
    o_hi = deficit / (ts * vov) if vov > VELOCITY_EPS else 0.0

    def search(a_lo, a_hi_, o_lo, o_hi_):
        alphas = np.linspace(a_lo, a_hi_, grid) if a_hi_ > a_lo else np.array([a_lo])
        alphos = np.linspace(o_lo, o_hi_, grid) if o_hi_ > o_lo else np.array([o_lo])
        ok_a = alphas * pv_norm <= f_norm * (1.0 + 1e-12) + 1e-15
        ok_o = np.ones(alphos.shape[0], dtype=bool)
        for i in axes:
            ok_o &= alphos * abs(float(v_o[i])) <= float(fm[i]) * (1.0 + 1e-12) + 1e-15
        total = ts * (alphas[:, None] * vpv + alphos[None, :] * vov)
        feas = ok_a[:, None] & ok_o[None, :] & (total <= deficit * (1.0 + 1e-12) + 1e-18)
        if not feas.any():
            return 0.0, 0.0, 0.0
        masked = np.where(feas, total, -np.inf)
        best = float(masked.max())
        tol = 1e-12 * max(abs(best), deficit) + 1e-18
        near = masked >= best - tol
        ia = int(np.max(np.nonzero(near.any(axis=1))[0]))
        io = int(np.min(np.nonzero(near[ia])[0]))
        return float(alphas[ia]), float(alphos[io]), float(total[ia, io])

    a_best, o_best, _ = search(0.0, a_hi, 0.0, o_hi)
    a_step = a_hi / max(grid - 1, 1)
    o_step = o_hi / max(grid - 1, 1)
    for _ in range(refine):
        a_lo = max(0.0, a_best - a_step)
        o_lo = max(0.0, o_best - o_step)
        a_best, o_best, _ = search(
            a_lo, min(a_hi, a_best + a_step), o_lo, min(o_hi, o_best + o_step)
        )
        a_step = 2.0 * a_step / max(grid - 1, 1)
        o_step = 2.0 * o_step / max(grid - 1, 1)
    best_total = ts * (a_best * vpv + o_best * vov)
    return a_best, o_best, best_total
