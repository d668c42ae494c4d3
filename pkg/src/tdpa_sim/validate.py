"""Randomised self-check suites: projector algebra and damping optimality.

Both suites are callable from the command line and from tests.  The check
functions are injectable so the harness itself can be tested against
deliberately broken implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .core import DIRECTION_EPS, Projector, complement, make_projector
from .strategies import (
    DampingDecision,
    PcInput,
    pc_prioritized,
    oracle_max_dissipation,
)

PROJECTOR_TOL = 1e-12
ORACLE_REL_TOL = 1e-2
CONSTRAINT_TOL = 1e-9


@dataclass
class SuiteResult:
    name: str
    checked: int
    failures: List[str]

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        msg = f"{state} {self.name}: {self.checked} instances"
        if self.failures:
            msg += f", {len(self.failures)} failures; first: {self.failures[0]}"
        return msg


def random_directions(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random 3-vectors spanning magnitudes from tiny to large."""
    dirs = rng.normal(size=(n, 3))
    scales = 10.0 ** rng.uniform(-3, 2, size=n)
    dirs *= scales[:, None]
    # A few degenerate and axis-aligned entries keep the edge cases covered.
    dirs[:: max(n // 17, 1)] = 0.0
    dirs[1:: max(n // 13, 1), :2] = 0.0
    return dirs


def projector_suite(
    n: int = 1000,
    seed: int = 0,
    factory: Callable[[np.ndarray], Projector] = make_projector,
) -> SuiteResult:
    """Symmetry, idempotence and complement orthogonality on random directions."""
    rng = np.random.default_rng(seed)
    failures: List[str] = []
    for k, d in enumerate(random_directions(n, rng)):
        p = factory(d)
        m = p.matrix
        mc = np.eye(3) - m
        checks = (
            ("symmetry", float(np.max(np.abs(m - m.T)))),
            ("idempotence", float(np.max(np.abs(m @ m - m)))),
            ("complement orthogonality", float(np.max(np.abs(mc.T @ m)))),
        )
        for name, err in checks:
            if not (err <= PROJECTOR_TOL):
                failures.append(f"instance {k}: {name} error {err:.3e}")
        if float(d @ d) > DIRECTION_EPS:
            err = float(np.linalg.norm(m @ d - d))
            if err > 1e-10 * float(np.linalg.norm(d)):
                failures.append(f"instance {k}: direction not fixed, error {err:.3e}")
    return SuiteResult("projector algebra", n, failures)


def random_pc_inputs(n: int, rng: np.random.Generator, ts: float = 2e-4):
    """Random damping-decision inputs with exertable references.

    Mixes aligned, orthogonal-heavy and near-zero velocities with isotropic
    and strongly anisotropic limits so the saturation branches all trigger.
    """
    cases = []
    for _ in range(n):
        f_max = 10.0 ** rng.uniform(-0.5, 1.5, size=3)
        f_hat = rng.uniform(-1.0, 1.0, size=3) * f_max
        kind = rng.integers(0, 4)
        if kind == 0:
            v = rng.normal(size=3) * 10.0 ** rng.uniform(-3, 0)
        elif kind == 1:  # mostly along the reference
            base = f_hat if float(f_hat @ f_hat) > 0 else rng.normal(size=3)
            v = base / max(np.linalg.norm(base), 1e-9) * 10.0 ** rng.uniform(-3, 0)
            v += rng.normal(size=3) * 1e-4
        elif kind == 2:  # mostly orthogonal to the reference
            v = rng.normal(size=3)
            if float(f_hat @ f_hat) > 0:
                v -= (v @ f_hat) / float(f_hat @ f_hat) * f_hat
            v *= 10.0 ** rng.uniform(-3, 0)
        else:  # single dominant axis
            v = np.zeros(3)
            v[rng.integers(0, 3)] = rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(-3, 0)
        e_obs = -(10.0 ** rng.uniform(-6, -2))
        cases.append(PcInput(f_hat=f_hat, v=v, f_max=f_max, e_obs=e_obs, ts=ts))
    return cases


def oracle_suite(
    n: int = 1000,
    seed: int = 0,
    strategy: Callable[[PcInput], DampingDecision] = pc_prioritized,
) -> SuiteResult:
    """Closed-form damping decision against the brute-force optimum.

    Checks that the strategy's dissipated energy lands within 1% of the grid
    optimum and that its damping forces respect every stated constraint.
    """
    rng = np.random.default_rng(seed)
    failures: List[str] = []
    for k, pc_in in enumerate(random_pc_inputs(n, rng)):
        decision = strategy(pc_in)
        _, _, best = oracle_max_dissipation(pc_in)
        deficit = -pc_in.e_obs

        got = decision.dissipated_energy
        scale = max(best, 1e-15)
        if abs(got - best) > ORACLE_REL_TOL * scale:
            failures.append(
                f"instance {k}: dissipated {got:.6e} vs oracle {best:.6e}"
            )
        if got > deficit * (1.0 + 1e-9) + 1e-12:
            failures.append(f"instance {k}: dissipated {got:.3e} beyond deficit")

        f = np.clip(
            pc_in.f_hat.components, -pc_in.f_max.components, pc_in.f_max.components
        )
        v = pc_in.v.components
        proj = make_projector(f)
        pv = proj.matrix @ v
        v_o = v - pv
        primary = decision.alpha * np.linalg.norm(pv)
        if primary > np.linalg.norm(f) + CONSTRAINT_TOL:
            failures.append(f"instance {k}: primary force {primary:.3e} beyond ||f||")
        over = np.abs(decision.alpha_o * v_o) - pc_in.f_max.components
        if np.any(over > CONSTRAINT_TOL):
            failures.append(
                f"instance {k}: orthogonal force beyond axis limit by {over.max():.3e}"
            )
    return SuiteResult("damping optimality", n, failures)


def validate_all(
    n_projector: int = 1000, n_oracle: int = 1000, seed: int = 0
) -> List[SuiteResult]:
    return [
        projector_suite(n_projector, seed=seed),
        oracle_suite(n_oracle, seed=seed),
    ]
