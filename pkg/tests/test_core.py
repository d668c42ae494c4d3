"""Projector algebra and energy-ledger basics."""

import numpy as np
import pytest

from tdpa_sim.core import (
    EnergyLedger,
    Projector,
    TaskVector,
    complement,
    make_projector,
)

TOL = 1e-12


def test_projector_from_diagonal_direction():
    p = make_projector([1.0, 1.0, 0.0])
    expected = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 0.0]])
    assert np.max(np.abs(p.matrix - expected)) <= TOL


def test_projector_degenerate_direction_is_zero():
    for d in ([0.0, 0.0, 0.0], [1e-7, 0.0, 0.0]):
        p = make_projector(d)
        assert np.all(p.matrix == 0.0)
        # Complement of the zero projector spans everything.
        assert np.max(np.abs(complement(p).matrix - np.eye(3))) <= TOL


def test_projector_threshold_boundary():
    # Squared norm just above the degeneracy threshold still projects.
    d = np.array([2e-6, 0.0, 0.0])
    p = make_projector(d)
    assert abs(p.matrix[0, 0] - 1.0) <= 1e-9


def test_projector_properties_random_directions():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        d = rng.normal(size=3) * 10.0 ** rng.uniform(-3, 2)
        p = make_projector(d)
        m = p.matrix
        c = complement(p).matrix
        assert np.max(np.abs(m - m.T)) <= TOL
        assert np.max(np.abs(m @ m - m)) <= TOL
        assert np.max(np.abs(c.T @ m)) <= TOL
        if float(d @ d) > 1e-12:
            assert np.linalg.norm(m @ d - d) <= 1e-10 * np.linalg.norm(d)


def test_projection_splits_energy():
    # Squared norms of the two projections add up to the squared norm.
    rng = np.random.default_rng(7)
    for _ in range(200):
        d = rng.normal(size=3)
        v = rng.normal(size=3) * 10.0 ** rng.uniform(-2, 1)
        p = make_projector(d)
        pv = p.apply(v)
        ov = complement(p).apply(v)
        lhs = float(pv @ pv + ov @ ov)
        rhs = float(v @ v)
        assert abs(lhs - rhs) <= 1e-9 * max(rhs, 1.0)
        assert abs(float(pv @ ov)) <= 1e-9 * max(rhs, 1.0)


def test_projector_rejects_bad_matrices():
    with pytest.raises(ValueError):
        Projector(np.full((3, 3), np.nan))
    with pytest.raises(ValueError):
        Projector(np.zeros((2, 3)))
    with pytest.raises(AssertionError):
        Projector(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))


def test_make_projector_rejects_non_finite():
    with pytest.raises(ValueError):
        make_projector([np.inf, 0.0, 0.0])


def test_task_vector_validation():
    v = TaskVector([1.0, 2.0, 3.0])
    assert v.n == 3 and v.unit == "N"
    assert v.norm() == pytest.approx(np.sqrt(14.0), abs=1e-15)
    with pytest.raises(ValueError):
        TaskVector([[1.0, 2.0]])
    with pytest.raises(ValueError):
        TaskVector([np.nan, 0.0, 0.0])


def test_energy_ledger_validation():
    ledger = EnergyLedger()
    assert ledger.e_obs == 0.0 and ledger.e_pc == 0.0 and ledger.e_res == 0.0
    with pytest.raises(ValueError):
        EnergyLedger(e_res=1e-6)
    with pytest.raises(ValueError):
        EnergyLedger(e_obs=np.nan)
