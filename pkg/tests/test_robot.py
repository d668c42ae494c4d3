"""Kinematic models, actuator limits, force capability."""

import numpy as np
import pytest

from tdpa_sim.core import JointVector, TaskVector
from tdpa_sim.robot import (
    ActuatorLimits,
    DeltaModel,
    KinematicsError,
    SingularityError,
    SyntheticModel,
    f_max_from_limits,
    saturate_torque,
    torque_from_force,
)

DELTA = DeltaModel()


def random_workspace_points(rng, n):
    pts = []
    while len(pts) < n:
        x = rng.uniform(-0.08, 0.08)
        y = rng.uniform(-0.08, 0.08)
        z = rng.uniform(-0.32, -0.18)
        try:
            DELTA.inverse_kinematics(np.array([x, y, z]))
        except KinematicsError:
            continue
        pts.append(np.array([x, y, z]))
    return pts


class TestDeltaKinematics:
    def test_home_pose_symmetric(self):
        q = DELTA.inverse_kinematics(np.array([0.0, 0.0, -0.25]))
        assert q[0] == pytest.approx(q[1], abs=1e-12)
        assert q[1] == pytest.approx(q[2], abs=1e-12)

    def test_roundtrip(self):
        rng = np.random.default_rng(7)
        for x in random_workspace_points(rng, 200):
            q = DELTA.inverse_kinematics(x)
            back = DELTA.forward_kinematics(q)
            assert np.linalg.norm(back - x) < 1e-9

    def test_unreachable_raises(self):
        with pytest.raises(KinematicsError):
            DELTA.inverse_kinematics(np.array([0.0, 0.0, -2.0]))
        with pytest.raises(KinematicsError):
            DELTA.inverse_kinematics(np.array([1.5, 0.0, -0.25]))

    def test_jacobian_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        h = 1e-7
        for x in random_workspace_points(rng, 100):
            q = DELTA.inverse_kinematics(x)
            J = DELTA.jacobian(q)
            fd = np.zeros((3, 3))
            for i in range(3):
                dq = np.zeros(3)
                dq[i] = h
                fd[:, i] = (
                    DELTA.forward_kinematics(q + dq)
                    - DELTA.forward_kinematics(q - dq)
                ) / (2 * h)
            assert np.max(np.abs(J - fd)) < 1e-6

    def test_home_jacobian_rotational_symmetry(self):
        # Legs sit 120 degrees apart; at a centered pose rotating the task
        # frame by 120 degrees permutes the joint axes.
        q = DELTA.inverse_kinematics(np.array([0.0, 0.0, -0.25]))
        J = DELTA.jacobian(q)
        c, s = np.cos(2 * np.pi / 3), np.sin(2 * np.pi / 3)
        R = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        P = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=float)
        assert np.allclose(R @ J, J @ P, atol=1e-9)

    def test_geometry_validation(self):
        with pytest.raises(ValueError):
            DeltaModel(upper_arm=-0.1)
        with pytest.raises(ValueError):
            DeltaModel(forearm=0.0)


class TestSyntheticModel:
    def test_linear_maps_around_reference(self):
        J = np.diag([0.2, 0.2, 0.2])
        m = SyntheticModel(jacobian_schedule=J, x_ref=np.array([0.0, 0.0, -0.25]))
        q = m.inverse_kinematics(np.array([0.02, 0.0, -0.25]))
        assert np.allclose(q, [0.1, 0.0, 0.0])
        assert np.allclose(m.forward_kinematics(q), [0.02, 0.0, -0.25])

    def test_time_varying_schedule(self):
        m = SyntheticModel(
            jacobian_schedule=lambda t: np.eye(3) * (1.0 + t),
            x_ref=np.zeros(3),
        )
        assert np.allclose(m.jacobian(t=1.0), 2.0 * np.eye(3))

    def test_rejects_singular_schedule(self):
        m = SyntheticModel(jacobian_schedule=np.diag([1.0, 1.0, 0.0]))
        with pytest.raises(SingularityError):
            m.jacobian()
        with pytest.raises(ValueError):
            SyntheticModel(jacobian_schedule=np.ones((2, 3)))


class TestLimitsAndCapability:
    def test_f_max_diagonal_example(self):
        # J = diag(2,1,1), tau_max = (2,2,2): f_max = |J^-T tau| = (1,2,2).
        J = np.diag([2.0, 1.0, 1.0])
        lim = ActuatorLimits(tau_max=np.array([2.0, 2.0, 2.0]))
        assert np.allclose(f_max_from_limits(J, lim), [1.0, 2.0, 2.0])

    def test_f_max_is_componentwise_magnitude(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            J = rng.uniform(-1, 1, (3, 3)) + 2 * np.eye(3)
            tau = rng.uniform(0.5, 5.0, 3)
            f = f_max_from_limits(J, ActuatorLimits(tau_max=tau))
            expect = np.abs(np.linalg.solve(J.T, tau))
            assert np.allclose(f, expect)
            assert np.all(f >= 0.0)

    def test_delta_centered_pose_has_no_lateral_headroom(self):
        # Symmetry cancels the x and y columns exactly at centered poses,
        # so the componentwise capability degenerates there. Scenario
        # configs keep the contact point off axis for this reason.
        q = DELTA.inverse_kinematics(np.array([0.0, 0.0, -0.25]))
        J = DELTA.jacobian(q)
        f = f_max_from_limits(J, ActuatorLimits(tau_max=np.array([6.0, 6.0, 6.0])))
        assert f[0] == pytest.approx(0.0, abs=1e-9)
        assert f[1] == pytest.approx(0.0, abs=1e-9)
        assert f[2] > 20.0

    def test_delta_off_center_pose_has_lateral_headroom(self):
        q = DELTA.inverse_kinematics(np.array([0.06, 0.03, -0.25]))
        J = DELTA.jacobian(q)
        f = f_max_from_limits(J, ActuatorLimits(tau_max=np.array([6.0, 6.0, 6.0])))
        assert np.all(f > 1.0)

    def test_torque_from_force(self):
        J = np.diag([2.0, 1.0, 1.0])
        tau = torque_from_force(J, TaskVector([3.0, 0.0, -1.0]))
        assert np.allclose(tau, [6.0, 0.0, -1.0])

    def test_saturation(self):
        lim = ActuatorLimits(tau_max=np.array([1.0, 2.0, 3.0]))
        out = saturate_torque(JointVector([5.0, -1.5, -4.0]), lim)
        assert np.allclose(out, [1.0, -1.5, -3.0])
        # Within limits passes through untouched.
        assert np.allclose(
            saturate_torque(np.array([0.5, -1.0, 2.0]), lim), [0.5, -1.0, 2.0]
        )

    def test_limit_validation(self):
        with pytest.raises(ValueError):
            ActuatorLimits(tau_max=np.array([1.0, -2.0, 3.0]))
        with pytest.raises(ValueError):
            ActuatorLimits(tau_max=np.array([1.0, np.nan, 3.0]))
