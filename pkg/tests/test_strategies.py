"""Damping strategies against hand-derived values and the brute-force oracle.

Frozen numbers below are derived independently from the documented formulas;
each derivation is spelled out next to its assertion.
"""

import logging
import math

import numpy as np
import pytest

from tdpa_sim import strategies
from tdpa_sim.core import EnergyLedger, make_projector
from tdpa_sim.strategies import (
    DISSIPATION_SIGN,
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
from tdpa_sim.validate import random_pc_inputs

BIG = [1e9, 1e9, 1e9]  # limits that never bind


def pcin(f_hat, v, e_obs, ts=2e-4, f_max=BIG):
    return PcInput(f_hat=f_hat, v=v, f_max=f_max, e_obs=e_obs, ts=ts)


class TestObserve:
    def test_accumulates_port_power(self):
        # 0 + 2e-4 * (10 * 0.05) + 0 = 1e-4 J
        ledger = observe(EnergyLedger(), [0, 0, 10.0], [0, 0, 0.05], 2e-4, 0.0)
        assert ledger.e_obs == pytest.approx(1e-4, abs=1e-18)

    def test_credits_previous_dissipation(self):
        # -0.01 + 2e-4 * (10 * -0.05) + 0.002 = -0.0081 J
        ledger = observe(
            EnergyLedger(e_obs=-0.01), [0, 0, 10.0], [0, 0, -0.05], 2e-4, 0.002
        )
        assert ledger.e_obs == pytest.approx(-0.0081, abs=1e-15)

    def test_carries_other_fields(self):
        ledger = observe(
            EnergyLedger(e_obs=0.0, e_pc=0.5, e_res=-0.1), [1, 0, 0], [1, 0, 0],
            1e-3, 0.0,
        )
        assert ledger.e_pc == 0.5 and ledger.e_res == -0.1

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            observe(EnergyLedger(), [np.nan, 0, 0], [0, 0, 0], 2e-4, 0.0)
        with pytest.raises(ValueError):
            observe(EnergyLedger(), [1, 0, 0], [0, 0, 0], -2e-4, 0.0)
        with pytest.raises(ValueError):
            observe(EnergyLedger(), [1, 0, 0], [0, 0, 0], 2e-4, math.inf)


class TestUnlimited:
    def test_exact_compensation(self):
        # alpha = 0.01 / (2e-4 * 0.01) = 5000; dissipated = 0.01 J exactly.
        d = pc_unlimited(pcin([1.0, 0, 0], [0.1, 0, 0], -0.01))
        assert d.alpha == pytest.approx(5000.0, rel=1e-12)
        assert d.dissipated_energy == pytest.approx(0.01, rel=1e-12)
        # Damping term opposes the velocity: 1 - 5000*0.1 = -499.
        assert d.f_cmd.components[0] == pytest.approx(-499.0, rel=1e-12)
        assert d.alpha_o == 0.0 and not d.alpha_saturated

    def test_inactive_when_energy_positive(self):
        d = pc_unlimited(pcin([1.0, 0, 0], [0.1, 0, 0], 1e-4))
        assert d.alpha == 0.0 and d.dissipated_energy == 0.0
        assert np.allclose(d.f_cmd.components, [1.0, 0, 0])

    def test_inactive_at_zero_velocity(self):
        d = pc_unlimited(pcin([1.0, 0, 0], [0.0, 0, 0], -0.01))
        assert d.alpha == 0.0 and d.dissipated_energy == 0.0


class TestNormLimited:
    def test_alpha_max_norm_values(self):
        # sqrt(27 / 0.01) = 51.9615242...; sqrt(19 / 0.04) = 21.7944947...
        a = alpha_max_norm(pcin([0, 0, 1.0], [0.1, 0, 0], -1.0, f_max=[3, 3, 3]))
        assert a == pytest.approx(math.sqrt(2700.0), rel=1e-12)
        b = alpha_max_norm(pcin([0, 0, 1.0], [0, 0.2, 0], -1.0, f_max=[3, 1, 3]))
        assert b == pytest.approx(math.sqrt(475.0), rel=1e-12)
        with pytest.raises(ValueError):
            alpha_max_norm(pcin([0, 0, 1.0], [0, 0, 0], -1.0, f_max=[3, 3, 3]))

    def test_saturates_at_norm_cap(self):
        # Demand 5000 against cap sqrt(2700) = 51.96...: saturated.
        d = pc_norm_limited(pcin([1.0, 0, 0], [0.1, 0, 0], -0.01, f_max=[3, 3, 3]))
        assert d.alpha == pytest.approx(math.sqrt(2700.0), rel=1e-12)
        assert d.alpha_saturated
        # dissipated = 2e-4 * 51.96... * 0.01 = 1.0392e-4 J
        assert d.dissipated_energy == pytest.approx(
            2e-4 * math.sqrt(2700.0) * 0.01, rel=1e-12
        )
        # Damping force norm equals the limit norm at saturation.
        damp = d.f_cmd.components - [1.0, 0, 0]
        assert np.linalg.norm(damp) == pytest.approx(
            np.linalg.norm([3, 3, 3]), rel=1e-9
        )

    def test_unsaturated_matches_unlimited(self):
        a = pc_norm_limited(pcin([1.0, 0, 0], [0.1, 0, 0], -1e-6, f_max=[30, 30, 30]))
        b = pc_unlimited(pcin([1.0, 0, 0], [0.1, 0, 0], -1e-6))
        assert a.alpha == pytest.approx(b.alpha, rel=1e-12)
        assert not a.alpha_saturated

    def test_axis_violation_exists_on_anisotropic_instances(self):
        # The norm cap does not protect single axes: collect violations over
        # random anisotropic instances and require that some exist.
        rng = np.random.default_rng(3)
        violations = 0
        for pc_in in random_pc_inputs(400, rng):
            d = pc_norm_limited(pc_in)
            damp = np.abs(d.f_cmd.components - np.clip(
                pc_in.f_hat.components,
                -pc_in.f_max.components,
                pc_in.f_max.components,
            ))
            if np.any(damp > pc_in.f_max.components + 1e-9):
                violations += 1
        assert violations > 0


class TestDirectionOnly:
    def test_sign_inversion_from_unbounded_gain(self):
        # Velocity nearly orthogonal to the reference: vPv = 1e-6, so
        # alpha = 0.01 / (2e-4 * 1e-6) = 5e7 and the z-command becomes
        # 10 - 5e7 * 0.001 = -49990: far beyond a sign flip.
        d = pc_direction_only(pcin([0, 0, 10.0], [0.1, 0, 0.001], -0.01))
        assert d.alpha == pytest.approx(5e7, rel=1e-9)
        assert d.f_cmd.components[2] == pytest.approx(-49990.0, rel=1e-9)
        assert float(np.array([0, 0, 10.0]) @ d.f_cmd.components) < 0.0
        assert d.dissipated_energy == pytest.approx(0.01, rel=1e-9)

    def test_damps_only_along_reference(self):
        d = pc_direction_only(pcin([0, 0, 10.0], [0.1, 0, 0.05], -1e-4))
        damp = d.f_cmd.components - [0, 0, 10.0]
        assert damp[0] == 0.0 and damp[1] == 0.0

    def test_skips_orthogonal_velocity(self):
        d = pc_direction_only(pcin([0, 0, 10.0], [0.1, 0, 0.0], -0.01))
        assert d.alpha == 0.0 and d.dissipated_energy == 0.0


class TestPrioritizedBounds:
    def test_alpha_max_priority_value_and_identity(self):
        # sqrt(f.f / vPv) = sqrt(100 / 0.01) = 100, and the bound is exactly
        # the gain whose primary damping force norm matches ||f||.
        a = alpha_max_priority([0, 0, 10.0], [0, 0, 0.1])
        assert a == pytest.approx(100.0, rel=1e-12)
        p = make_projector([0, 0, 10.0])
        assert a * np.linalg.norm(p.apply([0, 0, 0.1])) == pytest.approx(
            10.0, rel=1e-12
        )
        with pytest.raises(ValueError):
            alpha_max_priority([0, 0, 10.0], [0.1, 0, 0])

    def test_alpha_o_max_values(self):
        # min over resolvable axes of f_max_i / |v_o_i|.
        a = alpha_o_max([0, 0, 10.0], [0.1, 0, 0], [3, 3, 3])
        assert a == pytest.approx(30.0, rel=1e-12)
        b = alpha_o_max([0, 0, 10.0], [0.1, 0.2, 0], [3, 2, 10])
        assert b == pytest.approx(10.0, rel=1e-12)
        assert alpha_o_max([0, 0, 10.0], [0, 0, 0.5], [3, 2, 10]) == math.inf


class TestPrioritized:
    def test_unsaturated_primary_stage(self):
        # demand = 1e-4 / (2e-4 * 0.01) = 50 under the cap 100: applied as is,
        # z-command 10 - 50*0.1 = 5, deficit fully dissipated.
        d = pc_prioritized(pcin([0, 0, 10.0], [0, 0, 0.1], -1e-4, f_max=[30, 30, 30]))
        assert d.alpha == pytest.approx(50.0, rel=1e-12)
        assert d.alpha_o == 0.0
        assert d.f_cmd.components[2] == pytest.approx(5.0, rel=1e-12)
        assert d.dissipated_energy == pytest.approx(1e-4, rel=1e-12)
        assert not d.alpha_saturated and not d.alpha_o_saturated

    def test_both_stages_saturated(self):
        # vPv = 0.01: primary cap 100 (demand 5e5) leaves e_res = -0.9998;
        # orthogonal velocity (0.1,0,0) caps at 3/0.1 = 30 (demand 499900);
        # dissipated = 2e-4*(100*0.01 + 30*0.01) = 2.6e-4 J;
        # command = (0-30*0.1, 0, 10-100*0.1) = (-3, 0, 0).
        d = pc_prioritized(
            pcin([0, 0, 10.0], [0.1, 0, 0.1], -1.0, f_max=[3, 3, 30])
        )
        assert d.alpha == pytest.approx(100.0, rel=1e-12)
        assert d.alpha_o == pytest.approx(30.0, rel=1e-12)
        assert d.alpha_saturated and d.alpha_o_saturated
        assert d.dissipated_energy == pytest.approx(2.6e-4, rel=1e-12)
        assert np.allclose(d.f_cmd.components, [-3.0, 0.0, 0.0], atol=1e-12)
        # At the cap the command reaches, but never crosses, orthogonality.
        assert float(np.array([0, 0, 10.0]) @ d.f_cmd.components) >= -1e-9

    def test_overflow_routed_to_orthogonal_complement(self):
        # Primary saturated but orthogonal unbounded: remaining deficit is
        # dissipated orthogonally; total equals the full deficit.
        d = pc_prioritized(
            pcin([0, 0, 10.0], [0.1, 0, 0.1], -0.01, f_max=[1e3, 1e3, 1e3])
        )
        assert d.alpha == pytest.approx(100.0, rel=1e-12)
        assert d.alpha_saturated and not d.alpha_o_saturated
        # e_res = -0.01 + 2e-4*100*0.01 = -0.0098; demand_o = 0.0098/(2e-4*0.01)
        assert d.alpha_o == pytest.approx(4900.0, rel=1e-12)
        assert d.dissipated_energy == pytest.approx(0.01, rel=1e-12)

    def test_degenerate_reference_uses_full_space(self):
        # Zero reference: no primary direction, all damping is orthogonal
        # and per-axis bounded.
        d = pc_prioritized(pcin([0, 0, 0.0], [0.2, 0, 0], -1.0, f_max=[5, 5, 5]))
        assert d.alpha == 0.0
        assert d.alpha_o == pytest.approx(25.0, rel=1e-12)
        assert np.allclose(d.f_cmd.components, [-5.0, 0, 0], atol=1e-12)

    def test_zero_velocity_keeps_deficit(self):
        d = pc_prioritized(pcin([0, 0, 10.0], [0, 0, 0], -1.0, f_max=[5, 5, 5]))
        assert d.alpha == 0.0 and d.alpha_o == 0.0
        assert d.dissipated_energy == 0.0

    def test_reference_clamped_to_limits(self, caplog):
        strategies._clamp_warned = False
        with caplog.at_level(logging.WARNING, logger="tdpa_sim.strategies"):
            d = pc_prioritized(pcin([0, 0, 50.0], [0, 0, 0.1], 1.0, f_max=[5, 5, 20]))
        assert d.f_cmd.components[2] == pytest.approx(20.0)
        assert any("clamping" in r.message for r in caplog.records)

    def test_repeat_clamp_logs_at_debug(self, caplog):
        strategies._clamp_warned = False
        pc_prioritized(pcin([0, 0, 50.0], [0, 0, 0.1], 1.0, f_max=[5, 5, 20]))
        caplog.clear()
        with caplog.at_level(logging.DEBUG, logger="tdpa_sim.strategies"):
            pc_prioritized(pcin([0, 0, 50.0], [0, 0, 0.1], 1.0, f_max=[5, 5, 20]))
        assert all(r.levelno == logging.DEBUG for r in caplog.records)


class TestStrategyProperties:
    """Shared invariants over randomised inputs."""

    def _decisions(self, n=300, seed=11):
        rng = np.random.default_rng(seed)
        for pc_in in random_pc_inputs(n, rng):
            for kind in StrategyKind:
                yield kind, pc_in, run_strategy(kind, pc_in)

    def test_passivity_guard(self):
        # Never dissipate more than the observed deficit, never create energy.
        for kind, pc_in, d in self._decisions():
            assert d.dissipated_energy >= 0.0
            assert d.dissipated_energy <= -min(pc_in.e_obs, 0.0) + 1e-12, kind

    def test_prioritized_never_inverts(self):
        rng = np.random.default_rng(5)
        for pc_in in random_pc_inputs(500, rng):
            d = pc_prioritized(pc_in)
            f = np.clip(
                pc_in.f_hat.components,
                -pc_in.f_max.components,
                pc_in.f_max.components,
            )
            assert float(f @ d.f_cmd.components) >= -1e-9

    def test_prioritized_per_axis_bound(self):
        rng = np.random.default_rng(6)
        for pc_in in random_pc_inputs(500, rng):
            d = pc_prioritized(pc_in)
            f = np.clip(
                pc_in.f_hat.components,
                -pc_in.f_max.components,
                pc_in.f_max.components,
            )
            v = pc_in.v.components
            pv = make_projector(f).apply(v)
            v_o = v - pv
            assert np.all(
                np.abs(d.alpha_o * v_o) <= pc_in.f_max.components + 1e-9
            )

    def test_prioritized_terms_orthogonal(self):
        rng = np.random.default_rng(8)
        for pc_in in random_pc_inputs(300, rng):
            d = pc_prioritized(pc_in)
            f = np.clip(
                pc_in.f_hat.components,
                -pc_in.f_max.components,
                pc_in.f_max.components,
            )
            v = pc_in.v.components
            pv = make_projector(f).apply(v)
            v_o = v - pv
            primary = d.alpha * pv
            secondary = d.alpha_o * v_o
            scale = np.linalg.norm(primary) * np.linalg.norm(secondary)
            assert abs(float(primary @ secondary)) <= 1e-9 * max(scale, 1.0)

    def test_dissipation_signs_oppose_port_flow(self):
        # Each strategy's damping force does non-positive work along the
        # device velocity scaled by the dissipation sign.
        rng = np.random.default_rng(9)
        for pc_in in random_pc_inputs(200, rng):
            for kind in StrategyKind:
                d = run_strategy(kind, pc_in)
                f = np.clip(
                    pc_in.f_hat.components,
                    -pc_in.f_max.components,
                    pc_in.f_max.components,
                )
                damp = d.f_cmd.components - f
                work = float(damp @ pc_in.v.components)
                assert DISSIPATION_SIGN * work >= -1e-12


class TestOracleAgreement:
    def test_closed_form_matches_oracle_sample(self):
        rng = np.random.default_rng(21)
        for pc_in in random_pc_inputs(60, rng):
            d = pc_prioritized(pc_in)
            _, _, best = oracle_max_dissipation(pc_in)
            assert abs(d.dissipated_energy - best) <= 1e-2 * max(best, 1e-15)

    def test_oracle_gains_match_closed_form_when_saturated(self):
        # Saturated primary stage: the oracle finds the same gain cap.
        pc_in = pcin([0, 0, 10.0], [0.1, 0, 0.1], -1.0, f_max=[3, 3, 30])
        a, o, best = oracle_max_dissipation(pc_in)
        assert a == pytest.approx(100.0, rel=1e-2)
        assert o == pytest.approx(30.0, rel=1e-2)
        assert best == pytest.approx(2.6e-4, rel=1e-4)

    def test_oracle_zero_for_non_negative_energy(self):
        assert oracle_max_dissipation(pcin([1, 0, 0], [1, 0, 0], 0.0)) == (
            0.0, 0.0, 0.0,
        )

    def test_strategy_dispatch(self):
        assert StrategyKind.from_name("Prioritized") is StrategyKind.PRIORITIZED
        with pytest.raises(ValueError):
            StrategyKind.from_name("nope")
