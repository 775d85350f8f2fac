import math

import numpy as np
import pytest

from senergy import (
    KuramotoState,
    ParameterError,
    StepGraph,
    kuramoto_step,
    kuramoto_sync_report,
    run_kuramoto,
)


class TestStep:
    def test_two_oscillator_pinned_values(self):
        state = KuramotoState(thetas=np.array([0.0, math.pi / 3]), coupling=0.5)
        g = StepGraph.from_pairs(2, [(0, 1)])
        new, rec = kuramoto_step(state, g)
        # 0 + (0.5/2) * sin(pi/3)
        assert new.thetas[0] == pytest.approx(0.21650635094610965, abs=1e-15)
        assert new.thetas[1] == pytest.approx(
            math.pi / 3 - 0.25 * math.sin(math.pi / 3), abs=1e-15
        )
        assert rec.rho_eff is not None and rec.rho_eff > 0.0

    def test_isolated_oscillator_does_not_move(self):
        state = KuramotoState(thetas=np.array([0.1, 0.2, 1.0]), coupling=0.5)
        g = StepGraph.from_pairs(3, [(0, 1)])
        new, _ = kuramoto_step(state, g)
        assert new.thetas[2] == 1.0

    def test_coupling_range_enforced(self):
        with pytest.raises(ParameterError):
            KuramotoState(thetas=np.array([0.0, 1.0]), coupling=1.5)

    def test_half_circle_flagging(self):
        state = KuramotoState(thetas=np.array([0.0, 1.0]), coupling=0.5)
        g = StepGraph.from_pairs(2, [(0, 1)])
        _, rec = kuramoto_step(state, g, half_circle=(0.3, 1.0))
        assert not rec.in_half_circle  # agent 0 stays below 0.3


class TestRunAndReport:
    def test_phases_contract_within_half_circle(self):
        rng = np.random.default_rng(4)
        thetas = rng.random(5) * (math.pi / 2)  # quarter circle start
        trace = run_kuramoto(thetas, coupling=0.5, steps=200, rng=rng)
        spread0 = max(trace.records[0].before) - min(trace.records[0].before)
        spread1 = max(trace.records[-1].after) - min(trace.records[-1].after)
        assert spread1 < spread0
        rep = kuramoto_sync_report(trace, eps=2.0 ** -5)
        assert rep.count <= len(trace.records)
        assert not rep.flagged_steps

    def test_report_carries_realized_floor(self):
        rng = np.random.default_rng(7)
        thetas = np.array([0.0, 0.5, 1.0, 1.5])
        trace = run_kuramoto(thetas, coupling=0.5, steps=50, rng=rng)
        rep = kuramoto_sync_report(trace, eps=0.01)
        assert rep.rho_eff_min is not None
        if rep.reference_bound is not None:
            assert rep.reference_bound > 0.0

    def test_eps_must_be_positive(self):
        rng = np.random.default_rng(0)
        trace = run_kuramoto(np.array([0.0, 1.0]), 0.5, steps=5, rng=rng)
        with pytest.raises(ParameterError):
            kuramoto_sync_report(trace, eps=0.0)
