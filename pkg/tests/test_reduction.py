import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from senergy import (
    AveragingParams,
    Configuration,
    InvalidStepError,
    StepGraph,
    apply_policy,
    interval_union,
    reduce_step,
    step_energy,
    twist_step_energy,
    validate_twist_step,
    verify_taucond,
)


def test_single_window_three_agents():
    x = Configuration.from_positions([0.0, 0.5, 1.0])
    g = StepGraph.complete(3)
    p = AveragingParams(rho=0.25, tolerance=0.0)
    y = apply_policy(x, g, p, "leftmost")
    assert y.by_id() == [0.125, 0.25, 0.25]
    subs = reduce_step(x, g, y, p)
    assert len(subs) == 1
    sub = subs[0]
    assert (sub.step.u, sub.step.v) == (0, 2)
    assert sub.after.positions == (0.125, 0.25, 0.25)
    assert verify_taucond(sub.before.positions, sub.step, sub.after.positions).ok


def test_two_disjoint_windows_processed_left_to_right():
    x = Configuration.from_positions([0.0, 0.2, 0.8, 1.0])
    g = StepGraph.from_pairs(4, [(0, 1), (2, 3)])
    p = AveragingParams(rho=0.25, tolerance=0.0)
    y = apply_policy(x, g, p, "midpoint")
    subs = reduce_step(x, g, y, p)
    assert [(s.step.u, s.step.v) for s in subs] == [(0, 1), (2, 3)]
    # the first substep leaves the right window untouched
    assert subs[0].after.positions[2:] == (0.8, 1.0)
    assert subs[1].before.positions == subs[0].after.positions


def test_self_loop_only_step_reduces_to_nothing():
    x = Configuration.from_positions([0.0, 0.5, 1.0])
    g = StepGraph.empty(3)
    p = AveragingParams(rho=0.25)
    assert reduce_step(x, g, x, p) == []


def test_invalid_step_is_rejected():
    x = Configuration.from_positions([0.0, 1.0])
    g = StepGraph.empty(2)
    y = Configuration.from_positions([0.5, 1.0])
    with pytest.raises(InvalidStepError) as err:
        reduce_step(x, g, y, AveragingParams(rho=0.25, tolerance=0.0))
    assert err.value.report is not None


@given(n=st.integers(2, 8), seed=st.integers(0, 10_000),
       rho=st.sampled_from((0.1, 0.25, 0.5)),
       policy=st.sampled_from(("midpoint", "leftmost", "rightmost", "uniform")))
@settings(max_examples=120, deadline=None)
def test_reduction_conserves_energy_and_validates(n, seed, rho, policy):
    rng = np.random.default_rng(seed)
    x = Configuration.from_positions(list(rng.random(n)))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
    g = StepGraph.from_pairs(n, pairs)
    p = AveragingParams(rho=rho, tolerance=1e-12)
    y = apply_policy(x, g, p, policy, rng=rng)
    subs = reduce_step(x, g, y, p)
    for s_exp in (0.25, 0.5, 1.0):
        step_e = step_energy(interval_union(g, x), s_exp)
        sub_e = sum(twist_step_energy(s.before.positions, s.step, s_exp) for s in subs)
        assert sub_e == pytest.approx(step_e, rel=1e-12, abs=1e-300)
    for s in subs:
        assert validate_twist_step(
            s.before.positions, s.step, s.after.positions, tol=1e-12
        ).ok
    # the last substep's positions reproduce the target multiset
    final = subs[-1].after.positions if subs else x.positions
    assert all(abs(a - b) <= 1e-12 for a, b in zip(final, y.positions))
