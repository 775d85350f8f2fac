import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from senergy import (
    ParameterError,
    TwistStep,
    leftmost_targets,
    twist_interval,
    twist_step_energy,
    validate_twist_step,
)


def test_twist_intervals_three_agents():
    x = (0.0, 0.5, 1.0)
    step = TwistStep(u=0, v=2, rho=0.25)
    t0 = twist_interval(x, step, 0)
    t1 = twist_interval(x, step, 1)
    t2 = twist_interval(x, step, 2)
    assert (t0.lo, t0.hi) == (0.125, 0.75)
    assert (t1.lo, t1.hi) == (0.25, 0.75)
    assert (t2.lo, t2.hi) == (0.25, 0.875)


def test_leftmost_targets_are_valid_and_sorted():
    x = (0.0, 0.5, 1.0)
    step = TwistStep(u=0, v=2, rho=0.25)
    y = leftmost_targets(x, step)
    assert y == [0.125, 0.25, 0.25]
    assert validate_twist_step(x, step, y, tol=0.0).ok


def test_outside_window_must_stay_exactly():
    x = (0.0, 0.2, 0.8, 1.0)
    step = TwistStep(u=1, v=2, rho=0.25)
    y = leftmost_targets(x, step)
    assert y[0] == 0.0 and y[3] == 1.0
    y_bad = list(y)
    y_bad[3] = 1.0 - 1e-15
    assert not validate_twist_step(x, step, y_bad, tol=0.0).ok


def test_order_violation_detected():
    x = (0.0, 0.5, 1.0)
    step = TwistStep(u=0, v=2, rho=0.25)
    y = [0.6, 0.5, 0.7]
    rep = validate_twist_step(x, step, y, tol=1e-9)
    assert not rep.ok
    assert any(v.side == "order" for v in rep.violations)


def test_energy_is_window_span_power():
    x = (0.0, 0.2, 0.8, 1.0)
    step = TwistStep(u=1, v=2, rho=0.25)
    assert twist_step_energy(x, step, 1.0) == pytest.approx(0.6, abs=1e-15)
    assert twist_step_energy(x, step, 0.5) == pytest.approx(0.6 ** 0.5, abs=1e-15)
    degenerate = (0.0, 0.5, 0.5, 1.0)
    assert twist_step_energy(degenerate, TwistStep(1, 2, 0.25), 0.5) == 0.0


def test_step_parameter_validation():
    with pytest.raises(ParameterError):
        TwistStep(u=2, v=2, rho=0.25)
    with pytest.raises(ParameterError):
        TwistStep(u=0, v=1, rho=0.6)
    with pytest.raises(ParameterError):
        twist_interval((0.0, 1.0), TwistStep(0, 1, 0.25), 2)


sorted_positions = st.lists(
    st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=2, max_size=8
).map(sorted)


@given(x=sorted_positions, data=st.data(),
       rho=st.floats(min_value=1e-3, max_value=0.5))
@settings(max_examples=200, deadline=None)
def test_twist_intervals_nested_and_nonempty(x, data, rho):
    n = len(x)
    u = data.draw(st.integers(0, n - 2))
    v = data.draw(st.integers(u + 1, n - 1))
    step = TwistStep(u=u, v=v, rho=rho)
    for i in range(u, v + 1):
        tau = twist_interval(x, step, i)
        assert x[u] <= tau.lo <= tau.hi + 1e-15 <= x[v] + 1e-15
    y = leftmost_targets(x, step)
    assert validate_twist_step(x, step, y, tol=1e-15).ok
