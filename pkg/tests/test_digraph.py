import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from senergy import (
    Configuration,
    DiGraph,
    ParameterError,
    StepGraph,
    StochasticStep,
    accumulate,
    asym_step,
    bound_theorem1,
    hovering_check,
    is_cut_balanced,
    is_type_symmetric,
    random_type_symmetric_step,
    run_asymmetric,
    strongly_connected_components,
    validate_trace,
    weakly_connected_components,
)


class TestComponents:
    def test_directed_path_is_not_cut_balanced(self):
        g = DiGraph.from_arcs(3, [(0, 1), (1, 2)])
        assert len(weakly_connected_components(g)) == 1
        assert len(strongly_connected_components(g)) == 3
        assert not is_cut_balanced(g)

    def test_directed_cycle_is_cut_balanced(self):
        g = DiGraph.from_arcs(3, [(0, 1), (1, 2), (2, 0)])
        assert strongly_connected_components(g) == [{0, 1, 2}]
        assert is_cut_balanced(g)

    def test_two_isolated_cycles(self):
        g = DiGraph.from_arcs(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
        assert is_cut_balanced(g)
        assert len(weakly_connected_components(g)) == 2

    def test_empty_graph_is_cut_balanced(self):
        assert is_cut_balanced(DiGraph.from_arcs(3, []))


class TestTypeSymmetry:
    def test_support_pairs(self):
        P = np.array([[0.5, 0.5, 0.0], [0.3, 0.7, 0.0], [0.0, 0.0, 1.0]])
        assert is_type_symmetric(P)
        P[0, 2] = 0.1
        assert not is_type_symmetric(P)

    def test_type_symmetric_support_is_cut_balanced(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            pairs = [(i, j) for i in range(n) for j in range(i + 1, n)
                     if rng.random() < 0.5]
            g = StepGraph.from_pairs(n, pairs)
            step = random_type_symmetric_step(g, rng)
            assert is_type_symmetric(step.matrix)
            assert is_cut_balanced(step.support())


class TestHovering:
    def test_cycle_covers_every_cut(self):
        g = DiGraph.from_arcs(3, [(0, 2), (2, 0)])
        assert hovering_check(g, 0, 2)

    def test_one_directional_cut_fails(self):
        g = DiGraph.from_arcs(3, [(0, 1), (1, 0), (1, 2)])
        assert not hovering_check(g, 0, 2)  # nothing comes back across rank 2


class TestStochasticStep:
    def test_floor_defaults_to_min_positive_entry(self):
        P = [[0.7, 0.3], [0.1, 0.9]]
        step = StochasticStep.from_matrix(P)
        assert step.rho_floor == pytest.approx(0.1)
        assert step.support().arcs == frozenset({(0, 1), (1, 0)})

    def test_rejects_bad_matrices(self):
        with pytest.raises(ParameterError):
            StochasticStep.from_matrix([[0.5, 0.5], [0.6, 0.5]])  # row sum
        with pytest.raises(ParameterError):
            StochasticStep.from_matrix([[0.0, 1.0], [0.5, 0.5]])  # zero diagonal

    def test_asym_step_is_convex_combination(self):
        x = Configuration.from_positions([0.0, 1.0])
        step = StochasticStep.from_matrix([[0.7, 0.3], [0.1, 0.9]])
        y = asym_step(x, step)
        assert y.by_id() == [pytest.approx(0.3), pytest.approx(0.9)]


@given(seed=st.integers(0, 10_000), n=st.integers(2, 6))
@settings(max_examples=60, deadline=None)
def test_random_asymmetric_runs_validate_and_obey_bound(seed, n):
    trace = run_asymmetric(n, steps_cap=40, seed=seed)
    assert validate_trace(trace).ok
    rep = accumulate(trace, [1.0])
    assert rep.totals[1.0] <= bound_theorem1(n, trace.params.rho, 1.0)
