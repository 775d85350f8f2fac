"""Trace measurement: accumulated energy, communication counts, and the
closed-form upper bounds they are compared against."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Optional, Sequence

from .core import interval_union, step_energy
from .errors import ParameterError
from .trace import AveragingRecord, MatrixRecord, Trace, TwistRecord, validate_trace


def _record_intervals(rec):
    if isinstance(rec, AveragingRecord):
        return interval_union(rec.graph, rec.before)
    if isinstance(rec, TwistRecord):
        pos = rec.before.positions
        return [(pos[rec.step.u], pos[rec.step.v])]
    if isinstance(rec, MatrixRecord):
        from .digraph import matrix_record_intervals

        return matrix_record_intervals(rec)
    raise ParameterError(f"unknown record type {type(rec)!r}")


def _record_max_edge(rec) -> float:
    """Longest embedded edge of one record (self-loops have length 0)."""
    if isinstance(rec, AveragingRecord):
        pos = rec.before.positions
        return max((abs(pos[j] - pos[i]) for i, j in rec.graph.edges), default=0.0)
    if isinstance(rec, TwistRecord):
        pos = rec.before.positions
        return pos[rec.step.v] - pos[rec.step.u]
    if isinstance(rec, MatrixRecord):
        from .digraph import matrix_record_max_edge

        return matrix_record_max_edge(rec)
    raise ParameterError(f"unknown record type {type(rec)!r}")


@dataclass
class EnergyReport:
    s_values: tuple
    totals: Dict[float, float]
    comm_counts: Dict[float, int]
    truncated_at: Optional[int]
    diameter_final: float
    partial_sums: Optional[Dict[float, list]] = None


def accumulate(
    trace: Trace,
    s_values: Sequence[float],
    eps_values: Sequence[float] = (),
    validate: bool = False,
    keep_partials: bool = False,
) -> EnergyReport:
    """Total per-step energy for each exponent, plus communication counts.

    Averaging and matrix records contribute the energy of their covered
    intervals; twist records contribute their window span.  The trace is
    finite by construction (truncated runs carry `truncated_at`), so the
    totals are conservative stand-ins for the infinite-horizon sums.
    """
    for s in s_values:
        if not 0.0 < s <= 1.0:
            raise ParameterError(f"s must lie in (0, 1], got {s}")
    if validate:
        rep = validate_trace(trace)
        if not rep.ok:
            raise ParameterError(f"invalid trace: first failure {rep.first_failure()}")
    totals = {s: 0.0 for s in s_values}
    partials = {s: [] for s in s_values} if keep_partials else None
    counts = {eps: 0 for eps in eps_values}
    for rec in trace.records:
        intervals = _record_intervals(rec)
        for s in s_values:
            totals[s] += step_energy(intervals, s)
            if keep_partials:
                partials[s].append(totals[s])
        if eps_values:
            longest = _record_max_edge(rec)
            for eps in eps_values:
                if longest >= eps:
                    counts[eps] += 1
    return EnergyReport(
        s_values=tuple(s_values),
        totals=totals,
        comm_counts=counts,
        truncated_at=trace.truncated_at,
        diameter_final=trace.final_diameter(),
        partial_sums=partials,
    )


def comm_count(trace, eps: float) -> int:
    """Number of records carrying at least one edge of embedded length >= eps."""
    if eps <= 0.0:
        raise ParameterError("eps must be positive")
    records = trace.records if isinstance(trace, Trace) else trace
    return sum(1 for rec in records if _record_max_edge(rec) >= eps)


def bound_theorem1(n: int, rho: float, s: float) -> float:
    """Energy upper bound: min of (3/rho/s)**(n-1) and its refinement.

    The refinement is 2*(2/rho/s)**(n-1) for n > 2 and 2/(rho*s) for n = 2.
    """
    if n < 2:
        raise ParameterError("need at least two agents")
    if not (0.0 < rho <= 0.5 and 0.0 < s <= 1.0):
        raise ParameterError("rho in (0,1/2] and s in (0,1] required")
    A = 2.0 / (rho * s)
    basic = (3.0 / (rho * s)) ** (n - 1)
    refined = A if n == 2 else 2.0 * A ** (n - 1)
    return min(basic, refined)


@dataclass(frozen=True)
class CommBound:
    value: float  # min over the two prescribed exponent choices
    s_single: float  # 1/log2(1/eps), clamped to (0, 1]
    s_scaled: float  # n/log2(1/eps), clamped to (0, 1]
    value_single: float
    value_scaled: float


def bound_comm(
    n: int,
    rho: float,
    eps: float,
    energy_bound: Optional[Callable[[float], float]] = None,
) -> CommBound:
    """Communication-count bound eps**(-s) * E(s) at the prescribed exponents.

    Evaluates the Markov-style bound at s = 1/log2(1/eps) and
    s = n/log2(1/eps), each clamped into (0, 1], and returns the minimum
    along with both raw values for display.  For eps > 1 there is no edge
    long enough, so the bound is 0.
    """
    if eps <= 0.0:
        raise ParameterError("eps must be positive")
    if eps > 1.0:
        return CommBound(0.0, 1.0, 1.0, 0.0, 0.0)
    if energy_bound is None:
        energy_bound = lambda s: bound_theorem1(n, rho, s)
    log_inv = math.log2(1.0 / eps)

    def clamp(s):
        if log_inv <= 0.0:
            return 1.0
        return min(1.0, s)

    s1 = clamp(1.0 / log_inv) if log_inv > 0 else 1.0
    s2 = clamp(n / log_inv) if log_inv > 0 else 1.0
    v1 = eps ** (-s1) * energy_bound(s1)
    v2 = eps ** (-s2) * energy_bound(s2)
    return CommBound(
        value=min(v1, v2), s_single=s1, s_scaled=s2, value_single=v1, value_scaled=v2
    )
