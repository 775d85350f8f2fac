"""Adversarial lower-bound machinery.

`lb_trajectory` builds the recursive worst-case run: the rightmost pair of
the active interval exchanges one long edge, the left group re-converges at
a smaller scale, and the whole pattern repeats in the shrunken interval.
The companion recurrences give the matching analytical lower bounds on the
communication count and the energy, so measured runs can be sandwiched
between them and the closed-form upper bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List

from .core import AveragingParams, Configuration, StepGraph
from .errors import DepthCapExceeded, OutOfRegimeError, ParameterError
from .trace import AveragingRecord, Trace

_MAX_LEVEL_ITERATIONS = 10_000_000


def _check_lb_params(n, rho, eps):
    if n < 2:
        raise ParameterError("need at least two agents")
    if not 0.0 < rho <= 1.0 / 3.0:
        raise ParameterError(f"rho must lie in (0, 1/3], got {rho}")
    if eps <= 0.0:
        raise ParameterError("eps must be positive")


class _Builder:
    def __init__(self, n, rho, eps):
        self.n = n
        self.rho = rho
        self.eps = eps
        self.pos = [0.0] * n
        self.pos[n - 1] = 1.0
        self.records: List[AveragingRecord] = []
        self.time = 0

    def _config(self):
        cfg = Configuration.from_positions(self.pos, time=self.time)
        return cfg

    def _emit(self, pairs_by_id, targets_by_id):
        before = self._config()
        rank_pairs = [
            (before.rank_of(i), before.rank_of(j)) for i, j in pairs_by_id
        ]
        g = StepGraph.from_pairs(self.n, rank_pairs)
        for agent, target in targets_by_id.items():
            self.pos[agent] = target
        self.time += 1
        after = Configuration.from_positions(self.pos, time=self.time)
        self.records.append(AveragingRecord(graph=g, before=before, after=after))

    def construct(self, agents):
        """Run the pattern on `agents`: all but the last coincident at the
        left end, the last at the right end.  Ends with the whole group
        coincident (the scale having dropped below eps)."""
        m = len(agents)
        if m == 1:
            return
        rho = self.rho
        while True:
            a = self.pos[agents[0]]
            b = self.pos[agents[-1]]
            if b - a < self.eps:
                self._collapse(agents)
                return
            span = b - a
            left = agents[-2]
            right = agents[-1]
            self._emit(
                pairs_by_id=[(left, right)],
                targets_by_id={left: a + rho * span, right: b - rho * span},
            )
            # The left group re-converges at scale rho*span; by mass-center
            # invariance it lands at a + rho*span/(m-1).
            self.construct(agents[:-1])

    def _collapse(self, agents):
        """One complete-graph step sending the group to its mass center.

        All edges involved are shorter than eps, so the step never counts
        toward any communication tally.  When rho exceeds 1/len(agents) the
        mass center can fall outside the allowed interval; it is then
        clamped to the nearest feasible point (a deviation below eps*rho).
        """
        vals = [self.pos[i] for i in agents]
        lo, hi = min(vals), max(vals)
        if hi == lo:
            return
        span = hi - lo
        mean = sum(vals) / len(vals)
        target = min(max(mean, lo + self.rho * span), hi - self.rho * span)
        pairs = [
            (agents[i], agents[j])
            for i in range(len(agents))
            for j in range(i + 1, len(agents))
        ]
        self._emit(pairs_by_id=pairs, targets_by_id={i: target for i in agents})


def lb_trajectory(n: int, rho: float, eps: float) -> Trace:
    """Worst-case trajectory whose every counted edge has length >= eps.

    Recursion below scale eps is replaced by a single sub-eps collapse to
    the group's mass center, which only forgoes counted steps; the measured
    communication count is therefore a lower bound on the ideal run's.
    """
    _check_lb_params(n, rho, eps)
    params = AveragingParams(rho=rho, tolerance=0.0)
    if eps >= 1.0:
        return Trace(params=params, n=n, kind="averaging", records=[])
    builder = _Builder(n, rho, eps)
    builder.construct(list(range(n)))
    return Trace(params=params, n=n, kind="averaging", records=builder.records)


def lb_recurrence_b(n: int, eps: float, rho: float) -> int:
    """Communication-count lower bound by exact recurrence.

    C(n, eps) = 0 for n = 1 or eps > 1, else
    C(n, eps) >= 1 + C(n-1, eps/rho) + C(n, eps / (1 - rho*n/(n-1))).
    """
    if n < 1:
        raise ParameterError("need at least one agent")
    if not 0.0 < rho <= 1.0 / 3.0:
        raise ParameterError(f"rho must lie in (0, 1/3], got {rho}")
    if eps <= 0.0:
        raise ParameterError("eps must be positive")
    return _lb_rec(n, eps, rho)


@lru_cache(maxsize=None)
def _lb_rec(n: int, eps: float, rho: float) -> int:
    if n <= 1 or eps > 1.0:
        return 0
    shrink = 1.0 - rho * n / (n - 1)
    if shrink <= 0.0:
        raise ParameterError("rho too large: the active interval cannot shrink")
    total = 0
    e = eps
    iterations = 0
    while e <= 1.0:
        total += 1 + _lb_rec(n - 1, e / rho, rho)
        e = e / shrink
        iterations += 1
        if iterations > _MAX_LEVEL_ITERATIONS:
            raise DepthCapExceeded("communication recurrence failed to terminate")
    return total


@dataclass(frozen=True)
class ClosedFormB:
    """Expansion of the count recurrence: k doublings per level, multiplied
    down the levels."""

    k: int  # the top-level repetition count
    estimate: float  # product of the per-level repetition counts
    side_condition_ok: bool  # rho*(1-2*rho)**(k-1) >= eps**(1/n)


def _level_k(n: int, eps: float, rho: float) -> int:
    return math.ceil((math.log2(eps) / n - math.log2(rho)) / (2.0 * math.log2(1.0 - 2.0 * rho)))


def lb_closedform_b(n: int, eps: float, rho: float) -> ClosedFormB:
    """Product-form lower estimate for the communication count.

    Valid only for eps <= rho**(2n) and rho <= 1/3; outside that regime an
    OutOfRegimeError is raised rather than silently extrapolating.
    """
    _check_lb_params(n, rho, eps)
    if eps > rho ** (2 * n):
        raise OutOfRegimeError(
            f"closed form requires eps <= rho**(2n) = {rho ** (2 * n)}, got {eps}"
        )
    k_top = _level_k(n, eps, rho)
    side_ok = rho * (1.0 - 2.0 * rho) ** (k_top - 1) >= eps ** (1.0 / n)
    estimate = 1.0
    e = eps
    for m in range(n, 1, -1):
        estimate *= _level_k(m, e, rho)
        e = e ** (1.0 - 1.0 / m)
    return ClosedFormB(k=k_top, estimate=estimate, side_condition_ok=side_ok)


def lb_recurrence_a(n: int, s: float, rho: float) -> float:
    """Energy lower bound by exact solve of the level recurrence.

    E_1 = 0 and E_m = (rho**s * E_{m-1} + 1) / (1 - (1-2*rho)**s).
    """
    if n < 2:
        raise ParameterError("need at least two agents")
    if not 0.0 < s <= 1.0:
        raise ParameterError(f"s must lie in (0, 1], got {s}")
    if not 0.0 < rho <= 1.0 / 3.0:
        raise ParameterError(f"rho must lie in (0, 1/3], got {rho}")
    denom = 1.0 - (1.0 - 2.0 * rho) ** s
    if denom <= 0.0:
        raise ParameterError("degenerate solve: (1-2*rho)**s must be below 1")
    e = 0.0
    for _ in range(2, n + 1):
        e = (rho ** s * e + 1.0) / denom
    return e
