"""Factor one averaging step into per-interval twist substeps.

Each maximal covered interval of the step graph becomes one window,
processed left to right: the agents inside it move to the sorted values of
their targets (ties by agent id) while everyone else stays put.  The
substeps have exactly the same total energy as the original step, and each
passes the twist validator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .core import (
    AveragingParams,
    Configuration,
    StepGraph,
    interval_union,
    validate_averaging_step,
)
from .errors import InvalidStepError, ParameterError
from .trace import TwistRecord
from .twist import TwistStep, twist_interval


def reduce_step(
    x: Configuration, g: StepGraph, y: Configuration, p: AveragingParams
) -> List[TwistRecord]:
    """Split a valid averaging step into twist substeps, one per interval.

    Degenerate (point) intervals produce no substep; an all-self-loop step
    therefore reduces to nothing.  After the last substep the multiset of
    positions equals sorted y, up to the validation tolerance.
    """
    report = validate_averaging_step(x, g, y, p)
    if not report.ok:
        raise InvalidStepError("cannot reduce an invalid averaging step", report)
    y_by_id = y.by_id()
    intervals = [iv for iv in interval_union(g, x) if iv[1] > iv[0]]

    cur_pos = list(x.positions)
    cur_labels = list(x.labels)
    out = []
    for a, b in intervals:
        # Window ranks are contiguous and stable across substeps: targets
        # stay inside their own interval and intervals are disjoint.
        ranks = [i for i in range(x.n) if a <= x.positions[i] <= b]
        u, v = ranks[0], ranks[-1]
        before = Configuration(tuple(cur_pos), tuple(cur_labels), time=x.time)
        moved = sorted(
            ((y_by_id[cur_labels[i]], cur_labels[i]) for i in range(u, v + 1))
        )
        for k, (pos, agent) in enumerate(moved):
            cur_pos[u + k] = pos
            cur_labels[u + k] = agent
        after = Configuration(tuple(cur_pos), tuple(cur_labels), time=x.time)
        out.append(
            TwistRecord(step=TwistStep(u=u, v=v, rho=p.rho), before=before, after=after)
        )

    for got, want in zip(cur_pos, y.positions):
        if abs(got - want) > p.tolerance + 1e-12:
            raise ParameterError(
                "reduction did not reproduce the target configuration"
            )
    return out


@dataclass(frozen=True)
class TauSlack:
    rank: int
    lower: float  # y_i minus the left twist bound
    upper: float  # right twist bound minus y_i


@dataclass(frozen=True)
class TauReport:
    ok: bool
    slacks: tuple

    def min_slack(self) -> float:
        return min(min(s.lower, s.upper) for s in self.slacks)


def verify_taucond(x, step: TwistStep, y, tol: float = 0.0) -> TauReport:
    """Check the window containment condition on a produced substep.

    For each rank i in [u, v] this verifies
    y_i <= x_v - rho*(x_v - x_{max(i-1,u)}) and the mirror-image lower
    bound, reporting the slack on both sides.
    """
    slacks = []
    for i in range(step.u, step.v + 1):
        tau = twist_interval(x, step, i)
        slacks.append(TauSlack(rank=i, lower=y[i] - tau.lo, upper=tau.hi - y[i]))
    ok = all(s.lower >= -tol and s.upper >= -tol for s in slacks)
    return TauReport(ok=ok, slacks=tuple(slacks))
