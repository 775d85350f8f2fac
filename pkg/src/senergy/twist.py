"""Order-preserving window dynamics: twist intervals and step validation.

A twist step picks a window of ranks [u, v] and moves each agent inside it
to a point of its twist interval while keeping the global ordering; agents
outside the window stay put.  The step's energy is the window span raised
to the power s.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import StepReport, Violation
from .errors import ParameterError


@dataclass(frozen=True)
class TwistStep:
    """Window ranks u < v (0-based) and the weight floor rho."""

    u: int
    v: int
    rho: float

    def __post_init__(self):
        if not 0 <= self.u < self.v:
            raise ParameterError(f"need 0 <= u < v, got u={self.u}, v={self.v}")
        if not 0.0 < self.rho <= 0.5:
            raise ParameterError(f"rho must lie in (0, 1/2], got {self.rho}")


@dataclass(frozen=True)
class TwistInterval:
    lo: float
    hi: float
    agent: int

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= value <= self.hi + tol


def twist_interval(x: Sequence[float], step: TwistStep, i: int) -> TwistInterval:
    """Allowed interval for rank i inside the window of `step`.

    With x sorted, the interval is
    [x_u + rho*(x_{min(i+1,v)} - x_u),  x_v - rho*(x_v - x_{max(i-1,u)})];
    it is nonempty for every rho <= 1/2 and nested in [x_u, x_v].
    """
    u, v, rho = step.u, step.v, step.rho
    if not u <= i <= v:
        raise ParameterError(f"rank {i} outside window [{u}, {v}]")
    if v >= len(x):
        raise ParameterError(f"window [{u}, {v}] exceeds n={len(x)}")
    lo = x[u] + rho * (x[min(i + 1, v)] - x[u])
    hi = x[v] - rho * (x[v] - x[max(i - 1, u)])
    return TwistInterval(lo=lo, hi=hi, agent=i)


def validate_twist_step(
    x: Sequence[float], step: TwistStep, y: Sequence[float], tol: float = 0.0
) -> StepReport:
    """Check ordering, twist membership inside the window, fixity outside."""
    if len(x) != len(y):
        raise ParameterError("before/after lengths differ")
    violations = []
    for i in range(1, len(y)):
        if y[i] < y[i - 1]:
            violations.append(Violation(i, i, "order", y[i] - y[i - 1]))
    for i in range(len(x)):
        if step.u <= i <= step.v:
            tau = twist_interval(x, step, i)
            if y[i] < tau.lo - tol:
                violations.append(Violation(i, i, "lower", y[i] - tau.lo))
            if y[i] > tau.hi + tol:
                violations.append(Violation(i, i, "upper", tau.hi - y[i]))
        elif y[i] != x[i]:
            side = "lower" if y[i] < x[i] else "upper"
            violations.append(Violation(i, i, side, -abs(y[i] - x[i])))
    return StepReport(ok=not violations, violations=tuple(violations))


def twist_step_energy(x: Sequence[float], step: TwistStep, s: float) -> float:
    """Window span raised to the power s, with 0**s = 0."""
    if not 0.0 < s <= 1.0:
        raise ParameterError(f"s must lie in (0, 1], got {s}")
    span = x[step.v] - x[step.u]
    return span ** s if span > 0.0 else 0.0


def leftmost_targets(x: Sequence[float], step: TwistStep) -> list:
    """Feasibility witness: every windowed agent at the left end of its twist.

    The result is always nondecreasing, so it passes validate_twist_step.
    """
    y = list(x)
    for i in range(step.u, step.v + 1):
        y[i] = twist_interval(x, step, i).lo
    return y
