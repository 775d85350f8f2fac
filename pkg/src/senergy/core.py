"""Positions, step graphs, and single-step constraint semantics on [0, 1].

Agents live at real positions in the unit interval.  A step is described by
an undirected graph with implicit self-loops; each agent may move anywhere
within the span of its graph neighborhood, but at least a rho-fraction of
that span away from both ends.  This module owns the domain types, the
per-step validator, the interval-union geometry, and the per-step energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ParameterError, PolicyError

# Positions may leave [0, 1] by rounding only; anything worse is a bug.
_POSITION_SLACK = 1e-9

POLICIES = ("midpoint", "leftmost", "rightmost", "uniform", "matrix")


@dataclass(frozen=True)
class AveragingParams:
    """Weight floor rho in (0, 1/2] plus the absolute validation tolerance."""

    rho: float
    tolerance: float = 1e-9

    def __post_init__(self):
        if not 0.0 < self.rho <= 0.5:
            raise ParameterError(f"rho must lie in (0, 1/2], got {self.rho}")
        if self.tolerance < 0.0:
            raise ParameterError("tolerance must be nonnegative")


@dataclass(frozen=True)
class Configuration:
    """Sorted agent positions with the rank -> agent-id label map.

    Ranks are 0-based and refer to the sorted order at this time step; ties
    are broken by agent id, so the labeling is canonical.  `labels[rank]`
    is the original id of the agent holding that rank.
    """

    positions: tuple
    labels: tuple
    time: int = 0

    def __post_init__(self):
        n = len(self.positions)
        if len(self.labels) != n:
            raise ParameterError("positions and labels must have equal length")
        for k in range(1, n):
            a, b = self.positions[k - 1], self.positions[k]
            if b < a or (b == a and self.labels[k] < self.labels[k - 1]):
                raise ParameterError(
                    "positions must be sorted nondecreasing, ties by agent id"
                )
        for p in self.positions:
            if p < -_POSITION_SLACK or p > 1.0 + _POSITION_SLACK:
                raise ParameterError(f"position {p} outside the unit interval")

    @classmethod
    def from_positions(cls, by_id: Sequence[float], time: int = 0) -> "Configuration":
        """Build a configuration from positions indexed by agent id."""
        vals = [min(1.0, max(0.0, float(p))) for p in by_id]
        for raw in by_id:
            if raw < -_POSITION_SLACK or raw > 1.0 + _POSITION_SLACK:
                raise ParameterError(f"position {raw} outside the unit interval")
        order = sorted(range(len(vals)), key=lambda a: (vals[a], a))
        return cls(
            positions=tuple(vals[a] for a in order),
            labels=tuple(order),
            time=time,
        )

    @property
    def n(self) -> int:
        return len(self.positions)

    def by_id(self) -> list:
        """Positions re-indexed by original agent id."""
        out = [0.0] * self.n
        for rank, agent in enumerate(self.labels):
            out[agent] = self.positions[rank]
        return out

    def rank_of(self, agent: int) -> int:
        return self.labels.index(agent)

    def position_of(self, agent: int) -> float:
        return self.positions[self.rank_of(agent)]

    def diameter(self) -> float:
        if self.n == 0:
            return 0.0
        return self.positions[-1] - self.positions[0]


@dataclass(frozen=True)
class StepGraph:
    """One step's undirected communication graph.

    Self-loops are implicit (every agent always hears itself); `edges`
    holds only proper edges, normalized as (i, j) with i < j.  Endpoints
    are ranks in the step's sorted configuration.
    """

    n: int
    edges: frozenset

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable) -> "StepGraph":
        norm = set()
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ParameterError(f"edge ({i},{j}) out of range for n={n}")
            if i == j:
                continue  # self-loops are implicit
            norm.add((min(i, j), max(i, j)))
        return cls(n=n, edges=frozenset(norm))

    @classmethod
    def empty(cls, n: int) -> "StepGraph":
        return cls(n=n, edges=frozenset())

    @classmethod
    def complete(cls, n: int) -> "StepGraph":
        return cls.from_pairs(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return True
        return (min(i, j), max(i, j)) in self.edges

    def neighbors(self, i: int) -> set:
        out = {i}
        for a, b in self.edges:
            if a == i:
                out.add(b)
            elif b == i:
                out.add(a)
        return out


def neighbor_extremes(g: StepGraph, i: int):
    """Smallest and largest rank adjacent to i, counting the self-loop.

    Self-loops guarantee l <= i <= r, so the result is always defined.
    """
    l = r = i
    for a, b in g.edges:
        if a == i:
            if b < l:
                l = b
            if b > r:
                r = b
        elif b == i:
            if a < l:
                l = a
            if a > r:
                r = a
    return l, r


def _all_extremes(g: StepGraph):
    lo = list(range(g.n))
    hi = list(range(g.n))
    for a, b in g.edges:
        if b < lo[a]:
            lo[a] = b
        if b > hi[a]:
            hi[a] = b
        if a < lo[b]:
            lo[b] = a
        if a > hi[b]:
            hi[b] = a
    return lo, hi


@dataclass(frozen=True)
class Violation:
    rank: int
    agent: int
    side: str  # "lower" | "upper" | "order"
    slack: float  # negative by how much the constraint failed


@dataclass(frozen=True)
class StepReport:
    ok: bool
    violations: tuple = ()

    def __bool__(self):
        return self.ok


def validate_averaging_step(
    x: Configuration, g: StepGraph, y: Configuration, p: AveragingParams
) -> StepReport:
    """Check one averaging step against the per-agent movement constraint.

    For every rank i of x, with l/r the extreme neighbor ranks and
    delta = rho * (x_r - x_l), the agent's next position must satisfy
    x_l + delta - tol <= y_i <= x_r - delta + tol.  `y` gives the same
    agents' positions at the next step (matched through agent ids).
    """
    if x.n != y.n or g.n != x.n:
        raise ParameterError("configuration / graph size mismatch")
    y_by_id = y.by_id()
    lo, hi = _all_extremes(g)
    tol = p.tolerance
    violations = []
    for i in range(x.n):
        xl = x.positions[lo[i]]
        xr = x.positions[hi[i]]
        delta = p.rho * (xr - xl)
        yi = y_by_id[x.labels[i]]
        lower = xl + delta
        upper = xr - delta
        if yi < lower - tol:
            violations.append(Violation(i, x.labels[i], "lower", yi - lower))
        if yi > upper + tol:
            violations.append(Violation(i, x.labels[i], "upper", upper - yi))
    return StepReport(ok=not violations, violations=tuple(violations))


def interval_union(g: StepGraph, x: Configuration) -> list:
    """Maximal intervals covered by the embedded edges of one step.

    Each proper edge (i, j) embeds as [x_i, x_j]; the implicit self-loops
    embed as the points x_i.  Returns the connected components of the
    union as a sorted list of disjoint closed intervals (a, b), a <= b.
    """
    raw = [(p, p) for p in x.positions]
    for i, j in g.edges:
        a, b = x.positions[i], x.positions[j]
        raw.append((min(a, b), max(a, b)))
    raw.sort()
    merged = [raw[0]]
    for a, b in raw[1:]:
        ca, cb = merged[-1]
        if a <= cb:  # closed intervals: touching counts as overlap
            if b > cb:
                merged[-1] = (ca, b)
        else:
            merged.append((a, b))
    return merged


def step_energy(intervals: Sequence, s: float) -> float:
    """Sum of interval lengths raised to the power s, with 0**s = 0."""
    if not 0.0 < s <= 1.0:
        raise ParameterError(f"s must lie in (0, 1], got {s}")
    total = 0.0
    for a, b in intervals:
        if b > a:
            total += (b - a) ** s
    return total


def _check_matrix(P, g: StepGraph, rho: float):
    P = np.asarray(P, dtype=float)
    n = g.n
    if P.shape != (n, n):
        raise PolicyError(f"matrix shape {P.shape} does not match n={n}")
    if np.any(P < 0):
        raise PolicyError("matrix entries must be nonnegative")
    if np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-12:
        raise PolicyError("matrix rows must sum to 1")
    for i in range(n):
        if P[i, i] <= 0:
            raise PolicyError(f"diagonal entry ({i},{i}) must be positive")
        for j in range(n):
            if i == j:
                continue
            present = g.has_edge(i, j)
            if (P[i, j] > 0) != present:
                raise PolicyError(
                    f"matrix support at ({i},{j}) disagrees with the step graph"
                )
            if 0 < P[i, j] < rho:
                raise PolicyError(f"entry ({i},{j})={P[i, j]} below rho={rho}")
    return P


def apply_policy(
    x: Configuration,
    g: StepGraph,
    p: AveragingParams,
    policy: str,
    rng: Optional[np.random.Generator] = None,
    matrix=None,
) -> Configuration:
    """Resolve the step's nondeterminism and produce the next configuration.

    Built-in policies: midpoint (center of the allowed interval), leftmost
    and rightmost (the extremal choices), uniform (uniform draw inside the
    allowed interval, needs `rng`), and matrix (y = P x for a row-stochastic
    P consistent with the graph and rho).  The output always satisfies the
    step constraint with zero slack, up to rounding.
    """
    if policy not in POLICIES:
        raise PolicyError(f"unknown policy {policy!r}")
    lo, hi = _all_extremes(g)
    pos = x.positions
    n = x.n
    if policy == "matrix":
        if matrix is None:
            raise PolicyError("matrix policy requires a matrix")
        P = _check_matrix(matrix, g, p.rho)
        targets = list(P @ np.asarray(pos))
    else:
        if policy == "uniform" and rng is None:
            raise PolicyError("uniform policy requires an rng")
        targets = []
        for i in range(n):
            xl, xr = pos[lo[i]], pos[hi[i]]
            delta = p.rho * (xr - xl)
            a, b = xl + delta, xr - delta
            if policy == "midpoint":
                targets.append((xl + xr) / 2.0)
            elif policy == "leftmost":
                targets.append(a)
            elif policy == "rightmost":
                targets.append(b)
            else:
                targets.append(a if b <= a else rng.uniform(a, b))
    by_id = [0.0] * n
    for i in range(n):
        by_id[x.labels[i]] = targets[i]
    return Configuration.from_positions(by_id, time=x.time + 1)
