"""Opinion dynamics in [0,1]^d by repeated box squeezes.

At each step an arbitrary subset of agents is moved anywhere inside the
shrunken box (1-alpha)*B + alpha*c, where B is the smallest axis-parallel
box enclosing the subset and c its center.  Along each axis this is an
averaging step over the complete graph on the subset with rho = alpha/2,
which is what the volume bounds below lean on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ParameterError
from .measure import bound_theorem1

TARGET_POLICIES = ("center", "uniform", "corner")


@dataclass
class OpinionState:
    points: np.ndarray  # shape (n, d), all coordinates in [0, 1]
    alpha: float

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ParameterError("points must be an (n, d) array")
        if not 0.0 < self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in (0, 1], got {self.alpha}")
        if np.any(self.points < -1e-9) or np.any(self.points > 1.0 + 1e-9):
            raise ParameterError("coordinates must lie in [0, 1]")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class OpinionRecord:
    chosen: tuple
    box_lo: tuple  # enclosing box of the chosen subset, per axis
    box_hi: tuple
    before: tuple  # full point set, row-major tuples
    after: tuple

    def proj_lengths(self) -> tuple:
        return tuple(h - l for l, h in zip(self.box_lo, self.box_hi))

    def volume(self) -> float:
        vol = 1.0
        for l, h in zip(self.box_lo, self.box_hi):
            vol *= h - l
        return vol


@dataclass
class OpinionTrace:
    n: int
    d: int
    alpha: float
    records: List[OpinionRecord] = field(default_factory=list)


def enclosing_box(points: np.ndarray, chosen: Sequence[int]):
    sub = points[list(chosen)]
    return sub.min(axis=0), sub.max(axis=0)


def shrunken_box(points: np.ndarray, chosen: Sequence[int], alpha: float):
    """Per-axis bounds of (1-alpha)*B + alpha*c for the chosen subset."""
    lo, hi = enclosing_box(points, chosen)
    c = (lo + hi) / 2.0
    return (1.0 - alpha) * lo + alpha * c, (1.0 - alpha) * hi + alpha * c


def opinion_step(
    state: OpinionState, chosen: Sequence[int], targets
) -> Tuple[OpinionState, OpinionRecord]:
    """Move the chosen agents to `targets`, which must sit in the shrunken box."""
    chosen = tuple(sorted(set(int(i) for i in chosen)))
    if not chosen:
        raise ParameterError("chosen subset must be nonempty")
    targets = np.asarray(targets, dtype=float)
    if targets.shape != (len(chosen), state.d):
        raise ParameterError("targets must be one point per chosen agent")
    inner_lo, inner_hi = shrunken_box(state.points, chosen, state.alpha)
    if np.any(targets < inner_lo - 1e-12) or np.any(targets > inner_hi + 1e-12):
        raise ParameterError("a target lies outside the shrunken box")
    lo, hi = enclosing_box(state.points, chosen)
    before = tuple(map(tuple, state.points))
    new_points = state.points.copy()
    new_points[list(chosen)] = targets
    after = tuple(map(tuple, new_points))
    record = OpinionRecord(
        chosen=chosen,
        box_lo=tuple(lo),
        box_hi=tuple(hi),
        before=before,
        after=after,
    )
    return OpinionState(points=new_points, alpha=state.alpha), record


def squeeze_targets(
    points: np.ndarray,
    chosen: Sequence[int],
    alpha: float,
    policy: str,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Target choices inside the shrunken box: center collapse, uniform
    draws, or the adversarial corner (everyone to the lower corner)."""
    if policy not in TARGET_POLICIES:
        raise ParameterError(f"unknown target policy {policy!r}")
    inner_lo, inner_hi = shrunken_box(points, chosen, alpha)
    k = len(tuple(chosen))
    if policy == "center":
        c = (inner_lo + inner_hi) / 2.0
        return np.tile(c, (k, 1))
    if policy == "corner":
        return np.tile(inner_lo, (k, 1))
    if rng is None:
        raise ParameterError("uniform target policy requires an rng")
    return inner_lo + rng.random((k, points.shape[1])) * (inner_hi - inner_lo)


def run_squeeze(
    n: int,
    d: int,
    alpha: float,
    steps: int,
    policy: str = "uniform",
    rng: Optional[np.random.Generator] = None,
    volume_cutoff: float = 0.0,
) -> OpinionTrace:
    """Random squeeze trial: random subsets, targets by `policy`."""
    rng = np.random.default_rng() if rng is None else rng
    state = OpinionState(points=rng.random((n, d)), alpha=alpha)
    trace = OpinionTrace(n=n, d=d, alpha=alpha)
    for _ in range(steps):
        k = int(rng.integers(2, n + 1))
        chosen = rng.choice(n, size=k, replace=False)
        targets = squeeze_targets(state.points, chosen, alpha, policy, rng)
        state, record = opinion_step(state, chosen, targets)
        trace.records.append(record)
        if record.volume() < volume_cutoff:
            break
    return trace


@dataclass(frozen=True)
class VolumeReport:
    s: float
    total: float  # sum over steps of V_t**s
    bound: float  # (6 / (d*alpha*s))**(n-1)
    holder_rhs: float  # product over axes of (sum_t l_t(j)**(d*s))**(1/d)
    eps_count: int  # steps with V_t >= eps
    eps_count_bound: float


def opinion_volume_report(trace: OpinionTrace, s: float, eps: float) -> VolumeReport:
    """Accumulated box-volume energy against its closed-form bound.

    Requires 0 < s <= 1/d.  The per-axis projection sums feed the Hoelder
    right-hand side; the eps count is compared against the count bound
    evaluated at the scaled exponent n/log2(1/eps) (clamped into (0, 1/d]).
    """
    d, n, alpha = trace.d, trace.n, trace.alpha
    if not 0.0 < s <= 1.0 / d:
        raise ParameterError(f"s must lie in (0, 1/d], got {s} for d={d}")
    total = 0.0
    axis_sums = [0.0] * d
    eps_count = 0
    for rec in trace.records:
        lengths = rec.proj_lengths()
        vol = rec.volume()
        if vol > 0.0:
            total += vol ** s
        for j, l in enumerate(lengths):
            if l > 0.0:
                axis_sums[j] += l ** (d * s)
        if vol >= eps:
            eps_count += 1
    holder_rhs = math.prod(v ** (1.0 / d) for v in axis_sums) if all(
        v > 0.0 for v in axis_sums
    ) else 0.0
    bound = (6.0 / (d * alpha * s)) ** (n - 1)
    if eps >= 1.0:
        count_bound = 0.0
    else:
        s_eps = min(1.0 / d, n / math.log2(1.0 / eps)) if eps < 1.0 else 1.0 / d
        count_bound = eps ** (-s_eps) * (6.0 / (d * alpha * s_eps)) ** (n - 1)
    return VolumeReport(
        s=s,
        total=total,
        bound=bound,
        holder_rhs=holder_rhs,
        eps_count=eps_count,
        eps_count_bound=count_bound,
    )
