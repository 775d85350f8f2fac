"""Discrete Kuramoto oscillators instrumented as an averaging system.

All oscillators share one natural frequency; each step the i-th phase moves
by the neighborhood-averaged sine of the phase differences.  Written as a
convex combination of neighbor phases, the update exposes a realized
per-step weight floor, which is what the synchronization report compares
counts against (the model's own constants are not pinned down).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .core import StepGraph
from .errors import ParameterError
from .measure import bound_comm


@dataclass
class KuramotoState:
    thetas: np.ndarray  # phases in radians
    coupling: float  # K * deltaT, the effective gain; must be <= 1

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=float)
        if not 0.0 < self.coupling <= 1.0:
            raise ParameterError(f"K*deltaT must lie in (0, 1], got {self.coupling}")

    @property
    def n(self) -> int:
        return self.thetas.shape[0]


@dataclass(frozen=True)
class KuramotoRecord:
    edges: frozenset
    before: tuple
    after: tuple
    rho_eff: Optional[float]  # realized weight floor; None when nothing moved
    in_half_circle: bool


@dataclass
class KuramotoTrace:
    n: int
    coupling: float
    half_circle: Tuple[float, float]  # the phase band asserted each step
    records: List[KuramotoRecord] = field(default_factory=list)


def kuramoto_step(
    state: KuramotoState, g: StepGraph, half_circle: Optional[Tuple[float, float]] = None
) -> Tuple[KuramotoState, KuramotoRecord]:
    """One synchronization step over the given graph.

    theta_i' = theta_i + (K*dT/|n_i|) * sum_{j in n_i} sin(theta_j - theta_i)
    with n_i the neighborhood of i including i itself.  The realized floor
    rho_eff is the smallest relative margin any oscillator keeps from the
    ends of its neighborhood span.
    """
    if g.n != state.n:
        raise ParameterError("graph size does not match the state")
    th = state.thetas
    new = th.copy()
    margins = []
    for i in range(state.n):
        nbrs = sorted(g.neighbors(i))
        drift = sum(math.sin(th[j] - th[i]) for j in nbrs)
        new[i] = th[i] + state.coupling / len(nbrs) * drift
        span_lo = min(th[j] for j in nbrs)
        span_hi = max(th[j] for j in nbrs)
        span = span_hi - span_lo
        if span > 0.0:
            margins.append(min(new[i] - span_lo, span_hi - new[i]) / span)
    rho_eff = min(margins) if margins else None
    if half_circle is None:
        ok = True
    else:
        ok = bool(np.all(new >= half_circle[0]) and np.all(new <= half_circle[1]))
    record = KuramotoRecord(
        edges=g.edges,
        before=tuple(th),
        after=tuple(new),
        rho_eff=rho_eff,
        in_half_circle=ok,
    )
    return KuramotoState(thetas=new, coupling=state.coupling), record


def run_kuramoto(
    thetas,
    coupling: float,
    steps: int,
    rng: Optional[np.random.Generator] = None,
    edge_probability: float = 0.5,
    alpha_margin: float = 0.0,
) -> KuramotoTrace:
    """Random-graph synchronization run from the given initial phases.

    The half-circle band [alpha_margin - pi/2, pi/2] is checked on every
    step; violations are flagged in the records, never raised.
    """
    state = KuramotoState(thetas=thetas, coupling=coupling)
    rng = np.random.default_rng() if rng is None else rng
    band = (alpha_margin - math.pi / 2.0, math.pi / 2.0)
    trace = KuramotoTrace(n=state.n, coupling=coupling, half_circle=band)
    n = state.n
    for _ in range(steps):
        pairs = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < edge_probability
        ]
        g = StepGraph.from_pairs(n, pairs)
        state, record = kuramoto_step(state, g, half_circle=band)
        trace.records.append(record)
    return trace


@dataclass(frozen=True)
class SyncReport:
    eps: float
    count: int  # steps with an edge joining phases eps or more apart
    rho_eff_min: Optional[float]
    reference_bound: Optional[float]  # count bound with rho_eff substituted
    flagged_steps: tuple  # indices where the half-circle assertion failed
    in_regime: bool  # eps <= 2**-n, where the count bound is stated


def kuramoto_sync_report(trace: KuramotoTrace, eps: float) -> SyncReport:
    """Count eps-long phase edges and compare against the scaled bound.

    The reference bound substitutes the measured rho_eff for the model's
    unspecified constants, so it is a yardstick rather than an assertion.
    """
    if eps <= 0.0:
        raise ParameterError("eps must be positive")
    count = 0
    flagged = []
    rho_min = None
    for t, rec in enumerate(trace.records):
        th = rec.before
        if any(abs(th[i] - th[j]) >= eps for i, j in rec.edges):
            count += 1
        if not rec.in_half_circle:
            flagged.append(t)
        if rec.rho_eff is not None:
            rho_min = rec.rho_eff if rho_min is None else min(rho_min, rec.rho_eff)
    reference = None
    if rho_min is not None and 0.0 < rho_min <= 0.5 and eps <= 1.0:
        reference = bound_comm(trace.n, rho_min, eps).value
    return SyncReport(
        eps=eps,
        count=count,
        rho_eff_min=rho_min,
        reference_bound=reference,
        flagged_steps=tuple(flagged),
        in_regime=eps <= 2.0 ** (-trace.n),
    )
