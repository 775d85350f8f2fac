"""Trajectory generation: random step graphs plus the built-in policies.

All randomness flows from one 64-bit seed through numpy's default
generator, so identical configurations replay identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import AveragingParams, Configuration, StepGraph, apply_policy
from .digraph import StochasticStep, asym_step, random_type_symmetric_step
from .errors import ParameterError
from .trace import AveragingRecord, MatrixRecord, Trace

GRAPH_MODELS = ("gnp", "matching", "pair")

# Distinct positions closer than this are rounding artifacts: a later step
# bridging such a sliver has energy far above rounding scale for s < 1, so
# the run is truncated instead of emitting steps the certificate cannot
# resolve.  Exactly coincident positions are fine and common.
_RESOLUTION = 1e-9


def _below_resolution(cfg: Configuration) -> bool:
    pos = cfg.positions
    return any(
        0.0 < pos[k + 1] - pos[k] < _RESOLUTION for k in range(len(pos) - 1)
    )


@dataclass
class SimulationConfig:
    n: int
    rho: float
    policy: str = "uniform"
    graph: str = "gnp"
    edge_probability: Optional[float] = None  # default 1.5/n for gnp
    steps_cap: int = 1000
    diameter_cutoff: float = 1e-12
    tolerance: float = 1e-9
    seed: int = 0

    def params(self) -> AveragingParams:
        return AveragingParams(rho=self.rho, tolerance=self.tolerance)


def sample_graph(
    n: int, model: str, rng: np.random.Generator, edge_probability: Optional[float]
) -> StepGraph:
    """Random step graph: G(n, p), a random partial matching, or one pair."""
    if model not in GRAPH_MODELS:
        raise ParameterError(f"unknown graph model {model!r}")
    if model == "pair":
        i, j = rng.choice(n, size=2, replace=False)
        return StepGraph.from_pairs(n, [(int(i), int(j))])
    if model == "matching":
        order = list(rng.permutation(n))
        pairs = []
        while len(order) >= 2:
            a, b = order.pop(), order.pop()
            if rng.random() < 0.75:  # leave some agents isolated
                pairs.append((int(a), int(b)))
        return StepGraph.from_pairs(n, pairs)
    p = edge_probability if edge_probability is not None else min(1.0, 1.5 / n)
    pairs = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
    ]
    return StepGraph.from_pairs(n, pairs)


def _matrix_for(g: StepGraph, rho: float, rng: np.random.Generator):
    """Row-stochastic matrix consistent with g whose entries are >= rho."""
    n = g.n
    P = np.zeros((n, n))
    for i in range(n):
        nbrs = sorted(g.neighbors(i))
        d = len(nbrs)
        if d * rho > 1.0 + 1e-12:
            raise ParameterError(
                f"degree {d} at agent {i} is infeasible for rho={rho}"
            )
        w = rng.random(d)
        w = w / w.sum() * (1.0 - d * rho)
        for wk, j in zip(w, nbrs):
            P[i, j] = rho + wk
        P[i, nbrs[-1]] += 1.0 - P[i, nbrs].sum()
    return P


def initial_configuration(n: int, rng: np.random.Generator) -> Configuration:
    while True:
        pos = rng.random(n)
        # keep the spread visible so the trajectories have work to do
        pos[int(rng.integers(n))] = 0.0
        pos[int(rng.integers(n))] = 1.0 if n > 1 else pos[0]
        cfg = Configuration.from_positions(list(pos), time=0)
        if not _below_resolution(cfg):
            return cfg


def run_simulation(
    config: SimulationConfig, start: Optional[Configuration] = None
) -> Trace:
    """Generate an averaging trace under the configured policy.

    Stops at the diameter cutoff, at the step cap, or when two distinct
    positions land closer than the position resolution; any truncated run
    records the truncation index so measurements stay conservative.
    """
    rng = np.random.default_rng(config.seed)
    params = config.params()
    x = initial_configuration(config.n, rng) if start is None else start
    trace = Trace(params=params, n=config.n, kind="averaging")
    graph_model = "matching" if config.policy == "matrix" else config.graph
    for t in range(config.steps_cap):
        if x.diameter() < config.diameter_cutoff:
            break
        g = sample_graph(config.n, graph_model, rng, config.edge_probability)
        matrix = _matrix_for(g, config.rho, rng) if config.policy == "matrix" else None
        y = apply_policy(x, g, params, config.policy, rng=rng, matrix=matrix)
        trace.records.append(AveragingRecord(graph=g, before=x, after=y))
        x = y
        if _below_resolution(y):
            trace.truncated_at = t + 1
            break
    else:
        trace.truncated_at = config.steps_cap
    return trace


def run_asymmetric(
    n: int,
    steps_cap: int,
    seed: int = 0,
    diameter_cutoff: float = 1e-12,
    edge_probability: Optional[float] = None,
    tolerance: float = 1e-9,
) -> Trace:
    """Random cut-balanced type-symmetric stochastic trajectory.

    Each step draws a random undirected support and a random row-stochastic
    matrix on it; the trace's rho is the smallest positive entry seen, a
    valid floor for every step.
    """
    rng = np.random.default_rng(seed)
    x = initial_configuration(n, rng)
    records = []
    rho_floor = 0.5
    for t in range(steps_cap):
        if x.diameter() < diameter_cutoff:
            break
        g = sample_graph(n, "gnp", rng, edge_probability)
        step = random_type_symmetric_step(g, rng)
        rho_floor = min(rho_floor, step.rho_floor)
        y = asym_step(x, step)
        records.append(
            MatrixRecord(
                matrix=tuple(step.matrix.flatten()),
                before=x,
                after=y,
                cut_balanced=True,
            )
        )
        x = y
    params = AveragingParams(rho=min(rho_floor, 0.5), tolerance=tolerance)
    trace = Trace(params=params, n=n, kind="asymmetric", records=records)
    if len(records) == steps_cap:
        trace.truncated_at = steps_cap
    return trace
