"""Directed generalization: cut-balanced digraphs and stochastic-matrix steps.

A step may be given by a row-stochastic matrix with positive diagonal whose
support digraph is cut-balanced (every weakly connected component is also
strongly connected).  Such steps fall back under the symmetric theory with
rho equal to the smallest positive entry; this module provides the checks
that make that claim testable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Set, Tuple

import numpy as np

from .core import AveragingParams, Configuration, StepGraph, StepReport, Violation
from .errors import ParameterError
from .trace import MatrixRecord


@dataclass(frozen=True)
class DiGraph:
    """Directed step graph; self-loops (i, i) are implicit, arcs are ordered."""

    n: int
    arcs: frozenset

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable) -> "DiGraph":
        norm = set()
        for i, j in arcs:
            if not (0 <= i < n and 0 <= j < n):
                raise ParameterError(f"arc ({i},{j}) out of range for n={n}")
            if i != j:
                norm.add((i, j))
        return cls(n=n, arcs=frozenset(norm))

    def out_neighbors(self, i: int) -> Set[int]:
        return {i} | {b for a, b in self.arcs if a == i}

    def in_neighbors(self, i: int) -> Set[int]:
        return {i} | {a for a, b in self.arcs if b == i}


def weakly_connected_components(g: DiGraph) -> List[Set[int]]:
    adj = [set() for _ in range(g.n)]
    for a, b in g.arcs:
        adj[a].add(b)
        adj[b].add(a)
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        stack, comp = [start], set()
        seen[start] = True
        while stack:
            u = stack.pop()
            comp.add(u)
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(comp)
    return comps


def strongly_connected_components(g: DiGraph) -> List[Set[int]]:
    """Iterative Tarjan decomposition."""
    adj = [[] for _ in range(g.n)]
    for a, b in g.arcs:
        adj[a].append(b)
    index = [None] * g.n
    low = [0] * g.n
    on_stack = [False] * g.n
    stack: List[int] = []
    comps: List[Set[int]] = []
    counter = 0
    for root in range(g.n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            node, ptr = work.pop()
            if ptr == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            advanced = False
            while ptr < len(adj[node]):
                child = adj[node][ptr]
                ptr += 1
                if index[child] is None:
                    work.append((node, ptr))
                    work.append((child, 0))
                    advanced = True
                    break
                if on_stack[child]:
                    low[node] = min(low[node], index[child])
            if advanced:
                continue
            if low[node] == index[node]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.add(w)
                    if w == node:
                        break
                comps.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return comps


def is_cut_balanced(g: DiGraph) -> bool:
    """True iff every weakly connected component is strongly connected."""
    scc_of = {}
    for k, comp in enumerate(strongly_connected_components(g)):
        for v in comp:
            scc_of[v] = k
    for comp in weakly_connected_components(g):
        if len({scc_of[v] for v in comp}) > 1:
            return False
    return True


def is_type_symmetric(P) -> bool:
    """True iff off-diagonal entries are positive in matched pairs."""
    P = np.asarray(P, dtype=float)
    return bool(np.array_equal(P > 0, P.T > 0))


def hovering_check(g: DiGraph, u: int, v: int) -> bool:
    """Arcs crossing every internal cut of [u, v] in both directions.

    For each i in (u, v] there must be an arc (a, b) with a < i <= b and an
    arc (b', a') with a' < i <= b'; endpoints are position-sorted ranks.
    """
    for i in range(u + 1, v + 1):
        upward = any(a < i <= b for a, b in g.arcs)
        downward = any(b2 >= i > a2 for b2, a2 in g.arcs)
        if not (upward and downward):
            return False
    return True


@dataclass(frozen=True)
class StochasticStep:
    """Row-stochastic matrix step in rank space, with its weight floor."""

    matrix: np.ndarray
    rho_floor: float

    @classmethod
    def from_matrix(cls, P, rho_floor: Optional[float] = None) -> "StochasticStep":
        P = np.asarray(P, dtype=float)
        n = P.shape[0]
        if P.shape != (n, n):
            raise ParameterError("matrix must be square")
        if np.any(P < 0):
            raise ParameterError("matrix entries must be nonnegative")
        if np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-12:
            raise ParameterError("matrix rows must sum to 1")
        if np.any(np.diag(P) <= 0):
            raise ParameterError("diagonal entries must be positive")
        positive = P[P > 0]
        floor = float(positive.min()) if rho_floor is None else float(rho_floor)
        if np.any((P > 0) & (P < floor - 1e-15)):
            raise ParameterError("a positive entry lies below the declared floor")
        return cls(matrix=P, rho_floor=floor)

    def support(self) -> DiGraph:
        n = self.matrix.shape[0]
        arcs = [
            (i, j)
            for i in range(n)
            for j in range(n)
            if i != j and self.matrix[i, j] > 0
        ]
        return DiGraph.from_arcs(n, arcs)


def asym_step(x: Configuration, step: StochasticStep) -> Configuration:
    """Apply y = P x in rank space and re-sort into a new configuration."""
    if step.matrix.shape[0] != x.n:
        raise ParameterError("matrix size does not match the configuration")
    targets = step.matrix @ np.asarray(x.positions)
    by_id = [0.0] * x.n
    for i in range(x.n):
        by_id[x.labels[i]] = float(targets[i])
    return Configuration.from_positions(by_id, time=x.time + 1)


def validate_matrix_record(rec: MatrixRecord, tol: float) -> StepReport:
    """Movement-constraint check for a matrix record, rho = the entry floor.

    Neighborhoods are the row supports (out-neighbors including self), so
    this is the directed variant of the symmetric validator.
    """
    n = rec.before.n
    P = np.asarray(rec.matrix, dtype=float).reshape(n, n)
    step = StochasticStep.from_matrix(P)
    rho = step.rho_floor
    y_by_id = rec.after.by_id()
    pos = rec.before.positions
    violations = []
    for i in range(n):
        nbrs = [j for j in range(n) if P[i, j] > 0]
        xl = pos[min(nbrs)]
        xr = pos[max(nbrs)]
        delta = rho * (xr - xl)
        yi = y_by_id[rec.before.labels[i]]
        if yi < xl + delta - tol:
            violations.append(Violation(i, rec.before.labels[i], "lower", yi - (xl + delta)))
        if yi > xr - delta + tol:
            violations.append(Violation(i, rec.before.labels[i], "upper", (xr - delta) - yi))
    return StepReport(ok=not violations, violations=tuple(violations))


def matrix_record_support_graph(rec: MatrixRecord) -> StepGraph:
    """Undirected projection of the record's support (for energy geometry)."""
    n = rec.before.n
    P = np.asarray(rec.matrix, dtype=float).reshape(n, n)
    pairs = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if P[i, j] > 0 or P[j, i] > 0
    ]
    return StepGraph.from_pairs(n, pairs)


def matrix_record_intervals(rec: MatrixRecord):
    from .core import interval_union

    return interval_union(matrix_record_support_graph(rec), rec.before)


def matrix_record_max_edge(rec: MatrixRecord) -> float:
    pos = rec.before.positions
    g = matrix_record_support_graph(rec)
    return max((pos[j] - pos[i] for i, j in g.edges), default=0.0)


def random_type_symmetric_step(
    g: StepGraph, rng: np.random.Generator, floor: Optional[float] = None
) -> StochasticStep:
    """Random row-stochastic matrix whose support matches g (plus diagonal).

    Type-symmetric by construction (symmetric support), hence cut-balanced.
    Every positive entry is at least `floor`; the default floor is half the
    uniform share of the densest row, which is always feasible.
    """
    n = g.n
    degree = [len(g.neighbors(i)) for i in range(n)]
    if floor is None:
        floor = 0.5 / max(degree)
    P = np.zeros((n, n))
    for i in range(n):
        nbrs = sorted(g.neighbors(i))
        d = len(nbrs)
        if d * floor > 1.0 + 1e-12:
            raise ParameterError("floor too large for the row support")
        weights = rng.random(d)
        weights = weights / weights.sum() * (1.0 - d * floor)
        for w, j in zip(weights, nbrs):
            P[i, j] = floor + w
        P[i, nbrs[-1]] += 1.0 - P[i, nbrs].sum()  # absorb rounding
    return StochasticStep.from_matrix(P)
