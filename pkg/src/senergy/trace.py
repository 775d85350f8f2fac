"""Replayable trajectories: record types, chaining checks, validation.

A Trace is the unit every measurement and verification operation consumes:
an ordered list of step records together with the parameters they were
generated under.  Three record flavors exist: averaging (undirected graph),
twist (a (u, v) window), and matrix (stochastic-matrix step on a digraph).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Union

from .core import AveragingParams, Configuration, StepGraph, validate_averaging_step
from .errors import ParameterError
from .twist import TwistStep, validate_twist_step


@dataclass(frozen=True)
class AveragingRecord:
    graph: StepGraph
    before: Configuration
    after: Configuration


@dataclass(frozen=True)
class TwistRecord:
    step: TwistStep
    before: Configuration
    after: Configuration


@dataclass(frozen=True)
class MatrixRecord:
    """Stochastic-matrix step; `matrix` is row-stochastic in rank space."""

    matrix: tuple  # row-major, n*n entries
    before: Configuration
    after: Configuration
    cut_balanced: bool = True


Record = Union[AveragingRecord, TwistRecord, MatrixRecord]

KINDS = ("averaging", "twist", "asymmetric")


@dataclass
class Trace:
    params: AveragingParams
    n: int
    kind: str = "averaging"
    records: List[Record] = field(default_factory=list)
    truncated_at: Optional[int] = None  # step index where a cap cut the run

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown trace kind {self.kind!r}")

    def __len__(self):
        return len(self.records)

    def final_diameter(self) -> float:
        if not self.records:
            return 0.0
        return self.records[-1].after.diameter()


def _same_multiset(a: Configuration, b: Configuration, tol: float) -> bool:
    return all(abs(p - q) <= tol for p, q in zip(a.positions, b.positions))


def validate_trace(trace: Trace, tol: Optional[float] = None) -> "TraceReport":
    """Check chaining and per-record validity for a whole trace.

    Averaging records go through the per-agent movement constraint, twist
    records through the window validator; matrix records are validated by
    the digraph module's stochastic-step checker.
    """
    from .digraph import validate_matrix_record  # local: avoids module cycle

    tol = trace.params.tolerance if tol is None else tol
    failures = []
    prev = None
    for t, rec in enumerate(trace.records):
        if prev is not None and not _same_multiset(prev, rec.before, tol):
            failures.append((t, "chain", None))
        if isinstance(rec, AveragingRecord):
            rep = validate_averaging_step(
                rec.before, rec.graph, rec.after,
                AveragingParams(trace.params.rho, tol),
            )
        elif isinstance(rec, TwistRecord):
            rep = validate_twist_step(
                rec.before.positions, rec.step, rec.after.positions, tol
            )
        elif isinstance(rec, MatrixRecord):
            rep = validate_matrix_record(rec, tol)
        else:
            raise ParameterError(f"unknown record type {type(rec)!r}")
        if not rep.ok:
            failures.append((t, "step", rep))
        prev = rec.after
    return TraceReport(ok=not failures, failures=tuple(failures))


@dataclass(frozen=True)
class TraceReport:
    ok: bool
    failures: tuple = ()  # (step index, "chain" | "step", StepReport | None)

    def __bool__(self):
        return self.ok

    def first_failure(self):
        return self.failures[0] if self.failures else None
