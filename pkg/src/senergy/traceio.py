"""JSON Lines trace files.

Layout (one JSON object per line):
  header: {"n", "rho", "tolerance", "kind", "asymmetric"}
  averaging record: {"t", "edges": [[id, id], ...], "before": [...], "after": [...]}
  twist record:     {"t", "u", "v", "before": [...], "after": [...]}
  matrix record:    {"t", "matrix": [row-major floats], "before": [...], "after": [...]}

"before"/"after" list positions indexed by original agent id; edge
endpoints are agent ids.  Twist windows (u, v) are ranks in the sorted
order of "before", which is how twist steps are defined.  See
docs/trace_schema.md for the full field reference.
"""

from __future__ import annotations

import json
from typing import IO, Union

from .core import AveragingParams, Configuration, StepGraph
from .errors import ParameterError
from .trace import AveragingRecord, MatrixRecord, Trace, TwistRecord
from .twist import TwistStep


def _record_to_obj(rec, t: int):
    obj = {
        "t": t,
        "before": rec.before.by_id(),
        "after": rec.after.by_id(),
    }
    if isinstance(rec, AveragingRecord):
        labels = rec.before.labels
        obj["edges"] = sorted(
            sorted((labels[i], labels[j])) for i, j in rec.graph.edges
        )
    elif isinstance(rec, TwistRecord):
        obj["u"] = rec.step.u
        obj["v"] = rec.step.v
    elif isinstance(rec, MatrixRecord):
        obj["matrix"] = list(rec.matrix)
    else:
        raise ParameterError(f"unknown record type {type(rec)!r}")
    return obj


def write_trace(trace: Trace, fp: Union[str, IO]) -> None:
    """Serialize a trace as JSON Lines; floats round-trip exactly."""
    if isinstance(fp, str):
        with open(fp, "w") as handle:
            write_trace(trace, handle)
        return
    header = {
        "n": trace.n,
        "rho": trace.params.rho,
        "tolerance": trace.params.tolerance,
        "kind": trace.kind,
        "asymmetric": trace.kind == "asymmetric",
    }
    fp.write(json.dumps(header, sort_keys=True) + "\n")
    for t, rec in enumerate(trace.records):
        fp.write(json.dumps(_record_to_obj(rec, t), sort_keys=True) + "\n")


def read_trace(fp: Union[str, IO]) -> Trace:
    """Parse a JSON Lines trace file written by write_trace."""
    if isinstance(fp, str):
        with open(fp) as handle:
            return read_trace(handle)
    lines = [line for line in fp if line.strip()]
    if not lines:
        raise ParameterError("empty trace file")
    header = json.loads(lines[0])
    params = AveragingParams(rho=header["rho"], tolerance=header["tolerance"])
    kind = header["kind"]
    n = header["n"]
    records = []
    for line in lines[1:]:
        obj = json.loads(line)
        before = Configuration.from_positions(obj["before"], time=obj["t"])
        after = Configuration.from_positions(obj["after"], time=obj["t"] + 1)
        if kind == "averaging":
            rank_pairs = [
                (before.rank_of(i), before.rank_of(j)) for i, j in obj["edges"]
            ]
            records.append(
                AveragingRecord(
                    graph=StepGraph.from_pairs(n, rank_pairs),
                    before=before,
                    after=after,
                )
            )
        elif kind == "twist":
            step = TwistStep(u=obj["u"], v=obj["v"], rho=params.rho)
            after = Configuration(
                positions=after.positions, labels=after.labels, time=obj["t"]
            )
            before = Configuration(
                positions=before.positions, labels=before.labels, time=obj["t"]
            )
            records.append(TwistRecord(step=step, before=before, after=after))
        elif kind == "asymmetric":
            records.append(
                MatrixRecord(
                    matrix=tuple(obj["matrix"]), before=before, after=after
                )
            )
        else:
            raise ParameterError(f"unknown trace kind {kind!r}")
    return Trace(params=params, n=n, kind=kind, records=records)
