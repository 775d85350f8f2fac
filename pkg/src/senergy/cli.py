"""Command-line front door: simulate, verify, reduce, certify, bounds,
lowerbound, opinion, kuramoto.

Exit codes: 0 success, 1 usage/configuration error, 2 constraint or
certificate violation (the message names the offending step).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import adversary, measure, opinion, kuramoto
from .errors import CertificateViolation, InvalidStepError, ParameterError, PolicyError
from .ledger import certify_trace
from .reduction import reduce_step
from .simulate import SimulationConfig, run_simulation
from .trace import AveragingRecord, Trace, TwistRecord, validate_trace
from .traceio import read_trace, write_trace

USAGE_ERROR = 1
VIOLATION = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _load_config(path, overrides):
    try:
        with open(path) as fp:
            raw = json.load(fp)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config {path}: {exc}")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    allowed = set(SimulationConfig.__dataclass_fields__)
    unknown = set(raw) - allowed
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    return SimulationConfig(**raw)


def _out_path(out_dir, name):
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def _energy_rows(trace, s_values, eps_values):
    report = measure.accumulate(trace, s_values, eps_values)
    rows = [("metric", "key", "value")]
    for s in s_values:
        rows.append(("energy", s, report.totals[s]))
        rows.append(("energy_bound", s, measure.bound_theorem1(trace.n, trace.params.rho, s)))
    for eps in eps_values:
        rows.append(("comm_count", eps, report.comm_counts[eps]))
        rows.append(("comm_bound", eps, measure.bound_comm(trace.n, trace.params.rho, eps).value))
    rows.append(("truncated_at", "", report.truncated_at))
    rows.append(("diameter_final", "", report.diameter_final))
    return rows


def _write_csv(path, rows):
    with open(path, "w", newline="") as fp:
        csv.writer(fp).writerows(rows)


def cmd_simulate(args):
    overrides = {
        "seed": args.seed,
        "steps_cap": args.steps_cap,
        "diameter_cutoff": args.diameter_cutoff,
    }
    if args.config:
        config = _load_config(args.config, overrides)
    else:
        if args.n is None or args.rho is None:
            raise ParameterError("simulate needs --config or both --n and --rho")
        config = SimulationConfig(
            n=args.n,
            rho=args.rho,
            policy=args.policy,
            seed=args.seed or 0,
            steps_cap=args.steps_cap or 1000,
            diameter_cutoff=args.diameter_cutoff or 1e-12,
        )
    trace = run_simulation(config)
    write_trace(trace, _out_path(args.out, "trace.jsonl"))
    _write_csv(
        _out_path(args.out, "report.csv"),
        _energy_rows(trace, args.s or [1.0], args.eps or []),
    )
    print(f"simulated {len(trace)} steps; trace and report written to {args.out}")
    return 0


def cmd_verify(args):
    trace = read_trace(args.trace)
    report = validate_trace(trace)
    if report.ok:
        print(f"trace valid: {len(trace)} records")
        return 0
    t, kind, step_report = report.first_failure()
    detail = ""
    if step_report is not None and step_report.violations:
        v = step_report.violations[0]
        detail = f" (agent {v.agent}, {v.side} side, slack {v.slack:.3e})"
    print(f"violation at step {t}: {kind}{detail}", file=sys.stderr)
    return VIOLATION


def cmd_reduce(args):
    trace = read_trace(args.trace)
    if trace.kind != "averaging":
        raise ParameterError("reduce consumes averaging traces")
    substeps = []
    for t, rec in enumerate(trace.records):
        try:
            substeps.extend(reduce_step(rec.before, rec.graph, rec.after, trace.params))
        except InvalidStepError as exc:
            print(f"invalid step {t}: {exc}", file=sys.stderr)
            return VIOLATION
    out = Trace(params=trace.params, n=trace.n, kind="twist", records=substeps)
    write_trace(out, _out_path(args.out, "twist.jsonl"))
    print(f"reduced {len(trace)} steps into {len(out)} twist substeps")
    return 0


def _as_twist(trace):
    if trace.kind == "twist":
        return trace
    if trace.kind != "averaging":
        raise ParameterError("certify consumes averaging or twist traces")
    substeps = []
    for rec in trace.records:
        substeps.extend(reduce_step(rec.before, rec.graph, rec.after, trace.params))
    return Trace(params=trace.params, n=trace.n, kind="twist", records=substeps)


def cmd_certify(args):
    trace = _as_twist(read_trace(args.trace))
    s_values = args.s or [1.0]
    rows = [("s", "injected", "spent", "residual", "steps_cleared", "min_bc_slack")]
    clearing_rows = [("t", "i", "j", "B", "C", "D", "payment", "energy_due")]
    for s in s_values:
        try:
            rep = certify_trace(trace, s, keep_records=args.format == "csv")
        except CertificateViolation as exc:
            print(f"certificate violation at s={s}: {exc}", file=sys.stderr)
            return VIOLATION
        rows.append((s, rep.injected, rep.spent, rep.residual,
                     rep.steps_cleared, rep.min_bc_slack))
        print(f"s={s}: spent={rep.spent:.6g} <= injected={rep.injected:.6g}")
        if rep.records is not None:
            for t, crec in enumerate(rep.records):
                n = crec.B.shape[0]
                for i in range(n):
                    for j in range(i + 1, n):
                        clearing_rows.append(
                            (t, i, j, crec.B[i, j], crec.C[i, j], crec.D[i, j],
                             crec.payment_available, crec.energy_due)
                        )
    if args.out:
        _write_csv(_out_path(args.out, "certificate.csv"), rows)
        if args.format == "csv":
            _write_csv(_out_path(args.out, "clearing.csv"), clearing_rows)
    return 0


def cmd_bounds(args):
    rows = [("metric", "key", "value")]
    for s in args.s or [0.25, 0.5, 1.0]:
        rows.append(("energy_bound", s, measure.bound_theorem1(args.n, args.rho, s)))
    for eps in args.eps or []:
        rows.append(("comm_bound", eps, measure.bound_comm(args.n, args.rho, eps).value))
    writer = csv.writer(sys.stdout)
    writer.writerows(rows)
    if args.out:
        _write_csv(_out_path(args.out, "bounds.csv"), rows)
    return 0


def cmd_lowerbound(args):
    eps = args.eps_value if args.eps_value is not None else args.rho ** (2 * args.n)
    trace = adversary.lb_trajectory(args.n, args.rho, eps)
    measured = measure.comm_count(trace, eps)
    lower = adversary.lb_recurrence_b(args.n, eps, args.rho)
    upper = measure.bound_comm(args.n, args.rho, eps).value
    rows = [
        ("n", "rho", "eps", "lower_recurrence", "measured", "upper_bound"),
        (args.n, args.rho, eps, lower, measured, upper),
    ]
    csv.writer(sys.stdout).writerows(rows)
    if args.out:
        _write_csv(_out_path(args.out, "lowerbound.csv"), rows)
        write_trace(trace, _out_path(args.out, "trace.jsonl"))
    if not lower <= measured <= upper:
        print("sandwich violated", file=sys.stderr)
        return VIOLATION
    return 0


def cmd_opinion(args):
    rng = np.random.default_rng(args.seed or 0)
    trace = opinion.run_squeeze(
        args.n, args.d, args.alpha, steps=args.steps_cap or 200,
        policy=args.policy, rng=rng,
    )
    rows = [("s", "total", "bound", "holder_rhs", "eps_count", "eps_count_bound")]
    for s in args.s or [1.0 / (2 * args.d), 1.0 / args.d]:
        rep = opinion.opinion_volume_report(trace, s, args.eps_value or 2.0 ** (-args.d * args.n))
        rows.append((rep.s, rep.total, rep.bound, rep.holder_rhs,
                     rep.eps_count, rep.eps_count_bound))
        if rep.total > rep.bound:
            print(f"volume bound violated at s={s}", file=sys.stderr)
            return VIOLATION
    csv.writer(sys.stdout).writerows(rows)
    if args.out:
        _write_csv(_out_path(args.out, "opinion.csv"), rows)
    return 0


def cmd_kuramoto(args):
    rng = np.random.default_rng(args.seed or 0)
    margin = args.alpha
    thetas = margin - math.pi / 2 + rng.random(args.n) * (math.pi - margin)
    trace = kuramoto.run_kuramoto(
        thetas, coupling=args.coupling, steps=args.steps_cap or 200,
        rng=rng, alpha_margin=margin,
    )
    eps = args.eps_value or 2.0 ** (-args.n)
    rep = kuramoto.kuramoto_sync_report(trace, eps)
    rows = [
        ("eps", "count", "rho_eff_min", "reference_bound", "flagged", "in_regime"),
        (rep.eps, rep.count, rep.rho_eff_min, rep.reference_bound,
         len(rep.flagged_steps), rep.in_regime),
    ]
    csv.writer(sys.stdout).writerows(rows)
    if args.out:
        _write_csv(_out_path(args.out, "kuramoto.csv"), rows)
    return 0


def build_parser():
    parser = _Parser(prog="senergy", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=False):
        p.add_argument("--out", required=out_required, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--steps-cap", type=int, default=None, dest="steps_cap")
        p.add_argument("--diameter-cutoff", type=float, default=None,
                       dest="diameter_cutoff")
        p.add_argument("--format", choices=("csv", "jsonl"), default="jsonl")
        p.add_argument("--s", type=float, nargs="*", default=None)
        p.add_argument("--eps", type=float, nargs="*", default=None)

    p = sub.add_parser("simulate", help="generate an averaging trace")
    common(p, out_required=True)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--n", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--policy", default="uniform")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="replay-validate a trace file")
    common(p)
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="factor an averaging trace into twist substeps")
    common(p, out_required=True)
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("certify", help="run the credit ledger along a trace")
    common(p)
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("bounds", help="print the closed-form upper bounds")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("lowerbound", help="adversarial trajectory sandwich")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--eps-value", type=float, default=None, dest="eps_value")
    p.set_defaults(func=cmd_lowerbound)

    p = sub.add_parser("opinion", help="box-squeeze opinion trials")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--policy", default="uniform")
    p.add_argument("--eps-value", type=float, default=None, dest="eps_value")
    p.set_defaults(func=cmd_opinion)

    p = sub.add_parser("kuramoto", help="discrete oscillator synchronization run")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--coupling", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--eps-value", type=float, default=None, dest="eps_value")
    p.set_defaults(func=cmd_kuramoto)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, PolicyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except InvalidStepError as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return VIOLATION


if __name__ == "__main__":
    sys.exit(main())
