"""Shared fixtures: the randomized trial bank used by several suites.

Each trial simulates one trajectory, validates every step, accumulates the
energy totals, factors every step into twist substeps, and runs the credit
ledger at each exponent.  The bank is session-scoped because building it is
by far the most expensive part of the test run.
"""

import pytest

from senergy import (
    POLICIES,
    CertificateViolation,
    SimulationConfig,
    Trace,
    accumulate,
    certify_trace,
    interval_union,
    reduce_step,
    run_simulation,
    step_energy,
    twist_step_energy,
    validate_trace,
    validate_twist_step,
)

TRIAL_NS = tuple(range(2, 9))
TRIAL_RHOS = (0.1, 0.25, 0.5)
TRIAL_SEEDS = tuple(range(5))
TRIAL_S = (0.25, 0.5, 1.0)


def run_trial(n, rho, policy, seed):
    config = SimulationConfig(n=n, rho=rho, policy=policy, seed=seed, steps_cap=150)
    trace = run_simulation(config)
    valid = validate_trace(trace).ok
    report = accumulate(trace, TRIAL_S)

    substeps = []
    max_energy_relerr = 0.0
    twists_valid = True
    for rec in trace.records:
        subs = reduce_step(rec.before, rec.graph, rec.after, trace.params)
        for sub in subs:
            rep = validate_twist_step(
                sub.before.positions, sub.step, sub.after.positions, tol=1e-12
            )
            twists_valid = twists_valid and rep.ok
        intervals = interval_union(rec.graph, rec.before)
        for s in TRIAL_S:
            step_e = step_energy(intervals, s)
            sub_e = sum(
                twist_step_energy(sub.before.positions, sub.step, s) for sub in subs
            )
            if step_e > 0.0 or sub_e > 0.0:
                rel = abs(sub_e - step_e) / max(step_e, sub_e)
                max_energy_relerr = max(max_energy_relerr, rel)
        substeps.extend(subs)

    certs = {}
    twist = Trace(params=trace.params, n=n, kind="twist", records=substeps)
    for s in TRIAL_S:
        if not substeps:
            certs[s] = {"ok": True, "residual_rel": 0.0, "error": None}
            continue
        try:
            crep = certify_trace(twist, s)
        except CertificateViolation as exc:
            certs[s] = {"ok": False, "residual_rel": float("nan"), "error": str(exc)}
            continue
        rel = abs(crep.residual) / max(1.0, crep.injected)
        certs[s] = {"ok": rel <= 1e-9, "residual_rel": rel, "error": None}

    return {
        "n": n,
        "rho": rho,
        "policy": policy,
        "seed": seed,
        "valid": valid,
        "totals": report.totals,
        "max_energy_relerr": max_energy_relerr,
        "twists_valid": twists_valid,
        "substep_count": len(substeps),
        "certs": certs,
    }


@pytest.fixture(scope="session")
def trial_bank():
    bank = []
    for n in TRIAL_NS:
        for rho in TRIAL_RHOS:
            for policy in POLICIES:
                for seed in TRIAL_SEEDS:
                    bank.append(run_trial(n, rho, policy, seed))
    return bank
