"""Credit-ledger certificate for the energy bound, checked numerically.

Every ordered pair of ranks (i, j), i < j, owns an account worth
(x_j - x_i)**s * A**(j-i) with A = 2/(rho*s).  A twist step triggers a
clearing pass in descending order of j - i: each pair receives half of the
leftovers of its two enclosing pairs, is topped up to its new balance, and
donates its own leftover downward.  The step's energy is paid out of the
leftover of the adjacent pair (u, u+1).  If every donation stays
nonnegative and every payment suffices, the initial injection bounds the
total energy; this module raises the moment either check fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .core import Configuration
from .errors import CertificateViolation, ParameterError, PaymentFailure
from .trace import Trace, TwistRecord
from .twist import TwistStep

# Donation nonnegativity is checked relative to the account scale A**(j-i);
# account magnitudes span many orders, so an absolute cutoff would misfire.
REL_TOL = 1e-9


def _account_matrix(x: Sequence[float], s: float, A: float) -> np.ndarray:
    n = len(x)
    B = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            gap = x[j] - x[i]
            B[i, j] = (gap ** s if gap > 0.0 else 0.0) * A ** (j - i)
    return B


@dataclass
class Ledger:
    """Triangular pair accounts plus the running money audit."""

    n: int
    s: float
    rho: float
    A: float
    accounts: np.ndarray  # upper triangle holds B_{i,j}
    injected: float
    spent: float = 0.0
    slack_discarded: float = 0.0
    steps_cleared: int = 0

    def conservation_residual(self) -> float:
        """injected - spent - sum(accounts) - discarded; ~0 when sound."""
        return self.injected - self.spent - float(self.accounts.sum()) - self.slack_discarded


@dataclass(frozen=True)
class ClearingRecord:
    """One clearing pass: transfers, leftovers, and the payment check."""

    u: int
    v: int
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    payment_available: float
    energy_due: float
    s: float
    rho: float
    A: float


def ledger_init(x, s: float, rho: float) -> Ledger:
    """Open the accounts for an initial configuration and record the injection."""
    if not 0.0 < s <= 1.0:
        raise ParameterError(f"s must lie in (0, 1], got {s}")
    if not 0.0 < rho <= 0.5:
        raise ParameterError(f"rho must lie in (0, 1/2], got {rho}")
    pos = x.positions if isinstance(x, Configuration) else tuple(x)
    A = 2.0 / (rho * s)
    B = _account_matrix(pos, s, A)
    return Ledger(
        n=len(pos), s=s, rho=rho, A=A, accounts=B, injected=float(B.sum())
    )


def ledger_clear(ledger: Ledger, x, y, step: TwistStep) -> ClearingRecord:
    """Run one clearing pass for the twist step taking x to y.

    Raises CertificateViolation if any donation D_{i,j} goes negative
    (beyond the scaled tolerance) and PaymentFailure if the adjacent-pair
    leftover cannot cover the window energy (x_v - x_u)**s.
    """
    xs = x.positions if isinstance(x, Configuration) else tuple(x)
    ys = y.positions if isinstance(y, Configuration) else tuple(y)
    n, s, A = ledger.n, ledger.s, ledger.A
    if len(xs) != n or len(ys) != n:
        raise ParameterError("configuration size does not match the ledger")
    # Accounts are recomputed from positions at every boundary (no drift);
    # cross-check against the incrementally carried values.
    B = _account_matrix(xs, s, A)
    carried = ledger.accounts
    if not np.allclose(B, carried, rtol=REL_TOL, atol=0.0):
        raise CertificateViolation("carried accounts disagree with positions")
    Bp = _account_matrix(ys, s, A)

    C = np.zeros((n, n))
    D = np.zeros((n, n))
    for gap in range(n - 1, 0, -1):
        scale = A ** gap
        for i in range(0, n - gap):
            j = i + gap
            dl = D[i - 1, j] if i - 1 >= 0 else 0.0
            dr = D[i, j + 1] if j + 1 <= n - 1 else 0.0
            C[i, j] = 0.5 * (dl + dr)
            D[i, j] = B[i, j] + C[i, j] - Bp[i, j]
            if D[i, j] < -REL_TOL * scale:
                raise CertificateViolation(
                    f"negative donation D[{i},{j}] = {D[i, j]} at step "
                    f"({step.u},{step.v})"
                )

    span = xs[step.v] - xs[step.u]
    energy_due = span ** s if span > 0.0 else 0.0
    payment = D[step.u, step.u + 1]
    if payment < energy_due - REL_TOL * A:
        raise PaymentFailure(
            f"payment {payment} from D[{step.u},{step.u + 1}] cannot cover "
            f"energy {energy_due}"
        )

    ledger.accounts = Bp
    ledger.spent += energy_due
    leftover = float(sum(D[i, i + 1] for i in range(n - 1))) - energy_due
    ledger.slack_discarded += leftover
    ledger.steps_cleared += 1
    return ClearingRecord(
        u=step.u, v=step.v, B=B, C=C, D=D,
        payment_available=payment, energy_due=energy_due,
        s=s, rho=ledger.rho, A=A,
    )


@dataclass(frozen=True)
class BcReport:
    ok: bool
    min_slack: float
    worst_pair: Tuple[int, int]


def check_bc_lowerbound(record: ClearingRecord, x, tol: float = REL_TOL) -> BcReport:
    """Check the account floor B + C >= (x_{v(j)} - x_{u(i)})**s * A**(j-i).

    Here u(i) = u and v(i) = v when the rank lies in the window [u, v],
    and u(i) = v(i) = i otherwise.
    """
    xs = x.positions if isinstance(x, Configuration) else tuple(x)
    n = len(xs)
    s, A = record.s, record.A

    def u_of(i):
        return record.u if record.u <= i <= record.v else i

    def v_of(i):
        return record.v if record.u <= i <= record.v else i

    min_slack = math.inf
    worst = (0, 1)
    for i in range(n):
        for j in range(i + 1, n):
            gap = xs[v_of(j)] - xs[u_of(i)]
            floor = (gap ** s if gap > 0.0 else 0.0) * A ** (j - i)
            slack = (record.B[i, j] + record.C[i, j] - floor) / A ** (j - i)
            if slack < min_slack:
                min_slack = slack
                worst = (i, j)
    return BcReport(ok=min_slack >= -tol, min_slack=min_slack, worst_pair=worst)


def ineq_sx(s: float, x: float) -> bool:
    """Scalar check of 1 - (1-x)**s >= s*x on the unit square."""
    if not (0.0 <= s <= 1.0 and 0.0 <= x <= 1.0):
        raise ParameterError("s and x must lie in [0, 1]")
    return 1.0 - (1.0 - x) ** s >= s * x - 1e-15


@dataclass(frozen=True)
class InjectionBound:
    total: float  # exact sum over all pairs of A**(j-i) (unit-gap worst case)
    majorant_geometric: float  # (A/(A-1))**2 * A**(n-1)
    majorant_closed: float  # 2 * (2/(rho*s))**(n-1)


def bound_injection(n: int, s: float, rho: float) -> InjectionBound:
    """Worst-case initial injection and its two closed-form majorants."""
    if n < 2:
        raise ParameterError("need at least two agents")
    A = 2.0 / (rho * s)
    if A <= 1.0:
        raise ParameterError("rho*s must be below 2 for the accounts to scale")
    total = sum((n - k) * A ** k for k in range(1, n))
    return InjectionBound(
        total=total,
        majorant_geometric=(A / (A - 1.0)) ** 2 * A ** (n - 1),
        majorant_closed=2.0 * A ** (n - 1),
    )


@dataclass
class CertificateReport:
    s: float
    rho: float
    injected: float
    spent: float
    residual: float
    steps_cleared: int
    min_bc_slack: float
    records: Optional[list] = None


def certify_trace(
    trace: Trace, s: float, keep_records: bool = False, check_bc: bool = True
) -> CertificateReport:
    """Run the ledger along a whole twist trace; raise on the first failure.

    Records where nothing moves (the window span is zero and y == x) skip
    clearing entirely.
    """
    if trace.kind != "twist":
        raise ParameterError("certify_trace consumes twist traces; reduce first")
    if not trace.records:
        raise ParameterError("empty trace")
    led = ledger_init(trace.records[0].before, s=s, rho=trace.params.rho)
    kept = [] if keep_records else None
    min_bc = math.inf
    for rec in trace.records:
        if not isinstance(rec, TwistRecord):
            raise ParameterError("twist trace contains a non-twist record")
        if rec.before.positions == rec.after.positions and (
            rec.before.positions[rec.step.v] == rec.before.positions[rec.step.u]
        ):
            continue  # degenerate window, nothing to clear
        crec = ledger_clear(led, rec.before, rec.after, rec.step)
        if check_bc:
            bc = check_bc_lowerbound(crec, rec.before)
            if not bc.ok:
                raise CertificateViolation(
                    f"account floor violated at pair {bc.worst_pair}, "
                    f"slack {bc.min_slack}"
                )
            min_bc = min(min_bc, bc.min_slack)
        if keep_records:
            kept.append(crec)
    residual = led.conservation_residual()
    return CertificateReport(
        s=s, rho=trace.params.rho, injected=led.injected, spent=led.spent,
        residual=residual, steps_cleared=led.steps_cleared,
        min_bc_slack=min_bc, records=kept,
    )
