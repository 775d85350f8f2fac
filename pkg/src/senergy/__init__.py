"""Simulation and mechanical verification of averaging dynamics on [0, 1].

The package simulates multi-agent averaging under time-varying interaction
graphs, measures the accumulated per-step energy and communication counts,
certifies the closed-form energy bound with a per-step credit ledger, and
builds the adversarial trajectories that show the bounds are near-tight.
"""

from .core import (
    POLICIES,
    AveragingParams,
    Configuration,
    StepGraph,
    StepReport,
    Violation,
    apply_policy,
    interval_union,
    neighbor_extremes,
    step_energy,
    validate_averaging_step,
)
from .twist import (
    TwistInterval,
    TwistStep,
    leftmost_targets,
    twist_interval,
    twist_step_energy,
    validate_twist_step,
)
from .trace import (
    AveragingRecord,
    MatrixRecord,
    Trace,
    TraceReport,
    TwistRecord,
    validate_trace,
)
from .reduction import TauReport, TauSlack, reduce_step, verify_taucond
from .ledger import (
    BcReport,
    CertificateReport,
    ClearingRecord,
    InjectionBound,
    Ledger,
    bound_injection,
    certify_trace,
    check_bc_lowerbound,
    ineq_sx,
    ledger_clear,
    ledger_init,
)
from .measure import (
    CommBound,
    EnergyReport,
    accumulate,
    bound_comm,
    bound_theorem1,
    comm_count,
)
from .adversary import (
    ClosedFormB,
    lb_closedform_b,
    lb_recurrence_a,
    lb_recurrence_b,
    lb_trajectory,
)
from .digraph import (
    DiGraph,
    StochasticStep,
    asym_step,
    hovering_check,
    is_cut_balanced,
    is_type_symmetric,
    random_type_symmetric_step,
    strongly_connected_components,
    validate_matrix_record,
    weakly_connected_components,
)
from .opinion import (
    OpinionRecord,
    OpinionState,
    OpinionTrace,
    VolumeReport,
    opinion_step,
    opinion_volume_report,
    run_squeeze,
    shrunken_box,
    squeeze_targets,
)
from .kuramoto import (
    KuramotoRecord,
    KuramotoState,
    KuramotoTrace,
    SyncReport,
    kuramoto_step,
    kuramoto_sync_report,
    run_kuramoto,
)
from .simulate import (
    GRAPH_MODELS,
    SimulationConfig,
    initial_configuration,
    run_asymmetric,
    run_simulation,
    sample_graph,
)
from .traceio import read_trace, write_trace
from .errors import (
    CertificateViolation,
    DepthCapExceeded,
    InvalidStepError,
    OutOfRegimeError,
    ParameterError,
    PaymentFailure,
    PolicyError,
)

__version__ = "0.1.0"
