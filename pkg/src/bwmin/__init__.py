"""Minimum link bandwidth and optimal ingress reshaping for
deadline-constrained token-bucket flows sharing a single link.

Given n flows, each a token bucket (rate, burst) with a hard deadline, the
solvers compute the smallest link bandwidth that meets every deadline under
five regimes: EDF dynamic priorities (the scheduler-independent optimum),
static priorities ordered by deadline (with and without optimal ingress
reshaping), and FIFO (with and without optimal reshaping).  A discretized
fluid simulator provides an independent check of every analytic bound.
"""

from .bounds import (
    ServiceCurveSpec,
    edf_service_curves,
    fifo_delay_shaped,
    sp_delay_shaped,
    sp_delay_unshaped,
)
from .errors import (
    BwminError,
    EqualDeadlines,
    GridTooCoarse,
    InfeasibleReshaping,
    InsufficientBandwidth,
    InvalidProfile,
    TooManyFlows,
)
from .flows import (
    FlowProfile,
    FlowSet,
    ReshapingPlan,
    Scheduler,
    SolveResult,
    flow_set_from_json,
    flow_set_to_json,
    load_flow_set,
    new_flow_set,
)
from .kernels import BACKEND
from .oracle import ArrivalPattern, SimConfig, adversarial_search, simulate
from .packet import (
    PacketShaper,
    packet_high_priority_delay,
    packet_low_priority_delay,
    packet_sp_min_bw_shaped,
    packet_sp_min_bw_unshaped,
)
from .solvers import (
    TwoFlowBandwidths,
    fifo_beats_sp_two_flow,
    min_bw_edf,
    min_bw_edf_reshaped,
    min_bw_fifo,
    min_bw_fifo_shaped,
    min_bw_sp,
    min_bw_sp_shaped,
    two_flow_closed_forms,
)

__version__ = "0.1.0"

__all__ = [
    "ArrivalPattern",
    "BACKEND",
    "BwminError",
    "EqualDeadlines",
    "FlowProfile",
    "FlowSet",
    "GridTooCoarse",
    "InfeasibleReshaping",
    "InsufficientBandwidth",
    "InvalidProfile",
    "PacketShaper",
    "ReshapingPlan",
    "Scheduler",
    "ServiceCurveSpec",
    "SimConfig",
    "SolveResult",
    "TooManyFlows",
    "TwoFlowBandwidths",
    "adversarial_search",
    "edf_service_curves",
    "fifo_beats_sp_two_flow",
    "fifo_delay_shaped",
    "flow_set_from_json",
    "flow_set_to_json",
    "load_flow_set",
    "min_bw_edf",
    "min_bw_edf_reshaped",
    "min_bw_fifo",
    "min_bw_fifo_shaped",
    "min_bw_sp",
    "min_bw_sp_shaped",
    "new_flow_set",
    "packet_high_priority_delay",
    "packet_low_priority_delay",
    "packet_sp_min_bw_shaped",
    "packet_sp_min_bw_unshaped",
    "simulate",
    "sp_delay_shaped",
    "sp_delay_unshaped",
    "two_flow_closed_forms",
]
