"""Analytic worst-case delay formulas for each scheduler/shaping combination.

All functions use the fluid model (max packet sizes are ignored here; the
packet-level corrections for the two-flow static-priority case live in
``bwmin.packet``).  Every formula is nonincreasing in the link bandwidth R on
[total_rate, inf), which is what makes binary-search sizing sound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import InsufficientBandwidth
from .flows import FlowSet, ReshapingPlan

__all__ = [
    "ServiceCurveSpec",
    "edf_service_curves",
    "sp_delay_unshaped",
    "sp_delay_shaped",
    "fifo_delay_shaped",
]


@dataclass(frozen=True)
class ServiceCurveSpec:
    """Shifted token-bucket service curve: 0 before ``offset``, then a jump
    to ``jump`` growing at ``slope``.

    This is the latest-possible service that still clears a (slope, jump)
    token-bucket flow within ``offset`` time units.
    """

    offset: float
    jump: float
    slope: float

    def __call__(self, t: float) -> float:
        if t < self.offset:
            return 0.0
        return self.jump + self.slope * (t - self.offset)


def edf_service_curves(fs: FlowSet) -> List[ServiceCurveSpec]:
    """Per-flow service curves whose sum sets the scheduler-independent
    bandwidth floor; an EDF scheduler realizes them."""
    return [ServiceCurveSpec(offset=f.d, jump=f.b, slope=f.r) for f in fs.flows]


def _require_stability(fs: FlowSet, R: float) -> None:
    if R < fs.total_rate:
        raise InsufficientBandwidth(
            f"bandwidth {R} is below the aggregate rate {fs.total_rate}"
        )


def sp_delay_unshaped(fs: FlowSet, R: float) -> np.ndarray:
    """Worst-case delays under deadline-ordered static priorities, no
    reshaping: flow i waits on the bursts of itself and every higher
    priority, served at R minus the higher-priority rates."""
    _require_stability(fs, R)
    n = len(fs)
    total_b = fs.prefix_bursts[n]
    suffix_b = total_b - fs.prefix_bursts[:n]
    return suffix_b / (R - fs.suffix_rates[1:])


def sp_delay_shaped(fs: FlowSet, plan: ReshapingPlan, R: float) -> np.ndarray:
    """Worst-case end-to-end delays (reshaper plus link) under static
    priorities with ingress reshaping to ``plan``.

    For each flow the bound is the worse of two cases, depending on whether
    the last bit of a full burst reaches the link before or after the flow's
    final busy period there.
    """
    _require_stability(fs, R)
    plan.validate_for(fs)
    bp = plan.array()
    higher = plan.suffix_bursts()[1:]  # reshaped bursts of higher priorities
    avail = R - fs.suffix_rates[1:]    # bandwidth left over for flow i
    in_link = higher / avail
    return np.maximum((fs.b + higher) / avail, (fs.b - bp) / fs.r + in_link)


def fifo_delay_shaped(fs: FlowSet, plan: ReshapingPlan, R: float) -> np.ndarray:
    """Worst-case end-to-end delays under FIFO with ingress reshaping.

    The two cases cover the last bit of a burst arriving after or during the
    flow's final busy period at the link.  With ``plan`` equal to the flows'
    own bursts both collapse to total_burst / R for every flow.
    """
    _require_stability(fs, R)
    plan.validate_for(fs)
    bp = plan.array()
    total = bp.sum()
    others = total - bp
    shaper = (fs.b - bp) / fs.r
    return np.maximum(shaper + others / R,
                      total / R + shaper * fs.total_rate / R)
