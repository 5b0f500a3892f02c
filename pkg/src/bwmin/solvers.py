"""Minimum-bandwidth solvers for the five scheduler regimes.

Closed forms exist for EDF, static priority without reshaping, and FIFO
without reshaping.  The two reshaped regimes are solved by binary search on a
monotone feasibility predicate, then the optimal burst plan is reconstructed
from the returned bandwidth:

* static priority + reshaping: feasibility at R is the nonnegativity of a
  recursively built constraint set whose minimum can be tracked in O(n);
* FIFO + reshaping: feasibility at R is ``lower(R) <= upper(R)`` where the
  two envelopes bound the total reshaped burst volume any feasible plan must
  (resp. may) keep.  Their evaluation enumerates 3**n flow splits, which is
  the package's hot kernel.

The two-flow closed forms of all five regimes are also provided; they double
as an independent check on the general solvers.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .bounds import fifo_delay_shaped, sp_delay_shaped, sp_delay_unshaped
from .errors import InfeasibleReshaping, TooManyFlows
from .flows import FlowProfile, FlowSet, ReshapingPlan, Scheduler, SolveResult

__all__ = [
    "min_bw_edf",
    "min_bw_edf_reshaped",
    "min_bw_sp",
    "min_bw_sp_shaped",
    "min_bw_fifo",
    "min_bw_fifo_shaped",
    "two_flow_closed_forms",
    "fifo_beats_sp_two_flow",
    "TwoFlowBandwidths",
    "SP_FEASIBILITY_MAX_FLOWS",
    "FIFO_ENUMERATION_MAX_FLOWS",
]

SP_FEASIBILITY_MAX_FLOWS = 30
FIFO_ENUMERATION_MAX_FLOWS = 14

_REL_TOL = 1e-12  # binary-search termination, relative to the upper endpoint


def _bisect_min_feasible(lo: float, hi: float,
                         feasible: Callable[[float], bool]) -> float:
    """Smallest feasible R in [lo, hi] for a monotone predicate.

    Assumes feasible(hi); returns the feasible endpoint of the final bracket
    so the reported bandwidth always admits a deliverable plan.
    """
    if feasible(lo):
        return lo
    while hi - lo > max(_REL_TOL, _REL_TOL * hi):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# EDF (scheduler-independent floor)
# ---------------------------------------------------------------------------

def _edf_min_bw(r, b, d) -> float:
    """Bandwidth floor from summed shifted service curves.

    The sum of the curves divided by t is piecewise monotone between curve
    offsets, so the supremum is attained at an offset or in the t -> inf
    limit (the aggregate rate).
    """
    best = float(np.sum(r))
    for dh in d:
        active = d <= dh
        val = float(np.sum(b[active] + r[active] * (dh - d[active])) / dh)
        best = max(best, val)
    return best


def min_bw_edf(fs: FlowSet) -> SolveResult:
    """Minimum bandwidth under EDF; no scheduler can do better.

    The per-flow worst-case delay at this bandwidth is exactly the deadline.
    """
    r_min = _edf_min_bw(fs.r, fs.b, fs.d)
    return SolveResult(Scheduler.EDF, r_min, plan=None, delays=tuple(fs.d))


def min_bw_edf_reshaped(fs: FlowSet, plan: ReshapingPlan) -> float:
    """EDF minimum bandwidth when flows are first reshaped to ``plan``.

    Reshaping flow i delays its burst tail by (b_i - b'_i)/r_i, which must be
    deducted from the deadline; the result is never below min_bw_edf, i.e.
    reshaping cannot help an EDF scheduler.
    """
    plan.validate_for(fs)
    bp = plan.array()
    shaper_delay = (fs.b - bp) / fs.r
    d_eff = fs.d - shaper_delay
    if np.any(d_eff <= 0):
        i = int(np.argmax(shaper_delay - fs.d))
        raise InfeasibleReshaping(
            f"flow {i}: reshaping delay {shaper_delay[i]} consumes its "
            f"deadline {fs.d[i]}"
        )
    # shifted curves still follow the original burst line b_i + r_i (t - d_i),
    # but activate earlier (at d_eff_i, with value b'_i)
    best = fs.total_rate
    for dh in d_eff:
        active = d_eff <= dh
        val = float(np.sum(fs.b[active] + fs.r[active] * (dh - fs.d[active])) / dh)
        best = max(best, val)
    return best


# ---------------------------------------------------------------------------
# Static priority
# ---------------------------------------------------------------------------

def min_bw_sp(fs: FlowSet) -> SolveResult:
    """Minimum bandwidth under deadline-ordered static priorities without
    reshaping (closed form)."""
    n = len(fs)
    suffix_b = fs.prefix_bursts[n] - fs.prefix_bursts[:n]
    r_min = max(fs.total_rate,
                float(np.max(suffix_b / fs.d + fs.suffix_rates[1:])))
    delays = sp_delay_unshaped(fs, r_min)
    return SolveResult(Scheduler.STATIC_PRIORITY, r_min, plan=None,
                       delays=tuple(map(float, delays)))


def _sp_feasibility_margin(fs: FlowSet, R: float) -> float:
    """Minimum of the reshaping feasibility constraints at bandwidth R.

    Nonnegative iff some plan meets every deadline.  The constraint set is
    built flow by flow: each step adds the flow's own slack term and maps the
    previous constraints through an increasing affine transform, so only the
    running minimum needs to be materialized.
    """
    r, b, d = fs.r, fs.b, fs.d
    sfx = fs.suffix_rates
    margin = d[0] * (R - sfx[1]) - b[0]
    for i in range(1, len(fs)):
        gap = R - sfx[i + 1]
        own = d[i] * gap - b[i]
        slack = b[i] - d[i] * r[i]
        mapped = (margin - slack) * gap / (r[i] + gap)
        margin = min(margin, own, mapped)
    return margin


def _sp_optimal_plan(fs: FlowSet, R: float) -> ReshapingPlan:
    """Optimal reshaped bursts at a feasible bandwidth R, built from the
    highest priority down; the lowest-priority flow is never reshaped."""
    n = len(fs)
    r, b, d = fs.r, fs.b, fs.d
    bp = np.empty(n)
    bp[0] = b[0]
    higher = 0.0  # sum of reshaped bursts of strictly higher priorities
    for i in range(n - 1, 0, -1):
        if i == n - 1:
            val = b[i] - r[i] * d[i]
        else:
            val = b[i] - r[i] * d[i] + r[i] * higher / (R - fs.suffix_rates[i + 1])
        if val < 1e-9:  # clamp float noise near active constraints
            val = 0.0
        bp[i] = min(val, b[i])
        higher += bp[i]
    return ReshapingPlan(bp)


def min_bw_sp_shaped(fs: FlowSet) -> SolveResult:
    """Minimum bandwidth under static priorities with optimal ingress
    reshaping, plus the plan that attains it."""
    if len(fs) > SP_FEASIBILITY_MAX_FLOWS:
        raise TooManyFlows(
            f"static-priority reshaping solver supports at most "
            f"{SP_FEASIBILITY_MAX_FLOWS} flows, got {len(fs)}"
        )
    lo = fs.total_rate
    hi = min_bw_sp(fs).r_min
    r_min = _bisect_min_feasible(lo, hi,
                                 lambda R: _sp_feasibility_margin(fs, R) >= 0)
    plan = _sp_optimal_plan(fs, r_min)
    delays = sp_delay_shaped(fs, plan, r_min)
    return SolveResult(Scheduler.STATIC_PRIORITY_SHAPED, r_min, plan,
                       delays=tuple(map(float, delays)))


# ---------------------------------------------------------------------------
# FIFO
# ---------------------------------------------------------------------------

def min_bw_fifo(fs: FlowSet) -> SolveResult:
    """Minimum bandwidth under plain FIFO (closed form): the aggregate burst
    must drain within the smallest deadline."""
    n = len(fs)
    r_min = max(fs.total_rate, fs.total_burst / float(fs.d[n - 1]))
    delays = (fs.total_burst / r_min,) * n
    return SolveResult(Scheduler.FIFO, r_min, plan=None, delays=delays)


def _fifo_plan_from_total(fs: FlowSet, R: float, total: float) -> ReshapingPlan:
    """Reconstruct per-flow reshaped bursts from the total volume ``total``
    kept at bandwidth R, working down from the largest deadline."""
    n = len(fs)
    r, b, d = fs.r, fs.b, fs.d
    R1 = fs.total_rate
    slack = b - d * r
    per_flow_floor = np.maximum(
        0.0,
        np.maximum(R / (R + r) * (slack + r * total / R),
                   b + r * (total - R * d) / R1),
    )
    floors = np.cumsum(per_flow_floor)
    prefix = np.empty(n)
    prefix[n - 1] = total
    for i in range(n - 2, -1, -1):
        prefix[i] = max(floors[i], prefix[i + 1] - b[i + 1])
    bp = np.diff(prefix, prepend=0.0)
    bp[np.abs(bp) < 1e-9] = 0.0  # clamp float noise near active constraints
    np.clip(bp, 0.0, b, out=bp)
    return ReshapingPlan(bp)


def min_bw_fifo_shaped(fs: FlowSet) -> SolveResult:
    """Minimum bandwidth under FIFO with optimal ingress reshaping, plus the
    plan that attains it.

    Feasibility at R holds iff the smallest total burst volume the deadlines
    force us to keep does not exceed the largest volume they allow; both
    envelopes are exact 3**n enumerations, hence the flow-count guard.
    """
    n = len(fs)
    if n > FIFO_ENUMERATION_MAX_FLOWS:
        raise TooManyFlows(
            f"FIFO reshaping solver enumerates 3^n splits and supports at "
            f"most {FIFO_ENUMERATION_MAX_FLOWS} flows, got {n}"
        )
    r, b, d = fs.r, fs.b, fs.d
    R1 = fs.total_rate
    lo = max(R1, fs.total_burst * R1 / float(np.dot(r, d)))
    hi = max(R1, fs.total_burst / float(d[n - 1]))

    def feasible(R: float) -> bool:
        return (kernels.fifo_total_burst_lower(r, b, d, R)
                <= kernels.fifo_total_burst_upper(r, b, d, R))

    if not feasible(hi):
        # identity reshaping is always feasible at the plain-FIFO minimum;
        # reaching here means float noise at the bracket edge
        plan = ReshapingPlan.identity(fs)
    else:
        hi = _bisect_min_feasible(lo, hi, feasible)
        plan = _fifo_plan_from_total(
            fs, hi, kernels.fifo_total_burst_lower(r, b, d, hi))
    delays = fifo_delay_shaped(fs, plan, hi)
    return SolveResult(Scheduler.FIFO_SHAPED, hi, plan,
                       delays=tuple(map(float, delays)))


# ---------------------------------------------------------------------------
# Two-flow closed forms
# ---------------------------------------------------------------------------

class TwoFlowBandwidths(NamedTuple):
    """The five two-flow minimum bandwidths, one per scheduler regime."""

    edf: float
    sp: float
    sp_shaped: float
    fifo: float
    fifo_shaped: float


def two_flow_closed_forms(f1: FlowProfile, f2: FlowProfile) -> TwoFlowBandwidths:
    """Closed-form minimum bandwidths for two flows with d1 > d2.

    Each value matches the corresponding general-n solver; the FIFO+reshaping
    expression uses the (r1 + r2) coefficient consistent with the general
    envelope characterization.
    """
    if not f1.d > f2.d:
        raise ValueError(f"need d1 > d2, got d1={f1.d}, d2={f2.d}")
    r1, b1, d1 = f1.r, f1.b, f1.d
    r2, b2, d2 = f2.r, f2.b, f2.d
    rates = r1 + r2

    edf = max(rates, b2 / d2, (b1 + b2 - r2 * d2) / d1 + r2)
    sp = max(rates, b2 / d2, (b1 + b2) / d1 + r2)
    if b2 / r2 >= b1 / r1:
        sp_shaped = edf
    else:
        sp_shaped = max(rates, b2 / d2, (b1 + max(b2 - r2 * d2, 0.0)) / d1 + r2)
    fifo = max(rates, (b1 + b2) / d2)
    root = math.sqrt((b1 + b2 - d1 * r1) ** 2 + 4 * r1 * d2 * b2)
    fifo_shaped = max(
        rates,
        b2 / d2,
        (b1 + b2) * rates / (d1 * r1 + d2 * r2),
        (b1 + b2 - d1 * r1 + root) / (2 * d2),
    )
    return TwoFlowBandwidths(edf, sp, sp_shaped, fifo, fifo_shaped)


def fifo_beats_sp_two_flow(f1: FlowProfile, f2: FlowProfile) -> bool:
    """True iff, for two flows with d1 > d2, FIFO with optimal reshaping
    needs strictly less bandwidth than static priority with optimal
    reshaping.

    This happens only in a bounded (d1, d2) window: d1 between the flows'
    burst-drain times, and d2 close enough to d1.
    """
    if not f1.d > f2.d:
        raise ValueError(f"need d1 > d2, got d1={f1.d}, d2={f2.d}")
    r1, b1, d1 = f1.r, f1.b, f1.d
    r2, b2, d2 = f2.r, f2.b, f2.d
    if not (b2 / r2 < d1 < b1 / r1):
        return False
    lo = (b1 + b2) * (r1 + r2) / (r2 * (b1 / d1 + r2)) - d1 * r1 / r2
    return lo < d2 < d1
