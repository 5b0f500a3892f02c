"""Packet-level two-flow static-priority model.

Extends the fluid two-flow static-priority analysis with maximum packet
sizes: a high-priority packet arriving at an empty queue can still wait for
one low-priority packet transmission, and reshaper output is only available
in whole packets.  Flow 2 (smaller deadline) has non-preemptive priority over
flow 1; only flow 2 is ever reshaped, since reshaping the low-priority flow
cannot reduce the required bandwidth.

With all packet sizes zero, every function reduces exactly to its fluid
counterpart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InsufficientBandwidth, InvalidProfile
from .flows import FlowProfile

__all__ = [
    "PacketShaper",
    "packet_sp_min_bw_unshaped",
    "packet_high_priority_delay",
    "packet_low_priority_delay",
    "packet_sp_min_bw_shaped",
    "packet_grid_search_min_bw",
]

_RATE_EQ_RTOL = 1e-12  # r2' within this of r2 counts as an unchanged rate


@dataclass(frozen=True)
class PacketShaper:
    """Token-bucket reshaper (rate, burst) applied to the high-priority flow.

    ``burst == b2`` with ``rate == r2`` is the identity shaper.
    """

    rate: float
    burst: float

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise InvalidProfile(f"shaper rate must be positive, got {self.rate}")
        if not (self.burst >= 0 and math.isfinite(self.burst)):
            raise InvalidProfile(f"shaper burst must be >= 0, got {self.burst}")


def _check_pair(f1: FlowProfile, f2: FlowProfile) -> None:
    if not f1.d > f2.d:
        raise ValueError(f"need d1 > d2, got d1={f1.d}, d2={f2.d}")
    for name, f in (("flow 1", f1), ("flow 2", f2)):
        if not f.l < f.b:
            raise InvalidProfile(
                f"{name}: packet model needs l < b, got l={f.l}, b={f.b}"
            )


def packet_sp_min_bw_unshaped(f1: FlowProfile, f2: FlowProfile) -> float:
    """Minimum bandwidth without reshaping: stability, the high-priority
    burst plus one low-priority packet within d2, and both bursts (served
    around the high-priority rate) within d1."""
    _check_pair(f1, f2)
    return max(
        f1.r + f2.r,
        (f1.l + f2.b) / f2.d,
        (f1.b + f2.b) / f1.d + f2.r,
    )


def packet_high_priority_delay(f2: FlowProfile, shaper: PacketShaper,
                               R: float, l1: float) -> float:
    """Worst-case delay of the high-priority flow through its reshaper and
    the link: either the full burst behind one low-priority packet, or the
    reshaper drain time plus one packet of each flow."""
    if not R > f2.r:
        raise InsufficientBandwidth(f"need R > r2, got R={R}, r2={f2.r}")
    return max(
        (f2.b + l1) / R,
        (f2.b - shaper.burst) / shaper.rate + (l1 + f2.l) / R,
    )


def packet_low_priority_delay(f1: FlowProfile, f2: FlowProfile,
                              shaper: PacketShaper, R: float) -> float:
    """Worst-case delay of the low-priority flow.

    The shaped high-priority arrivals at the link follow the tighter of the
    two token buckets (r2, b2) and (shaper.rate, shaper.burst); which segment
    of the resulting leftover-service curve binds gives three cases.
    """
    if R < f1.r + f2.r:
        raise InsufficientBandwidth(
            f"need R >= r1 + r2 for stability, got R={R}, r1+r2={f1.r + f2.r}"
        )
    r2p, b2p = shaper.rate, shaper.burst
    if r2p <= f2.r * (1 + _RATE_EQ_RTOL):
        return (f1.b + b2p) / (R - f2.r)
    crossover = (R - r2p) * (f2.b - b2p) / (r2p - f2.r)
    if crossover - (f1.b + b2p) < 0:
        return (f1.b + f2.b) / (R - f2.r)
    return max(
        (f1.b + b2p) / (R - r2p),
        (f1.b + f2.b) / f1.r - (R - f1.r - f2.r) * (f2.b - b2p) / (f1.r * (r2p - f2.r)),
    )


def packet_sp_min_bw_shaped(f1: FlowProfile,
                            f2: FlowProfile) -> Tuple[float, PacketShaper]:
    """Minimum bandwidth with an optimally reshaped high-priority flow, plus
    a witness shaper attaining it.

    The optimum falls into one of five regions of the (d1, d2) plane, tested
    in order (ties resolve to the earliest matching case); keeping the shaper
    rate at r2 is always sufficient.  Where an optimal burst interval is
    nondegenerate the lower endpoint is returned.
    """
    _check_pair(f1, f2)
    r1, b1, d1, l1 = f1.r, f1.b, f1.d, f1.l
    r2, b2, d2, l2 = f2.r, f2.b, f2.d, f2.l
    rates = r1 + r2
    unshaped = packet_sp_min_bw_unshaped(f1, f2)

    def result(R: float, b2p: float) -> Tuple[float, PacketShaper]:
        if R > unshaped * (1 + 1e-12):  # boundary float noise: shaping won't help
            return unshaped, PacketShaper(r2, b2)
        return R, PacketShaper(r2, min(b2p, b2))

    # case (i): rates alone suffice once the reshaper absorbs enough burst
    if ((b1 + l2) / r1 <= d1 < (b1 + b2) / r1
            and d2 >= max((b2 + l1) / rates,
                          (b1 + b2 - d1 * r1) / r2 + (l1 + l2) / rates)):
        b2p = max(l2, b2 + r2 * ((l1 + l2) / rates - d2))
        return result(rates, b2p)

    # case (ii): the high-priority deadline pins R at (b2 + l1)/d2
    if d2 < (b2 + l1) / rates:
        R = (b2 + l1) / d2
        lo = d2 * (b1 + l2) / (b2 + l1 - d2 * r2) + d2 * (b2 - l2) / (b2 + l1)
        hi = d2 * (b1 + b2) / (b2 + l1 - d2 * r2)
        if lo <= d1 < hi:
            b2p = max(l2, b2 - r2 * (b2 - l2) / R)
            return result(R, b2p)

    # case (iii): reshape to a single packet; the low-priority deadline pins R
    if d2 < (l1 + b2) / r2:
        bound = (b1 + l2) * (d2 - (b2 - l2) / r2) / (l1 + b2 - r2 * d2)
        in_iii = d1 < min((b1 + l2) / r1, bound)
    else:
        in_iii = d1 < (b1 + l2) / r1
    if in_iii:
        return result((l2 + b1) / d1 + r2, l2)

    # case (iv): both deadlines bind; R solves a quadratic
    root = math.sqrt(((d1 - d2) * r2 + b1 + b2) ** 2 + 4 * d1 * r2 * (l1 + l2))
    if b2 + l1 - r2 * d2 > 0:
        lo = (b1 + l2) * (d2 - (b2 - l2) / r2) / (b2 + l1 - r2 * d2)
        if d2 < (b2 + l1) / rates:
            hi = d2 * (b1 + l2) / (b2 + l1 - d2 * r2) + d2 * (b2 - l2) / (b2 + l1)
            in_iv = lo <= d1 < hi
        elif d2 <= (b2 + l1) / r2:
            hi = r2 * (l1 + l2) / (r1 * rates) + (b1 + b2 - d2 * r2) / r1
            in_iv = lo <= d1 < hi
        else:
            in_iv = False
        if in_iv:
            R = ((d1 - d2) * r2 + (b1 + b2) + root) / (2 * d1)
            b2p = ((b2 - b1) - (d1 + d2) * r2 + root) / 2
            return result(R, max(l2, b2p))

    # case (v): reshaping cannot reduce the bandwidth
    return unshaped, PacketShaper(r2, b2)


def packet_grid_feasible(f1: FlowProfile, f2: FlowProfile, R: float,
                         grid: int = 200, rate_fixed: bool = False) -> bool:
    """Verification-only feasibility probe: can some shaper on a ``grid``-point
    rate sweep meet both deadlines at bandwidth R?

    The low-priority delay is nondecreasing in the shaper burst while the
    high-priority constraint only lower-bounds it, so for each candidate rate
    the burst dimension reduces to one exact interval check (evaluate the
    low-priority delay at the smallest admissible burst).  ``rate_fixed``
    restricts the sweep to the flow's own rate.
    """
    _check_pair(f1, f2)
    r1, b1, d1, l1 = f1.r, f1.b, f1.d, f1.l
    r2, b2, d2, l2 = f2.r, f2.b, f2.d, f2.l
    if R < r1 + r2 or (b2 + l1) / R > d2:
        return False
    if rate_fixed:
        rates = np.full(1, r2)
    else:
        rates = np.linspace(r2, max(R, r2), grid)
    # smallest burst the reshaper-drain constraint allows per rate
    lo_burst = np.maximum(l2, b2 - rates * (d2 - (l1 + l2) / R))
    ok_cols = lo_burst <= b2
    if not ok_cols.any():
        return False
    rp = rates[ok_cols]
    bp = lo_burst[ok_cols]
    eq = rp <= r2 * (1 + _RATE_EQ_RTOL)
    gap = np.where(eq, 1.0, rp - r2)
    cross = np.where(eq, -1.0, (R - rp) * (b2 - bp) / gap)
    case1 = (b1 + bp) / (R - r2)
    case2 = np.full_like(bp, (b1 + b2) / (R - r2))
    with np.errstate(divide="ignore", invalid="ignore"):
        case3 = np.maximum(
            np.where(R > rp, (b1 + bp) / np.where(R > rp, R - rp, 1.0), np.inf),
            (b1 + b2) / r1 - (R - r1 - r2) * (b2 - bp) / (r1 * gap),
        )
    delay1 = np.where(eq, case1, np.where(cross - (b1 + bp) < 0, case2, case3))
    return bool(np.any(delay1 <= d1))


def packet_grid_search_min_bw(f1: FlowProfile, f2: FlowProfile,
                              grid: int = 200,
                              rate_fixed: bool = False) -> float:
    """Verification-only search for the smallest bandwidth at which some
    shaper from the ``grid``-point rate sweep meets both deadlines (bisection
    on the monotone ``packet_grid_feasible``)."""
    hi = packet_sp_min_bw_unshaped(f1, f2)
    lo = f1.r + f2.r
    if not packet_grid_feasible(f1, f2, hi, grid, rate_fixed):
        return hi  # identity shaper always works at the unshaped minimum
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if packet_grid_feasible(f1, f2, mid, grid, rate_fixed):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi
