"""Independent fluid-simulation oracle.

Simulates shapers plus the shared link on a discrete time grid using
cumulative curves, with exact per-step water-filling among eligible flows
(static priority by strict precedence, EDF by earliest absolute deadline of
the data's emission time plus its flow deadline, FIFO by aggregate order).
The observed maximum virtual delays validate the analytic bounds from
``bwmin.bounds`` and the minimality of solver outputs, without sharing any
code with them.

Soundness margin: observed delays can exceed the continuous-time value by at
most two grid steps (one for shaper release granularity, one for service
granularity), so checks compare against ``analytic + 2*dt``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import GridTooCoarse, InsufficientBandwidth, TooManyFlows
from .flows import FlowSet, ReshapingPlan, Scheduler

__all__ = ["ArrivalPattern", "SimConfig", "simulate", "adversarial_search"]

ADVERSARIAL_MAX_FLOWS = 3

_DISCIPLINE = {
    Scheduler.FIFO: kernels.FIFO,
    Scheduler.FIFO_SHAPED: kernels.FIFO,
    Scheduler.STATIC_PRIORITY: kernels.STATIC_PRIORITY,
    Scheduler.STATIC_PRIORITY_SHAPED: kernels.STATIC_PRIORITY,
    Scheduler.EDF: kernels.EDF,
}


@dataclass(frozen=True)
class ArrivalPattern:
    """Greedy-from-offset arrivals: flow i emits its full burst at
    ``offsets[i]`` and then sends at its token rate forever.

    This is the family of patterns the worst-case delay arguments use; the
    all-zero pattern is the classic simultaneous-burst case.
    """

    offsets: tuple

    def __init__(self, offsets: Sequence[float]):
        vals = tuple(float(x) for x in offsets)
        if any(x < 0 or not math.isfinite(x) for x in vals):
            raise ValueError(f"offsets must be finite and >= 0, got {vals}")
        object.__setattr__(self, "offsets", vals)

    @staticmethod
    def zeros(n: int) -> "ArrivalPattern":
        return ArrivalPattern((0.0,) * n)


@dataclass(frozen=True)
class SimConfig:
    """Simulation grid and scheduler selection.

    ``dt`` defaults to (smallest deadline)/1000 and ``horizon`` to a value
    derived from the fact that at R >= total rate the link backlog never
    exceeds the aggregate burst, so every virtual delay is bounded by
    max reshaper drain + total_burst/R; both are overridable.
    """

    scheduler: Scheduler
    plan: Optional[ReshapingPlan] = None
    dt: Optional[float] = None
    horizon: Optional[float] = None


def _grid(fs: FlowSet, R: float, cfg: SimConfig,
          pattern: ArrivalPattern) -> tuple:
    """Resolve (dt, n_steps, n_measure) for a run."""
    d_min = float(fs.d.min())
    dt = cfg.dt if cfg.dt is not None else d_min / 1000.0
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dt > d_min / 100.0:
        raise GridTooCoarse(
            f"dt={dt} exceeds min deadline/100 = {d_min / 100.0}"
        )
    if cfg.plan is not None:
        drain = float(np.max((fs.b - cfg.plan.array()) / fs.r))
    else:
        drain = 0.0
    off_max = max(pattern.offsets)
    # any bit departs within total_burst/R of reaching the link, and the
    # worst arrivals happen while bursts and reshaper drains still interact
    unit = float(fs.d.max()) + drain + fs.total_burst / R
    t_measure = off_max + 2.0 * unit
    t_total = t_measure + 2.0 * unit
    if cfg.horizon is not None:
        t_total = max(cfg.horizon, 4.0 * dt)
        t_measure = max(t_total - 2.0 * unit, t_total / 2.0)
    n_steps = int(math.ceil(t_total / dt)) + 1
    n_measure = min(int(math.ceil(t_measure / dt)) + 1, n_steps)
    if n_steps * len(fs) > 4e7:
        raise MemoryError(
            f"simulation grid too large ({n_steps} steps x {len(fs)} flows); "
            "increase dt or reduce the horizon"
        )
    return dt, n_steps, n_measure


def simulate(fs: FlowSet, R: float, cfg: SimConfig,
             pattern: ArrivalPattern) -> np.ndarray:
    """Per-flow maximum observed virtual delay for one arrival pattern.

    Virtual delay at t is inf{tau : arrivals(t) <= departures(t + tau)},
    maximized over grid points; arrivals are measured before the reshaper so
    the reshaping delay is included.
    """
    if len(pattern.offsets) != len(fs):
        raise ValueError(
            f"pattern has {len(pattern.offsets)} offsets for {len(fs)} flows"
        )
    if R < fs.total_rate * (1 - 1e-12):
        raise InsufficientBandwidth(
            f"bandwidth {R} is below the aggregate rate {fs.total_rate}"
        )
    if cfg.plan is not None:
        cfg.plan.validate_for(fs)
    dt, n_steps, n_measure = _grid(fs, R, cfg, pattern)
    bp = cfg.plan.array() if cfg.plan is not None else None
    offsets = np.array(pattern.offsets, dtype=float)
    discipline = _DISCIPLINE[cfg.scheduler]
    for attempt in range(3):
        delays, resolved = kernels.simulate_fluid(
            fs.r, fs.b, fs.d, bp, offsets, R, dt, n_steps, n_measure,
            discipline)
        if resolved:
            return np.asarray(delays)
        n_steps *= 2  # horizon was user-overridden too short; extend the tail
    raise RuntimeError(
        "simulation horizon too short for departures to catch up; "
        "raise SimConfig.horizon"
    )


def _offset_candidates(fs: FlowSet, plan: Optional[ReshapingPlan],
                       count: int, dt: float) -> list:
    """Per-flow offset grid: an even sweep of the reshaper-drain range plus
    the drain instants themselves, which the worst-case constructions use."""
    if plan is not None:
        drains = [(b - p) / r for b, p, r in zip(fs.b, plan.b_prime, fs.r)]
    else:
        drains = []
    informed = {0.0}
    for tau in drains:
        informed.add(tau)
        informed.add(tau + dt)
    span = max(drains) + dt if drains else 0.0
    if span > 0 and count > 1:
        sweep = np.linspace(0.0, span, count)
        informed.update(float(x) for x in sweep)
    # snap to the grid so patterns align with measurement instants
    snapped = sorted({round(x / dt) * dt for x in informed})
    return snapped


def adversarial_search(fs: FlowSet, R: float, cfg: SimConfig,
                       offset_grid: int) -> np.ndarray:
    """Per-flow maximum simulated delay over an offset-pattern grid.

    Exhaustive over offset_grid candidates per flow (plus pattern-informed
    extras), so the flow count is capped; the result lower-bounds the true
    worst case and is used for tightness checks against the analytic bounds.
    """
    n = len(fs)
    if n > ADVERSARIAL_MAX_FLOWS:
        raise TooManyFlows(
            f"adversarial search is exhaustive over offsets^n and supports "
            f"at most {ADVERSARIAL_MAX_FLOWS} flows, got {n}"
        )
    if offset_grid < 1:
        raise ValueError(f"offset_grid must be >= 1, got {offset_grid}")
    d_min = float(fs.d.min())
    dt = cfg.dt if cfg.dt is not None else d_min / 1000.0
    candidates = _offset_candidates(fs, cfg.plan, offset_grid, dt)
    best = np.zeros(n)
    for combo in itertools.product(candidates, repeat=n):
        delays = simulate(fs, R, cfg, ArrivalPattern(combo))
        np.maximum(best, delays, out=best)
    return best
