"""Domain model: token-bucket flows, deadline-ordered flow sets, reshaping plans.

Conventions used throughout the package:

* A flow is a token-bucket contract (rate ``r``, burst ``b``) together with a
  hard end-to-end deadline ``d``.  All quantities are dimensionless consistent
  units (data-units and data-units/time); there is no unit-conversion layer.
* Flow sets are ordered by strictly decreasing deadline, so index 0 has the
  largest deadline (lowest static priority) and index n-1 the smallest
  deadline (highest static priority).
* ``suffix_rates[i]`` is the rate sum of flows ``i..n-1`` (``suffix_rates[n]``
  is 0), and ``prefix_bursts[i]`` is the burst sum of flows ``0..i-1``
  (``prefix_bursts[0]`` is 0).  These are the aggregates every solver needs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EqualDeadlines, InvalidProfile

__all__ = [
    "FlowProfile",
    "FlowSet",
    "ReshapingPlan",
    "Scheduler",
    "SolveResult",
    "new_flow_set",
    "flow_set_from_json",
    "load_flow_set",
    "flow_set_to_json",
]


@dataclass(frozen=True)
class FlowProfile:
    """One flow's token-bucket contract plus deadline.

    ``l`` is the maximum packet size; 0 selects the fluid model.  The burst
    must be at least ``l`` (a bucket smaller than one packet cannot emit it).
    """

    r: float  # token rate, data-units/time
    b: float  # bucket size, data-units
    d: float  # deadline, time
    l: float = 0.0  # max packet size, data-units (0 = fluid)

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r)):
            raise InvalidProfile(f"rate must be positive and finite, got {self.r}")
        if not (self.b >= 0 and math.isfinite(self.b)):
            raise InvalidProfile(f"burst must be nonnegative and finite, got {self.b}")
        if not (self.d > 0 and math.isfinite(self.d)):
            raise InvalidProfile(f"deadline must be positive and finite, got {self.d}")
        if not (0 <= self.l <= self.b):
            raise InvalidProfile(
                f"max packet size must satisfy 0 <= l <= b, got l={self.l}, b={self.b}"
            )


class Scheduler(str, Enum):
    """The five scheduler/shaping regimes the solvers cover."""

    EDF = "edf"
    STATIC_PRIORITY = "sp"
    STATIC_PRIORITY_SHAPED = "sp-shaped"
    FIFO = "fifo"
    FIFO_SHAPED = "fifo-shaped"


class FlowSet:
    """Deadline-ordered collection of flows with cached aggregate sums.

    Immutable after construction; safe to share across threads.
    """

    __slots__ = ("flows", "r", "b", "d", "l", "suffix_rates", "prefix_bursts")

    def __init__(self, flows: Sequence[FlowProfile]):
        if not flows:
            raise InvalidProfile("flow set must contain at least one flow")
        ordered = sorted(flows, key=lambda f: -f.d)
        for a, bnext in zip(ordered, ordered[1:]):
            if a.d == bnext.d:
                raise EqualDeadlines(
                    f"flows share deadline {a.d}; deadlines must be strictly ordered"
                )
        self.flows = tuple(ordered)
        self.r = np.array([f.r for f in ordered], dtype=float)
        self.b = np.array([f.b for f in ordered], dtype=float)
        self.d = np.array([f.d for f in ordered], dtype=float)
        self.l = np.array([f.l for f in ordered], dtype=float)
        self.suffix_rates = np.concatenate([np.cumsum(self.r[::-1])[::-1], [0.0]])
        self.prefix_bursts = np.concatenate([[0.0], np.cumsum(self.b)])
        for arr in (self.r, self.b, self.d, self.l,
                    self.suffix_rates, self.prefix_bursts):
            arr.flags.writeable = False

    def __len__(self) -> int:
        return len(self.flows)

    def __eq__(self, other) -> bool:
        return isinstance(other, FlowSet) and self.flows == other.flows

    def __hash__(self) -> int:
        return hash(self.flows)

    def __repr__(self) -> str:
        return f"FlowSet({list(self.flows)!r})"

    @property
    def total_rate(self) -> float:
        """Aggregate token rate of all flows."""
        return float(self.suffix_rates[0])

    @property
    def total_burst(self) -> float:
        """Aggregate bucket size of all flows."""
        return float(self.prefix_bursts[-1])


def new_flow_set(flows: Iterable[FlowProfile]) -> FlowSet:
    """Build a FlowSet, sorting by strictly decreasing deadline.

    Raises EqualDeadlines if two flows share a deadline and InvalidProfile if
    any profile violates its invariants.  Construction is order-insensitive.
    """
    return FlowSet(list(flows))


@dataclass(frozen=True)
class ReshapingPlan:
    """Per-flow reshaped bursts ``b'`` (reshaper rates equal flow rates).

    Positions follow the owning FlowSet's deadline ordering.
    """

    b_prime: tuple

    def __init__(self, b_prime: Iterable[float]):
        object.__setattr__(self, "b_prime", tuple(float(x) for x in b_prime))
        if any(x < 0 or not math.isfinite(x) for x in self.b_prime):
            raise InvalidProfile(f"reshaped bursts must be >= 0, got {self.b_prime}")

    def __len__(self) -> int:
        return len(self.b_prime)

    def validate_for(self, fs: FlowSet) -> None:
        """Check the plan matches ``fs`` in length and respects b' <= b."""
        if len(self.b_prime) != len(fs):
            raise InvalidProfile(
                f"plan has {len(self.b_prime)} entries for {len(fs)} flows"
            )
        for i, (bp, b) in enumerate(zip(self.b_prime, fs.b)):
            if bp > b * (1 + 1e-12) + 1e-15:
                raise InvalidProfile(
                    f"reshaped burst {bp} exceeds flow {i}'s burst {b}"
                )

    def array(self) -> np.ndarray:
        return np.array(self.b_prime, dtype=float)

    def suffix_bursts(self) -> np.ndarray:
        """Sums of reshaped bursts from index i to the end; last entry is 0."""
        arr = self.array()
        return np.concatenate([np.cumsum(arr[::-1])[::-1], [0.0]])

    def prefix_bursts(self) -> np.ndarray:
        """Sums of reshaped bursts up to (excluding) index i; first entry is 0."""
        return np.concatenate([[0.0], np.cumsum(self.array())])

    @staticmethod
    def identity(fs: FlowSet) -> "ReshapingPlan":
        """The no-op plan b' = b."""
        return ReshapingPlan(fs.b)


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a minimum-bandwidth solve.

    ``delays`` holds the analytic per-flow worst-case delay at ``r_min`` (for
    EDF this is the deadline itself, which the service-curve allocation meets
    exactly).
    """

    scheduler: Scheduler
    r_min: float
    plan: Optional[ReshapingPlan]
    delays: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "scheduler": self.scheduler.value,
            "r_min": self.r_min,
            "b_prime": list(self.plan.b_prime) if self.plan is not None else None,
            "delays": list(self.delays),
        }


def flow_set_from_json(data) -> FlowSet:
    """Parse ``{"flows": [{"r":..,"b":..,"d":..,"l":0.0}, ...]}``.

    Accepts a JSON string or an already-decoded dict; applies the same
    validation as new_flow_set.
    """
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if not isinstance(data, dict) or "flows" not in data:
        raise InvalidProfile('flow-set JSON must be an object with a "flows" list')
    flows = []
    for i, entry in enumerate(data["flows"]):
        try:
            flows.append(
                FlowProfile(
                    r=float(entry["r"]),
                    b=float(entry["b"]),
                    d=float(entry["d"]),
                    l=float(entry.get("l", 0.0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidProfile(f"flow entry {i} is malformed: {entry!r}") from exc
    return new_flow_set(flows)


def load_flow_set(path) -> FlowSet:
    """Read a flow-set JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        return flow_set_from_json(fh.read())


def flow_set_to_json(fs: FlowSet) -> str:
    """Serialize a FlowSet back to its JSON schema."""
    return json.dumps(
        {"flows": [{"r": f.r, "b": f.b, "d": f.d, "l": f.l} for f in fs.flows]},
        indent=2,
    )
