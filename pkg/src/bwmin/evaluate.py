"""Monte Carlo study, two-flow heatmap grids, and reshaping-gain CDFs.

The scenario study draws, per trial, ten bursts from U(1, 10) and then ten
rates from U(0, sum of the drawn bursts), assigns them to one of eight fixed
ten-deadline vectors, and solves all five scheduler regimes.  Reported
metrics are relative bandwidth differences between regimes.

Reproducibility: trial k of a run seeded with ``seed`` uses a fresh
``numpy.random.Generator(PCG64(SeedSequence((seed, k))))``, so results are
bit-identical for a given (scenario, trials, seed) regardless of execution
order or thread count.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .flows import FlowProfile, new_flow_set
from .solvers import (
    min_bw_edf,
    min_bw_fifo,
    min_bw_fifo_shaped,
    min_bw_sp,
    min_bw_sp_shaped,
    two_flow_closed_forms,
)

__all__ = [
    "DeadlineScenario",
    "SCENARIOS",
    "ScenarioStats",
    "run_scenario",
    "run_scenario_samples",
    "reshaping_gain_cdf",
    "heatmap",
    "METRICS",
    "write_stats_csv",
    "write_heatmap_csv",
    "write_cdf_csv",
]

_Z95 = 1.96  # normal-approximation 95% confidence interval

# relative bandwidth differences reported by the study
METRICS = (
    "edf_vs_sp_shaped",       # (sp_shaped - edf) / sp_shaped
    "edf_vs_fifo_shaped",     # (fifo_shaped - edf) / fifo_shaped
    "sp_shaped_vs_fifo_shaped",  # (fifo_shaped - sp_shaped) / fifo_shaped
    "sp_reshaping_gain",      # (sp - sp_shaped) / sp
    "fifo_reshaping_gain",    # (fifo - fifo_shaped) / fifo
)


@dataclass(frozen=True)
class DeadlineScenario:
    """A named vector of strictly decreasing deadlines."""

    name: str
    deadlines: tuple

    def __post_init__(self):
        d = self.deadlines
        if any(x <= y for x, y in zip(d, d[1:])):
            raise ValueError(f"deadlines must be strictly decreasing: {d}")


# even, bi-modal, and tri-modal spreads over the [0.1, 1] deadline range
SCENARIOS: Dict[str, DeadlineScenario] = {
    s.name: s
    for s in (
        DeadlineScenario(
            "d11", (1, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1)),
        DeadlineScenario(
            "d21", (1, 0.95, 0.9, 0.85, 0.8, 0.3, 0.25, 0.2, 0.15, 0.1)),
        DeadlineScenario(
            "d22", (1, 0.96, 0.93, 0.9, 0.86, 0.83, 0.8, 0.2, 0.15, 0.1)),
        DeadlineScenario(
            "d23", (1, 0.95, 0.9, 0.3, 0.26, 0.23, 0.2, 0.16, 0.13, 0.1)),
        DeadlineScenario(
            "d31", (1, 0.95, 0.9, 0.6, 0.55, 0.5, 0.45, 0.2, 0.15, 0.1)),
        DeadlineScenario(
            "d32", (1, 0.68, 0.65, 0.62, 0.6, 0.57, 0.55, 0.53, 0.5, 0.1)),
        DeadlineScenario(
            "d33", (1, 0.6, 0.28, 0.25, 0.23, 0.2, 0.17, 0.15, 0.12, 0.1)),
        DeadlineScenario(
            "d34", (1, 0.97, 0.95, 0.93, 0.9, 0.88, 0.85, 0.82, 0.6, 0.1)),
    )
}


@dataclass(frozen=True)
class ScenarioStats:
    """Summary of one metric over a scenario's trials."""

    metric: str
    scenario: str
    mean: float
    std: float
    ci_lo: float
    ci_hi: float
    trials: int


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, trial))))


def _one_trial(deadlines: Sequence[float], seed: int, trial: int) -> tuple:
    """Draw one random flow set and solve all five regimes."""
    rng = _trial_rng(seed, trial)
    n = len(deadlines)
    b = rng.uniform(1.0, 10.0, size=n)
    r = rng.uniform(0.0, float(b.sum()), size=n)
    while np.any(r == 0.0):  # measure-zero, but rates must be positive
        r[r == 0.0] = rng.uniform(0.0, float(b.sum()), size=int((r == 0.0).sum()))
    fs = new_flow_set(
        [FlowProfile(float(r[i]), float(b[i]), float(deadlines[i])) for i in range(n)]
    )
    return (
        min_bw_edf(fs).r_min,
        min_bw_sp(fs).r_min,
        min_bw_sp_shaped(fs).r_min,
        min_bw_fifo(fs).r_min,
        min_bw_fifo_shaped(fs).r_min,
    )


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("BWMIN_THREADS", "1")))
    except ValueError:
        return 1


def run_scenario_samples(scenario: DeadlineScenario, trials: int,
                         seed: int) -> Dict[str, np.ndarray]:
    """Per-trial metric samples (deterministic given the seed)."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    workers = _thread_count()
    run = lambda k: _one_trial(scenario.deadlines, seed, k)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, range(trials)))
    else:
        rows = [run(k) for k in range(trials)]
    edf, sp, sp_s, fifo, fifo_s = map(np.array, zip(*rows))
    return {
        "edf_vs_sp_shaped": (sp_s - edf) / sp_s,
        "edf_vs_fifo_shaped": (fifo_s - edf) / fifo_s,
        "sp_shaped_vs_fifo_shaped": (fifo_s - sp_s) / fifo_s,
        "sp_reshaping_gain": (sp - sp_s) / sp,
        "fifo_reshaping_gain": (fifo - fifo_s) / fifo,
    }


def run_scenario(scenario: DeadlineScenario, trials: int,
                 seed: int) -> List[ScenarioStats]:
    """Mean, standard deviation, and 95% confidence interval of each metric."""
    samples = run_scenario_samples(scenario, trials, seed)
    out = []
    for metric in METRICS:
        vals = samples[metric]
        mean = float(vals.mean())
        std = float(vals.std(ddof=1)) if trials > 1 else 0.0
        half = _Z95 * std / np.sqrt(trials)
        out.append(
            ScenarioStats(metric, scenario.name, mean, std,
                          mean - half, mean + half, trials)
        )
    return out


def reshaping_gain_cdf(scenario: DeadlineScenario, trials: int,
                       seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """Sorted reshaping-gain samples for static priority and for FIFO."""
    samples = run_scenario_samples(scenario, trials, seed)
    return (
        np.sort(samples["sp_reshaping_gain"]),
        np.sort(samples["fifo_reshaping_gain"]),
    )


def heatmap(f1_env: Tuple[float, float], f2_env: Tuple[float, float],
            d1_range: Tuple[float, float] = (0.0, 4.0),
            d2_range: Tuple[float, float] = (0.0, 4.0),
            grid: Tuple[int, int] = (100, 100),
            metric: str = "edf_vs_sp_shaped"):
    """Two-flow relative-difference matrix over a (d1, d2) grid.

    Grid points place d strictly above the range's lower end (open at 0);
    cells with d2 >= d1 are NaN (the model requires d1 > d2).  Returns
    (d1_axis, d2_axis, matrix) with rows indexed by d1.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    r1, b1 = f1_env
    r2, b2 = f2_env
    n1, n2 = grid
    d1_axis = d1_range[0] + (d1_range[1] - d1_range[0]) * np.arange(1, n1 + 1) / n1
    d2_axis = d2_range[0] + (d2_range[1] - d2_range[0]) * np.arange(1, n2 + 1) / n2
    mat = np.full((n1, n2), np.nan)
    for i, d1 in enumerate(d1_axis):
        for j, d2 in enumerate(d2_axis):
            if d2 >= d1:
                continue
            bw = two_flow_closed_forms(FlowProfile(r1, b1, d1),
                                       FlowProfile(r2, b2, d2))
            if metric == "edf_vs_sp_shaped":
                mat[i, j] = (bw.sp_shaped - bw.edf) / bw.sp_shaped
            elif metric == "edf_vs_fifo_shaped":
                mat[i, j] = (bw.fifo_shaped - bw.edf) / bw.fifo_shaped
            elif metric == "sp_shaped_vs_fifo_shaped":
                mat[i, j] = (bw.fifo_shaped - bw.sp_shaped) / bw.fifo_shaped
            elif metric == "sp_reshaping_gain":
                mat[i, j] = (bw.sp - bw.sp_shaped) / bw.sp
            else:  # fifo_reshaping_gain
                mat[i, j] = (bw.fifo - bw.fifo_shaped) / bw.fifo
    return d1_axis, d2_axis, mat


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def write_stats_csv(path, stats: List[ScenarioStats]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "scenario", "mean", "std", "ci_lo", "ci_hi",
                    "trials"])
        for s in stats:
            w.writerow([s.metric, s.scenario, _fmt(s.mean), _fmt(s.std),
                        _fmt(s.ci_lo), _fmt(s.ci_hi), s.trials])


def write_heatmap_csv(path, d1_axis, d2_axis, mat) -> None:
    """Matrix CSV: first row is the d2 axis, first column the d1 axis;
    infeasible cells (d2 >= d1) are left empty."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["d1\\d2"] + [_fmt(x) for x in d2_axis])
        for i, d1 in enumerate(d1_axis):
            row = [_fmt(d1)]
            row += ["" if np.isnan(v) else _fmt(v) for v in mat[i]]
            w.writerow(row)


def write_cdf_csv(path, sp_gains, fifo_gains) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["sp_reshaping_gain", "fifo_reshaping_gain"])
        for a, c in zip(sp_gains, fifo_gains):
            w.writerow([_fmt(a), _fmt(c)])
