#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Covers the two hot paths: the 3**n FIFO feasibility-envelope enumeration
(dominates the Monte Carlo study) and the fluid simulator (dominates oracle
verification).  Run after an editable install:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from bwmin import kernels
from bwmin.kernels import pure


def _instance(rng, n):
    r = rng.uniform(0.1, 10, n)
    b = rng.uniform(1, 10, n)
    d = np.sort(rng.uniform(0.1, 1, n))[::-1].copy() + \
        np.arange(n)[::-1] * 0.001
    return r, b, d, float(r.sum() * 1.2)


def _time(fn, min_time=0.2):
    fn()  # warm up
    reps = 0
    t0 = time.perf_counter()
    while time.perf_counter() - t0 < min_time:
        fn()
        reps += 1
    return (time.perf_counter() - t0) / reps


def bench_envelopes(backends, rng):
    print("\nFIFO feasibility envelopes (one evaluation; a solve runs ~80)")
    print(f"{'n':>4} {'kernel':>8}" +
          "".join(f" {name:>12}" for name in backends) + f" {'speedup':>9}")
    for n in (4, 8, 10, 12):
        r, b, d, R = _instance(rng, n)
        for label, attr in (("lower", "fifo_total_burst_lower"),
                            ("upper", "fifo_total_burst_upper")):
            times = [_time(lambda m=mod, a=attr: getattr(m, a)(r, b, d, R))
                     for mod in backends.values()]
            cols = "".join(f" {t * 1e3:>10.3f}ms" for t in times)
            speedup = times[-1] / times[0] if len(times) > 1 else 1.0
            print(f"{n:>4} {label:>8}{cols} {speedup:>8.1f}x")


def bench_simulator(backends, rng):
    print("\nFluid simulator (delays for one arrival pattern)")
    print(f"{'steps':>8} {'sched':>6}" +
          "".join(f" {name:>12}" for name in backends) + f" {'speedup':>9}")
    r, b, d, R = _instance(rng, 3)
    offsets = np.zeros(3)
    bp = b * 0.4
    for steps in (10_000, 50_000):
        for sched, name in ((kernels.FIFO, "fifo"),
                            (kernels.STATIC_PRIORITY, "sp"),
                            (kernels.EDF, "edf")):
            times = []
            for mod in backends.values():
                fn = lambda m=mod: m.simulate_fluid(
                    r, b, d, bp, offsets, R, 1e-3, steps,
                    int(steps * 0.7), sched)
                # the pure loop is slow; one rep is enough there
                times.append(_time(fn, min_time=0.05))
            cols = "".join(f" {t * 1e3:>10.1f}ms" for t in times)
            speedup = times[-1] / times[0] if len(times) > 1 else 1.0
            print(f"{steps:>8} {name:>6}{cols} {speedup:>8.1f}x")


def main():
    backends = {}
    try:
        backends["compiled"] = kernels.get_backend("compiled")
    except ImportError:
        print("compiled backend unavailable; benchmarking pure only")
    backends["pure"] = pure
    print(f"active backend at import: {kernels.BACKEND}")
    rng = np.random.default_rng(1)
    bench_envelopes(backends, rng)
    bench_simulator(backends, rng)


if __name__ == "__main__":
    main()
