"""Command-line front end.

Subcommands: solve, delay, compare, verify, evaluate, heatmap, cdf.
Exit codes: 0 success, 1 verification failure, 2 input/validation error.
JSON is written with full-precision round-trip floats; CSV values carry 10
significant digits.  BWMIN_THREADS caps internal parallelism of the Monte
Carlo commands.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import evaluate as ev
from . import oracle, packet
from .bounds import fifo_delay_shaped, sp_delay_shaped, sp_delay_unshaped
from .errors import BwminError
from .flows import FlowSet, ReshapingPlan, Scheduler, load_flow_set
from .solvers import (
    min_bw_edf,
    min_bw_fifo,
    min_bw_fifo_shaped,
    min_bw_sp,
    min_bw_sp_shaped,
    two_flow_closed_forms,
)

_SOLVERS = {
    Scheduler.EDF: min_bw_edf,
    Scheduler.STATIC_PRIORITY: min_bw_sp,
    Scheduler.STATIC_PRIORITY_SHAPED: min_bw_sp_shaped,
    Scheduler.FIFO: min_bw_fifo,
    Scheduler.FIFO_SHAPED: min_bw_fifo_shaped,
}


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _fail(error: str, detail: str) -> int:
    json.dump({"error": error, "detail": detail}, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 2


def _scheduler(name: str) -> Scheduler:
    return Scheduler(name)


def _parse_plan(fs: FlowSet, text: str) -> ReshapingPlan:
    plan = ReshapingPlan([float(x) for x in text.split(",")])
    plan.validate_for(fs)
    return plan


def _cmd_solve(args) -> int:
    fs = load_flow_set(args.input)
    sched = _scheduler(args.scheduler)
    if args.model == "packet":
        if len(fs) != 2:
            raise BwminError("the packet model supports exactly 2 flows")
        if sched not in (Scheduler.STATIC_PRIORITY,
                         Scheduler.STATIC_PRIORITY_SHAPED):
            raise BwminError("the packet model covers static priority only")
        f1, f2 = fs.flows
        if sched is Scheduler.STATIC_PRIORITY:
            r_min = packet.packet_sp_min_bw_unshaped(f1, f2)
            shaper = packet.PacketShaper(f2.r, f2.b)
        else:
            r_min, shaper = packet.packet_sp_min_bw_shaped(f1, f2)
        d2 = packet.packet_high_priority_delay(f2, shaper, r_min, f1.l)
        d1 = packet.packet_low_priority_delay(f1, f2, shaper, r_min)
        _emit({
            "scheduler": sched.value,
            "model": "packet",
            "r_min": r_min,
            "shaper": {"rate": shaper.rate, "burst": shaper.burst},
            "delays": [d1, d2],
        })
        return 0
    result = _SOLVERS[sched](fs)
    _emit(result.to_dict())
    return 0


def _cmd_delay(args) -> int:
    fs = load_flow_set(args.input)
    sched = _scheduler(args.scheduler)
    plan = (_parse_plan(fs, args.b_prime) if args.b_prime
            else ReshapingPlan.identity(fs))
    if sched is Scheduler.STATIC_PRIORITY:
        delays = sp_delay_unshaped(fs, args.r)
    elif sched in (Scheduler.STATIC_PRIORITY_SHAPED,):
        delays = sp_delay_shaped(fs, plan, args.r)
    elif sched in (Scheduler.FIFO, Scheduler.FIFO_SHAPED):
        delays = fifo_delay_shaped(fs, plan, args.r)
    else:  # EDF: the service-curve guarantee is the deadline itself
        delays = fs.d
    _emit({"scheduler": sched.value, "r": args.r,
           "delays": [float(x) for x in delays]})
    return 0


def _cmd_compare(args) -> int:
    fs = load_flow_set(args.input)
    r_min = {s.value: _SOLVERS[s](fs).r_min for s in Scheduler}
    pairs = {}
    for a in Scheduler:
        for b in Scheduler:
            if a is b:
                continue
            pairs[f"({a.value}-{b.value})/{a.value}"] = \
                (r_min[a.value] - r_min[b.value]) / r_min[a.value]
    out = {"r_min": r_min, "relative_differences": pairs}
    if len(fs) == 2:
        out["two_flow_closed_forms"] = \
            two_flow_closed_forms(*fs.flows)._asdict()
    _emit(out)
    return 0


def _cmd_verify(args) -> int:
    fs = load_flow_set(args.input)
    sched = _scheduler(args.scheduler)
    plan = None
    if args.b_prime:
        plan = _parse_plan(fs, args.b_prime)
    elif sched in (Scheduler.STATIC_PRIORITY_SHAPED, Scheduler.FIFO_SHAPED):
        plan = _SOLVERS[sched](fs).plan
    R = args.r if args.r is not None else _SOLVERS[sched](fs).r_min

    if sched is Scheduler.EDF:
        analytic = np.asarray(fs.d, dtype=float)
    elif sched is Scheduler.STATIC_PRIORITY:
        analytic = sp_delay_unshaped(fs, R)
    elif sched is Scheduler.STATIC_PRIORITY_SHAPED:
        analytic = sp_delay_shaped(fs, plan, R)
    else:
        analytic = fifo_delay_shaped(
            fs, plan if plan is not None else ReshapingPlan.identity(fs), R)

    cfg = oracle.SimConfig(scheduler=sched, plan=plan, dt=args.dt)
    dt = cfg.dt if cfg.dt is not None else float(fs.d.min()) / 1000.0
    if args.offsets > 1:
        simulated = oracle.adversarial_search(fs, R, cfg, args.offsets)
    else:
        simulated = oracle.simulate(fs, R, cfg,
                                    oracle.ArrivalPattern.zeros(len(fs)))
    report = []
    sound = True
    for i in range(len(fs)):
        margin = float(analytic[i] - simulated[i])
        # 2*dt covers shaper-release and service granularity; the extra term
        # absorbs float noise from the solvers' binary-search slack on R
        sound = bool(sound and margin >= -(2 * dt + 1e-7 * (1 + float(analytic[i]))))
        report.append({
            "flow": i,
            "analytic": float(analytic[i]),
            "simulated_max": float(simulated[i]),
            "margin": margin,
        })
    _emit({"scheduler": sched.value, "r": R, "dt": dt, "sound": sound,
           "flows": report})
    return 0 if sound else 1


def _load_scenario(args) -> ev.DeadlineScenario:
    if args.deadlines_file:
        with open(args.deadlines_file, "r", encoding="utf-8") as fh:
            vals = json.load(fh)
        return ev.DeadlineScenario("custom", tuple(float(x) for x in vals))
    return ev.SCENARIOS[args.scenario]


def _cmd_evaluate(args) -> int:
    scenario = _load_scenario(args)
    stats = ev.run_scenario(scenario, args.trials, args.seed)
    if args.out:
        ev.write_stats_csv(args.out, stats)
    else:
        _emit({"scenario": scenario.name,
               "stats": [vars(s) for s in stats]})
    return 0


def _cmd_heatmap(args) -> int:
    d1, d2, mat = ev.heatmap(
        (args.r1, args.b1), (args.r2, args.b2),
        d1_range=(0.0, args.d_max), d2_range=(0.0, args.d_max),
        grid=(args.grid, args.grid), metric=args.metric)
    ev.write_heatmap_csv(args.out, d1, d2, mat)
    return 0


def _cmd_cdf(args) -> int:
    scenario = _load_scenario(args)
    sp_g, fifo_g = ev.reshaping_gain_cdf(scenario, args.trials, args.seed)
    ev.write_cdf_csv(args.out, sp_g, fifo_g)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bwmin",
        description="Minimum link bandwidth and optimal ingress reshaping "
                    "for deadline-constrained token-bucket flows.")
    sub = p.add_subparsers(dest="command", required=True)
    scheds = [s.value for s in Scheduler]

    sp = sub.add_parser("solve", help="minimum bandwidth for one scheduler")
    sp.add_argument("--input", required=True, help="flow-set JSON file")
    sp.add_argument("--scheduler", required=True, choices=scheds)
    sp.add_argument("--model", choices=["fluid", "packet"], default="fluid")
    sp.set_defaults(func=_cmd_solve)

    dp = sub.add_parser("delay", help="analytic worst-case delays at a "
                                      "given bandwidth")
    dp.add_argument("--input", required=True)
    dp.add_argument("--scheduler", required=True, choices=scheds)
    dp.add_argument("--r", type=float, required=True)
    dp.add_argument("--b-prime", help="comma-separated reshaped bursts")
    dp.set_defaults(func=_cmd_delay)

    cp = sub.add_parser("compare", help="all five minima plus pairwise "
                                        "relative differences")
    cp.add_argument("--input", required=True)
    cp.set_defaults(func=_cmd_compare)

    vp = sub.add_parser("verify", help="check analytic bounds against the "
                                       "fluid-simulation oracle")
    vp.add_argument("--input", required=True)
    vp.add_argument("--scheduler", required=True, choices=scheds)
    vp.add_argument("--r", type=float, help="bandwidth (default: solver "
                                            "minimum)")
    vp.add_argument("--dt", type=float, help="grid step (default: min "
                                             "deadline / 1000)")
    vp.add_argument("--offsets", type=int, default=1,
                    help="offsets per flow for adversarial search (needs "
                         "n <= 3 when > 1)")
    vp.add_argument("--b-prime", help="comma-separated reshaped bursts "
                                      "(default: solver plan)")
    vp.set_defaults(func=_cmd_verify)

    ep = sub.add_parser("evaluate", help="Monte Carlo scenario statistics")
    scen = ep.add_mutually_exclusive_group(required=True)
    scen.add_argument("--scenario", choices=sorted(ev.SCENARIOS))
    scen.add_argument("--deadlines-file",
                      help="JSON list of strictly decreasing deadlines")
    ep.add_argument("--trials", type=int, default=1000)
    ep.add_argument("--seed", type=int, default=0)
    ep.add_argument("--out", help="CSV output path (default: JSON to stdout)")
    ep.set_defaults(func=_cmd_evaluate)

    hp = sub.add_parser("heatmap", help="two-flow relative-difference grid")
    hp.add_argument("--r1", type=float, required=True)
    hp.add_argument("--b1", type=float, required=True)
    hp.add_argument("--r2", type=float, required=True)
    hp.add_argument("--b2", type=float, required=True)
    hp.add_argument("--metric", choices=list(ev.METRICS),
                    default="edf_vs_sp_shaped")
    hp.add_argument("--d-max", type=float, default=4.0)
    hp.add_argument("--grid", type=int, default=100)
    hp.add_argument("--out", required=True)
    hp.set_defaults(func=_cmd_heatmap)

    gp = sub.add_parser("cdf", help="reshaping-gain CDF samples")
    scen = gp.add_mutually_exclusive_group(required=True)
    scen.add_argument("--scenario", choices=sorted(ev.SCENARIOS))
    scen.add_argument("--deadlines-file",
                      help="JSON list of strictly decreasing deadlines")
    gp.add_argument("--trials", type=int, default=1000)
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("--out", required=True)
    gp.set_defaults(func=_cmd_cdf)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BwminError as exc:
        return _fail(type(exc).__name__, str(exc))
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        return _fail(type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
