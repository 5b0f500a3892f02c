import numpy as np
import pytest

from bwmin.bounds import fifo_delay_shaped, sp_delay_shaped
from bwmin.errors import InfeasibleReshaping, TooManyFlows
from bwmin.flows import FlowProfile, ReshapingPlan, new_flow_set
from bwmin.solvers import (
    fifo_beats_sp_two_flow,
    min_bw_edf,
    min_bw_edf_reshaped,
    min_bw_fifo,
    min_bw_fifo_shaped,
    min_bw_sp,
    min_bw_sp_shaped,
    two_flow_closed_forms,
)

from conftest import random_flow_set

FS52 = new_flow_set([FlowProfile(1, 5, 1.4), FlowProfile(4, 5, 1.25)])
FS_INTRO = new_flow_set([FlowProfile(1, 45, 10), FlowProfile(1, 5, 1)])


def _random_two_flows(rng):
    r = rng.uniform(0.1, 10, 2)
    b = rng.uniform(0.1, 10, 2)
    d2 = rng.uniform(0.05, 3)
    d1 = d2 + rng.uniform(0.01, 2)
    return FlowProfile(r[0], b[0], d1), FlowProfile(r[1], b[1], d2)


# --- EDF ------------------------------------------------------------------

def test_edf_intro_example():
    # the all-bursts-at-zero pattern forces 45 + 5 + 9 units through by t=10
    res = min_bw_edf(FS_INTRO)
    assert res.r_min == pytest.approx(5.9, abs=1e-12)
    assert res.plan is None
    assert res.delays == (10, 1)


def test_edf_single_flow():
    assert min_bw_edf(new_flow_set([FlowProfile(2, 7, 3)])).r_min == \
        pytest.approx(max(2, 7 / 3))


def test_edf_52_example():
    assert min_bw_edf(FS52).r_min == pytest.approx(53 / 7, abs=1e-12)


def test_edf_reshaped_identity():
    plan = ReshapingPlan.identity(FS_INTRO)
    assert min_bw_edf_reshaped(FS_INTRO, plan) == \
        pytest.approx(min_bw_edf(FS_INTRO).r_min, abs=1e-12)


def test_edf_reshaped_budget_exhausted():
    # removing flow 2's burst entirely needs 5 time units of reshaping,
    # beyond its whole deadline
    with pytest.raises(InfeasibleReshaping):
        min_bw_edf_reshaped(FS_INTRO, ReshapingPlan([45, 0]))


def test_edf_reshaped_never_helps(rng):
    for _ in range(100):
        fs = random_flow_set(rng, int(rng.integers(1, 6)))
        base = min_bw_edf(fs).r_min
        # stay within each flow's delay budget
        bp = fs.b - np.minimum(fs.b, rng.uniform(0, 0.9, len(fs)) * fs.r * fs.d)
        val = min_bw_edf_reshaped(fs, ReshapingPlan(bp))
        assert val >= base - 1e-9 * base


# --- static priority ------------------------------------------------------

def test_sp_52_example():
    assert min_bw_sp(FS52).r_min == pytest.approx(78 / 7, abs=1e-12)
    assert min_bw_sp(FS52).r_min == pytest.approx(11.14, abs=0.01)


def test_sp_single_and_zero_burst():
    assert min_bw_sp(new_flow_set([FlowProfile(2, 7, 3)])).r_min == \
        pytest.approx(max(2, 7 / 3))
    fs = new_flow_set([FlowProfile(1, 0, 2), FlowProfile(2, 0, 1)])
    assert min_bw_sp(fs).r_min == 3


def test_sp_shaped_52_example():
    res = min_bw_sp_shaped(FS52)
    assert res.r_min == pytest.approx(53 / 7, abs=1e-9)
    assert res.plan.b_prime == (5, 0)
    assert res.delays[0] <= 1.4 + 1e-6 and res.delays[1] <= 1.25 + 1e-6


def test_sp_shaped_rate_floor(rng):
    # deadlines so large that the aggregate rate alone suffices
    fs = new_flow_set([FlowProfile(1, 2, 100), FlowProfile(2, 2, 50)])
    res = min_bw_sp_shaped(fs)
    assert res.r_min == pytest.approx(3, abs=1e-9)


def test_sp_equals_edf_iff_rate_bound(rng):
    # the unshaped static-priority minimum matches the EDF floor exactly
    # when that floor is the aggregate rate
    for _ in range(200):
        fs = random_flow_set(rng, int(rng.integers(2, 7)))
        e = min_bw_edf(fs).r_min
        s = min_bw_sp(fs).r_min
        if abs(s - fs.total_rate) <= 1e-12 * s:
            assert e == pytest.approx(s, rel=1e-12)
        elif s > fs.total_rate * (1 + 1e-9):
            assert e < s * (1 + 1e-12)


# --- FIFO -----------------------------------------------------------------

def test_fifo_52_example():
    assert min_bw_fifo(FS52).r_min == pytest.approx(8.0, abs=1e-12)


def test_fifo_single_flow():
    assert min_bw_fifo(new_flow_set([FlowProfile(2, 7, 3)])).r_min == \
        pytest.approx(max(2, 7 / 3))


def test_fifo_shaped_52_example():
    res = min_bw_fifo_shaped(FS52)
    assert res.r_min == pytest.approx(7.8125, abs=1e-9)
    delays = fifo_delay_shaped(FS52, res.plan, res.r_min)
    assert np.all(delays <= FS52.d + 1e-6)


def test_fifo_shaped_rate_floor():
    fs = new_flow_set([FlowProfile(1, 2, 1000), FlowProfile(2, 2, 500)])
    assert min_bw_fifo_shaped(fs).r_min == pytest.approx(3, abs=1e-9)


def test_fifo_shaped_flow_guard():
    flows = [FlowProfile(1, 1, float(20 - i)) for i in range(15)]
    with pytest.raises(TooManyFlows):
        min_bw_fifo_shaped(new_flow_set(flows))


# --- two-flow closed forms -------------------------------------------------

def test_two_flow_52_values():
    bw = two_flow_closed_forms(*FS52.flows)
    assert bw.edf == pytest.approx(53 / 7)
    assert bw.sp == pytest.approx(78 / 7)
    assert bw.sp_shaped == pytest.approx(53 / 7)
    assert bw.fifo == pytest.approx(8.0)
    assert bw.fifo_shaped == pytest.approx(7.8125)


def test_two_flow_intro_value():
    assert two_flow_closed_forms(*FS_INTRO.flows).edf == pytest.approx(5.9)


def test_two_flow_requires_ordering():
    with pytest.raises(ValueError):
        two_flow_closed_forms(FlowProfile(1, 1, 1), FlowProfile(1, 1, 2))


def test_two_flow_identical_flow_limit():
    # as d2 -> d1 at the aggregate burst-drain time, reshaping loses all
    # advantage for static priority while EDF stays at the aggregate rate
    r1, b1 = 4.0, 10.0
    r2, b2 = 10.0, 18.0
    d1 = (b1 + b2) / (r1 + r2)
    for eps in (1e-4, 1e-6, 1e-8):
        bw = two_flow_closed_forms(FlowProfile(r1, b1, d1),
                                   FlowProfile(r2, b2, d1 - eps))
        assert bw.edf == pytest.approx(r1 + r2, rel=1e-3)
        assert bw.sp_shaped == pytest.approx(b1 / d1 + r2, rel=1e-3)


def test_general_solvers_match_closed_forms(rng):
    for _ in range(300):
        f1, f2 = _random_two_flows(rng)
        fs = new_flow_set([f1, f2])
        bw = two_flow_closed_forms(f1, f2)
        assert min_bw_edf(fs).r_min == pytest.approx(bw.edf, rel=1e-9)
        assert min_bw_sp(fs).r_min == pytest.approx(bw.sp, rel=1e-9)
        assert min_bw_sp_shaped(fs).r_min == pytest.approx(bw.sp_shaped, rel=1e-9)
        assert min_bw_fifo(fs).r_min == pytest.approx(bw.fifo, rel=1e-9)
        assert min_bw_fifo_shaped(fs).r_min == pytest.approx(bw.fifo_shaped,
                                                             rel=1e-9)


def test_ordering_chain(rng):
    for _ in range(150):
        fs = random_flow_set(rng, int(rng.integers(2, 9)))
        e = min_bw_edf(fs).r_min
        s = min_bw_sp(fs).r_min
        ss = min_bw_sp_shaped(fs).r_min
        f = min_bw_fifo(fs).r_min
        fss = min_bw_fifo_shaped(fs).r_min
        tol = 1e-9
        assert fs.total_rate <= e * (1 + tol)
        assert e <= ss * (1 + tol) <= s * (1 + tol) ** 2
        assert e <= fss * (1 + tol) <= f * (1 + tol) ** 2


def test_shaped_plans_feasible(rng):
    for _ in range(150):
        fs = random_flow_set(rng, int(rng.integers(2, 9)))
        res = min_bw_sp_shaped(fs)
        assert np.all(sp_delay_shaped(fs, res.plan, res.r_min) <= fs.d + 1e-6)
        assert res.plan.b_prime[0] == fs.b[0]  # lowest priority never reshaped
        res = min_bw_fifo_shaped(fs)
        assert np.all(fifo_delay_shaped(fs, res.plan, res.r_min) <= fs.d + 1e-6)


def test_homogeneity(rng):
    for _ in range(40):
        fs = random_flow_set(rng, int(rng.integers(1, 7)))
        c = rng.uniform(0.3, 5.0)
        scaled = new_flow_set(
            [FlowProfile(f.r * c, f.b * c, f.d) for f in fs.flows])
        for solver in (min_bw_edf, min_bw_sp, min_bw_sp_shaped, min_bw_fifo,
                       min_bw_fifo_shaped):
            assert solver(scaled).r_min == pytest.approx(
                c * solver(fs).r_min, rel=1e-9)


def test_all_zero_bursts_all_equal():
    fs = new_flow_set([FlowProfile(1, 0, 3), FlowProfile(2, 0, 1)])
    for solver in (min_bw_edf, min_bw_sp, min_bw_sp_shaped, min_bw_fifo,
                   min_bw_fifo_shaped):
        assert solver(fs).r_min == pytest.approx(3, abs=1e-9)


def test_single_flow_all_equal():
    fs = new_flow_set([FlowProfile(2, 7, 3)])
    for solver in (min_bw_edf, min_bw_sp, min_bw_sp_shaped, min_bw_fifo,
                   min_bw_fifo_shaped):
        assert solver(fs).r_min == pytest.approx(max(2, 7 / 3), abs=1e-9)


# --- FIFO vs static priority predicate -------------------------------------

def test_predicate_empty_intervals():
    # d1 at or beyond either burst-drain time leaves no window
    assert not fifo_beats_sp_two_flow(FlowProfile(4, 10, 2.5),
                                      FlowProfile(10, 18, 2.0))
    assert not fifo_beats_sp_two_flow(FlowProfile(4, 10, 1.7),
                                      FlowProfile(10, 18, 1.6))


def test_predicate_inside_window():
    f1 = FlowProfile(4, 10, 2.2)
    f2 = FlowProfile(10, 18, 2.0)
    assert fifo_beats_sp_two_flow(f1, f2)
    bw = two_flow_closed_forms(f1, f2)
    assert bw.sp_shaped > bw.fifo_shaped


def test_predicate_matches_sign(rng):
    for _ in range(400):
        d1 = rng.uniform(0.2, 3.5)
        d2 = rng.uniform(0.05, d1 * 0.99)
        f1 = FlowProfile(4, 10, d1)
        f2 = FlowProfile(10, 18, d2)
        bw = two_flow_closed_forms(f1, f2)
        diff = bw.sp_shaped - bw.fifo_shaped
        if abs(diff) <= 1e-9:
            assert not fifo_beats_sp_two_flow(f1, f2)
        else:
            assert fifo_beats_sp_two_flow(f1, f2) == (diff > 0)


def test_sp_feasibility_margin_matches_full_set(rng):
    # the O(n) running minimum must agree with materializing the whole
    # recursively built constraint set (2^n - 1 elements)
    from bwmin.solvers import _sp_feasibility_margin

    def full_set_min(fs, R):
        sfx = fs.suffix_rates
        sets = [fs.d[0] * (R - sfx[1]) - fs.b[0]]
        for i in range(1, len(fs)):
            gap = R - sfx[i + 1]
            own = fs.d[i] * gap - fs.b[i]
            slack = fs.b[i] - fs.d[i] * fs.r[i]
            scale = (fs.r[i] + gap) / gap
            sets = sets + [own] + [(s - slack) / scale for s in sets]
        assert len(sets) == 2 ** len(fs) - 1
        return min(sets)

    for _ in range(40):
        fs = random_flow_set(rng, int(rng.integers(1, 7)))
        R = fs.total_rate * rng.uniform(1.0, 3.0)
        assert _sp_feasibility_margin(fs, R) == \
            pytest.approx(full_set_min(fs, R), rel=1e-9, abs=1e-12)


def test_sp_shaped_flow_guard():
    flows = [FlowProfile(1, 1, float(40 - i)) for i in range(31)]
    with pytest.raises(TooManyFlows):
        min_bw_sp_shaped(new_flow_set(flows))


def test_feasibility_predicates_monotone_in_bandwidth(rng):
    # once feasible, staying feasible at any higher bandwidth is what makes
    # the binary searches sound; probe both predicates along brackets
    from bwmin import kernels
    from bwmin.solvers import _sp_feasibility_margin

    for _ in range(60):
        fs = random_flow_set(rng, int(rng.integers(2, 8)))
        r, b, d = fs.r, fs.b, fs.d
        lo = fs.total_rate
        hi = max(min_bw_sp(fs).r_min, min_bw_fifo(fs).r_min) * 1.5
        probes = np.linspace(lo, hi, 12)
        sp_feas = [_sp_feasibility_margin(fs, R) >= 0 for R in probes]
        fifo_feas = [
            kernels.fifo_total_burst_lower(r, b, d, R)
            <= kernels.fifo_total_burst_upper(r, b, d, R)
            for R in probes
        ]
        for feas in (sp_feas, fifo_feas):
            assert sorted(feas) == feas  # False..False,True..True
