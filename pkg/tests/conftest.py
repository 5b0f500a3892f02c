"""Shared helpers for the test suite."""

import numpy as np
import pytest

from bwmin.flows import FlowProfile, new_flow_set


def chained_deadlines(rng, n, d_lo=0.05, d_hi=3.0, gap=(0.01, 2.0)):
    """Strictly decreasing deadlines: the smallest is uniform in
    [d_lo, d_hi], each larger one adds a uniform gap."""
    d = np.empty(n)
    d[-1] = rng.uniform(d_lo, d_hi)
    for i in range(n - 2, -1, -1):
        d[i] = d[i + 1] + rng.uniform(*gap)
    return d


def random_flow_set(rng, n, r_range=(0.1, 10.0), b_range=(0.1, 10.0),
                    d_lo=0.05, d_hi=3.0):
    r = rng.uniform(*r_range, size=n)
    b = rng.uniform(*b_range, size=n)
    d = chained_deadlines(rng, n, d_lo=d_lo, d_hi=d_hi)
    return new_flow_set(
        [FlowProfile(float(r[i]), float(b[i]), float(d[i])) for i in range(n)]
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
