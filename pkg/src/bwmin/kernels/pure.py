"""Pure-Python implementations of the hot numerical kernels.

These are the reference semantics for ``bwmin.kernels._core`` (the compiled
backend); both must produce the same results.  The enumeration kernels are
vectorized with numpy; the fluid simulator is a plain per-step loop and is
therefore slow; it exists as a correctness fallback, not a fast path.
"""

from __future__ import annotations

import numpy as np

FIFO = 0
STATIC_PRIORITY = 1
EDF = 2

BACKEND = "pure"


def _split_terms(r, b, d, R):
    """Per-flow contributions for the two ways a flow can enter the
    FIFO feasibility split: paced by the link (at rate R) or paced by the
    aggregate input rate."""
    R1 = r.sum()
    slack = b - d * r
    num_link = R * slack / (R + r)
    den_link = r / (R + r)
    num_rate = b - r * d * R / R1
    den_rate = r / R1
    return num_link, den_link, num_rate, den_rate


def fifo_total_burst_lower(r, b, d, R):
    """Smallest total reshaped burst volume any feasible FIFO plan must keep
    at bandwidth R.

    Maximizes a ratio over all assignments of flows to the two split classes
    (each flow may also be left out); the assignment placing every flow in
    the rate-paced class is excluded (its denominator is identically zero).
    Cost is 3**n ratio evaluations.
    """
    n = len(r)
    a, e, c, f = _split_terms(r, b, d, R)
    num = np.zeros(1)
    den = np.ones(1)
    for i in range(n):
        num = np.concatenate([num, num + a[i], num + c[i]])
        den = np.concatenate([den, den - e[i], den - f[i]])
    # the all-rate-paced assignment is the last element by construction
    num = num[:-1]
    den = den[:-1]
    return float(np.max(num / den))


def fifo_total_burst_upper(r, b, d, R):
    """Largest total reshaped burst volume compatible with every deadline
    under FIFO at bandwidth R.

    Minimizes over the aggregate burst, the smallest-deadline drain bound,
    and ratio terms built from nonempty split assignments over each prefix
    of the deadline-ordered flows.
    """
    n = len(r)
    a, e, c, f = _split_terms(r, b, d, R)
    bhat = np.cumsum(b)
    best = min(float(bhat[-1]), float(R * d[-1]))
    num = np.zeros(1)
    den = np.zeros(1)
    for i in range(n - 1):
        num = np.concatenate([num, num + a[i], num + c[i]])
        den = np.concatenate([den, den + e[i], den + f[i]])
        mask = den > 0  # nonempty assignments only
        if mask.any():
            vals = (bhat[i] - num[mask]) / den[mask]
            best = min(best, float(vals.min()))
    return best


def simulate_fluid(r, b, d, b_prime, offsets, R, dt, n_steps, n_measure,
                   scheduler, with_curves=False):
    """Discretized cumulative-curve simulation of shapers plus one link.

    Flow i emits its full burst at ``offsets[i]`` and then sends at rate
    ``r[i]`` forever.  If ``b_prime`` is not None each flow first traverses a
    greedy token-bucket reshaper (burst ``b_prime[i]``, rate ``r[i]``).  The
    link serves R*dt per step according to ``scheduler`` (FIFO aggregate
    order, static priority with the last flow highest, or EDF on absolute
    deadlines ``arrival + d[i]``).

    Returns ``(delays, resolved)``: the per-flow maximum virtual delay over
    arrival instants in the first ``n_measure`` steps, and False if some
    measured arrival had not departed by the end of the grid.  With
    ``with_curves`` (debug aid, pure backend only) the cumulative arrival and
    departure matrices are appended to the return value.
    """
    n = len(r)
    t = np.arange(n_steps) * dt
    shift = t[None, :] - np.asarray(offsets)[:, None]
    A = np.where(shift >= -1e-12 * dt, b[:, None] + r[:, None] * shift, 0.0)

    shaped = b_prime is not None
    dep = np.zeros((n, n_steps))
    tol = 1e-12 * (float(np.sum(b)) + R * n_steps * dt + 1.0)

    tokens = b_prime.copy() if shaped else None
    backlog = np.zeros(n)

    if scheduler == STATIC_PRIORITY:
        queue = np.zeros(n)
    elif scheduler == FIFO:
        cohort = np.zeros((n, n_steps))
        cohort_tot = np.zeros(n_steps)
        p_head = 0
    else:  # EDF: serve pre-shaper arrival cohorts, gated by shaper output
        arr_rem = np.zeros((n, n_steps))
        head = np.zeros(n, dtype=int)
        released = np.zeros(n)
        served = np.zeros(n)

    for k in range(n_steps):
        # arrivals during this step (step 0 carries the initial bursts)
        arr = A[:, k] - (A[:, k - 1] if k > 0 else 0.0)

        if scheduler == EDF:
            arr_rem[:, k] = arr

        # ingress shapers: refill, release, cap leftover tokens at b'
        # (step 0 has zero elapsed time, so no refill)
        if shaped:
            rel = np.empty(n)
            for i in range(n):
                avail = tokens[i] + (r[i] * dt if k > 0 else 0.0)
                out = min(backlog[i] + arr[i], avail)
                tokens[i] = min(b_prime[i], avail - out)
                backlog[i] += arr[i] - out
                rel[i] = out
        else:
            rel = arr

        # link service for this step
        rem = R * dt if k > 0 else 0.0

        if scheduler == STATIC_PRIORITY:
            queue += rel
            prev = dep[:, k - 1] if k > 0 else np.zeros(n)
            dep[:, k] = prev
            for i in range(n - 1, -1, -1):
                s = min(queue[i], rem)
                queue[i] -= s
                rem -= s
                dep[i, k] += s
                if rem <= tol:
                    break
        elif scheduler == FIFO:
            cohort[:, k] = rel
            cohort_tot[k] = float(sum(rel))  # sequential, matches compiled
            dep[:, k] = dep[:, k - 1] if k > 0 else 0.0
            while rem > tol and p_head <= k:
                tot = cohort_tot[p_head]
                if tot <= tol:
                    p_head += 1
                    continue
                take = min(tot, rem)
                frac = take / tot
                dep[:, k] += cohort[:, p_head] * frac
                cohort[:, p_head] -= cohort[:, p_head] * frac
                cohort_tot[p_head] -= take
                rem -= take
                if cohort_tot[p_head] <= tol:
                    p_head += 1
        else:  # EDF
            released += rel
            dep[:, k] = dep[:, k - 1] if k > 0 else 0.0
            while rem > tol:
                best = -1
                best_dl = np.inf
                for i in range(n):
                    while head[i] <= k and arr_rem[i, head[i]] <= tol:
                        head[i] += 1
                    if head[i] > k:
                        continue
                    if released[i] - served[i] <= tol:
                        continue
                    dl = head[i] * dt + d[i]
                    if dl < best_dl:
                        best_dl = dl
                        best = i
                if best < 0:
                    break
                amt = min(arr_rem[best, head[best]],
                          released[best] - served[best], rem)
                arr_rem[best, head[best]] -= amt
                served[best] += amt
                dep[best, k] += amt
                rem -= amt

    # per-flow maximum virtual delay over the measured window
    delays = np.zeros(n)
    resolved = True
    meas_tol = 1e-9 * (1.0 + float(np.max(A)))
    for i in range(n):
        m = 0
        for k in range(n_measure):
            if A[i, k] <= 0.0:
                continue
            target = A[i, k] - meas_tol
            while m < n_steps and dep[i, m] < target:
                m += 1
            if m == n_steps:
                resolved = False
                break
            if m > k:
                delays[i] = max(delays[i], (m - k) * dt)
    if with_curves:
        return delays, resolved, A, dep
    return delays, resolved
