# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: FIFO feasibility-envelope enumeration and the fluid
simulator.

Semantics are kept in lockstep with ``bwmin.kernels.pure``; accumulation
orders match so results agree bitwise.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

BACKEND = "compiled"

cdef enum:
    K_FIFO = 0
    K_SP = 1
    K_EDF = 2

FIFO = K_FIFO
STATIC_PRIORITY = K_SP
EDF = K_EDF

DEF MAX_FLOWS = 32


cdef double _xf_dfs(int i, int n, double num, double den, bint all_rate,
                    double* a, double* e, double* c, double* f) noexcept nogil:
    cdef double best, v
    if i == n:
        if all_rate:  # the all-rate-paced split has a zero denominator
            return -INFINITY
        return num / den
    best = _xf_dfs(i + 1, n, num, den, False, a, e, c, f)
    v = _xf_dfs(i + 1, n, num + a[i], den - e[i], False, a, e, c, f)
    if v > best:
        best = v
    v = _xf_dfs(i + 1, n, num + c[i], den - f[i], all_rate, a, e, c, f)
    if v > best:
        best = v
    return best


cdef double _yf_dfs(int depth, int max_depth, double num, double den,
                    bint empty, double* a, double* e, double* c, double* f,
                    double* bhat) noexcept nogil:
    cdef double best = INFINITY, v
    if depth > 0 and not empty:
        best = (bhat[depth - 1] - num) / den
    if depth == max_depth:
        return best
    v = _yf_dfs(depth + 1, max_depth, num, den, empty, a, e, c, f, bhat)
    if v < best:
        best = v
    v = _yf_dfs(depth + 1, max_depth, num + a[depth], den + e[depth], False,
                a, e, c, f, bhat)
    if v < best:
        best = v
    v = _yf_dfs(depth + 1, max_depth, num + c[depth], den + f[depth], False,
                a, e, c, f, bhat)
    if v < best:
        best = v
    return best


cdef void _fill_split_terms(int n, double R, double R1,
                            const double[:] r, const double[:] b,
                            const double[:] d,
                            double* a, double* e, double* c,
                            double* f) noexcept nogil:
    # R1 is the numpy pairwise sum of r, passed in so both backends agree
    cdef int i
    for i in range(n):
        a[i] = R * (b[i] - d[i] * r[i]) / (R + r[i])
        e[i] = r[i] / (R + r[i])
        c[i] = b[i] - r[i] * d[i] * R / R1
        f[i] = r[i] / R1


def fifo_total_burst_lower(r_in, b_in, d_in, double R):
    """Smallest total reshaped burst volume any feasible FIFO plan must keep
    at bandwidth R (3**n split enumeration)."""
    cdef const double[:] r = np.ascontiguousarray(r_in, dtype=np.float64)
    cdef const double[:] b = np.ascontiguousarray(b_in, dtype=np.float64)
    cdef const double[:] d = np.ascontiguousarray(d_in, dtype=np.float64)
    cdef int n = r.shape[0]
    if n > MAX_FLOWS:
        raise ValueError(f"kernel supports at most {MAX_FLOWS} flows")
    cdef double a[MAX_FLOWS]
    cdef double e[MAX_FLOWS]
    cdef double c[MAX_FLOWS]
    cdef double f[MAX_FLOWS]
    cdef double R1 = float(np.sum(r))
    cdef double out
    with nogil:
        _fill_split_terms(n, R, R1, r, b, d, a, e, c, f)
        out = _xf_dfs(0, n, 0.0, 1.0, True, a, e, c, f)
    return out


def fifo_total_burst_upper(r_in, b_in, d_in, double R):
    """Largest total reshaped burst volume compatible with every deadline
    under FIFO at bandwidth R."""
    cdef const double[:] r = np.ascontiguousarray(r_in, dtype=np.float64)
    cdef const double[:] b = np.ascontiguousarray(b_in, dtype=np.float64)
    cdef const double[:] d = np.ascontiguousarray(d_in, dtype=np.float64)
    cdef int n = r.shape[0]
    if n > MAX_FLOWS:
        raise ValueError(f"kernel supports at most {MAX_FLOWS} flows")
    cdef double a[MAX_FLOWS]
    cdef double e[MAX_FLOWS]
    cdef double c[MAX_FLOWS]
    cdef double f[MAX_FLOWS]
    cdef double bhat[MAX_FLOWS]
    cdef double R1 = float(np.sum(r))
    cdef double best, v
    cdef int i
    with nogil:
        _fill_split_terms(n, R, R1, r, b, d, a, e, c, f)
        bhat[0] = b[0]
        for i in range(1, n):
            bhat[i] = bhat[i - 1] + b[i]
        best = bhat[n - 1]
        v = R * d[n - 1]
        if v < best:
            best = v
        v = _yf_dfs(0, n - 1, 0.0, 0.0, True, a, e, c, f, bhat)
        if v < best:
            best = v
    return best


cdef int _sim_loop(int n, int n_steps, bint shaped, int scheduler,
                   double R, double dt, double tol,
                   double[:] r, double[:] d, double[:] b_prime,
                   double[:, ::1] A, double[:, ::1] dep,
                   double[:, ::1] work,  # FIFO cohorts / EDF arrival cohorts
                   double[:] work_tot,   # FIFO cohort totals
                   double[:] tokens, double[:] backlog, double[:] rel,
                   double[:] queue, double[:] released, double[:] served,
                   long[:] head) noexcept nogil:
    cdef int k, i, best, p_head = 0
    cdef double arr, avail, out, rem, s, tot, take, frac, best_dl, dl, amt
    for k in range(n_steps):
        # arrivals during this step (step 0 carries the initial bursts)
        for i in range(n):
            arr = A[i, k] - (A[i, k - 1] if k > 0 else 0.0)
            if scheduler == K_EDF:
                work[i, k] = arr
            if shaped:
                # step 0 has zero elapsed time, so no refill
                avail = tokens[i] + (r[i] * dt if k > 0 else 0.0)
                out = backlog[i] + arr
                if out > avail:
                    out = avail
                tokens[i] = avail - out
                if tokens[i] > b_prime[i]:
                    tokens[i] = b_prime[i]
                backlog[i] += arr - out
                rel[i] = out
            else:
                rel[i] = arr

        rem = R * dt if k > 0 else 0.0

        if scheduler == K_SP:
            for i in range(n):
                queue[i] += rel[i]
                dep[i, k] = dep[i, k - 1] if k > 0 else 0.0
            for i in range(n - 1, -1, -1):
                s = queue[i]
                if s > rem:
                    s = rem
                queue[i] -= s
                rem -= s
                dep[i, k] += s
                if rem <= tol:
                    break
        elif scheduler == K_FIFO:
            tot = 0.0
            for i in range(n):
                work[i, k] = rel[i]
                tot += rel[i]
                dep[i, k] = dep[i, k - 1] if k > 0 else 0.0
            work_tot[k] = tot
            while rem > tol and p_head <= k:
                tot = work_tot[p_head]
                if tot <= tol:
                    p_head += 1
                    continue
                take = tot
                if take > rem:
                    take = rem
                frac = take / tot
                for i in range(n):
                    s = work[i, p_head] * frac
                    dep[i, k] += s
                    work[i, p_head] -= s
                work_tot[p_head] -= take
                rem -= take
                if work_tot[p_head] <= tol:
                    p_head += 1
        else:  # EDF
            for i in range(n):
                released[i] += rel[i]
                dep[i, k] = dep[i, k - 1] if k > 0 else 0.0
            while rem > tol:
                best = -1
                best_dl = INFINITY
                for i in range(n):
                    while head[i] <= k and work[i, head[i]] <= tol:
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
                amt = work[best, head[best]]
                if released[best] - served[best] < amt:
                    amt = released[best] - served[best]
                if rem < amt:
                    amt = rem
                work[best, head[best]] -= amt
                served[best] += amt
                dep[best, k] += amt
                rem -= amt
    return 0


def simulate_fluid(r_in, b_in, d_in, bp_in, off_in, double R, double dt,
                   int n_steps, int n_measure, int scheduler):
    """Discretized cumulative-curve simulation; see the pure backend for the
    full contract.  Returns (per-flow max virtual delay, resolved flag)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] r = \
        np.array(r_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = \
        np.array(b_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d = \
        np.array(d_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] offsets = \
        np.array(off_in, dtype=np.float64)
    cdef int n = r.shape[0]
    cdef bint shaped = bp_in is not None
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bp
    if shaped:
        bp = np.ascontiguousarray(bp_in, dtype=np.float64).copy()
    else:
        bp = np.zeros(n)

    t = np.arange(n_steps) * dt
    shift = t[None, :] - offsets[:, None]
    A_np = np.where(shift >= -1e-12 * dt, b[:, None] + r[:, None] * shift, 0.0)
    A_np = np.ascontiguousarray(A_np)

    cdef double tol = 1e-12 * (float(np.sum(b)) + R * n_steps * dt + 1.0)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] dep = np.zeros((n, n_steps))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] work = np.zeros((n, n_steps))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] work_tot = np.zeros(n_steps)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tokens = bp.copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] backlog = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rel = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] queue = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] released = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] served = np.zeros(n)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] head = np.zeros(n, dtype=np.int64)

    cdef double[:, ::1] A = A_np
    _sim_loop(n, n_steps, shaped, scheduler, R, dt, tol,
              r, d, bp, A, dep, work, work_tot,
              tokens, backlog, rel, queue, released, served, head)

    # per-flow maximum virtual delay over the measured window
    cdef cnp.ndarray[cnp.float64_t, ndim=1] delays = np.zeros(n)
    cdef double meas_tol = 1e-9 * (1.0 + float(np.max(A_np)))
    cdef bint resolved = True
    cdef int i, k, m
    cdef double target
    cdef double[:, ::1] dep_v = dep
    with nogil:
        for i in range(n):
            m = 0
            for k in range(n_measure):
                if A[i, k] <= 0.0:
                    continue
                target = A[i, k] - meas_tol
                while m < n_steps and dep_v[i, m] < target:
                    m += 1
                if m == n_steps:
                    resolved = False
                    break
                if m > k and (m - k) * dt > delays[i]:
                    delays[i] = (m - k) * dt
    return delays, bool(resolved)
