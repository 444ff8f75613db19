"""Jitted iteration loop for the bucketed multiplicative-update solver.

Everything is written as explicit loops with a fixed summation order (within
a row: ascending column; within a column: ascending row), so the sequential
and parallel compilations of the same source produce bitwise-identical
results: the prange loops only touch disjoint output slots and all floating
point reductions stay in the sequential sections.
"""

import math

import numpy as np
from numba import njit, prange

STATUS_OK = 0
STATUS_OVERFLOW = 1
STATUS_NONMONOTONE = 2

MAX_EXPONENT = 700.0
MONOTONE_SLACK = 1e-9


def _iterate(
    row_ptr,
    row_cols,
    row_vals,
    col_ptr,
    col_rows,
    col_vals,
    x,
    draws,
    mu,
    alpha,
    epsilon,
    bounds,
    strict,
    collect_penalties,
    sum_p,
    f_trace,
    act_trace,
    upd_trace,
):
    m = row_ptr.shape[0] - 1
    n = col_ptr.shape[0] - 1
    total = draws.shape[0]

    act = np.empty(m)
    p = np.empty(m)
    grad = np.empty(n)

    prev_f = math.inf
    mono_count = 0
    first_mono = -1

    for k in range(total):
        for j in prange(m):
            s = 0.0
            for e in range(row_ptr[j], row_ptr[j + 1]):
                s += row_vals[e] * x[row_cols[e]]
            act[j] = s

        bad = -1
        maxact = -math.inf
        psum = 0.0
        for j in range(m):
            if act[j] > maxact:
                maxact = act[j]
            e_j = (act[j] - 1.0) / mu
            if e_j > MAX_EXPONENT:
                bad = j
                break
            pj = math.exp(e_j)
            p[j] = pj
            psum += pj
        if bad >= 0:
            return (STATUS_OVERFLOW, bad, k, mono_count, first_mono, math.nan, math.nan)

        if collect_penalties:
            for j in range(m):
                sum_p[j] += p[j]

        xsum = 0.0
        for i in range(n):
            xsum += x[i]
        f = -xsum + mu * psum
        f_trace[k] = f
        act_trace[k] = maxact
        if f > prev_f + MONOTONE_SLACK:
            mono_count += 1
            if first_mono < 0:
                first_mono = k
            if strict:
                return (STATUS_NONMONOTONE, -1, k, mono_count, first_mono, math.nan, math.nan)
        prev_f = f

        for i in prange(n):
            s = 0.0
            for e in range(col_ptr[i], col_ptr[i + 1]):
                s += col_vals[e] * p[col_rows[e]]
            grad[i] = s - 1.0

        # truncate to the capped component and update the chosen bucket only
        t = draws[k]
        lo = bounds[t]
        hi = bounds[t + 1]
        upd = 0
        for i in prange(n):
            g = grad[i]
            xi = 0.0
            if g > 1.0:
                xi = 1.0
            elif g > epsilon or g < -epsilon:
                xi = g
            if xi != 0.0:
                a = xi if xi > 0.0 else -xi
                if a > lo and a <= hi:
                    x[i] = x[i] * math.exp(-alpha * xi)
                    upd += 1
        upd_trace[k] = upd

    # value and activity at the final point (not part of the penalty sum)
    for j in prange(m):
        s = 0.0
        for e in range(row_ptr[j], row_ptr[j + 1]):
            s += row_vals[e] * x[row_cols[e]]
        act[j] = s
    maxact = -math.inf
    psum = 0.0
    for j in range(m):
        if act[j] > maxact:
            maxact = act[j]
        e_j = (act[j] - 1.0) / mu
        if e_j > MAX_EXPONENT:
            return (STATUS_OVERFLOW, j, total, mono_count, first_mono, math.nan, math.nan)
        psum += math.exp(e_j)
    xsum = 0.0
    for i in range(n):
        xsum += x[i]
    f_final = -xsum + mu * psum
    if f_final > prev_f + MONOTONE_SLACK:
        mono_count += 1
        if first_mono < 0:
            first_mono = total
        if strict:
            return (STATUS_NONMONOTONE, -1, total, mono_count, first_mono, f_final, maxact)
    return (STATUS_OK, -1, -1, mono_count, first_mono, f_final, maxact)


iterate_seq = njit(cache=True)(_iterate)
iterate_par = njit(cache=True, parallel=True)(_iterate)
