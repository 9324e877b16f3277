"""Compiled adaptive explicit Runge-Kutta segment driver.

One call integrates x' = A x + b over a whole time segment with inline
CSR products, so per-step cost stays proportional to the stored-entry
count with no interpreter overhead.  The control logic mirrors
:mod:`dcnetsim.solvers.controller` and the step arithmetic mirrors
:func:`dcnetsim.solvers.erk.erk_step`; equivalence of the two paths is
pinned by tests that replay kernel trajectories through the reference
step.

The kernel also handles in-flight offset swaps (load events applied at
the first accepted step boundary at or after the event time) so
continuous-mode runs stay inside compiled code.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


__all__ = ["HAVE_NUMBA", "run_erk_segment"]

STATUS_OK = 0
STATUS_STALLED = 1


@njit(cache=True)
def run_erk_segment(
    indptr,
    indices,
    data,
    b_start,
    ev_times,
    ev_offsets,
    x0,
    t0,
    t_end,
    span,
    h_init,
    h_max,
    rtol,
    atol,
    a_tab,
    b_tab,
    e5,
    e3,
    use_combined,
    k_exp,
    stride,
):
    """Integrate one segment; returns trace, samples, and counters.

    ``h_init <= 0`` requests the automatic first step.  ``stride``
    samples every stride-th accepted state (0 keeps endpoints and event
    boundaries only).  ``ev_times``/``ev_offsets`` hold offset vectors
    to swap in after the first accepted step reaching each time; pass
    empty arrays for none.  Status 1 means the controller stalled
    (step collapsed below 1e-14 of ``span``).
    """
    dim = x0.shape[0]
    s = b_tab.shape[0]

    b = b_start.copy()
    x = x0.copy()
    stages = np.zeros((s + 1, dim))
    y_stage = np.empty(dim)
    y_new = np.empty(dim)

    n_rhs = 0
    n_acc = 0
    n_rej = 0

    # derivative at the segment start
    for i in range(dim):
        acc = b[i]
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        stages[0, i] = acc
    n_rhs += 1

    interval = t_end - t0
    h = h_init
    if h <= 0.0:
        # two-probe automatic first step
        d0s = 0.0
        d1s = 0.0
        for i in range(dim):
            sc = atol + rtol * abs(x[i])
            d0s += (x[i] / sc) ** 2
            d1s += (stages[0, i] / sc) ** 2
        d0 = (d0s / dim) ** 0.5
        d1 = (d1s / dim) ** 0.5
        if d0 < 1e-5 or d1 < 1e-5:
            h0 = 1e-6
        else:
            h0 = 0.01 * d0 / d1
        if h0 > interval:
            h0 = interval
        for i in range(dim):
            y_stage[i] = x[i] + h0 * stages[0, i]
        d2s = 0.0
        for i in range(dim):
            acc = b[i]
            for p in range(indptr[i], indptr[i + 1]):
                acc += data[p] * y_stage[indices[p]]
            sc = atol + rtol * abs(x[i])
            d2s += ((acc - stages[0, i]) / sc) ** 2
        n_rhs += 1
        d2 = (d2s / dim) ** 0.5 / h0
        if d1 <= 1e-15 and d2 <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** (1.0 / k_exp)
        h = min(100.0 * h0, h1, interval, h_max)

    # trace buffers, one row per attempt
    cap_tr = 256
    tr_t = np.empty(cap_tr)
    tr_h = np.empty(cap_tr)
    tr_acc = np.empty(cap_tr, np.uint8)
    tr_err = np.empty(cap_tr)
    tr_rhs = np.empty(cap_tr, np.int64)
    n_tr = 0

    # sample buffers
    cap_s = 64
    s_t = np.empty(cap_s)
    s_x = np.empty((cap_s, dim))
    s_t[0] = t0
    for i in range(dim):
        s_x[0, i] = x[i]
    n_s = 1

    t = t0
    h_prev = -1.0
    err_prev = -1.0
    rejected_since = False
    status = STATUS_OK
    h_floor = 1e-14 * span
    n_ev = ev_times.shape[0]
    next_ev = 0

    while t < t_end:
        if h > h_max:
            h = h_max
        if h < h_floor:
            status = STATUS_STALLED
            break
        h_step = h
        clipped = False
        if t + h_step >= t_end:
            h_step = t_end - t
            clipped = True

        # stages 1..s-1 (stage 0 carried over)
        for st in range(1, s):
            for i in range(dim):
                y_stage[i] = x[i]
            for j in range(st):
                aij = a_tab[st, j] * h_step
                if aij != 0.0:
                    for i in range(dim):
                        y_stage[i] += aij * stages[j, i]
            for i in range(dim):
                acc = b[i]
                for p in range(indptr[i], indptr[i + 1]):
                    acc += data[p] * y_stage[indices[p]]
                stages[st, i] = acc
        n_rhs += s - 1

        # propagating solution and its derivative
        for i in range(dim):
            y_new[i] = x[i]
        for j in range(s):
            bj = b_tab[j] * h_step
            if bj != 0.0:
                for i in range(dim):
                    y_new[i] += bj * stages[j, i]
        for i in range(dim):
            acc = b[i]
            for p in range(indptr[i], indptr[i + 1]):
                acc += data[p] * y_new[indices[p]]
            stages[s, i] = acc
        n_rhs += 1

        # error norm
        if use_combined == 1:
            a5 = 0.0
            a3 = 0.0
            for i in range(dim):
                sc = atol + rtol * max(abs(x[i]), abs(y_new[i]))
                e5s = 0.0
                e3s = 0.0
                for j in range(s + 1):
                    e5s += e5[j] * stages[j, i]
                    e3s += e3[j] * stages[j, i]
                a5 += (e5s / sc) ** 2
                a3 += (e3s / sc) ** 2
            denom = a5 + 0.01 * a3
            if denom > 0.0:
                err = h_step * a5 / (denom * dim) ** 0.5
            else:
                err = 0.0
        else:
            es = 0.0
            for i in range(dim):
                sc = atol + rtol * max(abs(x[i]), abs(y_new[i]))
                ee = 0.0
                for j in range(s + 1):
                    if e5[j] != 0.0:
                        ee += e5[j] * stages[j, i]
                es += (h_step * ee / sc) ** 2
            err = (es / dim) ** 0.5
        if not np.isfinite(err):
            err = 1e10

        accepted = err <= 1.0

        # trace row
        if n_tr == cap_tr:
            cap_tr *= 2
            nt = np.empty(cap_tr)
            nh = np.empty(cap_tr)
            na = np.empty(cap_tr, np.uint8)
            ne = np.empty(cap_tr)
            nr = np.empty(cap_tr, np.int64)
            for q in range(n_tr):
                nt[q] = tr_t[q]
                nh[q] = tr_h[q]
                na[q] = tr_acc[q]
                ne[q] = tr_err[q]
                nr[q] = tr_rhs[q]
            tr_t, tr_h, tr_acc, tr_err, tr_rhs = nt, nh, na, ne, nr
        tr_t[n_tr] = t
        tr_h[n_tr] = h_step
        tr_acc[n_tr] = 1 if accepted else 0
        tr_err[n_tr] = err
        tr_rhs[n_tr] = n_rhs
        n_tr += 1

        # controller (shared contract: safety 0.9, clamps [0.2, 10],
        # predictive memory term, no growth right after a rejection)
        if err == 0.0:
            factor = 10.0
        else:
            fac = err ** (-1.0 / k_exp)
            if err_prev > 0.0 and h_prev > 0.0:
                predictive = (h_step / h_prev) * (err_prev / err) ** (1.0 / k_exp)
                if predictive < 1.0:
                    fac *= predictive
            factor = 0.9 * fac
            if factor > 10.0:
                factor = 10.0
            if factor < 0.2:
                factor = 0.2

        if accepted:
            if rejected_since and factor > 1.0:
                factor = 1.0
            rejected_since = False
            h_prev = h_step
            err_prev = err
            n_acc += 1
            t = t_end if clipped else t + h_step
            for i in range(dim):
                x[i] = y_new[i]
                stages[0, i] = stages[s, i]
            h = h_step * factor
            if h > h_max:
                h = h_max

            # offset swaps at accepted boundaries
            swapped = False
            while next_ev < n_ev and t >= ev_times[next_ev]:
                for i in range(dim):
                    b[i] = ev_offsets[next_ev, i]
                next_ev += 1
                swapped = True
            if swapped:
                # cached derivative is stale under the new offset
                for i in range(dim):
                    acc = b[i]
                    for p in range(indptr[i], indptr[i + 1]):
                        acc += data[p] * x[indices[p]]
                    stages[0, i] = acc
                n_rhs += 1

            take_sample = (stride > 0 and n_acc % stride == 0) or swapped
            if take_sample and s_t[n_s - 1] != t:
                if n_s == cap_s:
                    cap_s *= 2
                    nst = np.empty(cap_s)
                    nsx = np.empty((cap_s, dim))
                    for q in range(n_s):
                        nst[q] = s_t[q]
                        for i in range(dim):
                            nsx[q, i] = s_x[q, i]
                    s_t, s_x = nst, nsx
                s_t[n_s] = t
                for i in range(dim):
                    s_x[n_s, i] = x[i]
                n_s += 1
        else:
            n_rej += 1
            rejected_since = True
            if factor > 1.0:
                factor = 1.0
            h = h_step * factor

    # always close with the final state
    if s_t[n_s - 1] != t:
        if n_s == cap_s:
            cap_s += 1
            nst = np.empty(cap_s)
            nsx = np.empty((cap_s, dim))
            for q in range(n_s):
                nst[q] = s_t[q]
                for i in range(dim):
                    nsx[q, i] = s_x[q, i]
            s_t, s_x = nst, nsx
        s_t[n_s] = t
        for i in range(dim):
            s_x[n_s, i] = x[i]
        n_s += 1

    return (
        status,
        t,
        x,
        s_t[:n_s].copy(),
        s_x[:n_s].copy(),
        tr_t[:n_tr].copy(),
        tr_h[:n_tr].copy(),
        tr_acc[:n_tr].copy(),
        tr_err[:n_tr].copy(),
        tr_rhs[:n_tr].copy(),
        n_rhs,
        n_acc,
        n_rej,
    )
