# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot simulation kernels.

Contracts are identical to ``sleepguard._kernels._pure``; both are exercised
by the same test suite and compared by ``benchmarks/bench_kernels.py``.
"""

import numpy as np

cimport numpy as cnp

IMPLEMENTATION = "compiled"


def build_adjacency(cnp.float64_t[:] xs, cnp.float64_t[:] ys, double range_m):
    cdef Py_ssize_t n = xs.shape[0]
    cdef cnp.ndarray indptr_arr = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[:] indptr = indptr_arr
    cdef double r2 = range_m * range_m
    cdef Py_ssize_t i, j
    cdef double dx, dy
    cdef cnp.int64_t count = 0
    if n == 0:
        return indptr_arr, np.zeros(0, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i != j:
                dx = xs[i] - xs[j]
                dy = ys[i] - ys[j]
                if dx * dx + dy * dy <= r2:
                    count += 1
        indptr[i + 1] = count
    cdef cnp.ndarray indices_arr = np.zeros(count, dtype=np.int64)
    cdef cnp.int64_t[:] indices = indices_arr
    cdef cnp.int64_t pos = 0
    for i in range(n):
        for j in range(n):
            if i != j:
                dx = xs[i] - xs[j]
                dy = ys[i] - ys[j]
                if dx * dx + dy * dy <= r2:
                    indices[pos] = j
                    pos += 1
    return indptr_arr, indices_arr


def elect_heads(cnp.float64_t[:] score, cnp.uint8_t[:] eligible,
                cnp.int64_t[:] indptr, cnp.int64_t[:] indices):
    cdef Py_ssize_t n = score.shape[0]
    cdef cnp.ndarray heads_arr = np.zeros(n, dtype=bool)
    cdef cnp.uint8_t[:] heads = heads_arr.view(np.uint8)
    cdef Py_ssize_t i, k
    cdef cnp.int64_t j
    cdef bint maximal
    for i in range(n):
        if not eligible[i]:
            continue
        maximal = True
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if not eligible[j]:
                continue
            if score[j] > score[i] or (score[j] == score[i] and j < i):
                maximal = False
                break
        heads[i] = maximal
    return heads_arr


def assign_members(cnp.float64_t[:] xs, cnp.float64_t[:] ys,
                   cnp.uint8_t[:] eligible, cnp.uint8_t[:] head_mask,
                   double range_m):
    cdef Py_ssize_t n = xs.shape[0]
    cdef cnp.ndarray member_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[:] member_of = member_arr
    cdef cnp.ndarray head_ids_arr = np.flatnonzero(
        np.asarray(head_mask, dtype=bool) & np.asarray(eligible, dtype=bool)
    ).astype(np.int64)
    cdef cnp.int64_t[:] head_ids = head_ids_arr
    cdef Py_ssize_t n_heads = head_ids.shape[0]
    cdef double r2 = range_m * range_m
    cdef Py_ssize_t i, h
    cdef cnp.int64_t best, hid
    cdef double dx, dy, d2, best_d2
    for i in range(n):
        if not eligible[i]:
            continue
        if head_mask[i]:
            member_of[i] = i
            continue
        best = -1
        best_d2 = 0.0
        for h in range(n_heads):
            hid = head_ids[h]
            dx = xs[i] - xs[hid]
            dy = ys[i] - ys[hid]
            d2 = dx * dx + dy * dy
            # strict < keeps the first (lowest-id) head on distance ties
            if d2 <= r2 and (best == -1 or d2 < best_d2):
                best_d2 = d2
                best = hid
        member_of[i] = best
    return member_arr


def accrue_spans(cnp.float64_t[:] t0s, double t1,
                 double cycle_start, double cycle_end, double awake_end,
                 cnp.float64_t[:] held_until, cnp.float64_t[:] sleep_len,
                 double idle_w, double sleep_w,
                 cnp.float64_t[:] residual, cnp.float64_t[:] led_idle,
                 cnp.float64_t[:] led_sleep, cnp.uint8_t[:] active):
    cdef Py_ssize_t n = t0s.shape[0]
    cdef list deaths = []
    cdef Py_ssize_t i
    cdef double t0, a_end, s_end, lo, hi, dur, seg_cost, dead_at
    cdef double o1, o2, o3, idle_t, cost_idle, cost_sleep, cost
    cdef double w
    cdef int seg
    cdef bint died
    for i in range(n):
        if not active[i] or t0s[i] >= t1:
            continue
        t0 = t0s[i]
        a_end = held_until[i]
        if a_end > cycle_end:
            a_end = cycle_end
        if a_end < awake_end:
            a_end = awake_end
        s_end = a_end + sleep_len[i]
        if s_end > cycle_end:
            s_end = cycle_end

        # Fast path: identical operation order to the numpy implementation
        # so both kernels produce bit-identical ledgers.
        o1 = (t1 if t1 < a_end else a_end) - (t0 if t0 > cycle_start else cycle_start)
        if o1 < 0:
            o1 = 0.0
        o2 = (t1 if t1 < s_end else s_end) - (t0 if t0 > a_end else a_end)
        if o2 < 0:
            o2 = 0.0
        o3 = (t1 if t1 < cycle_end else cycle_end) - (t0 if t0 > s_end else s_end)
        if o3 < 0:
            o3 = 0.0
        idle_t = o1 + o3
        cost_idle = idle_t * idle_w
        cost_sleep = o2 * sleep_w
        cost = cost_idle + cost_sleep
        if cost < residual[i]:
            residual[i] -= cost
            led_idle[i] += cost_idle
            led_sleep[i] += cost_sleep
            t0s[i] = t1
            continue

        died = False
        dead_at = 0.0
        for seg in range(3):
            if seg == 0:
                lo = cycle_start if t0 < cycle_start else t0
                hi = a_end if t1 > a_end else t1
                w = idle_w
            elif seg == 1:
                lo = a_end if t0 < a_end else t0
                hi = s_end if t1 > s_end else t1
                w = sleep_w
            else:
                lo = s_end if t0 < s_end else t0
                hi = cycle_end if t1 > cycle_end else t1
                w = idle_w
            dur = hi - lo
            if dur <= 0:
                continue
            seg_cost = dur * w
            if seg_cost < residual[i]:
                residual[i] -= seg_cost
                if seg == 1:
                    led_sleep[i] += seg_cost
                else:
                    led_idle[i] += seg_cost
            else:
                dead_at = lo + residual[i] / w
                if seg == 1:
                    led_sleep[i] += residual[i]
                else:
                    led_idle[i] += residual[i]
                residual[i] = 0.0
                died = True
                break
        t0s[i] = t1
        if died:
            active[i] = 0
            deaths.append((i, dead_at))
    return deaths


def point_debits(cnp.int64_t[:] idx, cnp.float64_t[:] amounts, double when,
                 cnp.float64_t[:] residual, cnp.float64_t[:] led,
                 cnp.uint8_t[:] active):
    cdef Py_ssize_t m = idx.shape[0]
    cdef list deaths = []
    cdef Py_ssize_t k
    cdef cnp.int64_t i
    cdef double amount
    for k in range(m):
        i = idx[k]
        if not active[i]:
            continue
        amount = amounts[k]
        if amount < residual[i]:
            residual[i] -= amount
            led[i] += amount
        else:
            led[i] += residual[i]
            residual[i] = 0.0
            active[i] = False
            deaths.append((i, when))
    return deaths
