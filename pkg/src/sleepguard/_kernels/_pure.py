"""Pure-Python/numpy implementations of the hot simulation kernels.

Same contracts as the compiled ``_speedups`` module; used as the automatic
fallback when the extension is unavailable (or when ``SLEEPGUARD_PURE=1``).
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "pure"


def build_adjacency(xs: np.ndarray, ys: np.ndarray, range_m: float):
    """CSR adjacency (indptr, indices) of nodes within ``range_m``, self
    excluded, neighbour ids ascending."""
    n = xs.shape[0]
    if n == 0:
        return np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    dx = xs[:, None] - xs[None, :]
    dy = ys[:, None] - ys[None, :]
    within = (dx * dx + dy * dy) <= range_m * range_m
    np.fill_diagonal(within, False)
    counts = within.sum(axis=1)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.nonzero(within)[1].astype(np.int64)
    return indptr, indices


def elect_heads(score: np.ndarray, eligible: np.ndarray,
                indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Mark nodes whose score is maximal among eligible in-range neighbours.

    Ties break toward the lower node id. Ineligible nodes never win; an
    eligible node with no eligible neighbour is trivially maximal.
    """
    n = score.shape[0]
    heads = np.zeros(n, dtype=bool)
    if n == 0:
        return heads
    elig = eligible.astype(bool)
    neigh_scores = np.where(elig[indices], score[indices], -np.inf)
    row_len = np.diff(indptr)
    nonempty = row_len > 0
    seg_max = np.full(n, -np.inf)
    if indices.size:
        seg_max[nonempty] = np.maximum.reduceat(neigh_scores, indptr[:-1][nonempty])
    own = np.repeat(score, row_len)
    tie_ids = np.where(
        elig[indices] & (score[indices] == own), indices, np.iinfo(np.int64).max
    )
    seg_min_id = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    if indices.size:
        seg_min_id[nonempty] = np.minimum.reduceat(tie_ids, indptr[:-1][nonempty])
    ids = np.arange(n, dtype=np.int64)
    heads = elig & (
        (score > seg_max) | ((score == seg_max) & (ids < seg_min_id))
    )
    return heads


def assign_members(xs: np.ndarray, ys: np.ndarray, eligible: np.ndarray,
                   head_mask: np.ndarray, range_m: float) -> np.ndarray:
    """Map each eligible non-head node to its nearest in-range head.

    Returns an int64 array: head id for members, the node's own id for
    heads, -1 for nodes with no reachable head (direct-to-sink) and for
    ineligible nodes. Distance ties break toward the lower head id.
    """
    n = xs.shape[0]
    member_of = np.full(n, -1, dtype=np.int64)
    elig = eligible.astype(bool)
    hmask = head_mask.astype(bool) & elig
    head_ids = np.flatnonzero(hmask)
    member_of[hmask] = head_ids
    others = np.flatnonzero(elig & ~hmask)
    if head_ids.size == 0 or others.size == 0:
        return member_of
    dx = xs[others, None] - xs[None, head_ids]
    dy = ys[others, None] - ys[None, head_ids]
    d2 = dx * dx + dy * dy
    d2[d2 > range_m * range_m] = np.inf
    best = np.argmin(d2, axis=1)  # first minimum = lowest head id
    reachable = d2[np.arange(others.size), best] < np.inf
    member_of[others[reachable]] = head_ids[best[reachable]]
    return member_of


def accrue_spans(t0s: np.ndarray, t1: float,
                 cycle_start: float, cycle_end: float, awake_end: float,
                 held_until: np.ndarray, sleep_len: np.ndarray,
                 idle_w: float, sleep_w: float,
                 residual: np.ndarray, led_idle: np.ndarray,
                 led_sleep: np.ndarray, active: np.ndarray):
    """Charge idle/sleep residency from each node's ``t0`` up to ``t1``.

    A node's cycle is three phases: idle until ``max(awake_end, held_until)``,
    then asleep for ``sleep_len`` seconds, then idle until the cycle end.
    Updates residual energy, the idle/sleep ledger columns and ``t0s`` in
    place. Returns ``[(node, death_time), ...]`` for nodes whose residual
    reached zero, with the exact in-phase death instant; their partial phase
    costs stay on the ledger so conservation holds.
    """
    deaths: list[tuple[int, float]] = []
    idx = np.flatnonzero((active != 0) & (t0s < t1))
    if idx.size == 0:
        return deaths
    t0 = t0s[idx]
    a_end = np.maximum(awake_end, np.minimum(held_until[idx], cycle_end))
    s_end = np.minimum(a_end + sleep_len[idx], cycle_end)

    def overlap(lo, hi):
        return np.maximum(0.0, np.minimum(t1, hi) - np.maximum(t0, lo))

    idle_t = overlap(cycle_start, a_end) + overlap(s_end, cycle_end)
    sleep_t = overlap(a_end, s_end)
    cost = idle_t * idle_w + sleep_t * sleep_w

    dying = cost >= residual[idx]
    safe = idx[~dying]
    residual[safe] -= cost[~dying]
    led_idle[safe] += idle_t[~dying] * idle_w
    led_sleep[safe] += sleep_t[~dying] * sleep_w
    t0s[idx] = t1

    for k in np.flatnonzero(dying):
        i = int(idx[k])
        start = float(t0[k])
        segments = (
            (max(start, cycle_start), min(t1, a_end[k]), idle_w, led_idle),
            (max(start, a_end[k]), min(t1, s_end[k]), sleep_w, led_sleep),
            (max(start, s_end[k]), min(t1, cycle_end), idle_w, led_idle),
        )
        dead_at = None
        for lo, hi, w, led in segments:
            dur = hi - lo
            if dur <= 0:
                continue
            seg_cost = dur * w
            if seg_cost < residual[i]:
                residual[i] -= seg_cost
                led[i] += seg_cost
            else:
                dead_at = lo + residual[i] / w
                led[i] += residual[i]
                residual[i] = 0.0
                break
        # The vectorised estimate can disagree with the exact walk by one
        # ulp; only record a death the walk actually produced.
        if dead_at is not None:
            active[i] = False
            deaths.append((i, float(dead_at)))
    return deaths


def point_debits(idx: np.ndarray, amounts: np.ndarray, when: float,
                 residual: np.ndarray, led: np.ndarray, active: np.ndarray):
    """Instantaneous debit (frame tx/rx, sensing, aggregation) per node.

    A node whose residual cannot cover its amount is debited down to zero
    and reported dead at ``when``. Returns ``[(node, death_time), ...]``.
    """
    deaths: list[tuple[int, float]] = []
    if idx.size == 0:
        return deaths
    live = active[idx] != 0
    idx = idx[live]
    amounts = amounts[live]
    dying = amounts >= residual[idx]
    safe = idx[~dying]
    residual[safe] -= amounts[~dying]
    led[safe] += amounts[~dying]
    for i in idx[dying]:
        i = int(i)
        led[i] += residual[i]
        residual[i] = 0.0
        active[i] = False
        deaths.append((i, when))
    return deaths
