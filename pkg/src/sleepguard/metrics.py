"""The five evaluation metrics folded from run counters.

Throughput and delivery ratio come from per-node sent/received packet
counts, lifetime from summed cluster-head tenures, residual energy from
the energy ledgers, and the detection numbers from the final confusion
matrix. Rate pairs (TPR/FNR, TNR/FPR) are computed with rational
arithmetic so each pair sums to exactly 100 before any float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .defense import ConfusionMatrix


class MetricError(ValueError):
    pass


@dataclass
class RunMetrics:
    """Folded counters of one simulation run (replication count 1)."""

    node_count: int
    packet_size_bytes: int
    start_time_s: float
    stop_time_s: float
    sent: np.ndarray            # per node id, DATA packets emitted
    received: np.ndarray        # per node id (+ base station slot), DATA delivered
    initial_energy: np.ndarray  # per sensor node, joules
    residual_energy: np.ndarray
    ledger: np.ndarray          # (n, categories) joules
    head_tenures: list[tuple[int, float, float]]
    confusion: ConfusionMatrix
    clustered: bool
    death_times: dict[int, float] = field(default_factory=dict)
    attacker_ids: set[int] = field(default_factory=set)
    attack_ticks: int = 0
    escalations: int = 0
    replications: int = 1

    @property
    def duration_s(self) -> float:
        return self.stop_time_s - self.start_time_s


def throughput_kbps(metrics: RunMetrics) -> float:
    """Mean received payload per second, in kilobits."""
    if metrics.duration_s <= 0:
        raise MetricError("zero-duration run has no throughput")
    total_bytes = float(metrics.received.sum()) * metrics.packet_size_bytes
    return (total_bytes / metrics.duration_s) * 8.0 / 1000.0 / metrics.replications


def pdr_percent(metrics: RunMetrics) -> float:
    """Delivered / sent data packets, in percent."""
    sent = int(metrics.sent.sum())
    if sent == 0:
        raise MetricError("no traffic")
    return 100.0 * float(metrics.received.sum()) / sent / metrics.replications


def network_lifetime(metrics: RunMetrics) -> float:
    """Sum of cluster-head tenure durations; for unclustered runs, the time
    until the last node death (simulation end while any node lives)."""
    if metrics.clustered:
        return float(sum(t1 - t0 for _, t0, t1 in metrics.head_tenures))
    if metrics.node_count == 0:
        return 0.0
    if len(metrics.death_times) >= metrics.node_count:
        return max(metrics.death_times.values(), default=0.0)
    return metrics.stop_time_s


def residual_energy_percent(metrics: RunMetrics) -> float:
    """Share of initial energy still unconsumed across all sensor nodes.

    Computed from the energy ledger (initial minus everything debited),
    which the residual-energy state matches to within accumulation error.
    """
    total_initial = float(metrics.initial_energy.sum())
    if total_initial == 0:
        return 100.0
    consumed = float(metrics.ledger.sum())
    return 100.0 * (total_initial - consumed) / total_initial


def detection_metrics_exact(cm: ConfusionMatrix) -> dict[str, Fraction]:
    """Detection rates as exact rationals (percent).

    Empty denominators take the vacuous-success convention: with no
    attackers the detection rate is 100 and the miss rate 0; with no benign
    nodes the true-negative rate is 100.
    """
    def ratio(num: int, den: int, empty: Fraction) -> Fraction:
        return Fraction(100 * num, den) if den else empty

    tpr = ratio(cm.tp, cm.tp + cm.fn, Fraction(100))
    tnr = ratio(cm.tn, cm.tn + cm.fp, Fraction(100))
    return {
        "dr": tpr,
        "tpr": tpr,
        "fnr": 100 - tpr,
        "tnr": tnr,
        "fpr": 100 - tnr,
    }


def detection_metrics(cm: ConfusionMatrix) -> tuple[float, float, float, float, float]:
    """(DR, TPR, TNR, FPR, FNR) in percent."""
    exact = detection_metrics_exact(cm)
    return (
        float(exact["dr"]),
        float(exact["tpr"]),
        float(exact["tnr"]),
        float(exact["fpr"]),
        float(exact["fnr"]),
    )
