"""First-order radio energy model.

Transmission cost switches between the free-space d^2 law and the multipath
d^4 law at the crossover distance sqrt(eps_fs / eps_mp); reception and
aggregation are linear in bits. Idle/sleep/receive/transmit residency is
charged through per-mode powers. Every joule a node loses must be debited
through one of these functions into an :class:`EnergyLedger` category.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

from .config import PowerProfile, RadioParams


class Category(IntEnum):
    """Ledger categories; one running sum per node and category."""

    TX = 0
    RX = 1
    IDLE = 2
    SLEEP = 3
    SENSING = 4
    AGGREGATION = 5


N_CATEGORIES = len(Category)


class Mode(IntEnum):
    SLEEP = 0
    IDLE = 1
    RECEIVE = 2
    TRANSMIT = 3


_MODE_CATEGORY = {
    Mode.SLEEP: Category.SLEEP,
    Mode.IDLE: Category.IDLE,
    Mode.RECEIVE: Category.RX,
    Mode.TRANSMIT: Category.TX,
}


def crossover_distance(radio: RadioParams) -> float:
    """Distance in metres where the path-loss regime switches."""
    return math.sqrt(radio.eps_fs / radio.eps_mp)


def tx_energy(bits: int, distance: float, radio: RadioParams) -> float:
    """Energy in joules to transmit ``bits`` over ``distance`` metres.

    The multipath branch applies at and beyond the crossover distance.
    """
    if bits < 0:
        raise ValueError("bits must be non-negative")
    if distance < 0:
        raise ValueError("distance must be non-negative")
    if distance < crossover_distance(radio):
        amp = radio.eps_fs * distance * distance
    else:
        amp = radio.eps_mp * distance ** 4
    return bits * (radio.e_elec + amp)


def rx_energy(bits: int, radio: RadioParams) -> float:
    """Energy in joules to receive ``bits``."""
    if bits < 0:
        raise ValueError("bits must be non-negative")
    return bits * radio.e_elec


def aggregation_energy(member_count: int, bits_per_packet: int, radio: RadioParams) -> float:
    """Energy for a cluster head to combine one packet per member."""
    if member_count < 0:
        raise ValueError("member_count must be non-negative")
    return member_count * bits_per_packet * radio.eda


def mode_power(mode: Mode, power: PowerProfile) -> float:
    return (power.sleep_w, power.idle_w, power.rx_w, power.tx_w)[mode]


def mode_drain(mode: Mode, duration: float, power: PowerProfile) -> float:
    """Energy in joules drained by sitting in ``mode`` for ``duration`` seconds."""
    if duration < 0:
        raise ValueError("duration must be non-negative")
    return mode_power(mode, power) * duration


def mode_category(mode: Mode) -> Category:
    return _MODE_CATEGORY[mode]


@dataclass
class EnergyLedger:
    """Per-node running sums of drained energy, keyed by category."""

    sums: list[float] = field(default_factory=lambda: [0.0] * N_CATEGORIES)

    def add(self, category: Category, joules: float) -> None:
        if joules < 0:
            raise ValueError("ledger entries must be non-negative")
        self.sums[category] += joules

    def total(self) -> float:
        return sum(self.sums)

    def __getitem__(self, category: Category) -> float:
        return self.sums[category]
