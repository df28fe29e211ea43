"""Duty-cycled MAC layer: frame formats and sleep synchronisation.

SYN frames are 10 bytes and carry the sender id ahead of the next sleep
time; RTS/CTS/ACK are 30-byte control frames. A received SYN adjusts the
local sleep time gradually rather than overwriting it ("mean" mode averages
old and received values; "literal" mode adds half the received value, the
reading the published formula types out).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class FrameKind(Enum):
    DATA = "data"
    RTS = "rts"
    CTS = "cts"
    ACK = "ack"
    SYN = "syn"
    SYN_A = "syn_a"
    NO_SYN_A = "no_syn_a"
    KEYX = "keyx"


@dataclass
class Frame:
    kind: FrameKind
    size_bytes: int
    src: int
    dst: int
    sent_at: float = 0.0
    sleep_time_field: float | None = None  # SYN only
    auth_token: bytes | None = None
    cycle_index: int | None = None

    @property
    def bits(self) -> int:
        return 8 * self.size_bytes


@dataclass
class DutyCycleSchedule:
    """Per-node awake/sleep timing within one duty cycle."""

    slot_length: float
    slots_per_cycle: int
    awake_slots: int
    current_sleep_time: float

    @property
    def cycle_length(self) -> float:
        return self.slot_length * self.slots_per_cycle

    @property
    def awake_window(self) -> float:
        return self.slot_length * self.awake_slots

    @property
    def nominal_sleep(self) -> float:
        return self.cycle_length - self.awake_window


def update_sleep_time(old: float, received: float, mode: str = "mean") -> float:
    """Blend the local sleep time with the one carried by a received SYN."""
    if old < 0 or received < 0:
        raise ValueError("sleep times must be non-negative")
    if mode == "literal":
        return old + received / 2.0
    return (old + received) / 2.0
