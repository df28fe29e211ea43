"""Denial-of-sleep adversary behaviours.

Attackers obey the same radio and energy model as benign nodes. Every
``interval_s`` seconds they emit traffic designed to keep victims out of
sleep mode: a verbatim replay of a previously overheard SYN, an RTS to
every in-range victim, or a SYN under a fabricated id announcing a zero
sleep time. Templates are captured passively by frame size (the 10-byte
SYN signature), which works against encrypted payloads too.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .mac import Frame, FrameKind

SYN_SIGNATURE_BYTES = 10


class AttackKind(Enum):
    SYN_REPLAY = "syn_replay"
    RTS_FLOOD = "rts_flood"
    FORGED_ID_SYN = "forged_id_syn"


@dataclass
class AttackerProfile:
    node_id: int
    kind: AttackKind
    interval_s: float
    start_offset_s: float = 0.0
    template: Frame | None = None
    forged_counter: int = field(default=0)

    def capture_syn(self, frame: Frame) -> bool:
        """Store an overheard frame as the replay template when its size
        matches the SYN signature; the latest capture wins."""
        if frame.size_bytes != SYN_SIGNATURE_BYTES:
            return False
        self.template = Frame(
            kind=frame.kind,
            size_bytes=frame.size_bytes,
            src=frame.src,
            dst=frame.dst,
            sent_at=frame.sent_at,
            sleep_time_field=frame.sleep_time_field,
            auth_token=frame.auth_token,
            cycle_index=frame.cycle_index,
        )
        return True

    def replay_frame(self, now: float) -> Frame | None:
        """Byte-identical copy of the captured template, new timestamp."""
        if self.template is None:
            return None
        t = self.template
        return Frame(
            kind=t.kind,
            size_bytes=t.size_bytes,
            src=t.src,
            dst=t.dst,
            sent_at=now,
            sleep_time_field=t.sleep_time_field,
            auth_token=t.auth_token,
            cycle_index=t.cycle_index,
        )

    def forged_syn(self, now: float, id_space: int, syn_bytes: int) -> Frame:
        """SYN under a fresh nonexistent id advertising zero sleep time."""
        self.forged_counter += 1
        fake_id = id_space + self.forged_counter
        return Frame(
            kind=FrameKind.SYN,
            size_bytes=syn_bytes,
            src=fake_id,
            dst=-1,
            sent_at=now,
            sleep_time_field=0.0,
        )


def emission_times(interval_s: float, start_offset_s: float, horizon_s: float) -> list[float]:
    """Attack tick schedule: offset, offset+interval, ... strictly before the
    horizon."""
    if interval_s <= 0:
        raise ValueError("interval must be strictly positive")
    times = []
    t = start_offset_s
    while t < horizon_s:
        times.append(t)
        t += interval_s
    return times
