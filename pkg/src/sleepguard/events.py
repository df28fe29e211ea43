"""Deterministic discrete-event queue.

Events are totally ordered by ``(time, sequence)``; the sequence number is
assigned when the event is scheduled and never reused, so simultaneous
events dequeue in scheduling order and replays are bit-identical.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Any, Callable


class SchedulingError(ValueError):
    """Raised when an event is scheduled before the current clock."""


@dataclass(frozen=True, order=True)
class Event:
    time: float
    sequence: int
    payload: Any = field(compare=False)


class EventQueue:
    """Priority queue of :class:`Event` with a monotone clock."""

    def __init__(self) -> None:
        self._heap: list[Event] = []
        self._next_seq = 0
        self.now = 0.0

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(self, time: float, payload: Any) -> Event:
        if time < self.now:
            raise SchedulingError(
                f"event at t={time} precedes current clock t={self.now}"
            )
        event = Event(time, self._next_seq, payload)
        self._next_seq += 1
        heapq.heappush(self._heap, event)
        return event

    def pop(self) -> Event:
        event = heapq.heappop(self._heap)
        self.now = event.time
        return event

    def peek_time(self) -> float:
        return self._heap[0].time

    def run_until(self, t_end: float, dispatch: Callable[[Event], None]) -> None:
        """Execute queued events with ``time < t_end`` in total order."""
        while self._heap and self._heap[0].time < t_end:
            dispatch(self.pop())
        self.now = max(self.now, t_end)
