import pytest

from sleepguard.events import EventQueue, SchedulingError


def test_equal_times_dequeue_in_scheduling_order():
    q = EventQueue()
    q.schedule(1.0, "a")
    q.schedule(1.0, "b")
    q.schedule(1.0, "c")
    assert [q.pop().payload for _ in range(3)] == ["a", "b", "c"]


def test_event_at_current_clock_runs_next():
    q = EventQueue()
    q.schedule(2.0, "later")
    q.pop()
    q.schedule(2.0, "now")
    assert q.pop().payload == "now"


def test_past_event_rejected():
    q = EventQueue()
    q.schedule(5.0, "x")
    q.pop()
    with pytest.raises(SchedulingError):
        q.schedule(5.0 - 1e-9, "too late")


def test_sequence_numbers_never_reused():
    q = EventQueue()
    events = [q.schedule(float(i % 3), i) for i in range(50)]
    seqs = [e.sequence for e in events]
    assert len(set(seqs)) == 50
    assert seqs == sorted(seqs)


def test_run_until_is_end_exclusive_and_ordered():
    q = EventQueue()
    seen = []
    q.schedule(0.5, 1)
    q.schedule(0.25, 2)
    q.schedule(1.0, 3)  # at the horizon: must not run
    q.run_until(1.0, lambda e: seen.append(e.payload))
    assert seen == [2, 1]
    assert q.now == 1.0
