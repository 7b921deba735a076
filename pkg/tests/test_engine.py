import pytest

from empasim import CausalityError, Engine, EventKind


def test_scheduled_event_executes_at_its_time():
    eng = Engine()
    eng.schedule(5, EventKind.COMPUTE_START, subject="a")
    trace = eng.run()
    assert [(ev.at, ev.subject) for ev in trace.events] == [(5, "a")]
    assert trace.final_time == 5


def test_scheduling_into_the_past_is_fatal():
    eng = Engine()

    def too_late():
        eng.schedule(3, EventKind.COMPUTE_START, subject="x")

    eng.schedule(7, EventKind.COMPUTE_END, subject="a", action=too_late)
    with pytest.raises(CausalityError):
        eng.run()


def test_simultaneous_events_keep_scheduling_order():
    eng = Engine()
    eng.schedule(5, EventKind.COMPUTE_START, subject="A")
    eng.schedule(5, EventKind.COMPUTE_START, subject="B")
    trace = eng.run()
    assert [ev.subject for ev in trace.events] == ["A", "B"]
    seqs = [ev.seq for ev in trace.events]
    assert seqs == sorted(seqs)


def test_empty_queue_gives_empty_trace():
    trace = Engine().run()
    assert trace.events == []
    assert trace.final_time == 0


def test_run_until_leaves_later_events_queued():
    eng = Engine()
    eng.schedule(1, EventKind.COMPUTE_START, subject="a")
    eng.schedule(9, EventKind.COMPUTE_START, subject="b")
    trace = eng.run(until=5)
    assert [ev.at for ev in trace.events] == [1]


def test_identical_scenarios_give_identical_traces():
    def scenario():
        eng = Engine()
        for i, t in enumerate([4, 2, 2, 9]):
            eng.schedule(t, EventKind.MSG_DELIVER, subject=f"n{i}", payload=f"m{i}", duration=i)
        return eng.run().to_lines()

    assert scenario() == scenario()


def test_tick_end_hook_runs_before_time_advances():
    eng = Engine()
    order = []

    def hook(tick):
        if tick == 3 and not any(item == "hooked" for item in order):
            order.append("hooked")
            eng.schedule(3, EventKind.BUS_ACQUIRE, subject="bus", action=lambda: order.append("granted"))

    eng.at_tick_end(hook)
    eng.schedule(3, EventKind.MSG_SEND_REQUEST, subject="n", action=lambda: order.append("request"))
    eng.schedule(4, EventKind.COMPUTE_START, subject="n", action=lambda: order.append("later"))
    trace = eng.run()
    assert order == ["request", "hooked", "granted", "later"]
    assert [ev.at for ev in trace.events] == [3, 3, 4]


def test_trace_lines_are_json_records():
    import json

    eng = Engine()
    eng.schedule(2, EventKind.BUS_RELEASE, subject="bus", payload="m1", duration=2)
    lines = eng.run().to_lines()
    assert len(lines) == 1
    record = json.loads(lines[0])
    assert record == {"time": 2, "kind": "bus_release", "subject": "bus", "object": "m1", "duration": 2}
