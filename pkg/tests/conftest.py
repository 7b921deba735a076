"""Shared checks used across the suite."""

from empasim import metrics_from_trace


def assert_run_consistent(metrics, trace, workload, topology):
    """Invariants every completed run must satisfy.

    Integer-exact accounting identity, message conservation, pairwise
    disjoint bus occupancy, nondecreasing event times, and agreement
    between the metrics pipeline and a recomputation from the trace alone.
    """
    n, total = metrics.n_entities, metrics.total_time
    assert metrics.payload_time + metrics.nonpayload_time + metrics.idle_time == n * total
    for name in metrics.idle_by_entity:
        assert metrics.idle_by_entity[name] >= 0
        per_entity = (
            metrics.payload_by_entity[name]
            + metrics.nonpayload_by_entity[name]
            + metrics.idle_by_entity[name]
        )
        assert per_entity == total

    assert metrics.messages_sent == metrics.messages_delivered
    assert metrics.undelivered == 0

    for spans in trace.bus_occupancy.values():
        ordered = sorted(spans)
        for (s1, e1), (s2, e2) in zip(ordered, ordered[1:]):
            assert e1 <= s2, f"bus occupancy overlaps: {(s1, e1)} vs {(s2, e2)}"

    times = [ev.at for ev in trace.events]
    assert times == sorted(times)

    entities = [topology.entity_name(spec.id) for spec in workload.neurons]
    redone = metrics_from_trace(trace, entities)
    assert redone.total_time == metrics.total_time
    assert redone.payload_time == metrics.payload_time
    assert redone.nonpayload_time == metrics.nonpayload_time
    assert redone.idle_time == metrics.idle_time
    assert redone.efficiency == metrics.efficiency
    assert redone.bus_busy == metrics.bus_busy
