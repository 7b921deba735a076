"""Run workloads on topologies, account the time, sweep parameters.

Time accounting per entity over [0, total_time):

* payload: the entity's compute intervals.
* non-payload: everything else the entity is busy with, charged to the
  *sender* of a message: waiting for a bus, transport, head/hop latency,
  and grid deferral, i.e. the whole span from send request to delivery.
  Receivers idle while their inputs travel.
* idle: the rest.

Intervals are merged before measuring, so overlapping spans (a broadcast,
or parallel wires out of one neuron) are never double counted and
payload + nonpayload + idle = n_entities * total_time holds exactly in
integer ticks.
"""

from __future__ import annotations

import heapq
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .engine import Engine, EventKind, SimTrace
from .errors import UsageError, WorkloadError
from .scaling import ScalingParams, fit_second_order, speedup_second_order
from .topology import NodeId, Path, Topology, node_sort_key
from .workload import NeuronState, Workload

__all__ = [
    "Metrics",
    "SweepResult",
    "ModelComparison",
    "DATASET_COLUMNS",
    "run_experiment",
    "sweep",
    "compare_with_model",
    "metrics_from_trace",
    "dataset_rows",
    "write_dataset",
]

DATASET_COLUMNS = (
    "param",
    "total_time",
    "payload_time",
    "nonpayload_time",
    "idle_time",
    "bus_busy",
    "efficiency",
    "speedup",
    "energy_proxy",
)


@dataclass(frozen=True)
class Metrics:
    """Aggregated timing of one run; per-entity and per-bus detail kept."""

    n_entities: int
    total_time: int
    payload_time: int
    nonpayload_time: int
    idle_time: int
    payload_by_entity: dict[str, int]
    nonpayload_by_entity: dict[str, int]
    idle_by_entity: dict[str, int]
    bus_busy: dict[str, int]
    efficiency: float
    speedup: float
    energy_proxy: int
    messages_sent: int
    messages_delivered: int
    deferred_deliveries: int

    @property
    def bus_busy_total(self) -> int:
        return sum(self.bus_busy.values())

    @property
    def undelivered(self) -> int:
        return self.messages_sent - self.messages_delivered

    def as_row(self, param) -> dict:
        return {
            "param": param,
            "total_time": self.total_time,
            "payload_time": self.payload_time,
            "nonpayload_time": self.nonpayload_time,
            "idle_time": self.idle_time,
            "bus_busy": self.bus_busy_total,
            "efficiency": self.efficiency,
            "speedup": self.speedup,
            "energy_proxy": self.energy_proxy,
        }


class _Message:
    __slots__ = ("msg_id", "src", "dsts", "request_time")

    def __init__(self, msg_id: str, src: NodeId, dsts: tuple[NodeId, ...], request_time: int):
        self.msg_id = msg_id
        self.src = src
        self.dsts = dsts
        self.request_time = request_time


class _Bus:
    """FIFO arbitration on arrival time, ties broken by sender NodeId."""

    __slots__ = ("bus_id", "t_bus", "busy", "waiting", "_tiebreak")

    def __init__(self, bus_id: str, t_bus: int):
        self.bus_id = bus_id
        self.t_bus = t_bus
        self.busy = False
        self.waiting: list = []
        self._tiebreak = 0

    def arrive(self, at: int, msg: _Message, cont: Callable[[int], None]) -> None:
        self._tiebreak += 1
        heapq.heappush(self.waiting, (at, node_sort_key(msg.src), self._tiebreak, msg, cont))


class _Run:
    def __init__(self, workload: Workload, topology: Topology):
        self.workload = workload
        self.topology = topology
        self.engine = Engine()
        self.states: dict = {}
        self.names: dict = {}
        for spec in workload.neurons:
            self.states[spec.id] = NeuronState(spec)
            self.names[spec.id] = topology.entity_name(spec.id)
        self.buses: dict[str, _Bus] = {}
        self.msg_counter = 0
        self.sent = 0
        self.delivered = 0
        self.deferrals = 0
        self._boundaries: set[int] = set()
        self.engine.at_tick_end(self._arbitrate)

    def execute(self) -> SimTrace:
        for i, stim in enumerate(self.workload.stimuli):
            self.sent += 1
            self.engine.schedule(
                stim.at,
                EventKind.MSG_DELIVER,
                subject=self.names[stim.target],
                payload=f"s{i}",
                action=self._deliver_action(stim.target),
            )
        return self.engine.run()

    # -- neuron behavior ----------------------------------------------------

    def _deliver_action(self, node: NodeId) -> Callable[[], None]:
        def deliver() -> None:
            self.delivered += 1
            interval = self.states[node].on_message(self.engine.now)
            if interval is None:
                return
            start, end = interval
            name = self.names[node]
            self.engine.schedule(start, EventKind.COMPUTE_START, subject=name)
            self.engine.schedule(
                end,
                EventKind.COMPUTE_END,
                subject=name,
                duration=end - start,
                action=lambda: self._emit_sends(node),
            )
            self.engine.trace.add_compute(name, start, end)

        return deliver

    def _emit_sends(self, node: NodeId) -> None:
        targets = self.states[node].spec.targets
        if not targets:
            return
        now = self.engine.now
        if self.topology.broadcast and len(targets) > 1:
            groups: list[tuple[NodeId, ...]] = [tuple(targets)]
        else:
            groups = [(tgt,) for tgt in targets]
        for dsts in groups:
            msg = _Message(f"m{self.msg_counter}", node, dsts, now)
            self.msg_counter += 1
            self.sent += len(dsts)
            self.engine.schedule(
                now, EventKind.MSG_SEND_REQUEST, subject=self.names[node], payload=msg.msg_id
            )
            path = self.topology.route(node, dsts[0])
            self._advance(msg, path.segments, 0, now)

    # -- transport ------------------------------------------------------------

    def _advance(self, msg: _Message, segments, index: int, t: int) -> None:
        while index < len(segments) and segments[index].medium != "bus":
            t += segments[index].latency
            index += 1
        if index == len(segments):
            self._complete(msg, t)
            return
        seg = segments[index]
        bus = self.buses.get(seg.bus_id)
        if bus is None:
            bus = self.buses[seg.bus_id] = _Bus(seg.bus_id, seg.latency)

        def cont(release: int, _msg=msg, _segments=segments, _index=index + 1) -> None:
            self._advance(_msg, _segments, _index, release)

        if t > self.engine.now:
            self.engine.call_at(t, lambda: bus.arrive(t, msg, cont))
        else:
            bus.arrive(t, msg, cont)

    def _arbitrate(self, tick: int) -> None:
        for bus in self.buses.values():
            if bus.busy or not bus.waiting:
                continue
            _, _, _, msg, cont = heapq.heappop(bus.waiting)
            bus.busy = True
            self.engine.schedule(
                tick, EventKind.BUS_ACQUIRE, subject=bus.bus_id, payload=msg.msg_id
            )
            release = tick + bus.t_bus

            def on_release(_bus=bus, _msg=msg, _cont=cont, _start=tick, _end=release) -> None:
                _bus.busy = False
                self.engine.trace.add_occupancy(_bus.bus_id, _start, _end)
                _cont(_end)

            self.engine.schedule(
                release,
                EventKind.BUS_RELEASE,
                subject=bus.bus_id,
                payload=msg.msg_id,
                duration=bus.t_bus,
                action=on_release,
            )

    def _complete(self, msg: _Message, complete_t: int) -> None:
        deliver_at = self.workload.grid_delivery_time(complete_t)
        if deliver_at > complete_t:
            self.deferrals += len(msg.dsts)
            if deliver_at not in self._boundaries:
                self._boundaries.add(deliver_at)
                self.engine.schedule(deliver_at, EventKind.GRID_BOUNDARY, subject="grid")
        for dst in msg.dsts:
            self.engine.schedule(
                deliver_at,
                EventKind.MSG_DELIVER,
                subject=self.names[dst],
                payload=msg.msg_id,
                duration=deliver_at - msg.request_time,
                action=self._deliver_action(dst),
            )
        self.engine.trace.add_transport(self.names[msg.src], msg.request_time, deliver_at)


def _merged_length(intervals: Sequence[tuple[int, int]]) -> int:
    total = 0
    end_prev = None
    for start, end in sorted(intervals):
        if end_prev is None or start >= end_prev:
            total += end - start
            end_prev = end
        elif end > end_prev:
            total += end - end_prev
            end_prev = end
    return total


def _finalize(
    entities: Sequence[str],
    total: int,
    compute: dict[str, list[tuple[int, int]]],
    transport: dict[str, list[tuple[int, int]]],
    bus_busy: dict[str, int],
    sent: int,
    delivered: int,
    deferrals: int,
) -> Metrics:
    payload_by = {}
    nonpayload_by = {}
    idle_by = {}
    for name in entities:
        comp = compute.get(name, [])
        payload = sum(end - start for start, end in comp)
        busy = _merged_length(list(comp) + list(transport.get(name, [])))
        payload_by[name] = payload
        nonpayload_by[name] = busy - payload
        idle_by[name] = total - busy
    n = len(entities)
    payload_total = sum(payload_by.values())
    denom = n * total
    return Metrics(
        n_entities=n,
        total_time=total,
        payload_time=payload_total,
        nonpayload_time=sum(nonpayload_by.values()),
        idle_time=sum(idle_by.values()),
        payload_by_entity=payload_by,
        nonpayload_by_entity=nonpayload_by,
        idle_by_entity=idle_by,
        bus_busy=dict(bus_busy),
        efficiency=payload_total / denom if denom else 0.0,
        speedup=payload_total / total if total else 0.0,
        energy_proxy=n * total,
        messages_sent=sent,
        messages_delivered=delivered,
        deferred_deliveries=deferrals,
    )


def run_experiment(workload: Workload, topology: Topology) -> tuple[Metrics, SimTrace]:
    """Simulate the workload to exhaustion and account the time."""
    run = _Run(workload, topology)
    trace = run.execute()
    if run.sent != run.delivered:
        raise WorkloadError(
            f"{run.sent - run.delivered} messages were never delivered; "
            "the workload did not run to completion"
        )
    bus_busy = {
        bus_id: sum(end - start for start, end in spans)
        for bus_id, spans in trace.bus_occupancy.items()
    }
    entities = [run.names[spec.id] for spec in workload.neurons]
    metrics = _finalize(
        entities,
        trace.final_time,
        trace.entity_compute,
        trace.entity_transport,
        bus_busy,
        run.sent,
        run.delivered,
        run.deferrals,
    )
    return metrics, trace


def metrics_from_trace(trace: SimTrace, entities: Sequence[str]) -> Metrics:
    """Recompute the metrics from the event stream alone.

    Independent of the runner's accumulators; used to cross-check the
    metrics pipeline against the exported trace.
    """
    compute: dict[str, list[tuple[int, int]]] = {}
    transport: dict[str, list[tuple[int, int]]] = {}
    bus_busy: dict[str, int] = {}
    sender_of: dict[str, str] = {}
    sent = 0
    delivered = 0
    for ev in trace.events:
        if ev.kind is EventKind.COMPUTE_END:
            compute.setdefault(ev.subject, []).append((ev.at - ev.duration, ev.at))
        elif ev.kind is EventKind.MSG_SEND_REQUEST:
            sender_of[ev.payload] = ev.subject
        elif ev.kind is EventKind.MSG_DELIVER:
            delivered += 1
            sent += 1
            sender = sender_of.get(ev.payload)
            if sender is not None and ev.duration > 0:
                transport.setdefault(sender, []).append((ev.at - ev.duration, ev.at))
        elif ev.kind is EventKind.BUS_RELEASE:
            bus_busy[ev.subject] = bus_busy.get(ev.subject, 0) + ev.duration
    return _finalize(
        list(entities), trace.final_time, compute, transport, bus_busy, sent, delivered, 0
    )


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    points: tuple[tuple[int, Metrics], ...]

    def __post_init__(self) -> None:
        values = [value for value, _ in self.points]
        ascending = all(a < b for a, b in zip(values, values[1:]))
        descending = all(a > b for a, b in zip(values, values[1:]))
        if not (ascending or descending):
            raise UsageError("sweep values must be strictly monotone")

    @property
    def values(self) -> list[int]:
        return [value for value, _ in self.points]

    @property
    def speedups(self) -> list[float]:
        return [metrics.speedup for _, metrics in self.points]


def sweep(
    build: Callable[[int], tuple[Workload, Topology]],
    parameter: str,
    values: Sequence[int],
    jobs: int = 1,
) -> SweepResult:
    """One deterministic run per value; ``build`` materializes each run.

    Runs are independent, so with jobs > 1 they execute concurrently and
    results are assembled by value, not by completion order.
    """
    if not values:
        raise UsageError("sweep needs a non-empty value list")

    def one(value: int) -> Metrics:
        workload, topology = build(value)
        metrics, _ = run_experiment(workload, topology)
        return metrics

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, values))
    else:
        results = [one(value) for value in values]
    return SweepResult(parameter, tuple(zip(values, results)))


@dataclass(frozen=True)
class ModelComparison:
    params: ScalingParams
    fitted: bool
    max_rel_error: float
    sim_plateau: float
    model_plateau: float


def compare_with_model(result: SweepResult, params: ScalingParams | None = None) -> ModelComparison:
    """Compare a core-count sweep's speedup curve with the analytic model.

    Without explicit parameters, (s, c) are fitted to the simulated curve
    by least squares first. Reports the largest relative divergence and
    each curve's saturation plateau over the swept range.
    """
    if len(result.points) < 3:
        raise UsageError("need at least 3 sweep points to compare against the model")
    ns = result.values
    sim = result.speedups
    fitted = params is None
    if params is None:
        params = fit_second_order(ns, sim)
    model = [speedup_second_order(params, n) for n in ns]
    max_rel = max(abs(m - s) / s for m, s in zip(model, sim))
    return ModelComparison(
        params=params,
        fitted=fitted,
        max_rel_error=max_rel,
        sim_plateau=max(sim),
        model_plateau=max(model),
    )


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dataset_rows(result: SweepResult) -> list[dict]:
    return [metrics.as_row(value) for value, metrics in result.points]


def write_dataset(path, rows: Sequence[dict], fmt: str = "tabular") -> None:
    """Write metric rows as CSV ("tabular") or JSON lines ("structured-records").

    Output is a pure function of the rows: stable column order, stable float
    formatting, no timestamps.
    """
    import json

    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "tabular":
            fh.write(",".join(DATASET_COLUMNS) + "\n")
            for row in rows:
                fh.write(",".join(_format_cell(row[col]) for col in DATASET_COLUMNS) + "\n")
        elif fmt == "structured-records":
            for row in rows:
                fh.write(json.dumps({col: row[col] for col in DATASET_COLUMNS}) + "\n")
        else:
            raise UsageError(f"unknown dataset format {fmt!r}")
