"""Deterministic discrete-event core.

Time is an integer tick counter (1 tick = 1 ns by convention; nothing in the
engine depends on the physical scale). Events are executed in (time, seq)
order where seq is the scheduling sequence number, so simultaneous events
replay in the order they were scheduled and a run is exactly reproducible.

Resource arbitration that must consider *all* requests arriving at a tick
(rather than first-scheduled-wins) runs in end-of-tick hooks: once every
event of the current tick has executed, registered hooks fire and may
schedule further events at the same tick, which are then drained before
time advances.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .errors import CausalityError

__all__ = ["EventKind", "Event", "SimTrace", "Engine"]


class EventKind(Enum):
    COMPUTE_START = "compute_start"
    COMPUTE_END = "compute_end"
    MSG_SEND_REQUEST = "msg_send_request"
    BUS_ACQUIRE = "bus_acquire"
    BUS_RELEASE = "bus_release"
    MSG_DELIVER = "msg_deliver"
    GRID_BOUNDARY = "grid_boundary"


@dataclass(frozen=True)
class Event:
    """One executed event.

    ``payload`` is the message id involved, or empty. ``duration`` is the
    length in ticks of the span that ends at ``at`` where one is meaningful
    (compute time for COMPUTE_END, occupancy for BUS_RELEASE, request-to-
    delivery span for MSG_DELIVER), else 0.
    """

    at: int
    seq: int
    kind: EventKind
    subject: str
    payload: str = ""
    duration: int = 0

    def to_record(self) -> dict:
        return {
            "time": self.at,
            "kind": self.kind.value,
            "subject": self.subject,
            "object": self.payload,
            "duration": self.duration,
        }


@dataclass
class SimTrace:
    """Time-ordered record of a run.

    events: every executed event, in execution order.
    bus_occupancy: per-bus list of [start, end) transmit intervals.
    entity_compute: per-entity compute intervals.
    entity_transport: per-entity message spans [send request, delivery),
        charged to the sender.
    """

    events: list[Event] = field(default_factory=list)
    bus_occupancy: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    entity_compute: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    entity_transport: dict[str, list[tuple[int, int]]] = field(default_factory=dict)

    @property
    def final_time(self) -> int:
        return self.events[-1].at if self.events else 0

    def add_occupancy(self, bus_id: str, start: int, end: int) -> None:
        self.bus_occupancy.setdefault(bus_id, []).append((start, end))

    def add_compute(self, entity: str, start: int, end: int) -> None:
        self.entity_compute.setdefault(entity, []).append((start, end))

    def add_transport(self, entity: str, start: int, end: int) -> None:
        self.entity_transport.setdefault(entity, []).append((start, end))

    def to_lines(self) -> list[str]:
        return [json.dumps(ev.to_record(), separators=(",", ":")) for ev in self.events]

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.to_lines():
                fh.write(line + "\n")


@dataclass
class _Entry:
    kind: EventKind | None  # None = internal callback, kept out of the trace
    subject: str
    payload: str
    duration: int
    action: Callable[[], None] | None


class Engine:
    """Event queue, clock, and trace recorder for one run."""

    def __init__(self) -> None:
        self.trace = SimTrace()
        self._queue: list[tuple[int, int, _Entry]] = []
        self._seq = 0
        self._now = 0
        self._tick_hooks: list[Callable[[int], None]] = []

    @property
    def now(self) -> int:
        return self._now

    def schedule(
        self,
        at: int,
        kind: EventKind,
        subject: str,
        payload: str = "",
        duration: int = 0,
        action: Callable[[], None] | None = None,
    ) -> int:
        """Enqueue an event; returns its unique sequence id."""
        return self._push(at, _Entry(kind, subject, payload, duration, action))

    def call_at(self, at: int, action: Callable[[], None]) -> int:
        """Enqueue an internal callback that does not appear in the trace."""
        return self._push(at, _Entry(None, "", "", 0, action))

    def _push(self, at: int, entry: _Entry) -> int:
        if at < self._now:
            raise CausalityError(
                f"cannot schedule at t={at}: simulation time is already {self._now}"
            )
        seq = self._seq
        self._seq += 1
        heapq.heappush(self._queue, (at, seq, entry))
        return seq

    def at_tick_end(self, hook: Callable[[int], None]) -> None:
        """Register a hook that runs after all events of a tick have executed."""
        self._tick_hooks.append(hook)

    def run(self, until: int | None = None) -> SimTrace:
        """Process events in (time, seq) order; returns the trace.

        With ``until`` set, events after that tick stay queued.
        """
        while self._queue:
            tick = self._queue[0][0]
            if until is not None and tick > until:
                break
            self._drain_tick(tick)
        return self.trace

    def _drain_tick(self, tick: int) -> None:
        # Hooks may schedule same-tick events (e.g. a bus grant), so loop
        # until neither the queue nor the hooks produce work at this tick.
        while True:
            while self._queue and self._queue[0][0] == tick:
                at, seq, entry = heapq.heappop(self._queue)
                self._now = at
                if entry.kind is not None:
                    self.trace.events.append(
                        Event(at, seq, entry.kind, entry.subject, entry.payload, entry.duration)
                    )
                if entry.action is not None:
                    entry.action()
            self._now = tick
            for hook in self._tick_hooks:
                hook(tick)
            if not (self._queue and self._queue[0][0] == tick):
                break
