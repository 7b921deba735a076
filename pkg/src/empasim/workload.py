"""Neuron behavioral model and workload builders.

A neuron buffers incoming arguments; once the expected fan-in has arrived it
computes for its effective compute time and then emits one message per
target (collapsed to a broadcast where the topology supports it).
Communication and computation mutually block: a neuron starts computing
only at the instant its last argument is delivered, and its output phase
begins only after the compute ends.

Workloads carry a time model. Event-driven: deliveries happen the moment
transport completes. Time grid with period P: deliveries are deferred to
the next grid boundary (the smallest multiple of P at or after transport
completion), mimicking synchronization schemes that exchange results only
on a coarse shared clock. Initial stimuli are boundary conditions and are
injected at exactly their stated time in either model.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .errors import UsageError, WorkloadError
from .topology import NodeId, Topology

__all__ = [
    "AnalogOffload",
    "NeuronSpec",
    "Stimulus",
    "Workload",
    "NeuronState",
    "build_layered",
    "build_fixed_work",
    "effective_compute_time",
    "apply_time_grid",
]

# Order-of-magnitude cost, in instruction ticks, of calling into the OS and
# back to hand work to a device outside the processor's own world.
DEFAULT_CONTEXT_SWITCH_TICKS = 10_000


@dataclass(frozen=True)
class AnalogOffload:
    """Compute delegated to an analog unit: fast processing, but each
    activation pays two context switches (in and out)."""

    t_analog: int
    t_ctx: int = DEFAULT_CONTEXT_SWITCH_TICKS

    def __post_init__(self) -> None:
        if self.t_analog < 0 or self.t_ctx < 0:
            raise UsageError("offload times must be >= 0")


@dataclass(frozen=True)
class NeuronSpec:
    id: NodeId
    t_comp: int
    fan_in: int
    targets: tuple[NodeId, ...] = ()
    offload: AnalogOffload | None = None

    def __post_init__(self) -> None:
        if self.t_comp < 0:
            raise UsageError("t_comp must be >= 0")
        if self.fan_in < 0:
            raise UsageError("fan_in must be >= 0")


@dataclass(frozen=True)
class Stimulus:
    target: NodeId
    at: int = 0

    def __post_init__(self) -> None:
        if self.at < 0:
            raise UsageError("stimulus time must be >= 0")


@dataclass(frozen=True)
class Workload:
    """Immutable set of neuron specs plus initial stimuli and time model.

    grid_period is None for event-driven execution, or the grid period P
    (>= 1 tick) for time-grid execution.
    """

    neurons: tuple[NeuronSpec, ...]
    stimuli: tuple[Stimulus, ...]
    grid_period: int | None = None

    def __post_init__(self) -> None:
        ids = [spec.id for spec in self.neurons]
        if len(set(ids)) != len(ids):
            raise UsageError("duplicate neuron ids in workload")
        known = set(ids)
        for stim in self.stimuli:
            if stim.target not in known:
                raise UsageError(f"stimulus targets unknown neuron {stim.target!r}")
        for spec in self.neurons:
            for tgt in spec.targets:
                if tgt not in known:
                    raise UsageError(f"neuron {spec.id!r} targets unknown neuron {tgt!r}")
        if self.grid_period is not None and self.grid_period < 1:
            raise UsageError("grid period must be >= 1 tick")

    def grid_delivery_time(self, transport_complete: int) -> int:
        """Delivery tick under the current time model."""
        period = self.grid_period
        if period is None:
            return transport_complete
        return -(-transport_complete // period) * period


def effective_compute_time(spec: NeuronSpec) -> int:
    """Ticks one activation occupies the neuron.

    Analog offload replaces the digital compute time with the analog
    processing time plus two context switches; it only pays off when
    t_comp - t_analog exceeds 2*t_ctx.
    """
    if spec.offload is None:
        return spec.t_comp
    return spec.offload.t_analog + 2 * spec.offload.t_ctx


class NeuronState:
    """Run-time argument buffer and activation bookkeeping for one neuron."""

    def __init__(self, spec: NeuronSpec) -> None:
        self.spec = spec
        self.received = 0
        self.busy_until: int | None = None

    def on_message(self, now: int) -> tuple[int, int] | None:
        """Register one delivered argument.

        Returns the (start, end) compute interval when this argument
        completes the expected fan-in, else None. A wave arriving beyond
        fan_in, or completing while the neuron still computes, is a
        workload-definition error.
        """
        if self.spec.fan_in == 0:
            raise WorkloadError(f"neuron {self.spec.id!r} with fan_in 0 received a message")
        self.received += 1
        if self.received < self.spec.fan_in:
            return None
        if self.received > self.spec.fan_in:
            raise WorkloadError(
                f"neuron {self.spec.id!r} received more than fan_in={self.spec.fan_in} arguments"
            )
        if self.busy_until is not None and now < self.busy_until:
            raise WorkloadError(
                f"neuron {self.spec.id!r} activated again while still computing"
            )
        self.received = 0
        end = now + effective_compute_time(self.spec)
        self.busy_until = end
        return (now, end)


def build_layered(
    layer_sizes: Sequence[int],
    t_comp: int | Sequence[int],
    topology: Topology,
    *,
    input_compute_time: int = 0,
    offload: AnalogOffload | None = None,
    grid_period: int | None = None,
) -> Workload:
    """Fully connected feed-forward network placed onto a topology.

    The input layer acts as a relay: it receives the single stimulus at
    t=0 and forwards immediately (input_compute_time, default 0). Deeper
    layers compute for t_comp ticks, given either uniformly or per layer
    (one entry for each layer after the input). Placement follows the
    topology's fill order (flat ascending ids; cluster-major, row-major
    on the clustered grid).
    """
    if len(layer_sizes) < 2:
        raise UsageError("a layered workload needs at least 2 layers")
    if any(size < 1 for size in layer_sizes):
        raise UsageError("every layer needs at least one neuron")
    deep_layers = len(layer_sizes) - 1
    if isinstance(t_comp, int):
        layer_comp = [t_comp] * deep_layers
    else:
        layer_comp = list(t_comp)
        if len(layer_comp) != deep_layers:
            raise UsageError(
                f"t_comp list must have {deep_layers} entries (layers after the input)"
            )
    if input_compute_time < 0 or any(t < 0 for t in layer_comp):
        raise UsageError("compute times must be >= 0")

    ids = topology.place(sum(layer_sizes))
    layers: list[list[NodeId]] = []
    cursor = 0
    for size in layer_sizes:
        layers.append(ids[cursor : cursor + size])
        cursor += size

    specs = []
    for idx, layer in enumerate(layers):
        targets = tuple(layers[idx + 1]) if idx + 1 < len(layers) else ()
        fan_in = 1 if idx == 0 else len(layers[idx - 1])
        comp = input_compute_time if idx == 0 else layer_comp[idx - 1]
        for node in layer:
            specs.append(
                NeuronSpec(
                    id=node,
                    t_comp=comp,
                    fan_in=fan_in,
                    targets=targets,
                    offload=None if idx == 0 else offload,
                )
            )
    stimuli = tuple(Stimulus(node, 0) for node in layers[0])
    return Workload(tuple(specs), stimuli, grid_period)


def build_fixed_work(
    n_workers: int,
    total_work: int,
    topology: Topology,
    *,
    output_compute_time: int = 0,
    grid_period: int | None = None,
) -> Workload:
    """A [1, n, 1] network that splits a fixed compute budget over the
    middle layer, as evenly as integer ticks allow.

    This is the strong-scaling shape: the work stays constant while the
    worker count grows, so the measured speedup curve is comparable with
    the analytic core-count models.
    """
    if n_workers < 1:
        raise UsageError("need at least one worker")
    if total_work < 0 or output_compute_time < 0:
        raise UsageError("compute budgets must be >= 0")
    base, rem = divmod(total_work, n_workers)
    ids = topology.place(n_workers + 2)
    source, workers, sink = ids[0], ids[1:-1], ids[-1]
    specs = [NeuronSpec(source, 0, 1, tuple(workers))]
    for i, worker in enumerate(workers):
        specs.append(NeuronSpec(worker, base + (1 if i < rem else 0), 1, (sink,)))
    specs.append(NeuronSpec(sink, output_compute_time, n_workers))
    return Workload(tuple(specs), (Stimulus(source, 0),), grid_period)


def apply_time_grid(workload: Workload, period: int) -> Workload:
    """Same workload under time-grid synchronization with the given period."""
    if period < 1:
        raise UsageError("grid period must be >= 1 tick")
    return replace(workload, grid_period=period)
