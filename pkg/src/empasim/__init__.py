"""Discrete-event simulation of neuromorphic interconnects plus analytic
scaling models of parallelized-sequential computing."""

from .engine import Engine, Event, EventKind, SimTrace
from .errors import (
    CapacityError,
    CausalityError,
    ConfigError,
    EmpasimError,
    ExtrapolationError,
    ParameterDomainError,
    RemapError,
    RoutingError,
    SimulationError,
    UsageError,
    WorkloadError,
)
from .experiments import (
    Metrics,
    ModelComparison,
    SweepResult,
    compare_with_model,
    metrics_from_trace,
    run_experiment,
    sweep,
    write_dataset,
)
from .scaling import (
    PRESET_PROFILES,
    CurvePoint,
    MixedPrecisionResult,
    ScalingParams,
    WorkloadProfile,
    efficiency,
    efficiency_surface,
    fit_second_order,
    mixed_precision_extrapolate,
    optimal_cores,
    payload_performance,
    speedup_first_order,
    speedup_second_order,
)
from .topology import (
    BusLevel,
    DirectTopology,
    EmpaTopology,
    Path,
    Segment,
    SharedBusTopology,
    Topology,
    build_direct,
    build_empa,
    build_shared_bus,
    remap_core,
    route,
)
from .workload import (
    AnalogOffload,
    NeuronSpec,
    NeuronState,
    Stimulus,
    Workload,
    apply_time_grid,
    build_fixed_work,
    build_layered,
    effective_compute_time,
)

__version__ = "0.1.0"
