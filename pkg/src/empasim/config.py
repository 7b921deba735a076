"""Experiment config files: a sectioned key-value (INI) format.

Sections and keys (durations are integer ticks):

    [topology]
    kind = direct | shared_bus | empa
    n_nodes = <int>            optional for direct/shared_bus; default: workload size
    t_link = <int>             direct
    t_bus = <int>              shared_bus; also the level-1 bus time for empa
    broadcast = true|false     shared_bus; default true
    clusters = <int>           empa
    rows = <int>               empa
    cols = <int>               empa
    t_hop = <int>              empa
    t_head = <int>             empa
    clusters_per_chip = <int>  empa, optional; enables a level-2 bus
    t_bus2 = <int>             empa, required with clusters_per_chip

    [workload]
    layers = 1,2,1
    t_comp = <int>             compute time of every layer after the input
    input_t_comp = <int>       default 0 (the input layer relays immediately)
    time_model = event | grid  default event
    period = <int>             required for grid
    total_work = <int>         compute budget split over the middle layer
                               (used by the "cores" sweep)
    t_analog = <int>           optional analog offload for non-input layers
    t_ctx = <int>              context-switch cost, default 10000

    [sweep]
    parameter = width | cores | clusters | t_bus | period
    values = 2,3,4

    [model]
    s = <float>   c = <float>   p = <float>

    [output]
    dataset = <path>           default metrics.csv
    trace = <path>             optional, run command only
    format = tabular | structured-records
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace

from .errors import ConfigError, UsageError
from .scaling import ScalingParams
from .topology import (
    BusLevel,
    Topology,
    build_direct,
    build_empa,
    build_shared_bus,
)
from .workload import Workload, build_fixed_work, build_layered

__all__ = ["ExperimentConfig", "parse_config", "materialize", "SWEEP_PARAMETERS"]

SWEEP_PARAMETERS = ("width", "cores", "clusters", "t_bus", "period")


@dataclass(frozen=True)
class TopologySection:
    kind: str
    n_nodes: int | None = None
    t_link: int = 1
    t_bus: int = 1
    broadcast: bool = True
    clusters: int = 1
    rows: int = 2
    cols: int = 2
    t_hop: int = 1
    t_head: int = 0
    clusters_per_chip: int | None = None
    t_bus2: int | None = None


@dataclass(frozen=True)
class WorkloadSection:
    layers: tuple[int, ...] = (1, 2, 1)
    t_comp: int = 1
    input_t_comp: int = 0
    time_model: str = "event"
    period: int | None = None
    total_work: int | None = None
    t_analog: int | None = None
    t_ctx: int = 10_000


@dataclass(frozen=True)
class SweepSection:
    parameter: str
    values: tuple[int, ...]


@dataclass(frozen=True)
class OutputSection:
    dataset: str = "metrics.csv"
    trace: str | None = None
    format: str = "tabular"


@dataclass(frozen=True)
class ExperimentConfig:
    topology: TopologySection
    workload: WorkloadSection
    sweep: SweepSection | None = None
    model: ScalingParams | None = None
    output: OutputSection = OutputSection()


def _get_int(section, key: str, default=None, minimum: int | None = None):
    raw = section.get(key)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"key {key!r} must be an integer, got {raw!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(f"key {key!r} must be >= {minimum}, got {value}")
    return value


def _get_float(section, key: str, default=None):
    raw = section.get(key)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"key {key!r} must be a number, got {raw!r}") from None


def _get_int_list(section, key: str) -> tuple[int, ...] | None:
    raw = section.get(key)
    if raw is None:
        return None
    try:
        return tuple(int(part.strip()) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"key {key!r} must be a comma-separated integer list") from None


def parse_config(path) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None

    if not parser.has_section("topology"):
        raise ConfigError("config needs a [topology] section")
    tsec = parser["topology"]
    kind = tsec.get("kind", "").strip()
    if kind not in ("direct", "shared_bus", "empa"):
        raise ConfigError(f"topology kind must be direct, shared_bus, or empa, got {kind!r}")
    try:
        broadcast = tsec.getboolean("broadcast", fallback=True)
    except ValueError:
        raise ConfigError("key 'broadcast' must be a boolean") from None
    topology = TopologySection(
        kind=kind,
        n_nodes=_get_int(tsec, "n_nodes", None, minimum=1),
        t_link=_get_int(tsec, "t_link", 1, minimum=1),
        t_bus=_get_int(tsec, "t_bus", 1, minimum=1),
        broadcast=broadcast,
        clusters=_get_int(tsec, "clusters", 1, minimum=1),
        rows=_get_int(tsec, "rows", 2, minimum=1),
        cols=_get_int(tsec, "cols", 2, minimum=1),
        t_hop=_get_int(tsec, "t_hop", 1, minimum=1),
        t_head=_get_int(tsec, "t_head", 0, minimum=0),
        clusters_per_chip=_get_int(tsec, "clusters_per_chip", None, minimum=1),
        t_bus2=_get_int(tsec, "t_bus2", None, minimum=1),
    )
    if topology.clusters_per_chip is not None and topology.t_bus2 is None:
        raise ConfigError("clusters_per_chip needs t_bus2 for the level-2 bus")

    wsec = parser["workload"] if parser.has_section("workload") else {}
    layers = _get_int_list(wsec, "layers") if wsec else None
    time_model = (wsec.get("time_model", "event") if wsec else "event").strip()
    if time_model not in ("event", "grid"):
        raise ConfigError(f"time_model must be 'event' or 'grid', got {time_model!r}")
    period = _get_int(wsec, "period", None, minimum=1) if wsec else None
    if time_model == "grid" and period is None:
        raise ConfigError("time_model grid needs a period")
    workload = WorkloadSection(
        layers=layers if layers is not None else (1, 2, 1),
        t_comp=_get_int(wsec, "t_comp", 1, minimum=0) if wsec else 1,
        input_t_comp=_get_int(wsec, "input_t_comp", 0, minimum=0) if wsec else 0,
        time_model=time_model,
        period=period if time_model == "grid" else None,
        total_work=_get_int(wsec, "total_work", None, minimum=0) if wsec else None,
        t_analog=_get_int(wsec, "t_analog", None, minimum=0) if wsec else None,
        t_ctx=_get_int(wsec, "t_ctx", 10_000, minimum=0) if wsec else 10_000,
    )
    if len(workload.layers) < 2 or any(size < 1 for size in workload.layers):
        raise ConfigError("layers must list at least two sizes, all >= 1")

    sweep_section = None
    if parser.has_section("sweep"):
        ssec = parser["sweep"]
        parameter = ssec.get("parameter", "").strip()
        if parameter not in SWEEP_PARAMETERS:
            raise ConfigError(
                f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}"
            )
        values = _get_int_list(ssec, "values")
        if not values:
            raise ConfigError("sweep needs a non-empty values list")
        sweep_section = SweepSection(parameter, values)

    model = None
    if parser.has_section("model"):
        msec = parser["model"]
        model = ScalingParams(
            _get_float(msec, "s", 0.0),
            _get_float(msec, "c", 0.0),
            _get_float(msec, "p", 1.0),
        )

    output = OutputSection()
    if parser.has_section("output"):
        osec = parser["output"]
        fmt = osec.get("format", "tabular").strip()
        if fmt not in ("tabular", "structured-records"):
            raise ConfigError(f"format must be 'tabular' or 'structured-records', got {fmt!r}")
        output = OutputSection(
            dataset=osec.get("dataset", "metrics.csv").strip(),
            trace=(osec.get("trace") or None),
            format=fmt,
        )

    return ExperimentConfig(topology, workload, sweep_section, model, output)


def _build_topology(tsec: TopologySection, needed_nodes: int) -> Topology:
    if tsec.kind == "direct":
        return build_direct(tsec.n_nodes or needed_nodes, tsec.t_link)
    if tsec.kind == "shared_bus":
        return build_shared_bus(tsec.n_nodes or needed_nodes, tsec.t_bus, tsec.broadcast)
    if tsec.clusters_per_chip is not None:
        levels = (
            BusLevel(tsec.t_bus, tsec.clusters_per_chip),
            BusLevel(tsec.t_bus2, tsec.clusters),
        )
    else:
        levels = (BusLevel(tsec.t_bus, tsec.clusters),)
    return build_empa(tsec.clusters, tsec.rows, tsec.cols, tsec.t_hop, tsec.t_head, levels)


def materialize(
    cfg: ExperimentConfig, parameter: str | None = None, value: int | None = None
) -> tuple[Workload, Topology]:
    """Build the workload and topology for one run, with an optional sweep
    override applied."""
    from .workload import AnalogOffload

    tsec, wsec = cfg.topology, cfg.workload
    if parameter is not None:
        if parameter not in SWEEP_PARAMETERS:
            raise UsageError(f"unknown sweep parameter {parameter!r}")
        if parameter == "width":
            if len(wsec.layers) < 3:
                raise UsageError("width sweep needs at least one hidden layer")
            if value < 1:
                raise UsageError("width values must be >= 1")
            middle = tuple(value for _ in wsec.layers[1:-1])
            wsec = replace(wsec, layers=(wsec.layers[0],) + middle + (wsec.layers[-1],))
        elif parameter == "cores":
            if wsec.total_work is None:
                raise UsageError("cores sweep needs total_work in [workload]")
            if value < 1:
                raise UsageError("cores values must be >= 1")
            wsec = replace(wsec, layers=(1, value, 1))
        elif parameter == "clusters":
            if tsec.kind != "empa":
                raise UsageError("clusters sweep needs an empa topology")
            if value < 1:
                raise UsageError("cluster counts must be >= 1")
            tsec = replace(tsec, clusters=value)
        elif parameter == "t_bus":
            if tsec.kind == "direct":
                raise UsageError("t_bus sweep needs a bus-based topology")
            if value < 1:
                raise UsageError("t_bus values must be >= 1")
            tsec = replace(tsec, t_bus=value)
        elif parameter == "period":
            if value < 1:
                raise UsageError("grid periods must be >= 1")
            wsec = replace(wsec, time_model="grid", period=value)

    grid_period = wsec.period if wsec.time_model == "grid" else None
    if parameter == "cores":
        needed = wsec.layers[1] + 2
        topology = _build_topology(tsec, needed)
        workload = build_fixed_work(
            wsec.layers[1],
            wsec.total_work,
            topology,
            output_compute_time=wsec.t_comp,
            grid_period=grid_period,
        )
        return workload, topology
    needed = sum(wsec.layers)
    topology = _build_topology(tsec, needed)
    offload = None
    if wsec.t_analog is not None:
        offload = AnalogOffload(wsec.t_analog, wsec.t_ctx)
    workload = build_layered(
        wsec.layers,
        wsec.t_comp,
        topology,
        input_compute_time=wsec.input_t_comp,
        offload=offload,
        grid_period=grid_period,
    )
    return workload, topology
