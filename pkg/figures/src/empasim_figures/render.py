"""The four figure kinds.

surface   efficiency heatmap over (non-payload fraction, core count)
roofline  saturating performance-gain curves, one per workload profile
limit     payload-performance ceilings, log-log, one curve per profile
gantt     per-entity timing bars (compute, transport, bus occupancy)
          reconstructed from an event trace

Rendering is a pure function of the dataset: fixed styling, fixed sizes,
no timestamps, so re-rendering the same input yields identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .datasets import SchemaError, load_csv, load_trace

KINDS = ("surface", "roofline", "limit", "gantt")

_PAYLOAD_COLOR = "#2a9d4e"
_TRANSPORT_COLOR = "#e08a2e"
_BUS_COLOR = "#6c6f7a"


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    dataset: str
    out_path: str
    log_x: bool | None = None  # None = the kind's default
    log_y: bool | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def render(spec: FigureSpec) -> str:
    """Render the figure and return the output path."""
    fig = _RENDERERS[spec.kind](spec)
    fig.savefig(spec.out_path, dpi=120, metadata={"Software": "empasim-figures"})
    plt.close(fig)
    return spec.out_path


def _axes(spec: FigureSpec, default_log_x: bool, default_log_y: bool, figsize):
    fig, ax = plt.subplots(figsize=figsize)
    if spec.log_x if spec.log_x is not None else default_log_x:
        ax.set_xscale("log")
    if spec.log_y if spec.log_y is not None else default_log_y:
        ax.set_yscale("log")
    return fig, ax


def _render_surface(spec: FigureSpec):
    rows = load_csv(spec.dataset, ("s", "n", "efficiency"))
    s_values = sorted({float(r["s"]) for r in rows})
    n_values = sorted({float(r["n"]) for r in rows})
    grid = np.full((len(s_values), len(n_values)), np.nan)
    s_index = {v: i for i, v in enumerate(s_values)}
    n_index = {v: j for j, v in enumerate(n_values)}
    for r in rows:
        grid[s_index[float(r["s"])], n_index[float(r["n"])]] = float(r["efficiency"])
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    mesh = ax.pcolormesh(n_values, s_values, grid, cmap="viridis", vmin=0.0, vmax=1.0, shading="auto")
    ax.set_xscale("log")
    if min(s_values) > 0:
        ax.set_yscale("log")
    ax.set_xlabel("cores")
    ax.set_ylabel("non-payload fraction")
    ax.set_title("efficiency of parallelized sequential processing")
    fig.colorbar(mesh, ax=ax, label="efficiency")
    return fig


def _profile_series(spec: FigureSpec, value_column: str):
    rows = load_csv(spec.dataset, ("profile", "n", value_column))
    series: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        series.setdefault(r["profile"], []).append((float(r["n"]), float(r[value_column])))
    for points in series.values():
        points.sort()
    return series


def _render_roofline(spec: FigureSpec):
    series = _profile_series(spec, "speedup_second")
    fig, ax = _axes(spec, True, True, (7.0, 5.0))
    # legend ordered by plateau, highest ceiling first
    order = sorted(series, key=lambda name: -max(v for _, v in series[name]))
    for name in order:
        ns = [n for n, _ in series[name]]
        values = [v for _, v in series[name]]
        ax.plot(ns, values, label=f"{name} (plateau {max(values):.3g})")
    ax.set_xlabel("cores")
    ax.set_ylabel("performance gain")
    ax.set_title("workload rooflines")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return fig


def _render_limit(spec: FigureSpec):
    series = _profile_series(spec, "payload_performance")
    fig, ax = _axes(spec, True, True, (7.0, 5.0))
    order = sorted(series, key=lambda name: -max(v for _, v in series[name]))
    for name in order:
        ns = [n for n, _ in series[name]]
        values = [v for _, v in series[name]]
        ax.plot(ns, values, label=name)
        ax.axhline(max(values), color="black", lw=0.6, ls=":", alpha=0.5)
    ax.set_xlabel("cores")
    ax.set_ylabel("payload performance")
    ax.set_title("payload performance limits")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return fig


def _lane_key(name: str):
    return (len(name), name)


def _render_gantt(spec: FigureSpec):
    records = load_trace(spec.dataset)
    compute: dict[str, list[tuple[int, int]]] = {}
    transport: dict[str, list[tuple[int, int]]] = {}
    bus: dict[str, list[tuple[int, int]]] = {}
    sender_of: dict[str, str] = {}
    for r in records:
        kind = r["kind"]
        if kind == "msg_send_request":
            sender_of[r["object"]] = r["subject"]
        elif kind == "compute_end" and r["duration"] > 0:
            compute.setdefault(r["subject"], []).append((r["time"] - r["duration"], r["duration"]))
        elif kind == "msg_deliver" and r["duration"] > 0:
            sender = sender_of.get(r["object"])
            if sender is not None:
                span = (r["time"] - r["duration"], r["duration"])
                spans = transport.setdefault(sender, [])
                if span not in spans:
                    spans.append(span)
        elif kind == "bus_release":
            bus.setdefault(r["subject"], []).append((r["time"] - r["duration"], r["duration"]))

    entities = sorted(set(compute) | set(transport), key=_lane_key)
    buses = sorted(bus, key=_lane_key)
    lanes = entities + buses
    if not lanes:
        raise SchemaError(f"trace {spec.dataset} holds no drawable spans")
    fig, ax = plt.subplots(figsize=(8.0, 0.6 * len(lanes) + 1.6))
    for row, lane in enumerate(lanes):
        if lane in compute:
            ax.broken_barh(compute[lane], (row - 0.3, 0.6), color=_PAYLOAD_COLOR)
        if lane in transport:
            ax.broken_barh(transport[lane], (row - 0.3, 0.6), color=_TRANSPORT_COLOR, alpha=0.8)
        if lane in bus:
            ax.broken_barh(bus[lane], (row - 0.3, 0.6), color=_BUS_COLOR)
    ax.set_yticks(range(len(lanes)), lanes)
    ax.invert_yaxis()
    ax.set_xlabel("ticks")
    ax.set_title("event timing")
    handles = [
        plt.Rectangle((0, 0), 1, 1, color=_PAYLOAD_COLOR),
        plt.Rectangle((0, 0), 1, 1, color=_TRANSPORT_COLOR),
        plt.Rectangle((0, 0), 1, 1, color=_BUS_COLOR),
    ]
    ax.legend(handles, ["compute", "transport", "bus busy"], loc="lower right")
    ax.grid(True, axis="x", alpha=0.3)
    return fig


_RENDERERS = {
    "surface": _render_surface,
    "roofline": _render_roofline,
    "limit": _render_limit,
    "gantt": _render_gantt,
}
