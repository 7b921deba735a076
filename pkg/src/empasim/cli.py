"""Command-line entry point.

Subcommands: run, sweep, model, extrapolate. Exit codes: 0 on success,
2 for usage/config problems, 3 for simulation failures. Every error path
prints a single line ``error[<class>]: <message>`` on stderr, where class
is ``config``, ``usage``, or ``runtime``. Repeated invocations of the same
config produce byte-identical output files.

The --seed flag is accepted for interface stability but unused: the
simulator is deterministic and draws no random numbers.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments, scaling
from .config import SWEEP_PARAMETERS, materialize, parse_config
from .errors import (
    ConfigError,
    EmpasimError,
    ExtrapolationError,
    ParameterDomainError,
    SimulationError,
    UsageError,
)

MODEL_COLUMNS = ("profile", "n", "speedup_first", "speedup_second", "efficiency", "payload_performance")
SURFACE_COLUMNS = ("s", "n", "efficiency")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _write_table(path, columns, rows, fmt) -> None:
    import json

    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "tabular":
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(
                    ",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n"
                )
        else:
            for row in rows:
                fh.write(json.dumps(dict(zip(columns, row))) + "\n")


def _add_common(parser) -> None:
    parser.add_argument("--config", help="experiment config file (INI)")
    parser.add_argument("--out", help="override the output dataset path")
    parser.add_argument(
        "--format", choices=["tabular", "structured-records"], help="dataset format override"
    )
    parser.add_argument("--trace", help="write the event trace to this path (run only)")
    parser.add_argument("--jobs", type=int, default=1, help="parallel runs for sweeps")
    parser.add_argument("--seed", type=int, default=0, help="reserved; the simulator is deterministic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="empasim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate the configured workload once")
    _add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="run the configured parameter sweep")
    _add_common(p_sweep)

    p_model = sub.add_parser("model", help="evaluate the analytic scaling curves")
    _add_common(p_model)
    p_model.add_argument("--s", type=float, default=0.0, help="non-payload fraction")
    p_model.add_argument("--c", type=float, default=0.0, help="per-core overhead coefficient")
    p_model.add_argument("--p", type=float, default=1.0, help="per-core performance")
    p_model.add_argument(
        "--preset",
        choices=[prof.name for prof in scaling.PRESET_PROFILES] + ["all"],
        help="use a named workload profile instead of --s/--c/--p",
    )
    p_model.add_argument("--n-values", help="comma-separated core counts")
    p_model.add_argument("--n-max", type=int, default=10**6, help="top of the log-spaced range")
    p_model.add_argument("--points", type=int, default=25, help="log-spaced sample count")
    p_model.add_argument("--surface", action="store_true", help="emit an efficiency grid instead of curves")
    p_model.add_argument("--s-values", help="comma-separated fractions for --surface")

    p_ex = sub.add_parser("extrapolate", help="zero-width operand performance extrapolation")
    _add_common(p_ex)
    p_ex.add_argument("--perf-a", type=float, required=True, help="performance at the wide format")
    p_ex.add_argument("--width-a", type=int, required=True, help="wide operand bits")
    p_ex.add_argument("--perf-b", type=float, required=True, help="performance at the narrow format")
    p_ex.add_argument("--width-b", type=int, required=True, help="narrow operand bits")

    return parser


def _load_config(args):
    if not args.config:
        raise ConfigError("--config is required for this command")
    return parse_config(args.config)


def _output_settings(cfg, args):
    dataset = args.out or cfg.output.dataset
    fmt = args.format or cfg.output.format
    trace = args.trace or cfg.output.trace
    return dataset, fmt, trace


def cmd_run(args) -> int:
    cfg = _load_config(args)
    dataset, fmt, trace_path = _output_settings(cfg, args)
    workload, topology = materialize(cfg)
    metrics, trace = experiments.run_experiment(workload, topology)
    experiments.write_dataset(dataset, [metrics.as_row("-")], fmt)
    if trace_path:
        trace.write(trace_path)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    if cfg.sweep is None:
        raise ConfigError("config has no [sweep] section")
    dataset, fmt, _ = _output_settings(cfg, args)
    parameter, values = cfg.sweep.parameter, cfg.sweep.values
    result = experiments.sweep(
        lambda value: materialize(cfg, parameter, value), parameter, values, jobs=args.jobs
    )
    experiments.write_dataset(dataset, experiments.dataset_rows(result), fmt)
    return EXIT_OK


def _parse_floats(raw: str, what: str) -> list[float]:
    try:
        values = [float(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated number list") from None
    if not values:
        raise UsageError(f"{what} must not be empty")
    return values


def _log_spaced(n_max: int, points: int) -> list[int]:
    if n_max < 1 or points < 1:
        raise UsageError("--n-max and --points must be >= 1")
    values = sorted({max(1, round((n_max) ** (i / max(points - 1, 1)))) for i in range(points)})
    return values


def cmd_model(args) -> int:
    dataset = args.out or "model.csv"
    fmt = args.format or "tabular"
    if args.n_values:
        n_values = [int(v) for v in _parse_floats(args.n_values, "--n-values")]
    else:
        n_values = _log_spaced(args.n_max, args.points)
    if any(n < 1 for n in n_values):
        raise UsageError("core counts must be >= 1")

    if args.surface:
        if not args.s_values:
            raise UsageError("--surface needs --s-values")
        s_values = _parse_floats(args.s_values, "--s-values")
        grid = scaling.efficiency_surface(s_values, n_values, args.c)
        rows = []
        for s, row in zip(s_values, grid):
            for n, eff in zip(n_values, row):
                rows.append((s, n, eff))
        _write_table(dataset, SURFACE_COLUMNS, rows, fmt)
        return EXIT_OK

    if args.preset == "all":
        profiles = list(scaling.PRESET_PROFILES)
    elif args.preset:
        profiles = [prof for prof in scaling.PRESET_PROFILES if prof.name == args.preset]
    else:
        profiles = [scaling.WorkloadProfile("custom", scaling.ScalingParams(args.s, args.c, args.p))]
    rows = []
    for prof in profiles:
        for n in n_values:
            rows.append(
                (
                    prof.name,
                    n,
                    scaling.speedup_first_order(prof.params, n),
                    scaling.speedup_second_order(prof.params, n),
                    scaling.efficiency(prof.params, n),
                    scaling.payload_performance(prof.params, n),
                )
            )
    _write_table(dataset, MODEL_COLUMNS, rows, fmt)
    return EXIT_OK


def cmd_extrapolate(args) -> int:
    result = scaling.mixed_precision_extrapolate(
        args.perf_a, args.width_a, args.perf_b, args.width_b
    )
    print(f"housekeeping_share {result.housekeeping_share!r}")
    print(f"fp0_performance {result.fp0_performance!r}")
    return EXIT_OK


_COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "model": cmd_model,
    "extrapolate": cmd_extrapolate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ParameterDomainError, ExtrapolationError) as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationError as exc:
        print(f"error[runtime]: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except EmpasimError as exc:
        print(f"error[runtime]: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
