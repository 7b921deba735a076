"""Analytic models of parallelized-sequential performance.

The closed forms used throughout:

    first order    S1(n) = 1 / (s + (1 - s)/n)
    second order   S2(n) = 1 / (s + (1 - s)/n + c*(n - 1))

where ``s`` is the non-payload (serial) fraction of the single-core run,
``c`` is the per-core overhead added for every core beyond the first
(normalized to the single-core total time), and ``n`` the core count.
The first order saturates at 1/s; the second order has an interior peak
near sqrt((1 - s)/c) and then decays, so adding cores past the peak makes
the run slower.

Payload performance is ``p * n * efficiency(n) = p * S2(n)`` for per-core
performance ``p``; with ``c = 0`` it is bounded by ``p/s`` for every finite
core count, a workload-dependent ceiling.

Note on the symbol alpha: performance literature uses alpha both for the
non-payload fraction (our ``s``) and for its complement, the parallelizable
fraction (our ``1 - s``). :attr:`ScalingParams.alpha` aliases ``s``; callers
relying on the other convention must convert explicitly. No numeric default
is baked in for either reading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ExtrapolationError, ParameterDomainError, UsageError

__all__ = [
    "ScalingParams",
    "WorkloadProfile",
    "CurvePoint",
    "MixedPrecisionResult",
    "PRESET_PROFILES",
    "speedup_first_order",
    "speedup_second_order",
    "optimal_cores",
    "efficiency",
    "efficiency_surface",
    "payload_performance",
    "mixed_precision_extrapolate",
    "fit_second_order",
]


@dataclass(frozen=True)
class ScalingParams:
    """Parameters of the parallelized-sequential performance model.

    nonpayload_fraction: fraction of the single-core run spent on
        communication/synchronization rather than computing, in [0, 1].
    overhead_coeff: extra time per additional core, normalized to the
        single-core total, >= 0.
    per_core_perf: operations per time unit of one core, > 0.

    (0, 0) for the first two gives ideal linear scaling.
    """

    nonpayload_fraction: float
    overhead_coeff: float = 0.0
    per_core_perf: float = 1.0

    def __post_init__(self) -> None:
        s, c, p = self.nonpayload_fraction, self.overhead_coeff, self.per_core_perf
        if not (0.0 <= s <= 1.0) or math.isnan(s):
            raise ParameterDomainError(f"nonpayload_fraction must be in [0, 1], got {s}")
        if c < 0.0 or math.isnan(c):
            raise ParameterDomainError(f"overhead_coeff must be >= 0, got {c}")
        if not (p > 0.0) or math.isinf(p):
            raise ParameterDomainError(f"per_core_perf must be > 0, got {p}")

    @property
    def alpha(self) -> float:
        """Alias for the non-payload fraction (see the module note on alpha)."""
        return self.nonpayload_fraction


@dataclass(frozen=True)
class WorkloadProfile:
    """A named workload class with its characteristic scaling parameters."""

    name: str
    params: ScalingParams


# Configurable defaults, not measured ground truth: chosen so the
# communication-to-computation ratio rises from dense linear algebra
# (HPL-like) through iterative solvers and AI training to brain-scale
# simulation, which saturates earliest.
PRESET_PROFILES: tuple[WorkloadProfile, ...] = (
    WorkloadProfile("hpl", ScalingParams(1e-7)),
    WorkloadProfile("hpcg", ScalingParams(1e-5)),
    WorkloadProfile("ai", ScalingParams(1e-4)),
    WorkloadProfile("brain", ScalingParams(1e-2)),
)


@dataclass(frozen=True)
class CurvePoint:
    """One sample of an analytic curve at a given core count."""

    n_cores: int
    value: float

    def __post_init__(self) -> None:
        if self.n_cores < 1:
            raise ParameterDomainError(f"n_cores must be >= 1, got {self.n_cores}")


def _check_n(n: float) -> None:
    if math.isnan(n) or n < 1:
        raise ParameterDomainError(f"core count must be >= 1, got {n}")


def speedup_first_order(params: ScalingParams, n: float) -> float:
    """Saturating speedup S1(n) = 1 / (s + (1 - s)/n).

    Nondecreasing in n, bounded by min(n, 1/s). Real-valued n is accepted
    for curve evaluation; optimizers stick to integers.
    """
    _check_n(n)
    s = params.nonpayload_fraction
    return 1.0 / (s + (1.0 - s) / n)


def total_time_second_order(params: ScalingParams, n: float) -> float:
    """Normalized run time T(n) = s + (1 - s)/n + c*(n - 1), with T(1) = 1."""
    _check_n(n)
    s, c = params.nonpayload_fraction, params.overhead_coeff
    return s + (1.0 - s) / n + c * (n - 1.0)


def speedup_second_order(params: ScalingParams, n: float) -> float:
    """Peaked speedup S2(n) = 1/T(n); reduces to S1 when c = 0."""
    return 1.0 / total_time_second_order(params, n)


def optimal_cores(params: ScalingParams) -> int:
    """Integer core count maximizing the second-order speedup.

    Requires c > 0 (otherwise the speedup has no interior maximum and
    grows toward its asymptote forever). Ties break toward the smaller n.
    """
    s, c = params.nonpayload_fraction, params.overhead_coeff
    if c <= 0.0:
        raise ParameterDomainError(
            "overhead_coeff must be > 0: with c = 0 the speedup has no interior optimum"
        )
    # T(n) is convex for n > 0, so the integer argmin of T sits next to the
    # real minimizer sqrt((1 - s)/c).
    n_star = math.sqrt(max(1.0 - s, 0.0) / c)
    lo = max(1, math.floor(n_star))
    best = lo
    for cand in (lo, lo + 1):
        if total_time_second_order(params, cand) < total_time_second_order(params, best):
            best = cand
    return best


def efficiency(params: ScalingParams, n: float) -> float:
    """Per-core efficiency S2(n)/n, in (0, 1]; nonincreasing in n and s."""
    return speedup_second_order(params, n) / n


def efficiency_surface(
    s_values: list[float],
    n_values: list[float],
    overhead_coeff: float = 0.0,
) -> list[list[float]]:
    """Efficiency grid over non-payload fractions (rows) and core counts (cols).

    With a fixed overhead coefficient the grid is monotone nonincreasing
    along both axes.
    """
    if not s_values or not n_values:
        raise UsageError("efficiency_surface needs non-empty s and n value lists")
    grid = []
    for s in s_values:
        params = ScalingParams(s, overhead_coeff)
        grid.append([efficiency(params, n) for n in n_values])
    return grid


def payload_performance(params: ScalingParams, n: float) -> float:
    """Payload operations per time unit, p * n * efficiency(n).

    For c = 0 and s > 0 this stays below the ceiling p/s at every finite n.
    """
    return params.per_core_perf * n * efficiency(params, n)


@dataclass(frozen=True)
class MixedPrecisionResult:
    """Outcome of extrapolating two operand-width measurements to zero width."""

    housekeeping_share: float  # H / (H + P), fraction of unit-width run time
    fp0_performance: float  # performance ceiling with zero-width operands


def mixed_precision_extrapolate(
    perf_a: float, width_a: int, perf_b: float, width_b: int
) -> MixedPrecisionResult:
    """Split a run into width-proportional payload and fixed housekeeping.

    Model per-operation time at operand width w (relative to width_a):
    T(w) = H + P * (w / width_a). Two measured performances at widths
    width_a > width_b determine H and P; the zero-width ceiling is 1/H.

    Feasible only when 1 < perf_b/perf_a < width_a/width_b: a ratio at the
    width ratio forces H <= 0, and a ratio <= 1 means the narrower operands
    brought no speedup at all.
    """
    if width_b <= 0 or width_a <= 0:
        raise ParameterDomainError("operand widths must be positive bit counts")
    if width_a <= width_b:
        raise ParameterDomainError("width_a must be the wider operand format")
    if perf_a <= 0 or perf_b <= 0:
        raise ParameterDomainError("performances must be positive")
    ratio = perf_b / perf_a
    if ratio <= 1.0:
        raise ExtrapolationError(
            f"no speedup: perf ratio {ratio:.6g} must exceed 1"
        )
    if ratio >= width_a / width_b:
        raise ExtrapolationError(
            f"zero/negative housekeeping: perf ratio {ratio:.6g} reaches the "
            f"width ratio {width_a / width_b:.6g}"
        )
    t_a = 1.0 / perf_a
    t_b = 1.0 / perf_b
    payload = (t_a - t_b) / (1.0 - width_b / width_a)
    housekeeping = t_a - payload
    return MixedPrecisionResult(
        housekeeping_share=housekeeping / t_a,
        fp0_performance=1.0 / housekeeping,
    )


def fit_second_order(n_values, speedups) -> ScalingParams:
    """Least-squares fit of (s, c) to a measured speedup curve.

    Linear in the transformed variables: 1/S - 1/n = s*(1 - 1/n) + c*(n - 1).
    Negative least-squares solutions are clamped to the parameter domain.
    """
    n = np.asarray(n_values, dtype=float)
    sp = np.asarray(speedups, dtype=float)
    if n.size < 3:
        raise UsageError("fit needs at least 3 sweep points")
    if np.any(n < 1) or np.any(sp <= 0):
        raise ParameterDomainError("fit needs n >= 1 and positive speedups")
    y = 1.0 / sp - 1.0 / n
    features = np.column_stack([1.0 - 1.0 / n, n - 1.0])
    (s, c), *_ = np.linalg.lstsq(features, y, rcond=None)
    return ScalingParams(min(max(float(s), 0.0), 1.0), max(float(c), 0.0))
