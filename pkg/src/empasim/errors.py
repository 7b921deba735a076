"""Exception hierarchy.

Two families matter to callers: configuration/usage problems (bad parameters,
malformed configs, degenerate inputs) and simulation-time failures (causality
violations, capacity overruns, routing on unmapped ids). The CLI maps the
first family to exit code 2 and the second to exit code 3.
"""


class EmpasimError(Exception):
    """Base class for all errors raised by this package."""


class ParameterDomainError(EmpasimError, ValueError):
    """A scaling-model parameter is outside its mathematical domain."""


class ExtrapolationError(EmpasimError, ValueError):
    """Operand-width extrapolation is infeasible for the given measurements."""


class UsageError(EmpasimError, ValueError):
    """An operation was called with degenerate or unsupported arguments."""


class ConfigError(EmpasimError, ValueError):
    """An experiment config file is missing, malformed, or inconsistent."""


class SimulationError(EmpasimError):
    """Base class for failures during topology setup or a simulation run."""


class CausalityError(SimulationError):
    """An event was scheduled before the current simulation time."""


class CapacityError(SimulationError):
    """A workload does not fit onto the target topology."""


class RoutingError(SimulationError):
    """A route was requested for an unknown or unmapped node id."""


class RemapError(SimulationError):
    """A virtual-to-physical remap request cannot be honored."""


class WorkloadError(SimulationError):
    """A workload definition is internally inconsistent at run time."""
