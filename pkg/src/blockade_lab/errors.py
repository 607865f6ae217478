"""Exception types shared across the package.

Solver-side failures derive from SolverError so the command line front end
can map them to one exit code without inspecting messages.
"""


class SolverError(RuntimeError):
    """Base class for numerical failures in the engine."""


class NoDissipationError(SolverError):
    """The Liouvillian has no dissipative part; no unique steady state."""


class DegenerateSteadyStateError(SolverError):
    """The numerical null space of the Liouvillian has dimension > 1."""


class StepTooLargeError(SolverError):
    """The requested integration step violates the stability bound."""


class NotConvergedError(SolverError):
    """A long-time integration did not settle to a steady value."""


class SingularDenominatorError(SolverError):
    """A closed-form expression hit a vanishing denominator."""


class NoInteriorExtremumError(RuntimeError):
    """A scanned curve has no interior local extremum."""


class ConfigError(ValueError):
    """Malformed configuration input (file, flag combination, or sweep spec)."""
