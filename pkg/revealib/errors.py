"""Exception hierarchy shared by every revealib subpackage."""


class RevealibError(Exception):
    """Base class for all revealib errors."""


class ConfigurationError(RevealibError, ValueError):
    """Invalid configuration, flag combination or instance data."""


class DomainError(RevealibError, ValueError):
    """A value lies outside the domain of a map or violates a type invariant."""


class NumericalGuardError(RevealibError, ArithmeticError):
    """An input would drive a closed form through a division by (near) zero or a non-finite value."""


class SolverError(RevealibError, RuntimeError):
    """A forward solver or oracle did not return an optimal point."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class UnsupportedModeError(RevealibError, NotImplementedError):
    """The requested quantity is not computable in this observation mode."""


class DimensionLimitError(RevealibError, ValueError):
    """Problem size exceeds the cap of an exhaustive method."""


class InvariantViolation(RevealibError, AssertionError):
    """A mathematical relation that must hold for a run was violated."""
