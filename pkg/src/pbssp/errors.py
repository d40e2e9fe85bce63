"""Exception hierarchy shared by every module."""


class PbsspError(Exception):
    """Base class for all package errors."""


class DomainError(PbsspError, ValueError):
    """An argument lies outside the set where the operation is defined."""


class CapabilityError(PbsspError):
    """The problem lacks a structural feature or constant the operation needs."""


class ConvergenceError(PbsspError):
    """An iterative solver stopped before meeting its tolerance.

    The last iterate and the final residual are kept so callers can inspect
    or recover from the failure.
    """

    def __init__(self, message, last=None, residual=None, iterations=None):
        super().__init__(message)
        self.last = last
        self.residual = residual
        self.iterations = iterations


class InvariantError(PbsspError, AssertionError):
    """An internal guarantee was violated; indicates a bug, not bad input."""


class DiagnosticError(PbsspError):
    """A model-level condition prevents a well-defined answer."""
