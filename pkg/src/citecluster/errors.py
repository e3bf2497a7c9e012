"""Exception types shared across the toolkit.

The CLI maps these onto distinct exit codes, so keep the hierarchy flat
and the classes specific.
"""


class CiteClusterError(Exception):
    """Base class for all toolkit errors."""


class ParseError(CiteClusterError):
    """A data or config file could not be parsed (carries file/line context)."""


class ValidationError(CiteClusterError):
    """Structurally valid input that violates a documented invariant."""


class EmptySeedError(CiteClusterError):
    """No node survives seed construction (e.g. every count fell below the threshold)."""


class ConvergenceError(CiteClusterError):
    """Fixed-point solver did not reach the requested tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NoLocalMinimumError(CiteClusterError):
    """No qualifying local minimum in the searched prefix range."""
