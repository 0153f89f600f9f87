"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, NoResultError -> 1,
and the numerical failures (DomainError, BlowUpError, ConvergenceError,
BracketError) -> 3.
"""


class DomainError(ValueError):
    """A state left the model's biological domain (vanishing denominator)."""


class ConfigError(ValueError):
    """Invalid configuration, flag value or config-file content."""


class NoResultError(RuntimeError):
    """A well-posed query produced no result (no equilibrium, no crossing)."""


class BlowUpError(RuntimeError):
    """Time integration produced a non-finite value."""

    def __init__(self, message, time=None, index=None):
        super().__init__(message)
        self.time = time
        self.index = index


class NegativityError(RuntimeError):
    """A field dropped below the negativity tolerance during a PDE run."""

    def __init__(self, message, time=None, index=None):
        super().__init__(message)
        self.time = time
        self.index = index


class ConvergenceError(RuntimeError):
    """An iterative refinement failed to reach its tolerance."""


class BracketError(ValueError):
    """A bisection bracket does not enclose a sign change."""
