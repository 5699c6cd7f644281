"""Exception types shared across the package."""


class DomainError(ValueError):
    """Raised when an argument leaves the mathematical domain of an operation."""


class DegeneracyError(ValueError):
    """Raised when an operation hits the degenerate set of the p-Laplacian (zero gradient, p < 2)."""


class ConstraintError(ValueError):
    """Raised when a structural constraint on parameters is violated (e.g. q > p-1 > 0)."""


class ConfigurationError(ValueError):
    """Raised for inconsistent run/operation configuration (empty grids, regime mismatch)."""


class SolverError(RuntimeError):
    """Raised when an iterative solver fails to converge within its budget."""
