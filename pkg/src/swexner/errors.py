class ConfigurationError(ValueError):
    """Invalid grid, law, scenario or run configuration."""


class SolverError(RuntimeError):
    """Raised when a time step cannot be completed (negative depth, vacuum...)."""
