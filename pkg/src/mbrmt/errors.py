"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid run configuration or parameter combination."""


class CapacityError(RuntimeError):
    """Requested object exceeds the configured size limits."""


class UnfoldingError(RuntimeError):
    """The smooth cumulative density is non-monotone over the data range."""
