"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A problem, partition, or run configuration is invalid."""
