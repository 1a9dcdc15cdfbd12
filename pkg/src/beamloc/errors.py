"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid codebook, scenario or run configuration."""


class DomainError(ValueError):
    """Input outside the physical domain of a formula."""


class OutsideAreaError(ConfigError):
    """Receiver position outside the scenario's area of interest."""
