"""Exception types shared across the package."""


class NumericsError(RuntimeError):
    """Quadrature or integrator failure, with diagnostics in the message."""


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""
