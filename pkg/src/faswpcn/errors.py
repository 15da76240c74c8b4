"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to converge to the requested tolerance."""


class UnsupportedModeError(ValueError):
    """The requested evaluation mode is not covered by the analytical path."""


class DegenerateScenarioError(RuntimeError):
    """A scenario produced no usable signal (e.g. identically zero rate)."""


class ConfigError(ValueError):
    """An experiment configuration file is missing, malformed, or invalid."""

    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)
