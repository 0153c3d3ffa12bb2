"""Exception types shared by all modules."""


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class NumericalError(ArithmeticError):
    """A numerical safeguard was tripped (norm drift, negative PSD eigenvalue, ...)."""


class ResourceError(MemoryError):
    """A requested computation exceeds the dense-storage budget."""


class ConfigError(ValueError):
    """A sweep configuration is malformed; ``key`` names the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"config key '{key}': {message}")
