"""Exception types shared across the package."""


class CopulaError(Exception):
    """Base class for all package errors."""


class CapabilityError(CopulaError):
    """Raised when a model lacks the evaluable piece an operation needs."""


class DimensionError(CopulaError, ValueError):
    """Dimension, order or coordinate mismatch."""


class DomainError(CopulaError, ValueError):
    """Argument outside the admissible domain (cube, parameter range, ...)."""


class EnumerationCapError(CopulaError):
    """An exact enumeration would exceed the configured size cap."""


class ConfigError(CopulaError, ValueError):
    """Schema violation in a JSON descriptor; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
