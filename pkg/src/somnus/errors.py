"""Exception hierarchy shared across the package."""


class SomnusError(Exception):
    """Base class for all package errors."""


class ShapeError(SomnusError):
    """Operand shapes are incompatible."""


class NumericError(SomnusError):
    """Non-finite or otherwise invalid numeric input."""


class ConfigError(SomnusError):
    """Invalid configuration value."""


class UsageError(SomnusError):
    """API called out of contract (wrong order, wrong state)."""


class DataError(SomnusError):
    """Malformed or out-of-contract input data."""


class InternalError(SomnusError):
    """Broken internal invariant; indicates a bug, not a user mistake."""
