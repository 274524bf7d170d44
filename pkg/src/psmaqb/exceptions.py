"""Exception hierarchy shared by all modules."""


class PsmaqbError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(PsmaqbError, ValueError):
    """Invalid configuration or parameter value."""


class OutOfRange(PsmaqbError, ValueError):
    """A probability fell outside [0, 1] by more than the clamping tolerance."""


class DimensionMismatch(PsmaqbError, ValueError):
    """Vector or matrix dimensions do not agree."""


class InvariantViolation(PsmaqbError, RuntimeError):
    """An internal invariant was broken (signals corrupted state)."""


class NotReady(PsmaqbError, RuntimeError):
    """Requested quantity is not available before the first batch."""


class InsufficientData(PsmaqbError, ValueError):
    """Too few points to perform a regression."""
