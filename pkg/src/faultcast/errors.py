"""Exception hierarchy shared across the package."""


class FaultcastError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(FaultcastError):
    """Invalid or unknown configuration value."""


class StreamOrderError(FaultcastError):
    """Sample index did not strictly increase."""


class InvalidInputError(FaultcastError):
    """Non-finite or otherwise unusable input data."""


class CalibrationError(FaultcastError):
    """Calibration attempted on unusable data (e.g. empty set)."""


class TrainingError(FaultcastError):
    """Batch training preconditions violated (e.g. single-class data)."""


class InsufficientDataError(FaultcastError):
    """Not enough points per class for the requested cross-validation."""


class UnknownPointError(FaultcastError):
    """Referenced point id is not stored in the model."""


class SolverError(FaultcastError):
    """Internal optimizer failed to restore optimality within its budget."""


class PhaseError(FaultcastError):
    """Operation called in an engine phase that does not support it."""
