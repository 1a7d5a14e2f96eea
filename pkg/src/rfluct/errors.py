"""Exception and warning types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit-specific errors."""


class ParameterError(ToolkitError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateInputError(ToolkitError, ValueError):
    """Input data carries no usable signal (for example, all zeros)."""


class NormalizationError(ToolkitError, ArithmeticError):
    """A required normalizer is zero; the quantity is undefined for this input."""


class PoleError(ToolkitError, ArithmeticError):
    """Evaluation requested at a level position that has no damping width."""


class SingularDenominatorError(ToolkitError, ArithmeticError):
    """The collision-element denominator vanished beyond recovery."""


class ModelConsistencyError(ToolkitError, ValueError):
    """Stored widths contradict the total-width identity."""


class ResolutionError(ToolkitError, ValueError):
    """The sampling grid cannot resolve the requested structure width."""


class FlatSeriesError(ToolkitError, ValueError):
    """The series has no variance to analyze."""


class IngestError(ToolkitError, ValueError):
    """An input file failed validation; the message carries line numbers."""


class ConfigError(ToolkitError, ValueError):
    """A run configuration file is missing or inconsistent."""


class ResolutionWarning(UserWarning):
    """Grid spacing is coarser than recommended for the requested width."""


class CorrelationWarning(UserWarning):
    """Components share a seed, so their underlying states are correlated."""
