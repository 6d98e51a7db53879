"""
Exception hierarchy for af-gauge.

Every error raised by the library derives from AFGaugeError and, where a
builtin exception describes the same failure, from that builtin too, so
callers catching ValueError or IndexError keep working.
"""


class AFGaugeError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(AFGaugeError, ValueError):
    """An argument is outside its admissible range."""


class DegenerateMetricError(AFGaugeError, ArithmeticError):
    """The Gram matrix of a basis is singular."""


class InfeasibleEmbeddingError(AFGaugeError, ValueError):
    """A multiplicity matrix does not fit into the target block sizes."""


class InvalidSlotError(AFGaugeError, IndexError):
    """A copy slot (i, j, l) does not exist in an embedding."""


class DimensionMismatchError(AFGaugeError, ValueError):
    """Operand shapes do not match the algebra profile or basis."""


class UnsupportedDimensionError(AFGaugeError):
    """An explicit construction is refused because the dimension is too large."""


class InvalidGaugeElementError(AFGaugeError, ValueError):
    """A gauge element is not unitary (or not invertible)."""


class UndefinedRatioError(AFGaugeError, ZeroDivisionError):
    """A ratio is requested with a zero denominator."""


class NumericalFailureError(AFGaugeError, ArithmeticError):
    """A numerical routine received input violating its numerical contract."""


class UnsupportedError(AFGaugeError, NotImplementedError):
    """The requested operation is not defined for this input class."""


class PreconditionError(AFGaugeError, ValueError):
    """A documented precondition of an operation does not hold."""


class IncompatibleConfigurationError(AFGaugeError, ValueError):
    """Field data is not phi-compatible where compatibility is required."""


class ConfigError(AFGaugeError, ValueError):
    """A run configuration document failed validation."""
