"""Exception hierarchy shared by all modules."""


class GenJacError(Exception):
    """Base class for every error raised by the package."""


class DomainError(GenJacError, ValueError):
    """Input outside the mathematical domain of an operation."""


class AccuracyError(GenJacError):
    """A requested tolerance cannot be met with the allowed truncation or quadrature."""


class PoleError(DomainError):
    """Evaluation at a pole.  ``order`` is the pole order."""

    def __init__(self, message, order=None):
        super().__init__(message)
        self.order = order


class PathError(GenJacError):
    """An integration path or small circle runs into a singularity."""


class RadiusError(PathError):
    """A Cauchy circle encloses or touches another singularity."""


class CapabilityError(GenJacError):
    """The requested computation is not supported for this input."""


class ClassificationError(GenJacError):
    """Numeric rank or rationality is ambiguous at the working tolerance."""


class WitnessError(GenJacError):
    """An equivalence witness is malformed (e.g. singular M)."""


class CurveValidationError(GenJacError, ValueError):
    """Base class for invalid singular-curve descriptions."""


class DegenerateModulusError(CurveValidationError):
    pass


class OverlappingPointsError(CurveValidationError):
    pass


class MalformedPartitionError(CurveValidationError):
    pass


class DivisorError(GenJacError, ValueError):
    """Divisor not prime to S, or classes not matching the curve."""


class ParseError(GenJacError, ValueError):
    """Syntax error in an expression; carries a 1-based column."""

    def __init__(self, message, column, expected=None):
        loc = f"column {column}: {message}"
        if expected:
            loc += f" (expected {expected})"
        super().__init__(loc)
        self.column = column
        self.expected = expected
