"""Exception types raised by the library."""


class BMError(Exception):
    """Base class for all library errors."""


class DimensionError(BMError, ValueError):
    """Shapes are not cubic, do not match, or have a non-positive side."""


class NumericRangeError(BMError, ArithmeticError):
    """A parametrization would overflow double precision."""


class SingularSystemError(BMError, ArithmeticError):
    """A linear system is singular (e.g. repeated Vandermonde nodes)."""


class DegeneratePatternError(SingularSystemError):
    """The coefficient pattern of an elimination system has no unique solution."""


class DegenerateInstanceError(BMError, ArithmeticError):
    """A closed-form relation has a vanishing denominator on this instance."""


class NegativeSquareError(BMError, ValueError):
    """A quantity that must be a square came out negative."""


class IncompleteBasisError(BMError, ValueError):
    """A monomial basis lacks the pure powers needed for a consistency check."""


class PreconditionError(BMError, ValueError):
    """An input violates a documented precondition."""


class UnsupportedSizeError(BMError, ValueError):
    """The requested size is outside what the routine supports."""


class DocumentError(BMError, ValueError):
    """Malformed hypermatrix document."""
