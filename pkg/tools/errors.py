class ToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class PrecisionExhaustedError(ToolkitError):
    """A finite-precision value cannot certify the requested digit, quotient or floor."""


class CapacityError(ToolkitError):
    """The request exceeds a configured memory or size budget."""


class RangeError(ToolkitError, IndexError):
    """An argument lies outside the range covered by a table."""


class DomainError(ToolkitError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ParameterError(ToolkitError, ValueError):
    """Invalid parameter combination, rejected before any computation."""


class SizeError(ToolkitError, ValueError):
    """Input too large for a quadratic-cost oracle."""


class DegenerateFitError(ToolkitError, ValueError):
    """Too few usable rows for a least-squares fit."""
