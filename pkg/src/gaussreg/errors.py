"""Exception hierarchy shared by every module."""


class GaussRegError(Exception):
    """Base class for library errors."""


class DimensionError(GaussRegError, ValueError):
    """Input length violates a dimension precondition."""


class ConfigurationError(GaussRegError, ValueError):
    """A configuration value is out of range or inconsistent with the input."""


class SingularityError(GaussRegError, ArithmeticError):
    """Loss gradient is undefined at the given point."""

    def __init__(self, message, order=None):
        super().__init__(message)
        self.order = order


class DegenerateVarianceError(SingularityError):
    """Empirical variance is too small to normalize by."""


class SpectralSingularityError(SingularityError):
    """A DFT magnitude is zero where a logarithm of it is required."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class InsufficientDataError(GaussRegError, ValueError):
    pass


class NumericalAbort(GaussRegError, FloatingPointError):
    """An optimization run produced a non-finite value or gradient.

    ``trajectory`` holds every record completed before the failure and
    ``diagnostics`` describes the failing iteration.
    """

    def __init__(self, message, trajectory=None, diagnostics=None):
        super().__init__(message)
        self.trajectory = trajectory
        self.diagnostics = diagnostics or {}
