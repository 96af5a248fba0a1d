"""Exception types raised across the package."""


class SpinWeakError(Exception):
    """Base class for all errors raised by spinweak."""


class InvalidArgumentError(SpinWeakError, ValueError):
    pass


class UndefinedStateError(SpinWeakError, ValueError):
    """A zero-norm state was used where a physical state is required."""


class OrthogonalPostselectionError(SpinWeakError, ValueError):
    """Pre- and post-selected states are orthogonal; the weak value is undefined."""


class UnsupportedModelError(SpinWeakError, ValueError):
    pass


class NumericalError(SpinWeakError, ArithmeticError):
    """Base for failures of the data reduction itself."""


class FitFailureError(NumericalError):
    pass


class NoSignalError(NumericalError):
    """Background-subtracted intensities leave nothing to form a ratio from."""


class AtanhDivergenceError(NumericalError):
    """Polarimeter asymmetry reached +-1: the imaginary part is unmeasurably large."""
