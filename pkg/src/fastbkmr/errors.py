"""Exception hierarchy shared across the package."""


class FastBKMRError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(FastBKMRError, ValueError):
    """Array shapes that must agree do not."""

    def __init__(self, what, expected, got):
        self.what = what
        self.expected = expected
        self.got = got
        super().__init__(f"{what}: expected length {expected}, got {got}")


class FactorizationError(FastBKMRError, ArithmeticError):
    """Cholesky factorization failed even after jitter escalation."""

    def __init__(self, message, jitter=None):
        self.jitter = jitter
        super().__init__(message)


class DivergenceError(FastBKMRError, ArithmeticError):
    """A leapfrog trajectory produced a non-finite gradient."""

    def __init__(self, step):
        self.step = step
        super().__init__(f"non-finite gradient at leapfrog step {step}")


class DensityError(FastBKMRError, ValueError):
    """A log-density is undefined at the supplied parameters."""


class CalibrationError(FastBKMRError, RuntimeError):
    """Kernel-parameter calibration could not reach its target band."""

    def __init__(self, message, achieved=None):
        self.achieved = achieved
        super().__init__(message)


class EmptyWindowError(FastBKMRError, ValueError):
    """No training rows fall inside a requested percentile window."""


class DataError(FastBKMRError, ValueError):
    """Input data could not be parsed or is unusable."""


class ConfigError(FastBKMRError, ValueError):
    """Invalid run configuration."""


class NumericalError(FastBKMRError, ArithmeticError):
    """A summary statistic came out non-finite."""
