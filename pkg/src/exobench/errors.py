"""Exception taxonomy shared across the package.

Every error raised on a user-facing path derives from ExobenchError so the
CLI can map failures to stable exit codes.
"""


class ExobenchError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InvalidSystemError(ExobenchError):
    """Transfer function or state-space description is malformed."""


class ImproperSystemError(InvalidSystemError):
    """Numerator degree exceeds denominator degree where a proper system is required."""


class SingularEvaluationError(ExobenchError):
    """Frequency-response evaluation hit a pole on the imaginary axis."""


class NumericFailureError(ExobenchError):
    """A numeric routine failed its own consistency check (e.g. root residuals)."""

    def __init__(self, msg, residuals=None):
        super().__init__(msg)
        self.residuals = residuals


class OutOfRangeError(ExobenchError):
    """Argument outside the domain a signal or table is defined on."""


class InvalidArgumentError(ExobenchError):
    """Argument value is not usable (zero amplitude, negative gain, ...)."""


class StepTooLargeError(ExobenchError):
    """Fixed integration step violates the stability margin of the plant."""


class DivergenceError(ExobenchError):
    """Simulation produced a non-finite sample.

    ``where`` carries the failure time in seconds (time-domain runs) or the
    drive frequency in Hz (stepped-sine runs).
    """

    exit_code = 5

    def __init__(self, msg, where=None):
        super().__init__(msg)
        self.where = where


class InstabilityError(ExobenchError):
    """Closed loop diverged at the configured gains."""

    exit_code = 4

    def __init__(self, msg, frequency_hz=None):
        super().__init__(msg)
        self.frequency_hz = frequency_hz


class SchemaError(ExobenchError):
    """Configuration file violates the expected schema (unknown/missing keys)."""

    exit_code = 2


class UnitError(ExobenchError):
    """Dimensional quantity written without a recognised unit suffix."""

    exit_code = 3


class ConfigurationError(ExobenchError):
    """Objects wired together inconsistently (missing trajectory, estimator, ...)."""


class DimensionError(ExobenchError):
    """Array shape does not match the declared layout."""


class DegenerateChannelError(ExobenchError):
    """A feature channel has (near) zero variance at training time."""


class TrainingDivergenceError(ExobenchError):
    """Training loss became non-finite; ``epoch`` is the first bad epoch."""

    def __init__(self, msg, epoch=None):
        super().__init__(msg)
        self.epoch = epoch
