"""Exception hierarchy.

Every error carries a module-qualified ``code`` (``"sensor.TooShortSegment"``)
and an ``exit_code`` used by the command-line front end.
"""

from __future__ import annotations


class DriveStyleError(Exception):
    """Base class for all package errors."""

    module = "drivestyle"
    exit_code = 2

    @property
    def code(self) -> str:
        return f"{self.module}.{type(self).__name__}"


class ValidationError(DriveStyleError, ValueError):
    exit_code = 2


class NumericalError(DriveStyleError, ArithmeticError):
    exit_code = 3


# sensor model -----------------------------------------------------------

class SensorError(ValidationError):
    module = "sensor"

    def __init__(self, message: str, row: int | None = None, segment_id: str | None = None):
        self.row = row
        self.segment_id = segment_id
        where = []
        if segment_id is not None:
            where.append(f"segment {segment_id!r}")
        if row is not None:
            where.append(f"row {row}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class MissingColumn(SensorError):
    pass


class NonMonotoneTime(SensorError):
    pass


class IrregularSampling(SensorError):
    pass


class TooShortSegment(SensorError):
    pass


class NonFiniteValue(SensorError):
    pass


class InvalidCategory(SensorError):
    pass


# wavelet ----------------------------------------------------------------

class WaveletError(ValidationError):
    module = "wavelet"


class EmptySignal(WaveletError):
    pass


class TooShort(WaveletError):
    pass


class ShapeMismatch(WaveletError):
    pass


class EmptyInput(WaveletError):
    pass


# learners / selection ---------------------------------------------------

class DegenerateDataset(ValidationError):
    module = "learners"


class TooFewPoints(ValidationError):
    module = "learners"


# rules ------------------------------------------------------------------

class RuleError(ValidationError):
    module = "rules"


class WindowTooLong(RuleError):
    pass


class WrongKind(RuleError):
    pass


# gaussfit ---------------------------------------------------------------

class GaussFitError(ValidationError):
    module = "gaussfit"


class NonPositiveWidth(GaussFitError):
    pass


class TooFewSamples(GaussFitError):
    pass


# synth ------------------------------------------------------------------

class TooShortSpec(ValidationError):
    module = "synth"
