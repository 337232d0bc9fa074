"""Domain errors raised by the library.

Every error carries a short machine-readable ``code`` (the class name) and an
optional ``context`` dict with the offending numbers, so the CLI can emit
structured error reports.
"""


class MmqoError(Exception):
    """Base class for all domain errors."""

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    @property
    def code(self):
        return type(self).__name__


# ---- shape / algebra preconditions -------------------------------------------------

class NotSquare(MmqoError):
    pass


class DimensionMismatch(MmqoError):
    pass


class NotUnitary(MmqoError):
    pass


class NotSymmetric(MmqoError):
    pass


class NotSymmetricComplex(MmqoError):
    pass


class NotSymplectic(MmqoError):
    pass


class NotPositiveDefinite(MmqoError):
    pass


class NotHermitian(MmqoError):
    pass


class ZeroVector(MmqoError):
    pass


class ZeroTrace(MmqoError):
    pass


class GridMismatch(MmqoError):
    pass


class IndexOutOfRange(MmqoError):
    pass


class NotNormalized(MmqoError):
    pass


# ---- state-level preconditions -----------------------------------------------------

class NotPhysical(MmqoError):
    pass


class SingularCovariance(MmqoError):
    pass


class NonzeroMean(MmqoError):
    pass


class TooManyModes(MmqoError):
    pass


# ---- parameter validation ----------------------------------------------------------

class InvalidParam(MmqoError):
    pass


class InvalidGain(MmqoError):
    pass


class InvalidSqueezing(MmqoError):
    pass


class InvalidPumpRatio(MmqoError):
    pass


class OverlapOutOfRange(MmqoError):
    pass


class NotAProbability(MmqoError):
    pass


class BadRange(MmqoError):
    pass


# ---- numerical failure modes -------------------------------------------------------

class VacuumSubtraction(MmqoError):
    pass


class CutoffTooSmall(MmqoError):
    pass


class GridTooCoarse(MmqoError):
    pass


class StepTooLarge(MmqoError):
    pass


class FlatModel(MmqoError):
    pass


class ZeroLO(MmqoError):
    pass


class OracleFailure(MmqoError):
    pass
