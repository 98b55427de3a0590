"""Exception hierarchy.

Every error carries a short ``code`` string; the command-line front-end
prints it as ``ERROR <code>: <detail>``.
"""


class NullSimError(Exception):
    code = "Error"


class ParseError(NullSimError, ValueError):
    code = "ParseError"


class InvalidParamsError(NullSimError, ValueError):
    code = "InvalidParams"


class NotNullCurveError(NullSimError):
    code = "NotNullCurve"


class DegenerateAccelerationError(NullSimError):
    code = "DegenerateAcceleration"


class NotCartanError(NullSimError):
    code = "NotCartan"


class ZeroTorsionError(NullSimError):
    code = "ZeroTorsion"


class OutOfRangeError(NullSimError, ValueError):
    code = "OutOfRange"


class InsufficientSamplesError(NullSimError, ValueError):
    code = "InsufficientSamples"


class DomainError(NullSimError, ValueError):
    code = "DomainError"


class DriftExceededError(NullSimError):
    code = "DriftExceeded"

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class QuadratureError(NullSimError, ArithmeticError):
    code = "QuadratureError"


class InsufficientOverlapError(NullSimError):
    code = "InsufficientOverlap"
