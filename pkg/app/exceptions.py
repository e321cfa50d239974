class HomodyneG2Error(Exception):
    """
    Base class for every error raised by the package.
    """


class InvalidParameterError(HomodyneG2Error, ValueError):
    """
    Raised when inputs are outside the domain of an operation.
    """


class UndefinedG2Error(InvalidParameterError):
    """
    Raised when g2 is requested for a state with zero mean photon number.
    """

    def __init__(self, message: str = "g2 undefined for zero mean photon number"):
        super().__init__(message)


class UnphysicalStateError(InvalidParameterError):
    """
    Raised when a covariance matrix violates the uncertainty relation where a
    physical one is required.
    """


class NumericalFailure(HomodyneG2Error, ArithmeticError):
    """
    Raised when a numerical consistency check fails.
    """


class TruncationError(NumericalFailure):
    """
    Raised when a truncated Fock representation is not accurate enough, or
    would exceed the memory cap.
    """


class TraceFormatError(InvalidParameterError):
    """
    Raised when a trace file cannot be parsed. Carries the 1-based row number
    when the problem is tied to a specific row.
    """

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
