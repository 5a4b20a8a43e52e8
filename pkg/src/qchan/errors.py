"""Exception hierarchy shared by all qchan modules."""


class QchanError(Exception):
    pass


class ValidationError(QchanError, ValueError):
    """Input violates a shape, Hermiticity, positivity or normalisation contract."""


class NumericError(QchanError, ArithmeticError):
    pass


class DomainError(QchanError, ValueError):
    """An operation was called outside the regime where it is defined."""


class ResourceError(QchanError, MemoryError):
    pass


class ChannelFormatError(ValidationError):
    """Malformed channel or state document."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)


class CptpError(ValidationError):
    def __init__(self, defect, tol):
        self.defect = defect
        self.tol = tol
        super().__init__(f"trace-preservation defect {defect:.3e} exceeds tolerance {tol:.1e}")
