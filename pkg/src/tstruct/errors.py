class TStructError(Exception):
    """Base class for all validation and invariant errors raised by tstruct."""


class CycleError(TStructError):
    pass


class CodimError(TStructError):
    pass


class DuplicatePoint(TStructError):
    pass


class UnknownPoint(TStructError):
    pass


class NotClosed(TStructError):
    pass


class NotOpen(TStructError):
    pass


class SpaceMismatch(TStructError):
    pass


class NotDecreasing(TStructError):
    pass


class NotBounded(TStructError):
    pass


class NotMonotone(TStructError):
    pass


class ComplexError(TStructError):
    """A complex or morphism violates d∘d = 0, naturality or shape constraints."""


class ResolutionCapExceeded(TStructError):
    pass


class CertificateFailure(TStructError):
    """A truncation produced pieces whose membership certificates do not verify."""
