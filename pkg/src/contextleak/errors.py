"""Exception hierarchy shared by every module."""


class ContextLeakError(ValueError):
    """Base class for all validation failures raised by this package."""


class InvalidDimsError(ContextLeakError):
    pass


class NotHermitianError(ContextLeakError):
    pass


class NotPSDError(ContextLeakError):
    pass


class InvalidStateError(ContextLeakError):
    pass


class InvalidRankError(ContextLeakError):
    pass


class InvalidObservableError(ContextLeakError):
    pass


class InvalidLabelsError(ContextLeakError):
    pass


class RequiresSharpError(ContextLeakError):
    pass


class UnsupportedPointerError(ContextLeakError):
    pass


class InvalidMapError(ContextLeakError):
    """Kraus list is not trace non-increasing, or a channel is not trace preserving."""


class InvalidInstrumentError(ContextLeakError):
    pass


class LabelError(ContextLeakError):
    pass


class InvalidContextError(ContextLeakError):
    pass


class InvalidParameterError(ContextLeakError):
    pass
