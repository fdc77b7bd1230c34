"""Exception hierarchy shared by every aqsbench module."""


class AQSError(Exception):
    """Base class for all errors raised by aqsbench."""


class ZeroVector(AQSError, ValueError):
    pass


class NotNormalizable(AQSError, ValueError):
    pass


class NotCanonicalPair(AQSError, ValueError):
    pass


class KeyLengthMismatch(AQSError, ValueError):
    pass


class LengthMismatch(AQSError, ValueError):
    pass


class LayoutMismatch(AQSError, ValueError):
    pass


class RangeMismatch(LayoutMismatch):
    pass


class NotClassical(AQSError, ValueError):
    pass


class TooLarge(AQSError, ValueError):
    pass


class ProtocolError(AQSError, RuntimeError):
    """A protocol step was invoked out of order (e.g. mask not yet published)."""


class InvalidConfig(AQSError, ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class IoFailure(AQSError, OSError):
    pass
