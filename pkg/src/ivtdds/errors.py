"""Exception hierarchy shared by every module.

Domain errors all derive from :class:`IvtError` so the CLI can map them to a
single exit status.
"""


class IvtError(ValueError):
    """Base class for domain errors."""


class InvalidBase(IvtError):
    pass


class DigitOutOfRange(IvtError):
    pass


class IndexOutOfRange(IvtError):
    pass


class ArityMismatch(IvtError):
    pass


class ValueOverflow(IvtError, OverflowError):
    """A value left the fixed unsigned width (never wrapped silently)."""


class DivergedOrbit(IvtError):
    pass


class NotCollatzLike(IvtError):
    pass


class NotFixedPoint(IvtError):
    pass


class DegenerateSample(IvtError):
    pass
