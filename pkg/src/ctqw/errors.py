"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit-specific errors."""


class FormatError(ToolkitError):
    """An input file or descriptor could not be parsed."""


class ConsistencyError(ToolkitError):
    """An internal numerical invariant was violated (ill-conditioned input or bug)."""


class NotApplicableError(ToolkitError):
    """The hypothesis of the requested analysis is not met by the input."""


class NotDistanceRegularError(NotApplicableError):
    """Raised when a graph fails the distance-regularity check.

    The ``witness`` attribute holds the violated triple together with two
    vertex pairs realizing different intersection counts.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
