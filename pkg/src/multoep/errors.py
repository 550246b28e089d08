"""Exception hierarchy shared by every module."""


class MultoepError(Exception):
    """Base class for all errors raised by the package."""


class ResourceError(MultoepError):
    """A requested size exceeds a configured budget."""


class OutOfRangeError(MultoepError, ValueError):
    """An argument lies outside the range covered by a prime table."""


class ArgumentError(MultoepError, ValueError):
    """Malformed or inconsistent arguments."""


class UnsupportedError(MultoepError):
    """The operation is not available for this kind of input."""


class InconclusiveError(MultoepError):
    """A hypothesis cannot be verified at the given truncation."""


class ClassificationError(MultoepError):
    """The input does not belong to the class an analysis requires.

    ``witness`` carries the data exhibiting the failure (a position, a
    pair of positions, ...), so reports can embed it.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
