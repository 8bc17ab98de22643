"""Exception hierarchy shared by all subpackages."""


class PseudofreeError(Exception):
    """Base class for every error raised by this package."""


class InvalidPermutation(PseudofreeError, ValueError):
    pass


class OrderCapExceeded(PseudofreeError):
    def __init__(self, cap, message=None):
        self.cap = cap
        super().__init__(message or f"group order exceeds the configured cap of {cap}")


class InvalidParameters(PseudofreeError, ValueError):
    pass


class InternalContradiction(PseudofreeError):
    """A case analysis that is supposed to be exhaustive found no branch.

    Raised loudly on purpose: it would mean either a bug here or a hole in the
    underlying mathematical argument.
    """


class ResourceBound(PseudofreeError):
    pass


class InvalidCoefficients(PseudofreeError, ValueError):
    pass


class InfiniteEntry(PseudofreeError, ValueError):
    pass


class DegreeOutOfRange(PseudofreeError, ValueError):
    pass


class NotUnimodular(PseudofreeError, ValueError):
    pass


class SearchBound(PseudofreeError):
    pass


class NotPeriodic(PseudofreeError, ValueError):
    pass
