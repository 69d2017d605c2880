"""Exception hierarchy shared by every cutkit module."""


class CutKitError(Exception):
    """Base class for all cutkit errors."""


class InvalidCutError(CutKitError, ValueError):
    """A vertex set references ids outside ``[0, n)``."""


class InvalidInputError(CutKitError, ValueError):
    """An argument violates a documented precondition."""


class SizeLimitError(CutKitError, ValueError):
    """An exponential-time routine was asked to run above its size limit."""


class GraphFormatError(CutKitError, ValueError):
    """A graph file is malformed."""


class InvalidForestError(CutKitError, ValueError):
    """An edge set passed as a forest contains a cycle."""


class AlignmentError(CutKitError, ValueError):
    """A vertex set is not a union of current supernodes."""


class NoEdgeError(CutKitError):
    """An edge was requested from a region with zero uncontracted weight."""


class LedgerError(CutKitError, ValueError):
    """A strength ledger is not laminar or not ordered subsets-first."""


class IncompleteLedgerError(CutKitError):
    """A subsampling loop hit its round limit before finishing.

    The partial ledger built so far is kept on ``ledger``.
    """

    def __init__(self, message, ledger=None):
        super().__init__(message)
        self.ledger = ledger


class ConstructionError(CutKitError):
    """A randomized construction failed after exhausting its retries."""
