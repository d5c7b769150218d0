"""Exception hierarchy.

Physics-validation failures (``UnphysicalStateError``) are kept apart from
shape/format problems (``DimensionError``) so callers such as the CLI can map
them to different exit codes.
"""


class QITransferError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(QITransferError, ValueError):
    """Matrix shape or subsystem layout is not supported."""


class NotHermitianError(QITransferError, ValueError):
    pass


class UnphysicalStateError(QITransferError, ValueError):
    """State fails trace, Hermiticity, positivity or Bloch-ball checks."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class SingularSystemError(QITransferError, ArithmeticError):
    """Linear system has no unique solution."""

    def __init__(self, message, rank=None, singular_values=None):
        super().__init__(message)
        self.rank = rank
        self.singular_values = singular_values


class UndefinedCollapseError(QITransferError, ArithmeticError):
    """Bell outcome has (numerically) zero probability."""

    def __init__(self, message, probability=None):
        super().__init__(message)
        self.probability = probability


class RankDeficientError(SingularSystemError):
    """Channel correlation matrix is not full rank, so reconstruction is not unique.

    Attributes
    ----------
    classification : RankClassification
        Output of :func:`qitransfer.protocol.rank_classify` for the channel.
    min_norm : ndarray of shape (3,) or None
        Minimum-norm least-squares Bloch vector (rank-3 channels only).
    pure_candidates : list of ndarray
        Unit-norm Bloch vectors on the solution line (rank-3 channels only).
    """

    def __init__(self, message, classification=None, min_norm=None, pure_candidates=()):
        rank = None if classification is None else classification.rank
        sv = None if classification is None else classification.singular_values
        super().__init__(message, rank=rank, singular_values=sv)
        self.classification = classification
        self.min_norm = min_norm
        self.pure_candidates = list(pure_candidates)


class NormalizationError(QITransferError, ArithmeticError):
    """Pseudo-mixture term has a vanishing identity component."""


class StateFormatError(QITransferError, ValueError):
    """A serialized state is syntactically or structurally malformed."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line
