"""scikit-learn compatible decoder for batches of collapsed Bloch vectors."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import protocol
from .states import CorrelationMatrix, DensityState, as_correlation


class ChannelDecoder(TransformerMixin, BaseEstimator):
    """Map Bob's collapsed Bloch vectors back to the sender's Bloch vectors.

    The channel is a hyper-parameter, not something learned from data, so
    ``fit`` only validates it and caches its rank analysis.

    Parameters
    ----------
    channel : array-like of shape (4, 4), CorrelationMatrix or DensityState
        Plain arrays are read as the real correlation matrix ``r_ij``; pass a
        DensityState to supply a density matrix.
    outcome : str or tuple, default="00"
        Bell outcome ``(m, n)`` announced by the sender.

    Attributes
    ----------
    correlation_ : ndarray of shape (4, 4)
    rank_ : int
    singular_values_ : ndarray of shape (4,)
    det_r_ : float

    Examples
    --------
    >>> from qitransfer import werner
    >>> dec = ChannelDecoder(werner(0.5)).fit()
    >>> dec.transform([[0.1, 0.2, 0.3]])
    array([[0.2, 0.4, 0.6]])
    """

    def __init__(self, channel=None, outcome="00"):
        self.channel = channel
        self.outcome = outcome

    def fit(self, X=None, y=None):
        if self.channel is None:
            raise ValueError("ChannelDecoder requires a channel")
        if isinstance(self.channel, (DensityState, CorrelationMatrix)):
            r = as_correlation(self.channel)
        else:
            r = CorrelationMatrix(np.asarray(self.channel, dtype=float))
        self.outcome_ = protocol.BellOutcome.coerce(self.outcome)
        cls = protocol.rank_classify(r)
        self.correlation_ = np.array(r.r)
        self.rank_ = cls.rank
        self.singular_values_ = cls.singular_values
        self.det_r_ = float(np.linalg.det(r.r))
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        """Reconstruct input Bloch vectors; raises RankDeficientError for singular channels."""
        check_is_fitted(self, "correlation_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 features (s1, s2, s3), got {X.shape[1]}")
        r = CorrelationMatrix(self.correlation_)
        return np.array([protocol.reconstruct(r, s, self.outcome_)[0] for s in X])

    def inverse_transform(self, X):
        """Collapsed Bloch vectors for the given input Bloch vectors."""
        check_is_fitted(self, "correlation_")
        X = check_array(X, dtype=float)
        r = CorrelationMatrix(self.correlation_)
        return np.array([protocol.s_vector_analytic(r, c, self.outcome_) for c in X])

    def condition_numbers(self, X):
        check_is_fitted(self, "correlation_")
        X = check_array(X, dtype=float)
        r = CorrelationMatrix(self.correlation_)
        return np.array([protocol.reconstruct(r, s, self.outcome_)[1] for s in X])

    def get_feature_names_out(self, input_features=None):
        return np.array(["c1", "c2", "c3"], dtype=object)

