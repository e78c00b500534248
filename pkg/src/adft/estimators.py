"""scikit-learn compatible front-ends for the receive chain.

Samples are snapshots (rows) and features are array channels (columns), so
the pieces compose with :class:`sklearn.pipeline.Pipeline`::

    pipe = make_pipeline(HilbertIQ(taps=63), ChannelCalibrator(), SpatialBeamformer("fast_adft"))
    pipe.fit(reference_if_samples)
    beams = pipe.transform(if_samples)
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_snapshots
from .array_sim import ENGINES, estimate_calibration, hilbert_iq
from .fastalg import apply_fast, builtin_adft32_factorization
from .transforms import adft32_matrix, dft_matrix

__all__ = ["ChannelCalibrator", "HilbertIQ", "SpatialBeamformer"]


class SpatialBeamformer(TransformerMixin, BaseEstimator):
    """32 simultaneous beams from 32-channel complex snapshots.

    Parameters
    ----------
    engine : {"fast_adft", "dense_adft", "dense_exact"}
        ``fast_adft`` runs the sparse factorization (additions only),
        ``dense_adft`` the direct approximate product, ``dense_exact`` the DFT.
    """

    def __init__(self, engine="fast_adft"):
        self.engine = engine

    def fit(self, X, y=None):
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        X = check_snapshots(X, n_features=32)
        self.n_features_in_ = X.shape[1]
        if self.engine == "fast_adft":
            self.factorization_ = builtin_adft32_factorization()
            self.matrix_ = adft32_matrix()
        else:
            self.factorization_ = None
            self.matrix_ = adft32_matrix() if self.engine == "dense_adft" else dft_matrix(32)
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        X = check_snapshots(X, n_features=self.n_features_in_)
        if self.factorization_ is not None:
            return apply_fast(self.factorization_, X.T).T
        return (self.matrix_.to_complex() @ X.T).T


class HilbertIQ(TransformerMixin, BaseEstimator):
    """Real IF samples ``(n_samples, n_channels)`` to analytic IQ samples.

    Stateless; the first ``taps - 1`` output rows are filter start-up.
    """

    def __init__(self, taps=63, beta=8.0):
        self.taps = taps
        self.beta = beta

    def fit(self, X, y=None):
        X = check_snapshots(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_snapshots(X, n_features=self.n_features_in_, dtype=np.float64)
        return hilbert_iq(X.T, self.taps, self.beta).T


class ChannelCalibrator(TransformerMixin, BaseEstimator):
    """Learns per-channel complex gains from a common reference tone.

    ``fit`` estimates weights that equalize every channel to
    ``reference_channel``; ``transform`` applies them.  ``skip`` leading rows
    (e.g. filter transients) are ignored while fitting.  ``tone_frequency``
    (cycles per sample) enables the image-robust tone fit.
    """

    def __init__(self, reference_channel=0, skip=0, tone_frequency=None):
        self.reference_channel = reference_channel
        self.skip = skip
        self.tone_frequency = tone_frequency

    def fit(self, X, y=None):
        X = check_snapshots(X)
        if not 0 <= self.reference_channel < X.shape[1]:
            raise ValueError("reference_channel out of range")
        if self.skip >= X.shape[0]:
            raise ValueError("skip leaves no samples to fit on")
        self.weights_ = estimate_calibration(X[self.skip :].T, self.reference_channel, self.tone_frequency)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "weights_")
        X = check_snapshots(X, n_features=self.n_features_in_)
        return X * self.weights_[None, :]
