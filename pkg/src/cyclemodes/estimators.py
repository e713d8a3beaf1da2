"""Scikit-learn style estimators wrapping the growth and factor pipeline.

These provide fit/transform surfaces (with ``get_params``/``set_params``) so
the core algorithm composes with sklearn pipelines and model-selection
tooling.  Arrays are oriented samples-by-features: rows are months, columns
are series in variable-major order.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import as_float_array
from .errors import DegenerateSeriesError
from .numerics import eig_symmetric
from .rmt import RmtParams, _correlation_of

__all__ = ["GrowthNormalizer", "CorrelationEigenmodes"]


class GrowthNormalizer(BaseEstimator, TransformerMixin):
    """Standardize log10 month-over-month growth of positive level series.

    ``fit`` learns per-series growth means and population standard
    deviations; ``transform`` converts levels to growth rates and applies the
    frozen statistics.  Fitting on an in-sample window and transforming an
    extended one reproduces the frozen-normalization out-of-sample
    convention.

    Note that ``transform`` returns one fewer row than its input (growth
    rates live on month pairs).
    """

    def fit(self, X, y=None):
        rates = self._rates(X)
        self.means_ = rates.mean(axis=0)
        stds = rates.std(axis=0)
        if np.any(stds == 0):
            bad = np.flatnonzero(stds == 0).tolist()
            raise DegenerateSeriesError(f"constant series at columns {bad}")
        self.stds_ = stds
        self.n_features_in_ = rates.shape[1]
        return self

    def transform(self, X):
        if not hasattr(self, "means_"):
            raise RuntimeError("GrowthNormalizer must be fitted before transform")
        rates = self._rates(X)
        if rates.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {rates.shape[1]} series, expected {self.n_features_in_}"
            )
        return (rates - self.means_) / self.stds_

    @staticmethod
    def _rates(X) -> np.ndarray:
        levels = as_float_array(X, "X", ndim=2, min_length=2)
        if np.any(levels <= 0):
            raise ValueError("levels must be strictly positive")
        return np.log10(levels[1:] / levels[:-1])


class CorrelationEigenmodes(BaseEstimator, TransformerMixin):
    """Eigendecomposition of the correlation matrix with MP significance.

    ``fit`` expects standardized rates (e.g. the output of
    :class:`GrowthNormalizer`); ``transform`` projects onto the eigenvectors,
    returning the mode coefficients, and ``inverse_transform`` reconstructs.
    ``components_[i]`` is eigenvector i (descending eigenvalue order), signed
    so its mean over the first of ``n_variable_blocks`` equal column blocks
    is positive.

    Attributes after fit: ``correlation_``, ``eigenvalues_``, ``components_``,
    ``q_``, ``lambda_plus_``, ``lambda_minus_``, ``significant_`` (boolean
    mask), ``n_significant_``.
    """

    def __init__(self, sigma: float = 1.0, n_variable_blocks: int = 3):
        self.sigma = sigma
        self.n_variable_blocks = n_variable_blocks

    def fit(self, X, y=None):
        w = as_float_array(X, "X", ndim=2, min_length=2)
        m = w.shape[1]
        if m % self.n_variable_blocks:
            raise ValueError(
                f"{m} columns do not split into {self.n_variable_blocks} equal blocks"
            )
        self.correlation_ = _correlation_of(w)
        block = np.arange(m // self.n_variable_blocks)
        eig = eig_symmetric(self.correlation_, sign_indices=block)
        self.eigenvalues_ = eig.eigenvalues
        self.components_ = eig.eigenvectors.T
        params = RmtParams.from_dimensions(w.shape[0], m, self.sigma)
        self.q_ = params.q
        self.lambda_plus_ = params.lambda_plus
        self.lambda_minus_ = params.lambda_minus
        self.significant_ = self.eigenvalues_ > self.lambda_plus_
        self.n_significant_ = int(self.significant_.sum())
        self.n_features_in_ = m
        return self

    def transform(self, X):
        if not hasattr(self, "components_"):
            raise RuntimeError("CorrelationEigenmodes must be fitted before transform")
        w = as_float_array(X, "X", ndim=2)
        return w @ self.components_.T

    def inverse_transform(self, A):
        a = as_float_array(A, "A", ndim=2)
        return a @ self.components_
