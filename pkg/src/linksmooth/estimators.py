"""Scikit-learn style estimators wrapping the functional smoother core.

``LinkKernelSmoother`` fits on node covariates plus a symmetric pair-outcome
matrix and predicts the mean outcome at query *pairs*; each prediction row
concatenates the two query points, so queries have ``2 * d`` columns.
``ConventionalKernelSmoother`` is the matching single-node regressor. Both
follow the usual conventions: ``__init__`` only stores hyperparameters,
``fit`` validates and returns ``self``, fitted state carries a trailing
underscore, and ``get_params`` / ``set_params`` come from ``BaseEstimator``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_points, check_symmetric_outcomes, check_vector
from .kernels import KernelSpec, get_kernel
from .smoother import SmootherConfig, conventional_smooth, link_smooth, link_smooth_weights

__all__ = ["LinkKernelSmoother", "ConventionalKernelSmoother"]


def _resolve_kernel(kernel, dim: int, normalized: bool) -> KernelSpec:
    if isinstance(kernel, KernelSpec):
        if kernel.dim != dim:
            raise ValueError(f"kernel dimension {kernel.dim} does not match data dimension {dim}")
        return kernel
    return get_kernel(kernel, dim=dim, normalized=normalized)


class LinkKernelSmoother(BaseEstimator, RegressorMixin):
    """Kernel smoother for symmetric outcomes observed on pairs of nodes.

    Parameters
    ----------
    kernel : str or KernelSpec, default="boxcar"
        Kernel name ("boxcar" or "epanechnikov") or a prebuilt spec.
    bandwidth : float, default=0.1
        Kernel bandwidth h.
    regularization : float, default=0.0
        Additive per-pair regularizer; keeps the estimate defined when no
        covariate pair falls inside the kernel windows.
    normalized_kernel : bool, default=False
        Use the density-normalized boxcar instead of the raw indicator.
    """

    def __init__(self, kernel="boxcar", bandwidth=0.1, regularization=0.0,
                 normalized_kernel=False):
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.regularization = regularization
        self.normalized_kernel = normalized_kernel

    def fit(self, X, Y):
        """Store node covariates (n, d) and the symmetric (n, n) outcomes."""
        X = as_points(X)
        if X.shape[0] < 2:
            raise ValueError("link smoothing needs at least two nodes")
        Y = check_symmetric_outcomes(Y, X.shape[0])
        self.X_ = X
        self.Y_ = Y
        self.n_features_in_ = X.shape[1]
        self.kernel_ = _resolve_kernel(self.kernel, X.shape[1], self.normalized_kernel)
        return self

    def _config(self, x, xp) -> SmootherConfig:
        return SmootherConfig(kernel=self.kernel_, h=self.bandwidth,
                              lambda_n=self.regularization, query=(x, xp))

    def predict(self, Q):
        """Predict at query pairs: rows of Q are ``[x, x']`` with 2*d columns."""
        check_is_fitted(self, "X_")
        Q = np.asarray(Q, dtype=float)
        if Q.ndim == 1:
            Q = Q[None, :]
        d = self.n_features_in_
        if Q.ndim != 2 or Q.shape[1] != 2 * d:
            raise ValueError(f"query rows must concatenate two points ({2 * d} columns), "
                             f"got shape {Q.shape}")
        out = np.empty(Q.shape[0])
        for k, row in enumerate(Q):
            out[k] = link_smooth(self.X_, self.Y_, self._config(row[:d], row[d:]))
        return out

    def pair_weights(self, x, xp):
        """The fitted (n, n) ordered-pair weight matrix at one query pair."""
        check_is_fitted(self, "X_")
        return link_smooth_weights(self.X_, self._config(x, xp))


class ConventionalKernelSmoother(BaseEstimator, RegressorMixin):
    """Regularized Nadaraya-Watson regressor on single-node covariates."""

    def __init__(self, kernel="boxcar", bandwidth=0.1, regularization=0.0,
                 normalized_kernel=False):
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.regularization = regularization
        self.normalized_kernel = normalized_kernel

    def fit(self, X, y):
        X = as_points(X)
        self.X_ = X
        self.y_ = check_vector(y, X.shape[0])
        self.n_features_in_ = X.shape[1]
        self.kernel_ = _resolve_kernel(self.kernel, X.shape[1], self.normalized_kernel)
        return self

    def predict(self, X):
        check_is_fitted(self, "X_")
        Q = as_points(X, name="X")
        if Q.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {Q.shape[1]}")
        return np.array([
            conventional_smooth(self.X_, self.y_, self.kernel_, self.bandwidth,
                                self.regularization, q)
            for q in Q
        ])
