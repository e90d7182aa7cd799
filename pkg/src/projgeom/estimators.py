"""Estimator-style wrappers around spectral projections and angular operators.

These follow the scikit-learn conventions (constructor stores
hyperparameters only, ``fit`` returns ``self``, fitted attributes end in an
underscore) so they compose with ``clone`` and ``get_params``.  The "data"
are matrices rather than sample tables.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_hermitian, check_array
from .exceptions import InputError
from .geometry import angular_operator, as_projection, projection_from_graph
from .linalg import eig_hermitian
from .spectral import spectral_projection, split_spectrum


class SpectralProjector(TransformerMixin, BaseEstimator):
    """Project vectors onto the lower spectral component of a Hermitian matrix.

    Parameters
    ----------
    gap_threshold : float
        Minimal spectral gap at which the spectrum is split.
    method : {"lapack", "jacobi"}
        Eigensolver.

    Attributes
    ----------
    split_ : SpectralSplit
    projection_ : Projection
        ``E_A(O_{d/2}(omega))``.
    """

    def __init__(self, gap_threshold=1e-8, method="lapack"):
        self.gap_threshold = gap_threshold
        self.method = method

    def fit(self, A, y=None):
        A = as_hermitian(A, "A")
        self.split_ = split_spectrum(A, self.gap_threshold)
        eig = eig_hermitian(A, method=self.method)
        self.projection_ = spectral_projection(A, self.split_.member(), eig=eig)
        self.n_features_in_ = A.shape[0]
        return self

    def transform(self, X):
        """Rows of ``X`` mapped to ``P x`` (returned as rows)."""
        check_is_fitted(self, "projection_")
        X = check_array(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise InputError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        return X @ self.projection_.matrix.T


class AngularOperator(TransformerMixin, BaseEstimator):
    """Graph coordinates relative to a fixed reference projection.

    ``fit(P)`` fixes the bases of ``Ran P`` and ``Ran P^perp``;
    ``transform(Q)`` returns the angular operator ``X`` with
    ``Ran Q = G(X)`` and ``inverse_transform(X)`` rebuilds ``Q``.
    """

    def fit(self, P, y=None):
        self.reference_ = as_projection(P, "P")
        self.basis_p_, self.basis_perp_ = self.reference_.bases
        self.n_features_in_ = self.reference_.dim
        return self

    def transform(self, Q):
        check_is_fitted(self, "reference_")
        pair = angular_operator(self.reference_, Q, bases=(self.basis_p_, self.basis_perp_))
        return pair.x

    def inverse_transform(self, X):
        check_is_fitted(self, "reference_")
        return projection_from_graph(X, self.basis_p_, self.basis_perp_).matrix

    def angle_norm(self, Q):
        """``||Theta||`` of ``(P, Q)``."""
        check_is_fitted(self, "reference_")
        x = self.transform(Q)
        return float(np.arctan(np.linalg.norm(x, 2))) if x.size else 0.0
