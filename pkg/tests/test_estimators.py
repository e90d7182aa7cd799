import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from conftest import line_projection
from projgeom.estimators import AngularOperator, SpectralProjector
from projgeom.exceptions import InputError, NoGapError, NotAGraphError
from projgeom.geometry import random_projection, tilt
from projgeom.spectral import random_gapped_hermitian


def test_spectral_projector(rng):
    A, split = random_gapped_hermitian(6, 2, 1.0, rng)
    est = SpectralProjector(gap_threshold=0.5)
    assert est.fit(A) is est
    assert est.projection_.rank == 2
    X = rng.standard_normal((4, 6))
    Y = est.transform(X)
    np.testing.assert_allclose(est.transform(Y), Y, atol=1e-12)
    np.testing.assert_allclose(est.fit_transform(A), A @ est.projection_.matrix.T, atol=1e-12)


def test_spectral_projector_jacobi_agrees(rng):
    A, _ = random_gapped_hermitian(5, 3, 1.0, rng)
    a = SpectralProjector(0.5).fit(A).projection_.matrix
    b = SpectralProjector(0.5, method="jacobi").fit(A).projection_.matrix
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_spectral_projector_errors(rng):
    with pytest.raises(NotFittedError):
        SpectralProjector().transform(np.eye(2))
    with pytest.raises(NoGapError):
        SpectralProjector(gap_threshold=10).fit(np.diag([0.0, 1.0]))
    est = SpectralProjector(0.5).fit(np.diag([0.0, 1.0, 2.0]))
    with pytest.raises(InputError):
        est.transform(np.zeros((1, 2)))


def test_params_and_clone():
    est = SpectralProjector(gap_threshold=0.25, method="jacobi")
    assert est.get_params() == {"gap_threshold": 0.25, "method": "jacobi"}
    c = clone(est)
    assert c is not est and c.get_params() == est.get_params()
    c.set_params(gap_threshold=1.0)
    assert c.gap_threshold == 1.0


def test_angular_operator_round_trip(rng):
    P = random_projection(7, 3, rng)
    x0 = 0.3 * rng.standard_normal((4, 3))
    Q = tilt(P, x0).matrix
    est = AngularOperator().fit(P.matrix)
    X = est.transform(Q)
    np.testing.assert_allclose(X, x0, atol=1e-10)
    np.testing.assert_allclose(est.inverse_transform(X), Q, atol=1e-10)


def test_angular_operator_line():
    est = AngularOperator().fit(np.diag([1.0, 0.0]))
    assert est.angle_norm(line_projection(0.4)) == pytest.approx(0.4)
    with pytest.raises(NotAGraphError):
        est.transform(np.diag([0.0, 1.0]))
    with pytest.raises(NotFittedError):
        AngularOperator().transform(np.eye(2))
