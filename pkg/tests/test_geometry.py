import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import line_projection
from projgeom.exceptions import DimensionMismatchError, HypothesisViolatedError, InputError, NotAGraphError
from projgeom.geometry import (
    Projection,
    ProjectionSnapWarning,
    angle_addition_pipeline,
    angle_addition_residual,
    angular_operator,
    as_projection,
    distance,
    four_projections_factorization,
    project_onto_span,
    projection_from_graph,
    random_projection,
    rotation_unitary,
    tilt,
)
from projgeom.linalg import random_unitary


def _random_x(rng, m, k, scale=1.0):
    return scale * (rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k)))


class TestProjection:
    def test_from_matrix(self):
        P = Projection.from_matrix(np.diag([1.0, 0.0, 1.0]))
        assert P.rank == 2 and P.dim == 3

    def test_snap_with_warning(self):
        M = np.diag([1.0 + 1e-6, 1e-6])
        with pytest.warns(ProjectionSnapWarning):
            P = Projection.from_matrix(M)
        np.testing.assert_allclose(P.matrix, np.diag([1.0, 0.0]), atol=1e-15)

    def test_small_defect_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            P = Projection.from_matrix(np.diag([1.0 + 1e-12, 0.0]))
        assert P.rank == 1

    def test_invariants_random(self, rng):
        P = random_projection(7, 3, rng)
        M = P.matrix
        assert np.linalg.norm(M @ M - M, 2) <= 1e-10
        w = np.linalg.eigvalsh(M)
        assert np.all(np.minimum(abs(w), abs(w - 1)) <= 1e-10)

    def test_bases(self, rng):
        P = random_projection(6, 2, rng)
        Bp, Bperp = P.bases
        W = np.hstack([Bp, Bperp])
        np.testing.assert_allclose(W.conj().T @ W, np.eye(6), atol=1e-12)
        np.testing.assert_allclose(Bp @ Bp.conj().T, P.matrix, atol=1e-12)

    def test_complement(self, rng):
        P = random_projection(5, 2, rng)
        np.testing.assert_allclose(P.matrix + P.complement.matrix, np.eye(5), atol=1e-14)
        assert P.complement.rank == 3


class TestSpan:
    def test_unit_vector(self):
        np.testing.assert_allclose(project_onto_span(np.array([[1.0], [0.0], [0.0]])).matrix, np.diag([1.0, 0, 0]))

    def test_full_basis(self):
        assert np.allclose(project_onto_span(np.eye(2)).matrix, np.eye(2))

    def test_line(self):
        th = math.pi / 6
        P = project_onto_span(np.array([[math.cos(th)], [math.sin(th)]]))
        s3 = math.sqrt(3)
        np.testing.assert_allclose(P.matrix, [[0.75, s3 / 4], [s3 / 4, 0.25]], atol=1e-15)

    def test_rank_deficient(self, rng):
        v = rng.standard_normal((4, 1))
        P = project_onto_span(np.hstack([v, 2 * v, rng.standard_normal((4, 1))]))
        assert P.rank == 2


class TestDistance:
    def test_equal(self):
        assert distance(np.diag([1.0, 0.0]), np.diag([1.0, 0.0])) == 0.0

    def test_orthogonal(self):
        assert distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == 1.0

    def test_line(self):
        assert distance(np.diag([1.0, 0.0]), line_projection(math.pi / 6)) == pytest.approx(0.5, abs=1e-15)

    def test_symmetric_exact(self, rng):
        for _ in range(20):
            P, Q = random_projection(6, 3, rng), random_projection(6, 2, rng)
            assert distance(P, Q) == distance(Q, P)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            distance(np.eye(2), np.eye(3))


class TestAngularOperator:
    def test_identical(self, rng):
        P = random_projection(5, 2, rng)
        pair = angular_operator(P, P)
        assert np.abs(pair.x).max() <= 1e-12
        assert pair.theta_norm <= 1e-12
        np.testing.assert_allclose(pair.u, np.eye(5), atol=1e-12)

    def test_line(self):
        pair = angular_operator(np.diag([1.0, 0.0]), line_projection(math.pi / 6))
        np.testing.assert_allclose(pair.x, [[math.tan(math.pi / 6)]], atol=1e-14)
        assert pair.theta_norm == pytest.approx(math.pi / 6, abs=1e-14)

    def test_not_a_graph(self):
        with pytest.raises(NotAGraphError):
            angular_operator(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))

    def test_rank_zero(self):
        pair = angular_operator(np.zeros((3, 3)), np.zeros((3, 3)))
        assert pair.x.shape == (3, 0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 8), st.floats(0.01, 3.0), st.integers(0, 2**32 - 1))
    def test_round_trip_and_identities(self, k, m, scale, seed):
        rng = np.random.default_rng(seed)
        n = k + m
        P = random_projection(n, k, rng)
        x0 = _random_x(rng, m, k, scale / math.sqrt(k + m + 1))
        Q = tilt(P, x0)
        pair = angular_operator(P, Q)
        np.testing.assert_allclose(pair.x, x0, atol=1e-8 * (1 + np.abs(x0).max(initial=0.0)))
        assert abs(math.sin(pair.theta_norm) - pair.distance) <= 1e-8
        assert abs(math.tan(pair.theta_norm) - pair.x_norm) <= 1e-8 * (1 + pair.x_norm)
        d = pair.distance
        assert abs(pair.x_norm - d / math.sqrt(1 - d * d)) <= 1e-8 * (1 + pair.x_norm)
        U = pair.u
        np.testing.assert_allclose(U.conj().T @ U, np.eye(n), atol=1e-10)
        np.testing.assert_allclose(U.conj().T @ Q.matrix @ U, P.matrix, atol=1e-8)

    def test_unitary_invariance(self, rng):
        P = random_projection(8, 3, rng)
        Q = tilt(P, _random_x(rng, 5, 3, 0.3))
        W = random_unitary(8, rng)
        a = angular_operator(P, Q)
        b = angular_operator(W @ P.matrix @ W.conj().T, W @ Q.matrix @ W.conj().T)
        assert abs(a.x_norm - b.x_norm) <= 1e-9
        assert abs(a.theta_norm - b.theta_norm) <= 1e-9
        assert abs(a.distance - b.distance) <= 1e-9

    def test_to_dict(self):
        d = angular_operator(np.diag([1.0, 0.0]), line_projection(0.3)).to_dict()
        assert set(d) == {"p", "q", "x", "theta_norm", "distance"}


class TestGraph:
    def test_zero(self, rng):
        P = random_projection(4, 2, rng)
        np.testing.assert_allclose(projection_from_graph(np.zeros((2, 2)), *P.bases).matrix, P.matrix, atol=1e-12)

    def test_line(self):
        th = 0.4
        Q = projection_from_graph(np.array([[math.tan(th)]]), np.array([[1.0], [0.0]]), np.array([[0.0], [1.0]]))
        np.testing.assert_allclose(Q.matrix, line_projection(th), atol=1e-15)

    def test_shape_check(self, rng):
        P = random_projection(4, 2, rng)
        with pytest.raises(InputError):
            projection_from_graph(np.zeros((1, 2)), *P.bases)

    def test_rotation_2x2(self):
        pair = angular_operator(np.diag([1.0, 0.0]), line_projection(math.pi / 6))
        c, s = math.cos(math.pi / 6), math.sin(math.pi / 6)
        np.testing.assert_allclose(rotation_unitary(pair), [[c, -s], [s, c]], atol=1e-14)


class TestFourProjections:
    def test_trivial(self, rng):
        P = random_projection(4, 2, rng)
        fp = four_projections_factorization(P, P, P)
        np.testing.assert_allclose(fp.a, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(fp.b, np.vstack([np.eye(2), np.zeros((2, 2))]), atol=1e-12)
        np.testing.assert_allclose(fp.c, np.eye(2), atol=1e-12)
        assert fp.residual <= 1e-12

    def test_line_difference(self):
        a, b = 0.2, 0.5
        P = np.diag([1.0, 0.0])
        fp = four_projections_factorization(P, line_projection(a), line_projection(b))
        np.testing.assert_allclose(fp.q_check, line_projection(b - a), atol=1e-14)

    def test_random(self, rng):
        for n in (2, 5, 8):
            P = random_projection(n, n // 2, rng)
            q1 = tilt(P, _random_x(rng, n - n // 2, n // 2, 0.3))
            q2 = tilt(P, _random_x(rng, n - n // 2, n // 2, 0.3))
            fp, z, res = angle_addition_pipeline(P, q1, q2)
            assert fp.residual <= 1e-8
            assert res <= 1e-8


class TestAngleAddition:
    def test_equal(self, rng):
        x = _random_x(rng, 3, 2)
        assert angle_addition_residual(x, x, np.zeros((3, 2))) == 0.0

    def test_scalar_identity(self):
        a, b = 0.3, 1.1
        res = angle_addition_residual(np.array([[math.tan(a)]]), np.array([[math.tan(b)]]),
                                      np.array([[math.tan(b - a)]]))
        assert res <= 1e-14

    def test_hypothesis_violated(self):
        a = 0.5
        b = a - math.pi / 2 + 1e-14  # tan a tan b = -1
        with pytest.raises(HypothesisViolatedError):
            angle_addition_residual(np.array([[math.tan(a)]]), np.array([[math.tan(b)]]), np.zeros((1, 1)))

    def test_shapes(self):
        with pytest.raises(InputError):
            angle_addition_residual(np.zeros((2, 1)), np.zeros((1, 2)), np.zeros((2, 1)))


def test_as_projection_passthrough(rng):
    P = random_projection(3, 1, rng)
    assert as_projection(P) is P
