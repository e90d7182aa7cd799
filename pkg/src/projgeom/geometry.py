"""Geometry of a pair of orthogonal projections.

With ``H = Ran P (+) Ran P^perp`` and ``||P - Q|| < 1``, the range of ``Q`` is
the graph ``{x + X x : x in Ran P}`` of an angular operator
``X : Ran P -> Ran P^perp``. Everything here is computed in the coordinates
of an orthonormal eigenbasis of ``P``, so block-operator formulas become
plain matrix products.
"""

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._validation import as_hermitian, check_array, check_same_dim
from .exceptions import (
    HypothesisViolatedError,
    InconsistentPairError,
    InputError,
    NotAGraphError,
)
from .linalg import eig_hermitian, hermitian_norm, inv_psd, inv_sqrt_psd, matrix_function, operator_norm, sqrt_psd

IDEMPOTENT_TOL = 1e-10
SNAP_WARN_TOL = 1e-8
GRAPH_MARGIN = 1e-10


class ProjectionSnapWarning(UserWarning):
    """Input needed a noticeable spectral correction to become a projection."""


@dataclass(frozen=True, eq=False)
class Projection:
    """An orthogonal projection ``P = P* = P^2`` together with its rank."""

    matrix: np.ndarray
    rank: int

    @classmethod
    def from_matrix(cls, M, name="projection"):
        """Validate ``M``; near-idempotent input is snapped spectrally.

        Eigenvalues below 1/2 are rounded to 0, the rest to 1. A warning is
        issued when the correction exceeds ``SNAP_WARN_TOL``.
        """
        H = as_hermitian(M, name)
        dec = eig_hermitian(H)
        w, V = dec
        mask = w >= 0.5
        defect = float(np.max(np.abs(w - mask), initial=0.0))
        if defect > SNAP_WARN_TOL:
            warnings.warn(
                f"{name}: snapped to nearest projection (eigenvalue correction {defect:.2e})",
                ProjectionSnapWarning,
                stacklevel=2,
            )
        if defect > IDEMPOTENT_TOL:
            B = V[:, mask]
            H = B @ B.conj().T
        proj = cls(H, int(mask.sum()))
        proj.__dict__["_eig"] = (w, V)
        return proj

    @property
    def dim(self):
        return self.matrix.shape[0]

    @cached_property
    def _eig(self):
        dec = eig_hermitian(self.matrix)
        return dec.eigenvalues, dec.eigenvectors

    @cached_property
    def bases(self):
        """Orthonormal columns ``(basis_p, basis_perp)`` for Ran P and Ran P^perp."""
        w, V = self._eig
        order = np.argsort(-w, kind="stable")
        V = V[:, order]
        return V[:, : self.rank], V[:, self.rank :]

    @property
    def complement(self):
        return Projection(np.eye(self.dim) - self.matrix, self.dim - self.rank)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def as_projection(P, name="projection"):
    if isinstance(P, Projection):
        return P
    return Projection.from_matrix(P, name)


def project_onto_span(columns, drop_tol=1e-12):
    """Orthogonal projection onto the column span of ``columns``."""
    A = check_array(columns, "columns")
    n = A.shape[0]
    if A.size == 0:
        return Projection(np.zeros((n, n)), 0)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > drop_tol * s[0])) if s.size and s[0] > 0 else 0
    B = U[:, :r]
    return Projection((B @ B.conj().T + (B @ B.conj().T).conj().T) / 2, r)


def distance(p, q):
    """``||P - Q||``, exactly symmetric in its arguments."""
    P, Q = as_projection(p), as_projection(q)
    check_same_dim(P.matrix, Q.matrix)
    a, b = P.matrix, Q.matrix
    if a.tobytes() > b.tobytes():
        a, b = b, a
    d = hermitian_norm(a - b)
    if d > 1 + IDEMPOTENT_TOL:
        raise InputError(f"distance {d} > 1 between projections: inputs are not projections")
    return min(d, 1.0)


def _blocks(Bp, Bperp, a, b, c, d):
    # W [[a, b], [c, d]] W* with W = [Bp, Bperp].
    return (Bp @ a @ Bp.conj().T + Bp @ b @ Bperp.conj().T
            + Bperp @ c @ Bp.conj().T + Bperp @ d @ Bperp.conj().T)


def operator_angle(x):
    """``Theta = arctan sqrt(X* X)`` as a Hermitian matrix on Ran P."""
    x = np.asarray(x)
    return matrix_function(x.conj().T @ x, lambda w: np.arctan(np.sqrt(np.clip(w, 0.0, None))))


def direct_rotation(x, basis_p, basis_perp):
    """The unitary ``U`` with ``U P U* = Q`` built from the angular operator."""
    x = np.asarray(x)
    k, m = x.shape[1], x.shape[0]
    r0 = inv_sqrt_psd(np.eye(k) + x.conj().T @ x) if k else np.zeros((0, 0))
    r1 = inv_sqrt_psd(np.eye(m) + x @ x.conj().T) if m else np.zeros((0, 0))
    return _blocks(basis_p, basis_perp, r0, -x.conj().T @ r1, x @ r0, r1)


@dataclass(frozen=True, eq=False)
class SubspacePair:
    """Derived geometry of a pair ``(P, Q)`` with ``||P - Q|| < 1``."""

    p: Projection
    q: Projection
    x: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    basis_p: np.ndarray
    basis_perp: np.ndarray
    distance: float

    @property
    def theta_norm(self):
        return hermitian_norm(self.theta)

    @property
    def x_norm(self):
        return operator_norm(self.x)

    def to_dict(self):
        from .io import matrix_to_json

        return {
            "p": matrix_to_json(self.p.matrix),
            "q": matrix_to_json(self.q.matrix),
            "x": matrix_to_json(self.x),
            "theta_norm": self.theta_norm,
            "distance": self.distance,
        }


def angular_operator(p, q, bases=None):
    """Angular operator ``X`` with ``Ran Q = G(X)`` relative to ``Ran P``.

    ``X = T S^{-1}`` where ``S = P Q P`` restricted to Ran P and
    ``T = P^perp Q P``, both in the coordinates ``bases`` (defaults to
    ``P.bases``).

    Raises
    ------
    NotAGraphError
        If ``||P - Q|| >= 1 - 1e-10``.
    InconsistentPairError
        If ``S`` is numerically singular despite the distance check.
    """
    P, Q = as_projection(p, "p"), as_projection(q, "q")
    d = distance(P, Q)
    if d >= 1 - GRAPH_MARGIN:
        raise NotAGraphError(f"||P - Q|| = {d!r} is not < 1: Ran Q is not a graph over Ran P")
    Bp, Bperp = bases if bases is not None else P.bases
    k = Bp.shape[1]
    QB = Q.matrix @ Bp
    S = Bp.conj().T @ QB
    T = Bperp.conj().T @ QB
    if k:
        S = (S + S.conj().T) / 2
        smin = np.linalg.eigvalsh(S)[0]
        if smin <= 1e-12:
            raise InconsistentPairError(f"P Q P is singular on Ran P (min eigenvalue {smin!r})")
        x = np.linalg.solve(S, T.conj().T).conj().T
    else:
        x = T
    theta = operator_angle(x) if k else np.zeros((0, 0))
    u = direct_rotation(x, Bp, Bperp)
    return SubspacePair(P, Q, x, theta, u, Bp, Bperp, d)


def projection_from_graph(x, basis_p, basis_perp):
    """Projection onto ``G(X)`` assembled from the 2x2 block representation."""
    x = check_array(x, "x")
    Bp, Bperp = np.asarray(basis_p), np.asarray(basis_perp)
    k = Bp.shape[1]
    if x.shape != (Bperp.shape[1], k):
        raise InputError(f"x has shape {x.shape}, expected {(Bperp.shape[1], k)}")
    n = Bp.shape[0]
    if k == 0:
        return Projection(np.zeros((n, n), dtype=np.result_type(Bp, x)), 0)
    G = inv_psd(np.eye(k) + x.conj().T @ x)
    M = _blocks(Bp, Bperp, G, G @ x.conj().T, x @ G, x @ G @ x.conj().T)
    return Projection((M + M.conj().T) / 2, k)


def rotation_unitary(pair):
    return direct_rotation(pair.x, pair.basis_p, pair.basis_perp)


@dataclass(frozen=True, eq=False)
class FourProjections:
    """Factorization ``Q = A^{-1/2} B C B* A^{-1/2}`` of ``Q = U1* Q2 U1``.

    ``a``, ``b``, ``c`` and ``q_check`` are in P-adapted coordinates;
    ``q`` is the ambient ``U1* Q2 U1``.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    q_check: np.ndarray
    q: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    residual: float


def four_projections_factorization(p, q1, q2):
    P = as_projection(p, "p")
    pair1 = angular_operator(P, q1)
    pair2 = angular_operator(P, q2, bases=(pair1.basis_p, pair1.basis_perp))
    x1, x2 = pair1.x, pair2.x
    m, k = x1.shape
    I0, I1 = np.eye(k), np.eye(m)
    A = np.zeros((k + m, k + m), dtype=np.result_type(x1, x2))
    A[:k, :k] = I0 + x1.conj().T @ x1
    A[k:, k:] = I1 + x1 @ x1.conj().T
    B = np.vstack([I0 + x1.conj().T @ x2, x2 - x1])
    C = inv_psd(I0 + x2.conj().T @ x2) if k else np.zeros((0, 0))
    A_is = np.zeros_like(A)
    if k:
        A_is[:k, :k] = inv_sqrt_psd(A[:k, :k])
    if m:
        A_is[k:, k:] = inv_sqrt_psd(A[k:, k:])
    q_check = A_is @ B @ C @ B.conj().T @ A_is
    U1 = pair1.u
    Q = U1.conj().T @ pair2.q.matrix @ U1
    W = np.hstack([pair1.basis_p, pair1.basis_perp])
    residual = operator_norm(q_check - W.conj().T @ Q @ W)
    return FourProjections(A, B, C, q_check, Q, x1, x2, residual)


def angle_addition_residual(x1, x2, z):
    """Residual of ``X2 - X1 = (I + X1 X1*)^{1/2} Z (I + X1* X1)^{-1/2} (I + X1* X2)``.

    Raises :class:`HypothesisViolatedError` when ``I + X1* X2`` is singular.
    """
    x1, x2, z = (check_array(v, name) for v, name in ((x1, "x1"), (x2, "x2"), (z, "z")))
    if not (x1.shape == x2.shape == z.shape):
        raise InputError(f"incompatible shapes {x1.shape}, {x2.shape}, {z.shape}")
    m, k = x1.shape
    M = np.eye(k) + x1.conj().T @ x2
    if k:
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] <= 1e-12 * max(1.0, s[0]):
            raise HypothesisViolatedError("I + X1* X2 is not of full range")
    left = sqrt_psd(np.eye(m) + x1 @ x1.conj().T) if m else np.zeros((0, 0))
    right = inv_sqrt_psd(np.eye(k) + x1.conj().T @ x1) if k else np.zeros((0, 0))
    return operator_norm((x2 - x1) - left @ z @ right @ M)


def angle_addition_pipeline(p, q1, q2):
    """Run the factorization and check the angle-addition identity on it.

    Returns ``(factorization, z, residual)`` where ``z`` is the angular
    operator of ``U1* Q2 U1`` relative to ``P``.
    """
    fp = four_projections_factorization(p, q1, q2)
    P = as_projection(p)
    z = angular_operator(P, Projection(fp.q, P.rank), bases=P.bases).x
    return fp, z, angle_addition_residual(fp.x1, fp.x2, z)


def random_projection(n, k, rng, complex_=True):
    """Haar-random rank-``k`` projection in dimension ``n``."""
    from .linalg import random_unitary

    U = random_unitary(n, rng, complex_)[:, :k]
    M = U @ U.conj().T
    return Projection((M + M.conj().T) / 2, k)


def tilt(p, x):
    """Projection onto the graph of ``x`` over ``Ran P``."""
    P = as_projection(p)
    return projection_from_graph(x, *P.bases)
