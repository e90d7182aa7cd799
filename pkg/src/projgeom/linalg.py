"""Dense Hermitian linear algebra: eigensolvers, matrix functions, norms."""

from typing import Callable, NamedTuple

import numpy as np

from ._validation import as_hermitian, check_array
from .exceptions import DomainError, NotConvergedError, NotPSDError, SingularMatrixError

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class EigDecomposition(NamedTuple):
    """Ascending eigenvalues and a unitary matrix of eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def _fix_phases(V):
    # Make the first entry of largest modulus in each column real positive so
    # that eigenvectors (and bases built from them) are reproducible.
    if V.size == 0:
        return V
    idx = np.argmax(np.abs(V) > (1 - 1e-8) * np.abs(V).max(axis=0), axis=0)
    lead = V[idx, np.arange(V.shape[1])]
    phase = lead / np.abs(lead)
    return V * phase.conj() if np.iscomplexobj(V) else V * np.sign(lead)


def jacobi_eigh(H, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigensolver for Hermitian matrices.

    Sweeps over all pivots ``(p, q)`` with ``p < q`` until the off-diagonal
    Frobenius norm drops below ``tol * ||H||_F``.

    Returns
    -------
    EigDecomposition
        Eigenvalues in ascending order.
    """
    A = as_hermitian(H).astype(np.complex128, copy=True)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    fro = np.linalg.norm(A)
    threshold = tol * fro

    def off(A):
        return np.sqrt(max(np.linalg.norm(A) ** 2 - np.linalg.norm(np.diag(A)) ** 2, 0.0))

    for _ in range(max_sweeps):
        if off(A) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300 or mag <= 1e-18 * fro:
                    continue
                # Phase D = diag(1, e^{-i phi}) makes the pivot real, then a
                # real plane rotation zeroes it.
                phase = apq / mag
                theta = 0.5 * np.arctan2(2 * mag, A[q, q].real - A[p, p].real)
                c, s = np.cos(theta), np.sin(theta)
                J = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ J
                A[idx, :] = J.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                V[:, idx] = V[:, idx] @ J
    residual = off(A)
    if residual > threshold:
        raise NotConvergedError(
            f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {residual:.3e})",
            residual=residual,
        )
    w = np.diag(A).real
    order = np.argsort(w, kind="stable")
    return EigDecomposition(w[order], _fix_phases(V[:, order]))


def eig_hermitian(H, method="lapack"):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` calls :func:`numpy.linalg.eigh`; ``method="jacobi"``
    uses :func:`jacobi_eigh`. Eigenvector phases are normalized the same way
    for both.
    """
    A = as_hermitian(H)
    if method == "jacobi":
        return jacobi_eigh(A)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    if A.shape[0] == 0:
        return EigDecomposition(np.zeros(0), np.zeros((0, 0), dtype=A.dtype))
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NotConvergedError(str(exc)) from exc
    return EigDecomposition(w, _fix_phases(V))


def matrix_function(H, f: Callable, eig=None):
    """Evaluate ``f(H) = V diag(f(lambda)) V*``.

    ``f`` is applied to the array of eigenvalues; it may return complex
    values, in which case the result is normal but not Hermitian.
    """
    dec = eig if eig is not None else eig_hermitian(H)
    w, V = dec
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w))
    if fw.shape != w.shape:
        fw = np.broadcast_to(fw, w.shape)
    bad = ~np.isfinite(fw)
    if bad.any():
        lam = float(w[bad][0])
        raise DomainError(f"function undefined at eigenvalue {lam!r}", eigenvalue=lam)
    return (V * fw) @ V.conj().T


def operator_norm(M):
    """Largest singular value of a (possibly rectangular) matrix."""
    arr = check_array(M)
    if arr.size == 0:
        return 0.0
    return float(np.linalg.norm(arr, 2))


def hermitian_norm(H):
    """Operator norm of a Hermitian matrix via its extreme eigenvalues."""
    A = np.asarray(H)
    if A.size == 0:
        return 0.0
    w = np.linalg.eigvalsh(A)
    return float(max(abs(w[0]), abs(w[-1])))


def _psd_eig(H, name):
    dec = eig_hermitian(H)
    w = dec.eigenvalues
    if w.size == 0:
        return dec, 0.0
    scale = max(abs(w[0]), abs(w[-1]))
    if w[0] < -1e-12 * max(scale, 1.0):
        raise NotPSDError(f"{name}: negative eigenvalue {w[0]!r}")
    return EigDecomposition(np.clip(w, 0.0, None), dec.eigenvectors), scale


def sqrt_psd(H):
    """Principal square root of a positive semidefinite matrix."""
    dec, _ = _psd_eig(H, "sqrt_psd")
    return matrix_function(None, np.sqrt, eig=dec)


def inv_sqrt_psd(H):
    """``H^{-1/2}`` for a positive definite matrix."""
    dec, scale = _psd_eig(H, "inv_sqrt_psd")
    w = dec.eigenvalues
    if w.size and w[0] <= 1e-12 * scale:
        raise SingularMatrixError(f"inv_sqrt_psd: smallest eigenvalue {w[0]!r} is numerically zero")
    return matrix_function(None, lambda x: 1.0 / np.sqrt(x), eig=dec)


def inv_psd(H):
    """Inverse of a positive definite matrix through its eigendecomposition."""
    dec, scale = _psd_eig(H, "inv_psd")
    w = dec.eigenvalues
    if w.size and w[0] <= 1e-12 * scale:
        raise SingularMatrixError(f"inv_psd: smallest eigenvalue {w[0]!r} is numerically zero")
    return matrix_function(None, lambda x: 1.0 / x, eig=dec)


def random_hermitian(n, rng, complex_=True, scale=1.0):
    """GUE-like random Hermitian matrix (unnormalized)."""
    G = rng.standard_normal((n, n))
    if complex_:
        G = G + 1j * rng.standard_normal((n, n))
    return scale * (G + G.conj().T) / 2


def random_unitary(n, rng, complex_=True):
    """Haar-distributed unitary via QR with phase correction."""
    G = rng.standard_normal((n, n))
    if complex_:
        G = G + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    d = np.diag(R)
    return Q * (d / np.abs(d))
