"""Fourier truncation of the multiplication-by-``exp(2itx)`` projection path.

On ``L^2(-1, 1)`` with orthonormal basis ``e_k = exp(i pi k x)/sqrt(2)`` the
projection ``P`` onto the even harmonics is rotated by the unitaries
``U_t = exp(2itx)``.  The path ``P_t = U_t P U_t^*`` is a geodesic:
``||P_t - P|| = sin t`` on ``[0, pi/2]``.  Everything here works with the
symmetric index window ``k = -n..n``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError, NotConvergedError
from .geometry import Projection
from .linalg import hermitian_norm, operator_norm


@dataclass(frozen=True)
class FourierModel:
    """Index window ``k = -n, ..., n`` of the Fourier basis."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InputError("n must be a positive integer")

    @property
    def dim(self):
        return 2 * self.n + 1

    @property
    def indices(self):
        return np.arange(-self.n, self.n + 1)

    def _offsets(self):
        k = self.indices
        return k[None, :] - k[:, None]  # j = k - m, rows m, columns k


def u_t_matrix(model, t):
    """Truncated ``U_t``: ``(U_t)_{mk} = (1/2) int exp(i((k-m) pi + 2t) x) dx``.

    In closed form this is ``sinc(k - m + 2t/pi)`` with the normalized sinc,
    evaluated as ``(-1)^j sin(2t) / (j pi + 2t)`` so that integer arguments
    give exact zeros.
    """
    j = model._offsets()
    a = j * math.pi + 2 * t
    sign = np.where(j % 2 == 0, 1.0, -1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(a == 0, 1.0, sign * math.sin(2 * t) / a)
    return out.astype(complex)


def unitarity_defect(model, t):
    """``(||U^*U - I||, ||U^*U - I||_F / sqrt(dim))`` for the truncated ``U_t``.

    The operator-norm defect is dominated by basis vectors at the edge of
    the window and does not decay with ``n``; the normalized Frobenius
    defect measures the average loss and does.
    """
    U = u_t_matrix(model, t)
    E = U.conj().T @ U - np.eye(model.dim)
    return hermitian_norm(E), float(np.linalg.norm(E) / math.sqrt(model.dim))


def even_projection(model):
    """Diagonal projection onto ``span{e_k : k even}``."""
    mask = model.indices % 2 == 0
    return Projection(np.diag(mask.astype(float)), int(mask.sum()))


def x_hat_matrix(model):
    """Multiplication by ``x``: ``(x)_{mk} = -i (-1)^j / (j pi)`` for ``j = k - m != 0``."""
    j = model._offsets()
    out = np.zeros(j.shape, dtype=complex)
    nz = j != 0
    out[nz] = -1j * np.where(j[nz] % 2 == 0, 1.0, -1.0) / (j[nz] * math.pi)
    return out


def path_difference_compression(model, t):
    """Exact compression of ``P_t - P`` to the window.

    ``P`` averages ``f`` with its half-period shift, so
    ``P_t - P = (M - I) S / 2`` with ``S = diag((-1)^k)`` and ``M``
    multiplication by ``cos 2t + i sin 2t sgn(x)``.  Entries are
    ``(cos 2t - 1)(-1)^k / 2`` on the diagonal and
    ``-(-1)^k sin 2t / (j pi)`` for odd ``j = k - m``.
    """
    j = model._offsets()
    sign_k = np.where(model.indices % 2 == 0, 1.0, -1.0)[None, :]
    out = np.zeros(j.shape)
    odd = j % 2 != 0
    out[odd] = -(sign_k * np.ones_like(out))[odd] * math.sin(2 * t) / (j[odd] * math.pi)
    out[np.diag_indices(model.dim)] = 0.5 * (math.cos(2 * t) - 1) * sign_k[0]
    return out


def _round_projection(M):
    w, V = np.linalg.eigh((M + M.conj().T) / 2)
    B = V[:, w >= 0.5]
    return B @ B.conj().T


@dataclass(frozen=True)
class PathDeviation:
    """``actual = ||P_t - P||`` on the window against ``predicted = sin t``.

    ``rounded`` is the same norm after rounding the conjugation by the
    truncated (non-unitary) ``U_t`` to the nearest projection; ``defect``
    and ``defect_frobenius`` are the unitarity defects of that ``U_t``.
    """

    t: float
    n: int
    actual: float
    predicted: float
    defect: float
    defect_frobenius: float
    rounded: float = math.nan

    @property
    def error(self):
        return abs(self.actual - self.predicted)

    def to_dict(self):
        return {"n": self.n, "t": self.t, "actual": self.actual, "predicted": self.predicted,
                "defect": self.defect, "defect_frobenius": self.defect_frobenius, "rounded": self.rounded}


def projection_path_deviation(model, t, rounded=False):
    """Compare ``||P_t - P||`` with ``sin t`` at truncation ``model.n``.

    ``actual`` uses the exact matrix entries of ``P_t - P`` restricted to
    the window.  With ``rounded=True`` the spectral-rounding surrogate
    ``round(U P U^*)`` built from the truncated ``U_t`` is also evaluated.
    """
    if not 0 <= t <= math.pi / 2:
        raise InputError("t must lie in [0, pi/2]")
    actual = hermitian_norm(path_difference_compression(model, t))
    defect, defect_f = unitarity_defect(model, t)
    rd = math.nan
    if rounded:
        U = u_t_matrix(model, t)
        P = even_projection(model).matrix
        rd = hermitian_norm(_round_projection(U @ P @ U.conj().T) - P)
    return PathDeviation(float(t), model.n, actual, math.sin(t), defect, defect_f, rd)


@dataclass(frozen=True)
class ToeplitzHp:
    """``(2m+1) x (2m+1)`` section of ``(H_p)_{jk} = 1/(j - k + p)``."""

    p: float
    m: int

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise InputError("p must lie in (0, 1)")
        if int(self.m) != self.m or self.m < 1:
            raise InputError("m must be a positive integer")

    @property
    def size(self):
        return 2 * self.m + 1

    @property
    def limit(self):
        return math.pi / math.sin(math.pi * self.p)

    def matrix(self, rows=None, cols=None):
        rows = self.size if rows is None else rows
        cols = self.size if cols is None else cols
        j = np.arange(rows)[:, None] - np.arange(cols)[None, :]
        return 1.0 / (j + self.p)

    def _fft_operators(self):
        # Embed the Toeplitz matrix in a circulant of length L >= 2N - 1.
        N = self.size
        L = 1 << (2 * N - 1).bit_length()
        c = np.zeros(L)
        lags = np.arange(N)
        c[:N] = 1.0 / (lags + self.p)  # first column: j - k = 0..N-1
        c[L - N + 1:] = 1.0 / (-lags[1:][::-1] + self.p)  # first row, negative lags
        fc = np.fft.rfft(c)
        # H^T has first column 1/(p - l)
        ct = np.zeros(L)
        ct[:N] = 1.0 / (self.p - lags)
        ct[L - N + 1:] = 1.0 / (lags[1:][::-1] + self.p)
        fct = np.fft.rfft(ct)

        def mv(x, f):
            y = np.fft.irfft(f * np.fft.rfft(x, L), L)
            return y[:N]

        return (lambda x: mv(x, fc)), (lambda x: mv(x, fct))

    def matvec(self, x):
        return self._fft_operators()[0](x)


@dataclass(frozen=True)
class NormResult:
    norm: float
    limit: float
    iterations: int
    converged: bool
    method: str

    @property
    def gap(self):
        return self.limit - self.norm

    def to_dict(self):
        return {"norm": self.norm, "limit": self.limit, "gap": self.gap,
                "iterations": self.iterations, "converged": self.converged, "method": self.method}


def hilbert_norm(hp, method="power", tol=1e-12, maxiter=5000, strict=False):
    """Operator norm of the section ``hp``.

    ``method="power"`` runs power iteration on ``H^T H`` from the normalized
    all-ones vector with FFT matrix-vector products; the Rayleigh quotient
    increases towards the norm, so the result is always a lower bound.
    ``method="svd"`` takes the largest singular value of the dense matrix.
    """
    if method == "svd":
        return NormResult(operator_norm(hp.matrix()), hp.limit, 0, True, "svd")
    if method != "power":
        raise InputError(f"unknown method {method!r}")
    H, Ht = hp._fft_operators()
    x = np.ones(hp.size) / math.sqrt(hp.size)
    lam = 0.0
    for it in range(1, maxiter + 1):
        y = Ht(H(x))
        new = float(x @ y)
        ny = float(np.linalg.norm(y))
        x = y / ny
        if abs(new - lam) <= tol * new:
            return NormResult(math.sqrt(new), hp.limit, it, True, "power")
        lam = new
    if strict:
        raise NotConvergedError(f"power iteration did not converge in {maxiter} steps", residual=abs(new - lam))
    return NormResult(math.sqrt(lam), hp.limit, maxiter, False, "power")


@dataclass(frozen=True)
class CrossIdentity:
    lhs: float
    rhs: float
    p: float
    m: int

    @property
    def residual(self):
        return abs(self.lhs - self.rhs)

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "p": self.p, "m": self.m, "residual": self.residual}


def cross_identity_check(model, t):
    """``||P U_t P_perp||`` against ``(sin 2t / 2 pi) ||H_p||`` with ``p = (2t + pi)/(2 pi)``.

    The left side uses the window ``model``; the right side the Toeplitz
    section with ``m = floor(n/2)``.
    """
    if not 0 < t < math.pi / 2:
        raise InputError("t must lie in (0, pi/2)")
    U = u_t_matrix(model, t)
    even = model.indices % 2 == 0
    lhs = operator_norm(U[np.ix_(even, ~even)])
    p = (2 * t + math.pi) / (2 * math.pi)
    hp = ToeplitzHp(p, model.n // 2)
    rhs = math.sin(2 * t) / (2 * math.pi) * hilbert_norm(hp, method="svd").norm
    return CrossIdentity(lhs, rhs, p, hp.m)


def commutator_norm_check(model):
    """``||[2x, P]||`` on the window; tends to 1."""
    X = 2 * x_hat_matrix(model)
    P = even_projection(model).matrix
    return operator_norm(X @ P - P @ X)


def n_sweep(ns=(128, 256, 512, 1024), t=math.pi / 4, p=0.5):
    """Rows of truncation diagnostics used to freeze the limit tolerances."""
    rows = []
    for n in ns:
        model = FourierModel(n)
        dev = projection_path_deviation(model, t, rounded=n <= 512)
        rows.append({
            "n": n,
            "actual": dev.actual,
            "error": dev.error,
            "rounded": dev.rounded,
            "defect": dev.defect,
            "defect_frobenius": dev.defect_frobenius,
            "cross_residual": cross_identity_check(model, t).residual,
            "commutator": commutator_norm_check(model),
            "hp_norm_gap": hilbert_norm(ToeplitzHp(p, n), method="svd").gap,
        })
    return rows
