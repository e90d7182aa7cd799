"""Spectral projections, component tracking and subspace perturbation bounds."""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import as_hermitian, check_same_dim
from .constants import c_pi_value, c_star_value, offdiag_integral
from .exceptions import DivergentIntegralError, GapClosedError, InputError, NoGapError
from .geometry import Projection
from .linalg import eig_hermitian, hermitian_norm

SQRT3_2 = math.sqrt(3) / 2
# sinh(1)/e = (1 - e^{-2})/2
DIAG_CRITICAL = (1 - math.exp(-2)) / 2
OLD_DIAG_CRITICAL = 2 / (2 + math.pi)


# -- spectral sets ---------------------------------------------------------

def interval(lo=-math.inf, hi=math.inf, closed=False):
    """Membership predicate of the interval ``(lo, hi)`` (or ``[lo, hi]``)."""
    if closed:
        return lambda w: (np.asarray(w) >= lo) & (np.asarray(w) <= hi)
    return lambda w: (np.asarray(w) > lo) & (np.asarray(w) < hi)


def neighborhood(points, radius):
    """Membership predicate of the open ``radius``-neighborhood of ``points``."""
    pts = np.asarray(points, dtype=float).ravel()

    def member(w):
        w = np.atleast_1d(np.asarray(w, dtype=float))
        if pts.size == 0:
            return np.zeros(w.shape, dtype=bool)
        return np.min(np.abs(w[:, None] - pts[None, :]), axis=1) < radius

    return member


def _select(w, member):
    # Predicates may be vectorized or scalar-only.
    try:
        mask = np.asarray(member(w), dtype=bool)
    except (TypeError, ValueError):
        mask = None
    if mask is None or mask.shape != w.shape:
        mask = np.array([bool(member(float(v))) for v in w], dtype=bool)
    return mask


def set_distance(a, b):
    """``min |x - y|`` over finite sets; ``inf`` if either is empty."""
    a, b = np.asarray(a, float).ravel(), np.asarray(b, float).ravel()
    if a.size == 0 or b.size == 0:
        return math.inf
    return float(np.min(np.abs(a[:, None] - b[None, :])))


def spectral_projection(a, member, eig=None):
    """``E_A(omega)``: sum of eigenprojections whose eigenvalue satisfies ``member``."""
    dec = eig if eig is not None else eig_hermitian(a)
    w, V = dec
    mask = _select(w, member)
    B = V[:, mask]
    M = B @ B.conj().T
    return Projection((M + M.conj().T) / 2, int(mask.sum()))


# -- splits -----------------------------------------------------------------

@dataclass(frozen=True)
class SpectralSplit:
    """Partition of a spectrum into two separated parts ``omega`` and ``Omega``."""

    omega: tuple
    omega_big: tuple
    dist: float

    def __post_init__(self):
        if not self.omega or not self.omega_big:
            raise InputError("both spectral components must be nonempty")
        if not self.dist > 0:
            raise InputError("components must be at positive distance")

    @classmethod
    def from_sets(cls, omega, omega_big):
        omega = tuple(float(v) for v in np.ravel(omega))
        omega_big = tuple(float(v) for v in np.ravel(omega_big))
        return cls(omega, omega_big, set_distance(omega, omega_big))

    @property
    def subordinated(self):
        """One component lies wholly to the left of the other."""
        return max(self.omega) < min(self.omega_big) or max(self.omega_big) < min(self.omega)

    @property
    def annular(self):
        """The convex hull of one component misses the other."""
        w, W = np.array(self.omega), np.array(self.omega_big)
        hull_w = np.any((W > w.min()) & (W < w.max()))
        hull_W = np.any((w > W.min()) & (w < W.max()))
        return not hull_w or not hull_W

    def member(self, radius=None):
        """Predicate for ``O_r(omega)`` with ``r = dist/2`` by default."""
        return neighborhood(self.omega, self.dist / 2 if radius is None else radius)

    def to_dict(self):
        return {"omega": list(self.omega), "omega_big": list(self.omega_big), "dist": self.dist}


def split_spectrum(a, gap_threshold):
    """Split the spectrum at its largest gap; the lower cluster is ``omega``."""
    if not gap_threshold > 0:
        raise InputError("gap_threshold must be positive")
    w = eig_hermitian(a).eigenvalues
    if w.size < 2:
        raise NoGapError("spectrum has fewer than two eigenvalues")
    gaps = np.diff(w)
    j = int(np.argmax(gaps))
    if gaps[j] < gap_threshold:
        raise NoGapError(f"largest spectral gap {gaps[j]:.6g} is below threshold {gap_threshold}")
    return SpectralSplit(tuple(w[: j + 1]), tuple(w[j + 1 :]), float(gaps[j]))


# -- operator paths -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OperatorPath:
    """Sampled path of Hermitian matrices ``B_t`` with optional derivative."""

    times: np.ndarray
    operators: np.ndarray
    derivative: np.ndarray = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        ops = np.stack([as_hermitian(B, f"operators[{j}]") for j, B in enumerate(self.operators)])
        if times.ndim != 1 or times.size != ops.shape[0] or times.size == 0:
            raise InputError("times and operators must be non-empty and of equal length")
        if np.any(np.diff(times) <= 0):
            raise InputError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "operators", ops)
        if self.derivative is not None:
            der = np.stack([as_hermitian(B) for B in self.derivative])
            if der.shape != ops.shape:
                raise InputError("derivative must match operators")
            object.__setattr__(self, "derivative", der)

    @classmethod
    def linear(cls, a, v, samples=101, t_max=1.0):
        """``B_t = A + t V`` on ``[0, t_max]`` with exact derivative ``V``."""
        A, V = as_hermitian(a, "a"), as_hermitian(v, "v")
        check_same_dim(A, V)
        t = np.linspace(0.0, t_max, samples)
        return cls(t, A[None] + t[:, None, None] * V[None], np.broadcast_to(V, (samples, *V.shape)))

    @classmethod
    def from_projection_path(cls, path):
        """``B_t = P_t`` for a projection path (spectra ``{1}`` and ``{0}``)."""
        return cls(path.times, path.matrices, path.velocity)


def track_components(path, split0):
    """Follow ``omega_t = spec(B_t) & O_{d/2}(omega)`` along ``path``.

    Every eigenvalue must stay in one of the two fixed ``d/2``-neighborhoods
    of the initial split with unchanged multiplicities, and consecutive
    samples must satisfy ``||B_{j+1} - B_j|| < min(d_j, d_{j+1})`` so that the
    components cannot meet between samples under linear interpolation.

    Raises
    ------
    GapClosedError
        Naming the first offending sample time.
    """
    r = split0.dist / 2
    in_w, in_W = neighborhood(split0.omega, r), neighborhood(split0.omega_big, r)
    counts = (len(split0.omega), len(split0.omega_big))
    splits = []
    for t, B in zip(path.times, path.operators):
        w = np.linalg.eigvalsh(B)
        a, b = in_w(w), in_W(w)
        if np.any(~(a | b)):
            lam = float(w[~(a | b)][0])
            raise GapClosedError(f"eigenvalue {lam!r} left both neighborhoods at t = {float(t)!r}", time=float(t))
        if (int(a.sum()), int(b.sum())) != counts:
            raise GapClosedError(f"component multiplicities changed at t = {float(t)!r}", time=float(t))
        sp = SpectralSplit(tuple(w[a]), tuple(w[b]), set_distance(w[a], w[b]))
        splits.append(sp)
    for j in range(len(splits) - 1):
        step = hermitian_norm(path.operators[j + 1] - path.operators[j])
        if step >= min(splits[j].dist, splits[j + 1].dist):
            t = float(path.times[j + 1])
            raise GapClosedError(
                f"components may meet between t = {float(path.times[j])!r} and t = {t!r} "
                f"(step {step:.3g} vs gap {min(splits[j].dist, splits[j + 1].dist):.3g})",
                time=t,
            )
    return splits


# -- bound reports -------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    """A computed bound next to the brute-force value it controls.

    ``bound`` is on the arcsin side (a bound for ``arcsin(actual)``)
    for the integral kind and on the sine side for closed-form kinds.
    """

    kind: str
    bound: float
    actual: float
    valid: bool
    margin: float
    quad_error: float = 0.0

    @property
    def consistent(self):
        if not self.valid:
            return True
        sine_side = math.sin(min(self.bound, math.pi / 2)) if self.kind.startswith("integral") else self.bound
        return self.actual <= sine_side + 1e-8

    def to_dict(self):
        return {
            "kind": self.kind,
            "bound": self.bound,
            "actual": self.actual,
            "valid": self.valid,
            "margin": self.margin,
            "quad_error": self.quad_error,
        }


def integral_bound(path, splits, subordinated=False):
    """``c * int ||B'|| / dist(omega_t, Omega_t) dt`` against ``arcsin ||P_t - P_0||``.

    ``c = pi/2`` in general and ``c = 1`` with ``subordinated=True``; the
    latter is only marked valid when every split is subordinated or annular.
    The quadrature error is a Richardson estimate from the even-indexed
    subgrid.
    """
    if len(splits) != len(path.times):
        raise InputError("need one split per sample")
    t = path.times
    if path.derivative is not None:
        der = path.derivative
    elif t.size >= 3:
        der = np.gradient(path.operators, t, axis=0, edge_order=2)
    else:
        raise InputError("need a derivative or at least 3 samples")
    dn = np.array([hermitian_norm(D) for D in der])
    gaps = np.array([s.dist for s in splits])
    f = dn / gaps
    c = 1.0 if subordinated else math.pi / 2
    bound = c * float(np.trapezoid(f, t))
    quad_error = 0.0
    if t.size >= 5 and t.size % 2 == 1:
        coarse = c * float(np.trapezoid(f[::2], t[::2]))
        quad_error = abs(bound - coarse) / 3
    P0 = spectral_projection(path.operators[0], splits[0].member())
    Pt = spectral_projection(path.operators[-1], neighborhood(splits[-1].omega, splits[-1].dist / 2))
    actual = hermitian_norm(Pt.matrix - P0.matrix)
    valid = all(s.dist > 0 for s in splits)
    if subordinated:
        valid = valid and all(s.subordinated or s.annular for s in splits)
    margin = bound - math.asin(min(actual, 1.0))
    kind = "integral-subordinated" if subordinated else "integral"
    return BoundReport(kind, bound, actual, valid, margin, quad_error)


@dataclass(frozen=True)
class BoundPrediction:
    """Closed-form bound value on the sine side with its validity flag."""

    value: float
    valid: bool
    ratio: float

    def to_dict(self):
        return {"value": self.value, "valid": self.valid, "ratio": self.ratio}


def _ratio(norm_v, d):
    if not d > 0:
        raise InputError("d must be positive")
    if norm_v < 0:
        raise InputError("norm_v must be nonnegative")
    return norm_v / d


def diag_bound(norm_v, d):
    """``sin((pi/4) log(d / (d - 2||V||)))``, valid for ``||V|| < (sinh 1 / e) d``.

    The sine argument is capped at ``pi/2`` so the value stays monotone and
    equals 1 past the critical ratio; it is NaN once ``2||V|| >= d``.
    """
    a = _ratio(norm_v, d)
    value = math.sin(min(math.pi / 4 * -math.log1p(-2 * a), math.pi / 2)) if a < 0.5 else math.nan
    return BoundPrediction(value, a < DIAG_CRITICAL, a)


def offdiag_bound(norm_v, d):
    """``sin((pi/2) int_0^{||V||/d} dtau / (2 - sqrt(1 + 4 tau^2)))``, valid for ``||V|| < c_star d``.

    As for :func:`diag_bound` the sine argument is capped at ``pi/2``.
    """
    a = _ratio(norm_v, d)
    if a >= SQRT3_2:
        raise DivergentIntegralError(f"||V||/d = {a!r} >= sqrt(3)/2: the integral diverges")
    value = math.sin(min(math.pi / 2 * offdiag_integral(a), math.pi / 2)) if a > 0 else 0.0
    return BoundPrediction(value, a < c_star_value(), a)


def delta_v(norm_v, d):
    """``(delta_V, distance lower bound)`` for an off-diagonal perturbation.

    ``delta_V = ||V|| tan(arctan(2||V||/d)/2)`` and the lower bound on the
    perturbed gap is ``(2 - sqrt(1 + 4(||V||/d)^2)) d``.
    """
    a = _ratio(norm_v, d)
    dv = norm_v * math.tan(0.5 * math.atan(2 * a))
    return dv, (2 - math.sqrt(1 + 4 * a * a)) * d


def old_bounds(norm_v, d, offdiagonal=False):
    """Earlier bounds, kept for comparison: returns ``BoundPrediction``."""
    a = _ratio(norm_v, d)
    if not offdiagonal:
        value = math.pi / 2 * a / (1 - a) if a < 1 else math.inf
        return BoundPrediction(value, a < OLD_DIAG_CRITICAL, a)
    denom = 1 - a * math.tan(0.5 * math.atan(2 * a))
    value = math.pi / 2 * a / denom if denom > 0 else math.inf
    return BoundPrediction(value, a < c_pi_value(), a)


# -- random instances -------------------------------------------------------------

def random_gapped_hermitian(n, k, d, rng, spread=1.0, interleave=False, complex_=True):
    """Random Hermitian matrix whose spectrum splits into parts at distance ``d``.

    ``k`` eigenvalues form ``omega``. With ``interleave=False`` ``omega`` lies
    below ``Omega``; otherwise ``omega`` sits in a window between two clusters
    of ``Omega``. Returns ``(A, split)``.
    """
    from .linalg import random_unitary

    if interleave:
        w_small = rng.uniform(0, spread, k)
        lo = rng.uniform(-spread, 0, (n - k) // 2) - d
        hi = rng.uniform(0, spread, n - k - (n - k) // 2) + w_small.max() + d
        w_big = np.concatenate([lo, hi])
        # pin one point of each side so dist is exactly d
        w_big[0] = w_small.min() - d
        w_big[-1] = w_small.max() + d
    else:
        w_small = rng.uniform(-spread, 0, k)
        w_big = rng.uniform(0, spread, n - k) + d
        w_small[np.argmax(w_small)] = 0.0
        w_big[np.argmin(w_big)] = d
    U = random_unitary(n, rng, complex_)
    w = np.concatenate([w_small, w_big])
    A = (U * w) @ U.conj().T
    A = (A + A.conj().T) / 2
    return A, SpectralSplit.from_sets(w_small, w_big)


def random_perturbation(a, split, norm, rng, offdiagonal=False, complex_=True):
    """Random Hermitian ``V`` with ``||V|| = norm``.

    With ``offdiagonal=True`` the diagonal blocks relative to
    ``E_A(omega) + E_A(Omega)`` are zeroed before rescaling.
    """
    from .linalg import random_hermitian

    n = np.asarray(a).shape[0]
    V = random_hermitian(n, rng, complex_)
    if offdiagonal:
        P = spectral_projection(a, split.member()).matrix
        Pp = np.eye(n) - P
        V = P @ V @ Pp + Pp @ V @ P
        V = (V + V.conj().T) / 2
    return V * (norm / hermitian_norm(V))


def perturbed_projection_difference(a, v, split):
    """Brute force ``||E_A(omega) - E_{A+V}(O_{d/2}(omega))||``."""
    A = as_hermitian(a, "a")
    V = as_hermitian(v, "v")
    member = split.member()
    return hermitian_norm(spectral_projection(A + V, member).matrix - spectral_projection(A, member).matrix)


def mceachin_ratio(a, b, omega, omega_big, return_separated=False):
    """``dist(w, W) ||E_A(omega) E_B(Omega)|| / ||A - B||``.

    The distance is taken between the selected spectral pieces
    ``spec(A) & omega`` and ``spec(B) & Omega``, which gives the same
    projections and a distance no smaller than ``dist(omega, Omega)``.
    With ``return_separated=True`` also reports whether the convex hull of
    one piece misses the other (the case where the constant is 1).
    """
    A, B = as_hermitian(a, "a"), as_hermitian(b, "b")
    check_same_dim(A, B)
    da, db = eig_hermitian(A), eig_hermitian(B)
    ma, mb = _select(da.eigenvalues, omega), _select(db.eigenvalues, omega_big)
    wa, wb = da.eigenvalues[ma], db.eigenvalues[mb]
    diff = hermitian_norm(A - B)
    if wa.size == 0 or wb.size == 0 or diff == 0.0:
        return (0.0, True) if return_separated else 0.0
    gap = set_distance(wa, wb)
    if gap == 0:
        raise InputError("selected spectral pieces are not separated")
    Ea = da.eigenvectors[:, ma]
    Eb = db.eigenvectors[:, mb]
    # ||E_A E_B|| = ||Ea* Eb|| for orthonormal columns
    prod = float(np.linalg.norm(Ea.conj().T @ Eb, 2))
    separated = not np.any((wb > wa.min()) & (wb < wa.max())) or not np.any((wa > wb.min()) & (wa < wb.max()))
    ratio = gap * prod / diff
    return (ratio, bool(separated)) if return_separated else ratio
