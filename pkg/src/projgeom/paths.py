"""Paths of projections: lengths, geodesics, the length metric.

A path is stored as samples ``t_0 < ... < t_N`` with the projection at each
sample and, optionally, its analytic velocity. Paths that are only piecewise
smooth record the indices of their break samples; at a break the stored
velocity is the right limit and ``left_velocity`` holds the left limit.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_same_dim
from .exceptions import HypothesisViolatedError, InputError, NotAGraphError, TooFewSamplesError
from .geometry import GRAPH_MARGIN, Projection, as_projection, distance, angular_operator

ARCSINE_TOL = 1e-6


def _spectral_norms(stack):
    """Operator norms of a stack of Hermitian matrices."""
    stack = np.asarray(stack)
    if stack.shape[0] == 0:
        return np.zeros(0)
    if stack.shape[1] == 0:
        return np.zeros(stack.shape[0])
    stack = (stack + np.conj(np.swapaxes(stack, -1, -2))) / 2
    w = np.linalg.eigvalsh(stack)
    return np.maximum(np.abs(w[:, 0]), np.abs(w[:, -1]))


def _stack_norms(stack):
    """Operator norms of a stack of general (rectangular) matrices."""
    stack = np.asarray(stack)
    if stack.size == 0:
        return np.zeros(stack.shape[0])
    return np.linalg.norm(stack, 2, axis=(-2, -1))


@dataclass(frozen=True, eq=False)
class ProjectionPath:
    """Sampled path ``t_j -> gamma(t_j)`` of orthogonal projections."""

    times: np.ndarray
    points: tuple
    velocity: np.ndarray = None
    breaks: tuple = ()
    left_velocity: tuple = ()
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        pts = tuple(as_projection(p, f"points[{j}]") for j, p in enumerate(self.points))
        object.__setattr__(self, "points", pts)
        if times.ndim != 1 or len(pts) != times.size or times.size == 0:
            raise InputError("times and points must be non-empty and of equal length")
        if np.any(np.diff(times) <= 0):
            raise InputError("times must be strictly increasing")
        check_same_dim(*(p.matrix for p in pts))
        if self.velocity is not None:
            vel = np.asarray(self.velocity)
            if vel.shape != (len(pts), pts[0].dim, pts[0].dim):
                raise InputError(f"velocity has shape {vel.shape}")
            object.__setattr__(self, "velocity", vel)
        if len(self.left_velocity) not in (0, len(self.breaks)):
            raise InputError("left_velocity must match breaks")
        if any(not 0 < b < len(pts) - 1 for b in self.breaks):
            raise InputError("break indices must be interior samples")
        if self.validate and len(pts) > 1:
            chords = self.chords()
            if np.any(chords >= 1 - GRAPH_MARGIN):
                j = int(np.argmax(chords >= 1 - GRAPH_MARGIN))
                raise InputError(
                    f"consecutive samples {j} and {j + 1} are at distance {chords[j]:.6g} >= 1;"
                    " refine the sampling"
                )

    def __len__(self):
        return len(self.points)

    @property
    def dim(self):
        return self.points[0].dim

    @property
    def matrices(self):
        return np.stack([p.matrix for p in self.points])

    def chords(self):
        M = self.matrices
        return _spectral_norms(M[1:] - M[:-1])

    def pieces(self):
        """Index ranges ``(start, stop)`` of the smooth pieces (inclusive stop)."""
        edges = [0, *sorted(self.breaks), len(self) - 1]
        return list(zip(edges[:-1], edges[1:]))

    def to_list(self):
        from .io import matrix_to_json

        return [{"t": float(t), "matrix": matrix_to_json(p.matrix)} for t, p in zip(self.times, self.points)]

    @classmethod
    def from_list(cls, items):
        from .io import matrix_from_json

        if not isinstance(items, list) or not items:
            raise InputError("path JSON must be a non-empty array of {t, matrix}")
        try:
            times = [float(it["t"]) for it in items]
            mats = [matrix_from_json(it["matrix"]) for it in items]
        except (KeyError, TypeError) as exc:
            raise InputError(f"path JSON: malformed entry ({exc})") from exc
        return cls(np.array(times), tuple(mats))


@dataclass(frozen=True)
class LengthReport:
    polygonal: float
    riemannian: float
    endpoints_arcsin: float

    @property
    def slack(self):
        """Smallest margin of the arcsine law over the available lengths."""
        lengths = [self.polygonal] + ([self.riemannian] if self.riemannian is not None else [])
        return min(lengths) - self.endpoints_arcsin

    @property
    def holds(self):
        return self.endpoints_arcsin <= self.polygonal + ARCSINE_TOL

    def to_dict(self):
        return {
            "polygonal": self.polygonal,
            "riemannian": self.riemannian,
            "endpoints_arcsin": self.endpoints_arcsin,
            "holds": self.holds,
            "slack": self.slack,
        }


def polygonal_length(path):
    """Sum of chord lengths over the sample partition."""
    if len(path) < 2:
        return 0.0
    return float(np.sum(path.chords()))


def _piece_speeds(path, start, stop):
    t = path.times[start : stop + 1]
    if path.velocity is not None:
        vel = path.velocity[start : stop + 1].copy()
        if stop in path.breaks and path.left_velocity:
            vel[-1] = path.left_velocity[path.breaks.index(stop)]
        return t, _spectral_norms(vel)
    if t.size < 3:
        raise TooFewSamplesError(
            "riemannian_length needs an analytic velocity or at least 3 samples per smooth piece"
        )
    M = path.matrices[start : stop + 1]
    vel = np.gradient(M, t, axis=0, edge_order=2)
    return t, _spectral_norms(vel)


def speeds(path):
    """``||gamma'(t_j)||`` at every sample (right limits at breaks)."""
    out = np.empty(len(path))
    for start, stop in path.pieces():
        _, s = _piece_speeds(path, start, stop)
        out[start : stop + 1] = s
    return out


def riemannian_length(path):
    """Trapezoid quadrature of the speed, piece by piece."""
    if len(path) == 1:
        return 0.0
    total = 0.0
    for start, stop in path.pieces():
        t, s = _piece_speeds(path, start, stop)
        total += float(np.trapezoid(s, t))
    return total


def _polar_factors(x):
    # X* X = E diag(mu) E*, angles theta = arctan sqrt(mu).
    w, E = np.linalg.eigh(x.conj().T @ x) if x.shape[1] else (np.zeros(0), np.zeros((0, 0)))
    mu = np.clip(w, 0.0, None)
    return mu, np.arctan(np.sqrt(mu)), E


def geodesic(p, q, samples=101):
    """Unit-speed geodesic from ``P`` to ``Q`` on ``[0, arcsin ||P - Q||]``.

    With ``X = V tan(Theta)`` the path is ``gamma(t) = G(V tan((t/l) Theta))``.
    Velocities are analytic.
    """
    P, Q = as_projection(p, "p"), as_projection(q, "q")
    check_same_dim(P.matrix, Q.matrix)
    d = distance(P, Q)
    if d >= 1 - GRAPH_MARGIN:
        raise NotAGraphError(f"||P - Q|| = {d!r}: no geodesic of length < pi/2")
    if d == 0.0:
        return ProjectionPath(np.array([0.0]), (P,), velocity=np.zeros((1, P.dim, P.dim)))
    if samples < 2:
        raise TooFewSamplesError("geodesic needs at least 2 samples")
    pair = angular_operator(P, Q)
    x, Bp, Bperp = pair.x, pair.basis_p, pair.basis_perp
    mu, theta, E = _polar_factors(x)
    length = math.asin(d)
    small = mu <= 1e-300
    sq = np.where(small, 1.0, np.sqrt(np.where(small, 1.0, mu)))
    XE = x @ E
    times = np.linspace(0.0, length, samples)
    pts, vels = [], []
    for t in times:
        s = t / length
        st = s * theta
        ratio = np.where(small, s, np.tan(st) / sq)
        dratio = np.where(small, 1.0, theta / np.cos(st) ** 2 / sq) / length
        xs = (XE * ratio) @ E.conj().T
        dxs = (XE * dratio) @ E.conj().T
        G = (E * np.cos(st) ** 2) @ E.conj().T
        dG = (E * (-np.sin(2 * st) * theta / length)) @ E.conj().T
        Y = Bp + Bperp @ xs
        dY = Bperp @ dxs
        M = Y @ G @ Y.conj().T
        dM = dY @ G @ Y.conj().T + Y @ dG @ Y.conj().T + Y @ G @ dY.conj().T
        pts.append(Projection((M + M.conj().T) / 2, P.rank))
        vels.append((dM + dM.conj().T) / 2)
    return ProjectionPath(times, tuple(pts), velocity=np.stack(vels), validate=False)


@dataclass(frozen=True)
class RhoResult:
    """Length-metric distance; ``boundary`` is set when ``||P - Q|| = 1``."""

    value: float
    boundary: bool = False
    computed: bool = True
    note: str = ""

    def to_dict(self):
        return {"value": self.value, "boundary": self.boundary, "computed": self.computed, "note": self.note}


def rho(p, q):
    """``arcsin ||P - Q||`` inside the unit ball; a flagged value on its boundary."""
    P, Q = as_projection(p, "p"), as_projection(q, "q")
    check_same_dim(P.matrix, Q.matrix)
    d = distance(P, Q)
    if d < 1 - GRAPH_MARGIN:
        return RhoResult(math.asin(d))
    if P.rank == Q.rank:
        return RhoResult(math.pi / 2, boundary=True, note="||P - Q|| = 1, equal ranks: pi/2")
    return RhoResult(math.pi / 2, boundary=True, computed=False,
                     note="||P - Q|| = 1, ranks differ: rho >= pi/2, not computed")


def verify_arcsine_law(path):
    """Compare ``arcsin ||gamma(b) - gamma(a)||`` with the path lengths."""
    poly = polygonal_length(path)
    try:
        riem = riemannian_length(path)
    except TooFewSamplesError:
        riem = None
    d = distance(path.points[0], path.points[-1])
    return LengthReport(poly, riem, math.asin(min(d, 1.0)))


def angular_operator_path(path):
    """Angular operators ``X_t`` of every sample relative to ``gamma(t_0)``.

    Raises :class:`HypothesisViolatedError` naming the first sample whose
    range is not a graph over ``Ran gamma(t_0)``.
    """
    P0 = path.points[0]
    bases = P0.bases
    xs = []
    for j, pt in enumerate(path.points):
        try:
            xs.append(angular_operator(P0, pt, bases=bases).x)
        except NotAGraphError as exc:
            raise HypothesisViolatedError(
                f"sample {j} (t = {path.times[j]!r}) is not a graph over gamma(t_0): {exc}"
            ) from exc
    return np.stack(xs)


def velocity_inequality_profile(path):
    """Per-sample ``(||X_t||, ||X_t'||, ||gamma'(t)||)`` by finite differences.

    Differences are taken within each smooth piece, so a break sample
    appears twice: once with its left limits and once with its right ones.
    """
    if len(path) < 3:
        raise TooFewSamplesError("velocity check needs at least 3 samples")
    X = angular_operator_path(path)
    M = path.matrices
    xn, dxn, sp = [], [], []
    for start, stop in path.pieces():
        t = path.times[start : stop + 1]
        order = 2 if t.size >= 3 else 1
        dX = np.gradient(X[start : stop + 1], t, axis=0, edge_order=order)
        if path.velocity is not None:
            vel = path.velocity[start : stop + 1].copy()
            if stop in path.breaks and path.left_velocity:
                vel[-1] = path.left_velocity[path.breaks.index(stop)]
        else:
            vel = np.gradient(M[start : stop + 1], t, axis=0, edge_order=order)
        xn.append(_stack_norms(X[start : stop + 1]))
        dxn.append(_stack_norms(dX))
        sp.append(_spectral_norms(vel))
    return np.concatenate(xn), np.concatenate(dxn), np.concatenate(sp)


def velocity_inequality_check(path):
    """Max over samples of ``||X'|| - (1 + ||X||^2) ||gamma'||``."""
    xn, dxn, sp = velocity_inequality_profile(path)
    return float(np.max(dxn - (1 + xn**2) * sp))


def unitary_conjugation_path(p, generators, durations, samples_per_piece=50):
    """Piecewise path ``gamma(t) = W(t) P W(t)*`` with ``W`` a product of ``exp(i s K_j)``.

    Each generator ``K_j`` (Hermitian) acts for ``durations[j]``. Velocities
    ``i [K_j, gamma(t)]`` are analytic; break samples carry both limits.
    """
    P = as_projection(p)
    if len(generators) != len(durations) or not generators:
        raise InputError("need one duration per generator")
    times, pts, vels, breaks, left = [], [], [], [], []
    W = np.eye(P.dim, dtype=complex)
    t0 = 0.0
    for j, (K, T) in enumerate(zip(generators, durations)):
        K = np.asarray(K)
        w, E = np.linalg.eigh(K)
        s_grid = np.linspace(0.0, T, samples_per_piece + 1)
        if j > 0:
            # The first sample of this piece is the last one of the previous.
            left.append(vels[-1])
            breaks.append(len(times) - 1)
            times.pop(), pts.pop(), vels.pop()
        for s in s_grid:
            Ws = (E * np.exp(1j * s * w)) @ E.conj().T @ W
            M = Ws @ P.matrix @ Ws.conj().T
            M = (M + M.conj().T) / 2
            times.append(t0 + s)
            pts.append(Projection(M, P.rank))
            C = 1j * (K @ M - M @ K)
            vels.append((C + C.conj().T) / 2)
        W = (E * np.exp(1j * T * w)) @ E.conj().T @ W
        t0 += T
    return ProjectionPath(np.array(times), tuple(pts), velocity=np.stack(vels),
                          breaks=tuple(breaks), left_velocity=tuple(left))
