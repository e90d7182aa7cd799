"""Critical constants of the off-diagonal problem and the comparison inequalities."""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import InputError, PoleError
from .quadrature import adaptive_simpson, bisect, gauss_legendre

SQRT3_2 = math.sqrt(3) / 2
C_STAR_BRACKET = (0.67598931, 0.67598932)


def _check_tau(tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise InputError("tau must be nonnegative")
    if np.any(tau >= SQRT3_2):
        raise PoleError("integrand has a pole at tau = sqrt(3)/2")
    return tau


def offdiag_integrand(tau):
    """``1 / (2 - sqrt(1 + 4 tau^2))`` on ``[0, sqrt(3)/2)``.

    Evaluated in the rationalized form ``(2 + sqrt(1 + 4 tau^2)) / (3 - 4 tau^2)``,
    which has no cancellation near the pole.
    """
    t = _check_tau(tau)
    out = (2 + np.sqrt(1 + 4 * t * t)) / (3 - 4 * t * t)
    return float(out) if out.ndim == 0 else out


def offdiag_integrand_direct(tau):
    t = _check_tau(tau)
    out = 1 / (2 - np.sqrt(1 + 4 * t * t))
    return float(out) if out.ndim == 0 else out


def offdiag_integrand_halfangle(tau):
    """The same integrand written as ``1 / (1 - 2 tau tan(arctan(2 tau)/2))``."""
    t = _check_tau(tau)
    out = 1 / (1 - 2 * t * np.tan(0.5 * np.arctan(2 * t)))
    return float(out) if out.ndim == 0 else out


def _integrand_scalar(t):
    s = math.sqrt(1 + 4 * t * t)
    return (2 + s) / (3 - 4 * t * t)


def offdiag_integral(s, method="gauss", tol=1e-14):
    """``int_0^s dtau / (2 - sqrt(1 + 4 tau^2))`` for ``0 <= s < sqrt(3)/2``."""
    if s < 0:
        raise InputError("upper limit must be nonnegative")
    if s >= SQRT3_2:
        raise PoleError("the integral diverges for s >= sqrt(3)/2")
    if s == 0:
        return 0.0
    if method == "gauss":
        # Panels shrink towards the pole, where the integrand grows.
        panels = 8 if s < 0.8 else 64
        return gauss_legendre(offdiag_integrand, 0.0, s, order=30, panels=panels)
    if method == "simpson":
        return adaptive_simpson(_integrand_scalar, 0.0, s, tol=tol)[0]
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class ConstantResult:
    name: str
    value: float
    bracket: tuple
    method: str
    checks: dict = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.bracket
        if not lo <= self.value <= hi:
            raise ValueError("value outside its bracket")

    def to_dict(self):
        return {"name": self.name, "value": self.value, "bracket": list(self.bracket),
                "method": self.method, **({"checks": self.checks} if self.checks else {})}


def compute_c_star(precision=1e-12, method="simpson"):
    """Root of ``int_0^c dtau / (2 - sqrt(1 + 4 tau^2)) = 1`` by bisection.

    ``F(0) = -1`` and ``F`` blows up at ``sqrt(3)/2``; the upper end of the
    initial bracket is moved towards the pole until ``F`` is positive.
    """
    if precision < 1e-12:
        raise InputError("precision below 1e-12 is not supported")

    def F(s):
        return offdiag_integral(s, method=method) - 1.0

    hi = 0.75
    while F(hi) <= 0:  # pragma: no cover - F(0.75) > 0 already
        hi = (hi + SQRT3_2) / 2
    lo, hi = bisect(F, 0.0, hi, xtol=precision)
    rule = "adaptive Simpson" if method == "simpson" else "composite Gauss-Legendre"
    return ConstantResult("c_star", lo + (hi - lo) / 2, (lo, hi), f"bisection on {rule} quadrature")


def _c_pi_equation(x):
    return math.pi / 2 * x / (1 - x * math.tan(0.5 * math.atan(2 * x))) - 1.0


def compute_c_pi():
    """``(3 pi - sqrt(pi^2 + 32)) / (pi^2 - 4)``, checked against its defining equation."""
    value = (3 * math.pi - math.sqrt(math.pi**2 + 32)) / (math.pi**2 - 4)
    eps = 4 * math.ulp(value)
    residual = _c_pi_equation(value)
    lo, hi = bisect(_c_pi_equation, 0.1, 0.8, xtol=1e-15)
    return ConstantResult(
        "c_pi", value, (value - eps, value + eps), "closed form",
        checks={"root_residual": residual, "bisection_root": (lo + hi) / 2},
    )


@lru_cache(maxsize=None)
def c_star_value():
    return compute_c_star().value


@lru_cache(maxsize=None)
def c_pi_value():
    return compute_c_pi().value


@dataclass(frozen=True)
class MarginReport:
    """Smallest slack ``rhs - lhs`` of an inequality over a grid."""

    name: str
    points: int
    min_slack: float
    argmin: float
    extra: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.min_slack > 0 and all(v > 0 for k, v in self.extra.items() if k.endswith("slack"))

    def to_dict(self):
        return {"name": self.name, "points": self.points, "min_slack": self.min_slack,
                "argmin": self.argmin, "ok": self.ok, **self.extra}


def appendix_a_sides(x):
    """``sin((pi/4) log((1+x)/(1-x)))`` (argument clipped at pi/2) and ``(pi/2) x``."""
    x = np.asarray(x, dtype=float)
    arg = np.minimum(math.pi / 2 * np.arctanh(x), math.pi / 2)
    return np.sin(arg), math.pi / 2 * x


def verify_appendix_a(grid=10_000):
    if grid < 100:
        raise InputError("grid must have at least 100 points")
    x = np.linspace(0.0, 1.0, grid + 2)[1:-1]
    lhs, rhs = appendix_a_sides(x)
    slack = rhs - lhs
    j = int(np.argmin(slack))
    # derivative form on (0, 2/pi]
    xd = np.linspace(0.0, 2 / math.pi, grid + 1)[1:]
    with np.errstate(divide="ignore"):
        dl = math.pi / 2 / (1 - xd**2)
        dr = math.pi / np.sqrt(np.clip(4 - math.pi**2 * xd**2, 0.0, None))
    dslack = dr - dl
    return MarginReport("appendix_a", grid, float(slack[j]), float(x[j]),
                        {"derivative_min_slack": float(np.min(dslack))})


def appendix_b_sides(t):
    """Both sides of the off-diagonal comparison at sorted points ``t``.

    The left side is clamped to 1 once the integral reaches 1.
    """
    t = np.asarray(t, dtype=float)
    if np.any(np.diff(t) <= 0) or t[0] < 0 or t[-1] >= SQRT3_2:
        raise InputError("t must be increasing in [0, sqrt(3)/2)")
    cstar = c_star_value()
    cum = np.empty_like(t)
    acc, prev = 0.0, 0.0
    for i, ti in enumerate(t):
        if ti >= cstar:
            cum[i:] = np.inf
            break
        acc += gauss_legendre(offdiag_integrand, prev, ti, order=20, panels=1)
        cum[i], prev = acc, ti
    arg = np.minimum(math.pi / 2 * cum, math.pi / 2)
    lhs = np.sin(arg)
    rhs = math.pi / 2 * 2 * t / (3 - np.sqrt(1 + 4 * t * t))
    return lhs, rhs


def verify_appendix_b(grid=10_000):
    if grid < 100:
        raise InputError("grid must have at least 100 points")
    t = np.linspace(0.0, SQRT3_2, grid + 2)[1:-1]
    lhs, rhs = appendix_b_sides(t)
    slack = rhs - lhs
    j = int(np.argmin(slack))
    # 1 - 2x tan(arctan(2x)/2) = 2 - sqrt(1 + 4x^2) and
    # 1 - x tan(arctan(2x)/2) = 3/2 - sqrt(1 + 4x^2)/2
    half = np.tan(0.5 * np.arctan(2 * t))
    root = np.sqrt(1 + 4 * t * t)
    id1 = float(np.max(np.abs((1 - 2 * t * half) - (2 - root))))
    id2 = float(np.max(np.abs((1 - t * half) - (1.5 - root / 2))))
    return MarginReport("appendix_b", grid, float(slack[j]), float(t[j]),
                        {"identity_error": max(id1, id2)})
