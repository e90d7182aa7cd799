"""Scalar quadrature and root bracketing used by the constants module."""

import math

import numpy as np


def adaptive_simpson(f, a, b, tol=1e-14, max_depth=60):
    """Adaptive Simpson rule with Richardson correction.

    Returns ``(value, error_estimate, evaluations)``.
    """
    if a == b:
        return 0.0, 0.0, 0
    count = [3]

    def simpson(fa, fm, fb, h):
        return h / 6 * (fa + 4 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = (a + b) / 2
        lm, rm = (a + m) / 2, (m + b) / 2
        flm, frm = f(lm), f(rm)
        count[0] += 2
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15 * tol:
            return left + right + delta / 15, abs(delta) / 15
        lv, le = recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1)
        rv, re = recurse(m, b, fm, frm, fb, right, tol / 2, depth - 1)
        return lv + rv, le + re

    fa, fb, fm = f(a), f(b), f((a + b) / 2)
    whole = simpson(fa, fm, fb, b - a)
    value, err = recurse(a, b, fa, fm, fb, whole, tol, max_depth)
    return value, err, count[0]


_GL_CACHE = {}


def gauss_legendre(f, a, b, order=20, panels=8):
    """Composite Gauss-Legendre rule; ``f`` must accept arrays."""
    if a == b:
        return 0.0
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    x, w = _GL_CACHE[order]
    edges = np.linspace(a, b, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    nodes = mid[:, None] + half[:, None] * x[None, :]
    return float(np.sum(half[:, None] * w[None, :] * f(nodes)))


def bisect(F, lo, hi, xtol=1e-12, max_iter=200):
    """Bisection for a sign change of ``F`` on ``[lo, hi]``.

    Returns the final bracket ``(lo, hi)`` with ``F(lo) < 0 < F(hi)``
    (or the reverse) and ``hi - lo <= xtol``.
    """
    flo, fhi = F(lo), F(hi)
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    if math.copysign(1, flo) == math.copysign(1, fhi):
        raise ValueError("bisect: no sign change on the initial bracket")
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = lo + (hi - lo) / 2
        if mid in (lo, hi):
            break
        fm = F(mid)
        if fm == 0:
            return mid, mid
        if math.copysign(1, fm) == math.copysign(1, flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo, hi
