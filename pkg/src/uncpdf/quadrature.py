"""Quadrature for piecewise densities with inverse-square-root endpoints.

Every panel ``[lo, hi]`` is integrated in the angle variable of
``x = lo + (hi - lo) * (1 - cos t) / 2``, ``t in [0, pi]``.  The Jacobian
``(hi - lo) / 2 * sin t`` cancels ``1/sqrt(x - lo)`` and ``1/sqrt(hi - x)``
behaviour at both ends, so the transformed integrand is bounded and smooth.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

# endpoint evaluations are pulled this far into the panel (angle units)
_EDGE = 1e-7


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def cos_map(lo: float, hi: float, t):
    """Map angle ``t`` in [0, pi] into ``[lo, hi]``; returns ``(x, dx/dt)``."""
    half = 0.5 * (hi - lo)
    return lo + half * (1.0 - np.cos(t)), half * np.sin(t)


def cos_map_inverse(lo: float, hi: float, x):
    u = 1.0 - 2.0 * (np.asarray(x, dtype=float) - lo) / (hi - lo)
    return np.arccos(np.clip(u, -1.0, 1.0))


def angle_integrand(f: Callable, lo: float, hi: float) -> Callable:
    """``f`` on ``[lo, hi]`` pulled back to the angle variable."""

    def g(t):
        t = np.clip(np.asarray(t, dtype=float), _EDGE, np.pi - _EDGE)
        x, jac = cos_map(lo, hi, t)
        x = np.clip(x, lo, hi)
        val = np.asarray(f(x), dtype=float) * jac
        return np.where(np.isfinite(val), val, 0.0)

    return g


def adaptive_simpson(
    f: Callable, a: float, b: float, tol: float = 1e-9, max_depth: int = 40, min_width: float = 1e-8
) -> float:
    """Adaptive Simpson rule with Richardson correction.

    ``f`` must accept numpy arrays.  ``tol`` is the absolute error target for
    the whole interval, split evenly as panels are bisected.  Panels narrower
    than ``min_width * (b - a)`` are accepted as they are; this stops endless
    bisection where rounding noise in a bounded integrand never settles.
    """
    if b == a:
        return 0.0
    fa, fm, fb = np.asarray(f(np.array([a, 0.5 * (a + b), b])), dtype=float)
    whole = (b - a) * (fa + 4 * fm + fb) / 6.0
    total = 0.0
    floor = min_width * (b - a)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        fl, fr = np.asarray(f(np.array([0.5 * (lo + mid), 0.5 * (mid + hi)])), dtype=float)
        left = (mid - lo) * (flo + 4 * fl + fmid) / 6.0
        right = (hi - mid) * (fmid + 4 * fr + fhi) / 6.0
        delta = left + right - s
        if depth >= max_depth or hi - lo <= floor or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((lo, mid, flo, fl, fmid, left, 0.5 * eps, depth + 1))
            stack.append((mid, hi, fmid, fr, fhi, right, 0.5 * eps, depth + 1))
    return float(total)


def panels(points: Sequence[float]) -> list[tuple[float, float]]:
    pts = np.unique(np.asarray(points, dtype=float))
    return [(float(lo), float(hi)) for lo, hi in zip(pts[:-1], pts[1:]) if hi > lo]


def integrate_panels(f: Callable, points: Sequence[float], tol: float = 1e-9) -> float:
    """Integral of ``f`` over ``[min(points), max(points)]`` with panel breaks at ``points``."""
    pieces = panels(points)
    if not pieces:
        return 0.0
    per = tol / len(pieces)
    return sum(adaptive_simpson(angle_integrand(f, lo, hi), 0.0, np.pi, per) for lo, hi in pieces)


def fixed_panels(f: Callable, points: Sequence[float], order: int = 48) -> float:
    """Non-adaptive Gauss-Legendre in the angle variable on every panel.

    ``f`` may be vectorised over a leading batch axis: it receives an array
    of shape ``(order,)`` per panel.
    """
    t, w = gauss_legendre(order)
    total = 0.0
    for lo, hi in panels(points):
        x, jac = cos_map(lo, hi, np.pi * t)
        vals = np.asarray(f(x), dtype=float) * jac
        total += np.pi * float(np.dot(w, np.where(np.isfinite(vals), vals, 0.0)))
    return total
