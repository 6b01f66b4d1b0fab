"""Densities of a single statistic of one observable: <A> for any d, Delta A for a qubit."""

from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np

from ..errors import UnsupportedDimension
from ..observables import QubitObservable, Spectrum, spectrum_of
from .core import Pdf1D, heaviside, make_pdf


def quad_roots(lam1: float, lam2: float, x: float):
    """Roots of ``x**2 = (r - lam1) * (lam2 - r)``, or ``None`` if there are none.

    Two distinct roots exist for ``0 <= 2x < lam2 - lam1``; at ``2x == lam2 - lam1``
    the double root is returned twice.
    """
    if not lam1 < lam2:
        raise ValueError("need lam1 < lam2")
    if x < 0:
        raise ValueError("x must be non-negative")
    width = lam2 - lam1
    disc = width * width - 4.0 * x * x
    if disc < 0:
        return None
    half = 0.5 * math.sqrt(disc)
    mid = 0.5 * (lam1 + lam2)
    return (mid - half, mid + half)


def delta_roots(g_prime: Callable[[float], float], roots: Iterable[float]) -> list[tuple[float, float]]:
    """Point masses of ``delta(g(x))``: each simple root ``x0`` carries ``1/|g'(x0)|``."""
    out = []
    for x0 in roots:
        slope = abs(g_prime(x0))
        if slope == 0.0:
            raise ZeroDivisionError(f"root {x0} is not simple")
        out.append((x0, 1.0 / slope))
    return out


def _as_spectrum(obs) -> Spectrum:
    if isinstance(obs, Spectrum):
        return obs
    if isinstance(obs, (list, tuple, np.ndarray)) and np.ndim(obs) == 1:
        return Spectrum(obs)
    return spectrum_of(obs)


def pdf_expectation(spec) -> Pdf1D:
    """Density of <A>_psi for Haar-random psi: a piecewise polynomial of degree d-2
    with knots at the eigenvalues.
    """
    spec = _as_spectrum(spec)
    lam = spec.require_simple()
    d = lam.size
    coef = np.array([1.0 / np.prod([lam[i] - lam[j] for j in range(d) if j != i]) for i in range(d)])
    sign = (-1.0) ** (d - 1) * (d - 1)

    def f(r):
        r = np.asarray(r, dtype=float)
        diff = r[..., None] - lam
        terms = coef * np.power(diff, d - 2) * heaviside(diff)
        return sign * terms.sum(axis=-1)

    return make_pdf(f, lam[0], lam[-1], breakpoints=lam, label=f"<A>, d={d}")


def pdf_uncertainty_qubit(q) -> Pdf1D:
    """Density of Delta_psi A for a qubit observable: ``x / (|a| sqrt(|a|^2 - x^2))`` on [0, |a|].

    Diverges (returns ``inf``) at ``x = |a|``.  Accepts a :class:`QubitObservable`
    or a two-point spectrum (``|a|`` is half the gap).
    """
    if isinstance(q, QubitObservable):
        a = q.require_nontrivial()
    else:
        lam = _as_spectrum(q).require_simple()
        if lam.size != 2:
            raise UnsupportedDimension("qubit uncertainty density needs d = 2")
        a = 0.5 * float(lam[1] - lam[0])

    def f(x):
        x = np.asarray(x, dtype=float)
        return x / (a * np.sqrt(a * a - x * x))

    return make_pdf(f, 0.0, a, breakpoints=(a,), label="Delta A, d=2")


def cdf_uncertainty_qubit(a: float, x):
    """Closed-form CDF ``1 - sqrt(1 - x^2/a^2)``; used as an independent check only."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, a)
    return 1.0 - np.sqrt(1.0 - (x / a) ** 2)
