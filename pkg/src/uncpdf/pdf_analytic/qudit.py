"""Joint and marginal densities built from one observable with d = 3 or 4 levels.

Coordinates: ``r = <A>``, ``s = <A^2>`` and ``x = Delta A``; ``s = x^2 + r^2``.
Lines ``phi_ij(r) = (a_i + a_j) r - a_i a_j`` in the (r, s) plane become
semicircles over ``[a_i, a_j]`` in the (r, x) plane.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from ..errors import UnsupportedDimension
from .core import Density2D, Pdf1D, SupportRegion, make_pdf
from .single import _as_spectrum, pdf_uncertainty_qubit


def vandermonde(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.prod([a[j] - a[i] for i, j in itertools.combinations(range(a.size), 2)]))


def phi(a, i: int, j: int, r):
    """Chord through ``(a_i, a_i^2)`` and ``(a_j, a_j^2)``; indices are 0-based."""
    return (a[i] + a[j]) * np.asarray(r, dtype=float) - a[i] * a[j]


def half_gaps(a) -> dict[tuple[int, int], float]:
    return {(i, j): 0.5 * (a[j] - a[i]) for i, j in itertools.combinations(range(len(a)), 2)}


def _eps(h: float, x):
    """``sqrt(h^2 - x^2)`` on ``[0, h]`` and 0 beyond (the truncated version)."""
    x = np.asarray(x, dtype=float)
    return np.where(x <= h, np.sqrt(np.clip(h * h - x * x, 0.0, None)), 0.0)


def _spectrum(spec, d: int) -> np.ndarray:
    a = _as_spectrum(spec).require_simple()
    if a.size != d:
        raise UnsupportedDimension(f"this density is available for d = {d} only, got d = {a.size}")
    return np.array(a, dtype=float)


# quadrature break helpers shared by every (r, s) and (r, x) density


def _s_breaks_at(a, r):
    return [phi(a, i, j, r) for i, j in itertools.combinations(range(a.size), 2)]


def _r_breaks_at_s(a, s, extra=()):
    out = list(a) + list(extra)
    for i, j in itertools.combinations(range(a.size), 2):
        slope = a[i] + a[j]
        if slope != 0.0:
            out.append((s + a[i] * a[j]) / slope)
    return out


def _x_breaks_at(a, r):
    out = [0.0]
    for i, j in itertools.combinations(range(a.size), 2):
        prod = (a[j] - r) * (r - a[i])
        if prod > 0:
            out.append(math.sqrt(prod))
    return out


def _r_breaks_at_x(a, x, extra=()):
    out = list(a) + list(extra)
    for (i, j), h in half_gaps(a).items():
        if x <= h:
            mid = 0.5 * (a[i] + a[j])
            root = math.sqrt(h * h - x * x)
            out += [mid - root, mid + root]
    return out


def _rs_density(a, g, label, extra_r=()) -> Density2D:
    region = support_regions(a)
    return Density2D(
        func=g,
        inside=lambda r, s, tol=0.0: region.contains_rs(r, s, tol),
        bbox=((a[0], a[-1]), (float(min(a**2)), float(max(a**2)))),
        u_breaks=tuple(sorted(set(a) | set(extra_r))),
        v_breaks=tuple(sorted({ai * aj for ai in a for aj in a})),
        v_breaks_at=lambda r: _s_breaks_at(a, r),
        u_breaks_at=lambda s: _r_breaks_at_s(a, s, extra_r),
        labels=("<A>", "<A^2>"),
        label=label,
    )


def _rx_density(a, g, label, extra_r=()) -> Density2D:
    region = support_regions(a)
    return Density2D(
        func=g,
        inside=lambda r, x, tol=0.0: region.contains_rx(r, x, tol),
        bbox=((a[0], a[-1]), (0.0, 0.5 * (a[-1] - a[0]))),
        u_breaks=tuple(sorted(set(a) | set(extra_r))),
        v_breaks=tuple(sorted(set(half_gaps(a).values()) | {0.0})),
        v_breaks_at=lambda r: _x_breaks_at(a, r),
        u_breaks_at=lambda x: _r_breaks_at_x(a, x, extra_r),
        labels=("<A>", "Delta A"),
        label=label,
    )


# d = 3


def joint_exp_exp2_qutrit(spec) -> Density2D:
    """Uniform density ``2 / V3`` of ``(<A>, <A^2>)`` on the triangle-like support."""
    a = _spectrum(spec, 3)
    level = math.gamma(3) / vandermonde(a)
    return _rs_density(a, lambda r, s: np.full(np.shape(r), level), "(<A>, <A^2>), d=3")


def joint_exp_std_qutrit(spec) -> Density2D:
    a = _spectrum(spec, 3)
    level = 2.0 * math.gamma(3) / vandermonde(a)
    return _rx_density(a, lambda r, x: level * np.asarray(x, dtype=float), "(<A>, Delta A), d=3")


def pdf_uncertainty_qutrit(spec) -> Pdf1D:
    a = _spectrum(spec, 3)
    h = half_gaps(a)
    pref = 4.0 * math.gamma(3) / vandermonde(a)

    def f(x):
        x = np.asarray(x, dtype=float)
        return pref * x * (_eps(h[0, 2], x) - _eps(h[1, 2], x) - _eps(h[0, 1], x))

    return make_pdf(f, 0.0, h[0, 2], breakpoints=sorted(h.values()), label="Delta A, d=3")


# d = 4


def pivot_d4(a) -> float:
    """Abscissa where ``phi_13`` and ``phi_24`` cross."""
    return (a[1] * a[3] - a[0] * a[2]) / (a[1] + a[3] - a[0] - a[2])


def d4_pieces(a):
    """The four linear pieces of the d = 4 profile, keyed by their lower chord."""
    return {
        "12": lambda r, s: (a[3] - a[2]) * (s - phi(a, 0, 1, r)),
        "23": lambda r, s: (a[3] - a[0]) * (s - phi(a, 1, 2, r)),
        "34": lambda r, s: (a[1] - a[0]) * (s - phi(a, 2, 3, r)),
        "14": lambda r, s: (a[1] - a[2]) * (s - phi(a, 0, 3, r)),
    }


def d4_cells(a) -> tuple[dict, ...]:
    """Cells of the d = 4 support in a fixed order.

    Each cell is ``r in [r_lo, r_hi]`` and ``lower(r) <= s <= upper(r)``, with
    chords named by 0-based index pairs, and carries the active piece.  A
    point on a shared edge belongs to the first listed cell containing it.
    """
    rs = pivot_d4(a)
    spec = [
        (a[0], a[1], (0, 1), (0, 2), "12"),
        (a[0], a[1], (0, 2), (0, 3), "14"),
        (a[1], rs, (1, 2), (1, 3), "23"),
        (a[1], rs, (1, 3), (0, 2), "12"),
        (a[1], rs, (0, 2), (0, 3), "14"),
        (rs, a[2], (1, 2), (0, 2), "23"),
        (rs, a[2], (0, 2), (1, 3), "34"),
        (rs, a[2], (1, 3), (0, 3), "14"),
        (a[2], a[3], (2, 3), (1, 3), "34"),
        (a[2], a[3], (1, 3), (0, 3), "14"),
    ]
    return tuple(
        {"r_range": (float(lo), float(hi)), "lower": lo_pair, "upper": up_pair, "piece": piece}
        for lo, hi, lo_pair, up_pair, piece in spec
    )


def d4_profile(a, r, s):
    """Piecewise-linear profile ``g(r, s)``; 0 outside the support."""
    r, s = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(s, dtype=float))
    pieces = d4_pieces(a)
    out = np.zeros(r.shape)
    done = np.zeros(r.shape, dtype=bool)
    for cell in d4_cells(a):
        lo, hi = cell["r_range"]
        mask = (
            ~done
            & (r >= lo) & (r <= hi)
            & (s >= phi(a, *cell["lower"], r))
            & (s <= phi(a, *cell["upper"], r))
        )
        if np.any(mask):
            out[mask] = pieces[cell["piece"]](r[mask], s[mask])
            done |= mask
    return out


def joint_exp_exp2_d4(spec) -> Density2D:
    a = _spectrum(spec, 4)
    pref = math.gamma(4) / vandermonde(a)
    return _rs_density(a, lambda r, s: pref * d4_profile(a, r, s), "(<A>, <A^2>), d=4", (pivot_d4(a),))


def joint_exp_std_d4(spec) -> Density2D:
    a = _spectrum(spec, 4)
    pref = 2.0 * math.gamma(4) / vandermonde(a)

    def f(r, x):
        r = np.asarray(r, dtype=float)
        x = np.asarray(x, dtype=float)
        return pref * x * d4_profile(a, r, x * x + r * r)

    return _rx_density(a, f, "(<A>, Delta A), d=4", (pivot_d4(a),))


def pdf_uncertainty_d4(spec) -> Pdf1D:
    a = _spectrum(spec, 4)
    h = half_gaps(a)
    pref = 16.0 / vandermonde(a)
    terms = [
        (a[3] - a[2], (0, 1)),
        (a[3] - a[0], (1, 2)),
        (-(a[3] - a[1]), (0, 2)),
        (a[1] - a[0], (2, 3)),
        (-(a[2] - a[0]), (1, 3)),
        (a[2] - a[1], (0, 3)),
    ]

    def f(x):
        x = np.asarray(x, dtype=float)
        return pref * x * sum(c * _eps(h[ij], x) ** 3 for c, ij in terms)

    return make_pdf(f, 0.0, h[0, 3], breakpoints=sorted(h.values()), label="Delta A, d=4")


def pdf_uncertainty(spec) -> Pdf1D:
    """Density of ``Delta A`` for d = 2, 3 or 4."""
    d = _as_spectrum(spec).dim
    if d == 2:
        return pdf_uncertainty_qubit(_as_spectrum(spec))
    if d == 3:
        return pdf_uncertainty_qutrit(spec)
    if d == 4:
        return pdf_uncertainty_d4(spec)
    raise UnsupportedDimension(f"uncertainty densities are implemented for d = 2, 3, 4; got d = {d}")


def support_regions(spec) -> SupportRegion:
    """Support of ``(<A>, <A^2>)`` and ``(<A>, Delta A)`` for any simple spectrum."""
    a = _as_spectrum(spec).require_simple()
    cells = tuple(
        {"r_range": (float(a[k]), float(a[k + 1])), "lower": (k, k + 1), "upper": (0, a.size - 1)}
        for k in range(a.size - 1)
    )
    return SupportRegion(eigenvalues=np.array(a, dtype=float), kind="V", cells=cells)
