"""Containers for closed-form densities and the numerics they share."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence, Union

import numpy as np

from .. import quadrature as quad
from ..observables import GramMatrix

# Per-panel CDF table resolution (angle subintervals x Gauss-Legendre order).
_CDF_SUBINTERVALS = 128
_CDF_ORDER = 10


def heaviside(t):
    """Step function closed at zero: ``H(0) = 1``."""
    return (np.asarray(t) >= 0).astype(float)


@dataclass(frozen=True, eq=False)
class Pdf1D:
    """A piecewise closed-form density on a union of closed intervals.

    ``func`` is only called on points inside the support and may return
    ``inf`` where the density diverges (integrable endpoint singularities).
    """

    func: Callable[[np.ndarray], np.ndarray]
    support: tuple[tuple[float, float], ...]
    breakpoints: tuple[float, ...]
    label: str = ""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = self.contains(x)
        out = np.zeros(x.shape)
        if np.any(inside):
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = np.asarray(self.func(x[inside]), dtype=float)
            out[inside] = np.where(np.isnan(vals), np.inf, vals)
        return out if out.ndim else float(out)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        mask = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.support:
            mask |= (x >= lo) & (x <= hi)
        return mask

    @property
    def lower(self) -> float:
        return min(lo for lo, _ in self.support)

    @property
    def upper(self) -> float:
        return max(hi for _, hi in self.support)

    @property
    def nodes(self) -> np.ndarray:
        """Panel boundaries: support ends plus every breakpoint inside the support."""
        pts = [p for iv in self.support for p in iv]
        pts += [b for b in self.breakpoints if self.contains(b)]
        return np.unique(np.asarray(pts, dtype=float))

    def _panels(self):
        out = []
        for lo, hi in quad.panels(self.nodes):
            if self.contains(0.5 * (lo + hi)):
                out.append((lo, hi))
        return out

    def normalization(self, tol: float = 1e-9) -> float:
        pieces = self._panels()
        per = tol / max(len(pieces), 1)
        return sum(
            quad.adaptive_simpson(quad.angle_integrand(self, lo, hi), 0.0, np.pi, per)
            for lo, hi in pieces
        )

    @cached_property
    def _cdf_table(self):
        t_nodes, t_weights = quad.gauss_legendre(_CDF_ORDER)
        edges = np.linspace(0.0, np.pi, _CDF_SUBINTERVALS + 1)
        width = edges[1] - edges[0]
        tables, bases = [], []
        base = 0.0
        for lo, hi in self._panels():
            t = (edges[:-1, None] + width * t_nodes[None, :]).ravel()
            x, jac = quad.cos_map(lo, hi, t)
            vals = self(np.clip(x, lo, hi)) * jac
            vals = np.where(np.isfinite(vals), vals, 0.0).reshape(_CDF_SUBINTERVALS, _CDF_ORDER)
            cum = np.concatenate([[0.0], np.cumsum(width * (vals @ t_weights))])
            tables.append(cum)
            bases.append(base)
            base += cum[-1]
        return self._panels(), tables, bases

    def cdf(self, x):
        """Numerically integrated CDF, evaluated exactly at each requested point."""
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        pieces, tables, bases = self._cdf_table
        total = bases[-1] + tables[-1][-1] if pieces else 1.0
        out = np.zeros(flat.shape)
        t_nodes, t_weights = quad.gauss_legendre(_CDF_ORDER)
        width = np.pi / _CDF_SUBINTERVALS
        for (lo, hi), cum, base in zip(pieces, tables, bases):
            out[flat >= hi] = base + cum[-1]
            sel = (flat > lo) & (flat < hi)
            if not np.any(sel):
                continue
            tq = quad.cos_map_inverse(lo, hi, flat[sel])
            j = np.minimum((tq / width).astype(int), _CDF_SUBINTERVALS - 1)
            t0 = j * width
            span = tq - t0
            t = t0[:, None] + span[:, None] * t_nodes[None, :]
            xs, jac = quad.cos_map(lo, hi, t)
            vals = self(np.clip(xs, lo, hi)) * jac
            vals = np.where(np.isfinite(vals), vals, 0.0)
            out[sel] = base + cum[j] + span * (vals @ t_weights)
        out = out / total if total > 0 else out
        out = np.clip(out, 0.0, 1.0)
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def impostor(self, factor: float = 2.0) -> "Pdf1D":
        """Same shape stretched by ``factor`` about the lower support end (negative control)."""
        anchor = self.lower
        stretch = lambda p: anchor + factor * (p - anchor)  # noqa: E731
        return Pdf1D(
            func=lambda x: self.func(anchor + (x - anchor) / factor) / factor,
            support=tuple((stretch(lo), stretch(hi)) for lo, hi in self.support),
            breakpoints=tuple(stretch(b) for b in self.breakpoints),
            label=f"{self.label} (support x{factor:g})",
        )

    def grid(self, lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
        xs = np.linspace(lo, hi, n)
        return xs, np.asarray(self(xs), dtype=float)


BreakFn = Callable[[float], Sequence[float]]


@dataclass(frozen=True, eq=False)
class Density2D:
    """Absolutely continuous joint density of two statistics ``(u, v)``.

    ``inside(u, v, tol)`` is the closed support predicate.  ``v_breaks_at(u)``
    lists the ``v`` values at which the integrand has a kink, jump or
    endpoint singularity along the vertical line through ``u`` (and
    symmetrically for ``u_breaks_at``); quadrature panels are split there.
    """

    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    inside: Callable[..., np.ndarray]
    bbox: tuple[tuple[float, float], tuple[float, float]]
    u_breaks: tuple[float, ...]
    v_breaks: tuple[float, ...]
    v_breaks_at: BreakFn
    u_breaks_at: BreakFn
    labels: tuple[str, str] = ("u", "v")
    label: str = ""

    variant = "density_2d"

    def __call__(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        mask = np.asarray(self.inside(u, v, 0.0), dtype=bool)
        out = np.zeros(u.shape)
        if np.any(mask):
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = np.asarray(self.func(u[mask], v[mask]), dtype=float)
            out[mask] = np.where(np.isnan(vals), np.inf, vals)
        return out if out.ndim else float(out)

    def contains(self, u, v, tol: float = 0.0):
        return self.inside(np.asarray(u, dtype=float), np.asarray(v, dtype=float), tol)

    def _clip_breaks(self, pts, lo, hi):
        pts = np.asarray(list(pts) + [lo, hi], dtype=float)
        pts = pts[np.isfinite(pts)]
        return np.unique(np.clip(pts, lo, hi))

    def marginal_u(self, u: float, order: int = 48) -> float:
        """``int f(u, v) dv`` at fixed ``u``."""
        (v0, v1) = self.bbox[1]
        pts = self._clip_breaks(self.v_breaks_at(float(u)), v0, v1)
        return quad.fixed_panels(lambda v: self(np.full_like(v, u), v), pts, order)

    def marginal_v(self, v: float, order: int = 48) -> float:
        """``int f(u, v) du`` at fixed ``v``."""
        (u0, u1) = self.bbox[0]
        pts = self._clip_breaks(self.u_breaks_at(float(v)), u0, u1)
        return quad.fixed_panels(lambda u: self(u, np.full_like(u, v)), pts, order)

    def total(self, order: int = 64) -> float:
        """Total mass: Gauss-Legendre (angle variable) over ``u`` of ``marginal_u``."""
        (u0, u1) = self.bbox[0]
        pts = self._clip_breaks(self.u_breaks, u0, u1)
        marg = np.vectorize(self.marginal_u, otypes=[float])
        return quad.fixed_panels(marg, pts, order)

    def cell_masses(self, u_edges: np.ndarray, v_edges: np.ndarray, order: int = 8) -> np.ndarray:
        """Analytic probability of every histogram cell.

        Iterated Gauss-Legendre in the angle variables.  Outer panels in ``u``
        split wherever the support boundary crosses a horizontal cell edge;
        at each outer node one inner sweep covers all cells of the column,
        with panels split at every cell edge and every ``v_breaks_at(u)``.
        Every kink or inverse-square-root edge therefore sits on a panel end.
        """
        u_edges = np.asarray(u_edges, dtype=float)
        v_edges = np.asarray(v_edges, dtype=float)
        nu, nv = u_edges.size - 1, v_edges.size - 1
        out = np.zeros((nu, nv))
        ubreaks = list(self.u_breaks)
        for v in v_edges:
            ubreaks.extend(self.u_breaks_at(float(v)))
        ubreaks = np.asarray([b for b in ubreaks if np.isfinite(b)], dtype=float)
        t, w = quad.gauss_legendre(order)
        for i in range(nu):
            lo, hi = u_edges[i], u_edges[i + 1]
            inner = ubreaks[(ubreaks > lo) & (ubreaks < hi)]
            for a, b in quad.panels(np.concatenate([[lo, hi], inner])):
                us, jac = quad.cos_map(a, b, np.pi * t)
                for u, wu in zip(us, np.pi * w * jac):
                    out[i] += wu * self._column_masses(float(u), v_edges, order)
        return out

    def _column_masses(self, u: float, v_edges: np.ndarray, order: int) -> np.ndarray:
        lo, hi = v_edges[0], v_edges[-1]
        brk = np.asarray(list(self.v_breaks_at(u)), dtype=float)
        brk = brk[np.isfinite(brk) & (brk > lo) & (brk < hi)]
        pts = np.unique(np.concatenate([v_edges, brk]))
        a, b = pts[:-1], pts[1:]
        t, w = quad.gauss_legendre(order)
        vs, jac = quad.cos_map(a[:, None], b[:, None], np.pi * t[None, :])
        vals = self(np.full(vs.shape, u), vs) * jac
        vals = np.where(np.isfinite(vals), vals, 0.0)
        piece = np.pi * (vals @ w)
        cell = np.clip(np.searchsorted(v_edges, 0.5 * (a + b)) - 1, 0, v_edges.size - 2)
        return np.bincount(cell, weights=piece, minlength=v_edges.size - 1)

    def impostor(self, factor: float = 2.0) -> "Density2D":
        """Support stretched by ``factor`` about the lower-left bbox corner (negative control)."""
        (u0, u1), (v0, v1) = self.bbox
        back_u = lambda u: u0 + (np.asarray(u) - u0) / factor  # noqa: E731
        back_v = lambda v: v0 + (np.asarray(v) - v0) / factor  # noqa: E731
        fwd_u = lambda u: u0 + factor * (np.asarray(u, dtype=float) - u0)  # noqa: E731
        fwd_v = lambda v: v0 + factor * (np.asarray(v, dtype=float) - v0)  # noqa: E731
        return Density2D(
            func=lambda u, v: self.func(back_u(u), back_v(v)) / factor**2,
            inside=lambda u, v, tol=0.0: self.inside(back_u(u), back_v(v), tol),
            bbox=((u0, fwd_u(u1)), (v0, fwd_v(v1))),
            u_breaks=tuple(fwd_u(b) for b in self.u_breaks),
            v_breaks=tuple(fwd_v(b) for b in self.v_breaks),
            v_breaks_at=lambda u: fwd_v(np.asarray(self.v_breaks_at(float(back_u(u))), dtype=float)),
            u_breaks_at=lambda v: fwd_u(np.asarray(self.u_breaks_at(float(back_v(v))), dtype=float)),
            labels=self.labels,
            label=f"{self.label} (support x{factor:g})",
        )

    def grid(self, ulim, vlim):
        us = np.linspace(*ulim)
        vs = np.linspace(*vlim)
        U, V = np.meshgrid(us, vs, indexing="ij")
        return U, V, np.asarray(self(U, V), dtype=float)


@dataclass(frozen=True, eq=False)
class LineSingular:
    """All mass on an affine subspace: dependent statistics are fixed affine
    functions of the free ones.

    For statistics ``(w_0, ..., w_{k-1})`` with centers ``c``, every dependent
    index ``i`` satisfies ``w_i - c_i = sum_j coeffs[i', j] (w_{basis[j]} - c_{basis[j]})``.
    The free statistics follow ``profile``.
    """

    basis: tuple[int, ...]
    dependent: tuple[int, ...]
    coeffs: np.ndarray
    centers: np.ndarray
    profile: Union[Pdf1D, Density2D]
    derived: bool = False
    label: str = ""

    variant = "line_singular"

    def residuals(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        shifted = p - self.centers[None, :]
        free = shifted[:, list(self.basis)]
        predicted = free @ np.asarray(self.coeffs).T
        return shifted[:, list(self.dependent)] - predicted

    def slack(self, points) -> np.ndarray:
        """Per-point largest constraint violation."""
        return np.max(np.abs(self.residuals(points)), axis=1)

    def impostor(self, factor: float = 2.0) -> "LineSingular":
        return LineSingular(
            self.basis, self.dependent, self.coeffs, self.centers,
            self.profile.impostor(factor), self.derived, f"{self.label} (support x{factor:g})",
        )

    def describe(self) -> dict:
        return {
            "variant": self.variant,
            "label": self.label,
            "basis": list(self.basis),
            "dependent": list(self.dependent),
            "coefficients": np.asarray(self.coeffs).tolist(),
            "centers": np.asarray(self.centers).tolist(),
            "derived": self.derived,
            "profile_variables": (
                list(self.profile.labels)
                if isinstance(self.profile, Density2D)
                else ["x" if self.derived else "r"]
            ),
        }


@dataclass(frozen=True, eq=False)
class SurfaceSingular:
    """Uniform mass on the ellipsoid surface ``omega(r, s, t) = 1``."""

    center: np.ndarray
    gram: GramMatrix
    label: str = ""
    scale: float = 1.0  # ellipsoid radius in omega units; 1 for the true distribution

    variant = "surface_singular"

    @property
    def weight(self) -> float:
        return 1.0 / (4.0 * np.pi * np.sqrt(self.gram.det))

    @cached_property
    def _tinv(self) -> np.ndarray:
        return self.gram.inverse()

    def omega(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float)) - self.center[None, :]
        q = np.einsum("ni,ij,nj->n", p, self._tinv, p)
        return np.sqrt(np.clip(q, 0.0, None))

    def slack(self, points) -> np.ndarray:
        return np.abs(self.omega(points) - self.scale)

    def impostor(self, factor: float = 2.0) -> "SurfaceSingular":
        return SurfaceSingular(self.center, self.gram, f"{self.label} (support x{factor:g})", self.scale * factor)

    def describe(self) -> dict:
        return {
            "variant": self.variant,
            "label": self.label,
            "center": self.center.tolist(),
            "gram": np.asarray(self.gram.entries).tolist(),
            "det": self.gram.det,
            "surface_weight": self.weight,
            "radius": self.scale,
        }


JointDistribution = Union[Density2D, LineSingular, SurfaceSingular]


@dataclass(frozen=True, eq=False)
class SupportRegion:
    """Membership predicates for the (r, s) and (r, x) supports of one observable.

    ``kind`` is ``"F"`` for the (<A>, <A^2>) plane and ``"V"`` for (<A>, Delta A);
    both predicates are always available.
    """

    eigenvalues: np.ndarray
    kind: str = "V"
    cells: tuple = field(default=())

    def _band(self, r, s, tol):
        a = self.eigenvalues
        r = np.asarray(r, dtype=float)
        s = np.asarray(s, dtype=float)
        upper = (a[0] + a[-1]) * r - a[0] * a[-1]
        ok = np.zeros(np.broadcast(r, s).shape, dtype=bool)
        for k in range(a.size - 1):
            lower = (a[k] + a[k + 1]) * r - a[k] * a[k + 1]
            ok |= (
                (r >= a[k] - tol) & (r <= a[k + 1] + tol)
                & (s - lower >= -tol) & (upper - s >= -tol)
            )
        return ok

    def contains_rs(self, r, s, tol: float = 1e-9):
        """``(r, s) = (<A>, <A^2>)`` lies in some cell ``F_{k,k+1}`` (additive slack ``tol``)."""
        return self._band(r, s, tol)

    def contains_rx(self, r, x, tol: float = 1e-9):
        """``(r, x) = (<A>, Delta A)`` lies in some cell ``V_{k,k+1}``.

        Tested through ``s = x**2 + r**2`` so boundary arcs are compared without square roots.
        """
        r = np.asarray(r, dtype=float)
        x = np.asarray(x, dtype=float)
        return self._band(r, x * x + r * r, tol) & (x >= -tol)

    def contains(self, r, y, tol: float = 1e-9):
        return self.contains_rx(r, y, tol) if self.kind == "V" else self.contains_rs(r, y, tol)

    def boundary(self, n_per_arc: int = 200) -> list[np.ndarray]:
        """Boundary polylines; each is an ``(m, 2)`` array.

        V flavour: the outer arc over ``[a_1, a_d]`` then one lower arc per
        adjacent eigenvalue pair.  F flavour: the upper chord and the lower
        chords ``phi_{k,k+1}``.
        """
        a = self.eigenvalues
        out = []
        if self.kind == "V":
            pairs = [(0, a.size - 1)] + [(k, k + 1) for k in range(a.size - 1)]
            for i, j in pairs:
                r = np.linspace(a[i], a[j], n_per_arc)
                x = np.sqrt(np.clip((a[j] - r) * (r - a[i]), 0.0, None))
                out.append(np.column_stack([r, x]))
        else:
            pairs = [(0, a.size - 1)] + [(k, k + 1) for k in range(a.size - 1)]
            for i, j in pairs:
                r = np.array([a[i], a[j]])
                out.append(np.column_stack([r, (a[i] + a[j]) * r - a[i] * a[j]]))
        return out


def describe(dist) -> dict:
    if hasattr(dist, "describe"):
        return dist.describe()
    return {"variant": getattr(dist, "variant", "density_1d"), "label": getattr(dist, "label", "")}


def make_pdf(func, lo, hi, breakpoints=(), label="") -> Pdf1D:
    return Pdf1D(func=func, support=((float(lo), float(hi)),), breakpoints=tuple(float(b) for b in breakpoints), label=label)

