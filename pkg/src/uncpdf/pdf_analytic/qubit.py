"""Joint densities for two or three qubit observables ``A = a0 + a.sigma``.

A pure qubit state has a unit Bloch vector ``n`` and ``<A> = a0 + <a, n>``,
so the expectation vector of k observables is the image of the unit sphere
under ``n -> (<a, n>, <b, n>, ...)``: an ellipsoid shell for k = 3, the
filled ellipse for k = 2.  ``omega`` is the norm that makes that image the
unit ball.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from ..errors import SingularGram
from ..observables import GramMatrix, QubitObservable, bloch_gram, gram
from .core import Density2D, LineSingular, SurfaceSingular
from .single import pdf_expectation, pdf_uncertainty_qubit


def _norms(*obs: QubitObservable) -> list[float]:
    return [q.require_nontrivial() for q in obs]


def _centers(*obs: QubitObservable) -> np.ndarray:
    return np.array([q.a0 for q in obs], dtype=float)


def _omega_sq(tinv: np.ndarray, shifted: np.ndarray) -> np.ndarray:
    return np.einsum("...i,ij,...j->...", shifted, tinv, shifted)


def omega2(A: QubitObservable, B: QubitObservable, r, s):
    g = bloch_gram([A, B])
    tinv = g.inverse()
    p = np.stack(np.broadcast_arrays(np.asarray(r, float) - A.a0, np.asarray(s, float) - B.a0), axis=-1)
    out = np.sqrt(np.clip(_omega_sq(tinv, p), 0.0, None))
    return out if out.ndim else float(out)


def omega3(A: QubitObservable, B: QubitObservable, C: QubitObservable, r, s, t):
    g = bloch_gram([A, B, C])
    tinv = g.inverse()
    p = np.stack(
        np.broadcast_arrays(
            np.asarray(r, float) - A.a0, np.asarray(s, float) - B.a0, np.asarray(t, float) - C.a0
        ),
        axis=-1,
    )
    out = np.sqrt(np.clip(_omega_sq(tinv, p), 0.0, None))
    return out if out.ndim else float(out)


def _ellipse_roots(p: float, q: float, w: float, u: float) -> list[float]:
    """Solutions ``v`` of ``p u^2 + 2 q u v + w v^2 = 1``."""
    disc = q * q * u * u - w * (p * u * u - 1.0)
    if disc < 0:
        return []
    root = np.sqrt(disc)
    return [(-q * u - root) / w, (-q * u + root) / w]


def _pair_density(A: QubitObservable, B: QubitObservable, g: GramMatrix) -> Density2D:
    a, b = np.sqrt(np.diag(g.entries))
    a0, b0 = A.a0, B.a0
    tinv = g.inverse()
    p, q, w = tinv[0, 0], tinv[0, 1], tinv[1, 1]
    det = g.det
    norm = 1.0 / (2.0 * np.pi * np.sqrt(det))

    def w2(r, s):
        u = np.asarray(r, float) - a0
        v = np.asarray(s, float) - b0
        return p * u * u + 2.0 * q * u * v + w * v * v

    def func(r, s):
        return norm / np.sqrt(1.0 - w2(r, s))

    def inside(r, s, tol=0.0):
        return w2(r, s) <= (1.0 + tol) ** 2

    def v_at(r):
        return [b0 + v for v in _ellipse_roots(p, q, w, r - a0)]

    def u_at(s):
        return [a0 + u for u in _ellipse_roots(w, q, p, s - b0)]

    return Density2D(
        func=func,
        inside=inside,
        bbox=((a0 - a, a0 + a), (b0 - b, b0 + b)),
        u_breaks=(a0 - a, a0 + a),
        v_breaks=(b0 - b, b0 + b),
        v_breaks_at=v_at,
        u_breaks_at=u_at,
        labels=("<A>", "<B>"),
        label="(<A>, <B>), qubit",
    )


def joint_expectations_qubit2(A: QubitObservable, B: QubitObservable):
    """Joint law of ``(<A>, <B>)``.

    Independent Bloch vectors give an absolutely continuous density on the
    ellipse ``omega <= 1``.  Parallel ones put all mass on a line.
    """
    _norms(A, B)
    g = bloch_gram([A, B])
    if g.numerical_rank == 2:
        return _pair_density(A, B, g)
    kappa = float(np.dot(A.a, B.a) / np.dot(A.a, A.a))
    return LineSingular(
        basis=(0,),
        dependent=(1,),
        coeffs=np.array([[kappa]]),
        centers=_centers(A, B),
        profile=pdf_expectation(A.spectrum()),
        label="(<A>, <B>), parallel Bloch vectors",
    )


def pair_region_slack(a: float, b: float, c: float, x, y):
    """Left minus right side of the qubit-pair uncertainty inequality.

    ``(x, y)`` is attainable iff ``0 <= x <= a``, ``0 <= y <= b`` and this is
    ``>= 0``; ``c`` is the Bloch inner product ``<a, b>``.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    xa = np.clip(a * a - x * x, 0.0, None)
    yb = np.clip(b * b - y * y, 0.0, None)
    lhs = b * b * x * x + a * a * y * y + 2.0 * abs(c) * np.sqrt(xa * yb)
    return lhs - (a * a * b * b + c * c)


def joint_uncertainties_qubit2(A: QubitObservable, B: QubitObservable) -> Density2D:
    """Joint density of ``(Delta A, Delta B)`` for linearly independent Bloch vectors."""
    a, b = _norms(A, B)
    g = bloch_gram([A, B])
    if g.numerical_rank < 2:
        raise SingularGram(
            "Bloch vectors are parallel: Delta B is a fixed multiple of Delta A; "
            "use collinear_uncertainties_qubit2"
        )
    pair = _pair_density(A, B, g)
    c = float(g.entries[0, 1])
    a0, b0 = A.a0, B.a0
    tinv = g.inverse()
    p, q, w = tinv[0, 0], tinv[0, 1], tinv[1, 1]
    scale = max(a * a * b * b, 1.0)

    def func(x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        du = np.sqrt(np.clip(a * a - x * x, 0.0, None))
        dv = np.sqrt(np.clip(b * b - y * y, 0.0, None))
        total = pair(a0 + du, b0 + dv) + pair(a0 + du, b0 - dv)
        return 2.0 * x * y * total / (du * dv)

    def inside(x, y, tol=0.0):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        box = (x >= -tol) & (x <= a + tol) & (y >= -tol) & (y <= b + tol)
        return box & (pair_region_slack(a, b, c, x, y) >= -tol * scale)

    def y_at(x):
        u = np.sqrt(max(a * a - x * x, 0.0))
        out = [0.0, b]
        for v in _ellipse_roots(p, q, w, u):
            if abs(v) <= b:
                out.append(np.sqrt(b * b - v * v))
        return out

    def x_at(y):
        v = np.sqrt(max(b * b - y * y, 0.0))
        out = [0.0, a]
        for u in _ellipse_roots(w, q, p, v):
            if abs(u) <= a:
                out.append(np.sqrt(a * a - u * u))
        return out

    # x positions where the set of y-breaks changes combinatorially
    x_breaks = [0.0, a]
    for u in (1.0 / np.sqrt(p), c / b):
        if abs(u) <= a:
            x_breaks.append(np.sqrt(a * a - u * u))
    y_breaks = [0.0, b]
    for v in (1.0 / np.sqrt(w), c / a):
        if abs(v) <= b:
            y_breaks.append(np.sqrt(b * b - v * v))

    return Density2D(
        func=func,
        inside=inside,
        bbox=((0.0, a), (0.0, b)),
        u_breaks=tuple(sorted(x_breaks)),
        v_breaks=tuple(sorted(y_breaks)),
        v_breaks_at=y_at,
        u_breaks_at=x_at,
        labels=("Delta A", "Delta B"),
        label="(Delta A, Delta B), qubit",
    )


def collinear_uncertainties_qubit2(A: QubitObservable, B: QubitObservable) -> LineSingular:
    """Parallel Bloch vectors: ``Delta B = |kappa| Delta A`` with ``Delta A`` following the qubit law."""
    _norms(A, B)
    g = bloch_gram([A, B])
    if g.numerical_rank == 2:
        raise ValueError("Bloch vectors are independent; use joint_uncertainties_qubit2")
    kappa = float(np.dot(A.a, B.a) / np.dot(A.a, A.a))
    return LineSingular(
        basis=(0,),
        dependent=(1,),
        coeffs=np.array([[abs(kappa)]]),
        centers=np.zeros(2),
        profile=pdf_uncertainty_qubit(A),
        derived=True,
        label="(Delta A, Delta B), parallel Bloch vectors",
    )


def _independent_pair(vectors: np.ndarray) -> tuple[int, int, int]:
    for i, j in itertools.combinations(range(3), 2):
        if gram(list(vectors[[i, j]])).numerical_rank == 2:
            k = ({0, 1, 2} - {i, j}).pop()
            return i, j, k
    raise SingularGram("no linearly independent pair among the Bloch vectors")


def joint_expectations_qubit3(A: QubitObservable, B: QubitObservable, C: QubitObservable):
    """Joint law of ``(<A>, <B>, <C>)``; always singular.

    Rank 3: uniform on the ellipsoid surface.  Rank 2: a plane carrying the
    density of an independent pair.  Rank 1: a line carrying the
    single-observable density.
    """
    obs = (A, B, C)
    _norms(*obs)
    g = bloch_gram(obs)
    centers = _centers(*obs)
    if g.numerical_rank == 3:
        return SurfaceSingular(center=centers, gram=g, label="(<A>, <B>, <C>), qubit")
    vecs = np.array([q.a for q in obs])
    if g.numerical_rank == 2:
        i, j, k = _independent_pair(vecs)
        basis = vecs[[i, j]].T
        kappa, *_ = np.linalg.lstsq(basis, vecs[k], rcond=None)
        return LineSingular(
            basis=(i, j),
            dependent=(k,),
            coeffs=kappa.reshape(1, 2),
            centers=centers,
            profile=_pair_density(obs[i], obs[j], bloch_gram([obs[i], obs[j]])),
            label="(<A>, <B>, <C>), coplanar Bloch vectors",
        )
    base = vecs[0]
    kap = [float(np.dot(base, v) / np.dot(base, base)) for v in vecs[1:]]
    return LineSingular(
        basis=(0,),
        dependent=(1, 2),
        coeffs=np.array(kap).reshape(2, 1),
        centers=centers,
        profile=pdf_expectation(A.spectrum()),
        label="(<A>, <B>, <C>), parallel Bloch vectors",
    )


@dataclass(frozen=True, eq=False)
class UncertaintySurface:
    """Support surface and surface weight of ``(Delta A, Delta B, Delta C)``
    for a qubit triple with independent Bloch vectors.

    ``(x, y, z)`` is attainable iff one of the four sign branches
    ``(r+(x), s_j(y), t_k(z))`` lies on the ellipsoid ``omega = 1``.
    """

    observables: tuple[QubitObservable, QubitObservable, QubitObservable]
    gram: GramMatrix

    variant = "uncertainty_surface"

    @cached_property
    def norms(self) -> np.ndarray:
        return np.sqrt(np.diag(self.gram.entries))

    @cached_property
    def _tinv(self) -> np.ndarray:
        return self.gram.inverse()

    def _offsets(self, x, y, z):
        a, b, c = self.norms
        du = np.sqrt(np.clip(a * a - np.asarray(x, float) ** 2, 0.0, None))
        dv = np.sqrt(np.clip(b * b - np.asarray(y, float) ** 2, 0.0, None))
        dw = np.sqrt(np.clip(c * c - np.asarray(z, float) ** 2, 0.0, None))
        return np.broadcast_arrays(du, dv, dw)

    def branch_omegas(self, x, y, z) -> np.ndarray:
        """``omega`` at the four branches, shape ``(..., 4)`` ordered (+,+), (+,-), (-,+), (-,-)."""
        du, dv, dw = self._offsets(x, y, z)
        out = []
        for sj, sk in itertools.product((1.0, -1.0), repeat=2):
            p = np.stack([du, sj * dv, sk * dw], axis=-1)
            out.append(np.sqrt(np.clip(_omega_sq(self._tinv, p), 0.0, None)))
        return np.stack(out, axis=-1)

    def contains(self, x, y, z, tol: float = 1e-9):
        a, b, c = self.norms
        x, y, z = (np.asarray(v, float) for v in (x, y, z))
        box = (x >= -tol) & (x <= a + tol) & (y >= -tol) & (y <= b + tol) & (z >= -tol) & (z <= c + tol)
        dist = np.min(np.abs(self.branch_omegas(x, y, z) - 1.0), axis=-1)
        return box & (dist < tol)

    def weight(self, x, y, z):
        """Coefficient multiplying the surface delta: prefactor times the ellipsoid surface weight."""
        du, dv, dw = self._offsets(x, y, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            pref = 2.0 * np.asarray(x) * np.asarray(y) * np.asarray(z) / (du * dv * dw)
        return pref / (4.0 * np.pi * np.sqrt(self.gram.det))

    def marginal_xy(self, x, y):
        """Density of ``(Delta A, Delta B)`` obtained by integrating the delta in ``z``.

        For each branch of ``(r, s)`` the ellipsoid constraint has two
        ``t``-roots, each contributing ``1 / |d omega / d t|``.
        """
        a, b, _ = self.norms
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        du = np.sqrt(np.clip(a * a - x * x, 0.0, None))
        dv = np.sqrt(np.clip(b * b - y * y, 0.0, None))
        m = self._tinv
        total = np.zeros(x.shape)
        for sj in (1.0, -1.0):
            u, v = du, sj * dv
            lin = m[0, 2] * u + m[1, 2] * v
            const = m[0, 0] * u * u + 2 * m[0, 1] * u * v + m[1, 1] * v * v - 1.0
            disc = lin * lin - m[2, 2] * const
            with np.errstate(divide="ignore", invalid="ignore"):
                total += np.where(disc > 0, 2.0 / np.sqrt(np.where(disc > 0, disc, 1.0)), 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            pref = 2.0 * x * y / (du * dv)
        out = pref * total / (4.0 * np.pi * np.sqrt(self.gram.det))
        return out if out.ndim else float(out)

    def describe(self) -> dict:
        return {
            "variant": self.variant,
            "gram": np.asarray(self.gram.entries).tolist(),
            "det": self.gram.det,
            "norms": self.norms.tolist(),
        }


def uncertainty_surface_qubit3(A: QubitObservable, B: QubitObservable, C: QubitObservable) -> UncertaintySurface:
    obs = (A, B, C)
    _norms(*obs)
    g = bloch_gram(obs)
    if g.numerical_rank < 3:
        raise SingularGram(
            f"Bloch vectors span rank {g.numerical_rank}; the uncertainty triple is then "
            "determined by a lower-order joint law"
        )
    return UncertaintySurface(observables=obs, gram=g)


def pair_slack_for(A: QubitObservable, B: QubitObservable, x, y):
    a, b = _norms(A, B)
    return pair_region_slack(a, b, float(np.dot(A.a, B.a)), x, y)


__all__: Sequence[str] = (
    "omega2",
    "omega3",
    "joint_expectations_qubit2",
    "joint_uncertainties_qubit2",
    "collinear_uncertainties_qubit2",
    "joint_expectations_qubit3",
    "uncertainty_surface_qubit3",
    "UncertaintySurface",
    "pair_region_slack",
    "pair_slack_for",
)
