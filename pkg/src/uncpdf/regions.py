"""Uncertainty regions and the minimization problems behind uncertainty relations.

For qubits the region of ``(Delta A_1, ..., Delta A_k)`` over pure states is
the image of the Bloch sphere under ``n -> sqrt(|a_k|^2 - <a_k, n>^2)``, so
minimization is a search on the sphere.  For larger d only a heuristic
search over state vectors is offered.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize as nelder_mead_minimize

from .errors import DimMismatch, NonQubit
from .haar import SamplerConfig, sample_array
from .observables import (
    HermitianObservable,
    PureState,
    QubitObservable,
    Spectrum,
    as_matrix,
    bloch_gram,
    gram,
    spectrum_of,
    std_dev,
)
from .pdf_analytic.qubit import pair_region_slack, uncertainty_surface_qubit3

DEFAULT_TOL = 1e-9
LATTICE_SIZE = 4096
REFINE_STARTS = 8
SIMPLEX_TOL = 1e-10


@dataclass(frozen=True)
class Objective:
    """``sum_k w_k * (Delta A_k) ** exponent``.

    ``kind`` is ``"sum_of_variances"`` (exponent 2, unit weights),
    ``"sum_of_stddevs"`` (exponent 1, unit weights) or ``"weighted"``.
    """

    kind: str = "sum_of_variances"
    weights: tuple[float, ...] | None = None
    exponent: int = 2

    def __post_init__(self):
        if self.kind == "sum_of_variances":
            object.__setattr__(self, "exponent", 2)
        elif self.kind == "sum_of_stddevs":
            object.__setattr__(self, "exponent", 1)
        elif self.kind != "weighted":
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if self.exponent not in (1, 2):
            raise ValueError("exponent must be 1 or 2")
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if any(x <= 0 for x in w):
                raise ValueError("weights must be positive")
            object.__setattr__(self, "weights", w)
        elif self.kind == "weighted":
            raise ValueError("weighted objective needs weights")

    def _weights(self, k: int) -> np.ndarray:
        if self.weights is None:
            return np.ones(k)
        if len(self.weights) != k:
            raise ValueError(f"objective has {len(self.weights)} weights for {k} observables")
        return np.asarray(self.weights)

    def from_variances(self, variances) -> np.ndarray:
        var = np.clip(np.asarray(variances, dtype=float), 0.0, None)
        vals = var if self.exponent == 2 else np.sqrt(var)
        return vals @ self._weights(var.shape[-1])

    def __call__(self, uncertainties) -> float:
        x = np.asarray(uncertainties, dtype=float)
        return float(self.from_variances(x * x))


@dataclass
class OptimResult:
    minimum: float
    argmin_uncertainties: tuple[float, ...]
    witness_state: PureState
    iterations: int
    converged: bool
    heuristic: bool = False
    witness_bloch: tuple[float, ...] | None = field(default=None)

    def to_dict(self) -> dict:
        out = {
            "minimum": self.minimum,
            "argmin": list(self.argmin_uncertainties),
            "iterations": self.iterations,
            "converged": self.converged,
            "heuristic": self.heuristic,
        }
        if self.witness_bloch is not None:
            out["witness_bloch"] = list(self.witness_bloch)
        else:
            amp = self.witness_state.amplitudes
            out["witness_amplitudes"] = {"re": amp.real.tolist(), "im": amp.imag.tolist()}
        return out


def supercube_bound(observables: Sequence) -> list[tuple[float, float]]:
    """``[0, (lambda_max - lambda_min) / 2]`` for every observable."""
    out = []
    for obs in observables:
        spec = obs if isinstance(obs, Spectrum) else spectrum_of(obs)
        v = spec.values
        out.append((0.0, 0.5 * float(v[-1] - v[0])))
    return out


def _in_box(vals, bounds, tol):
    return all(-tol <= v <= hi + tol for v, (_, hi) in zip(vals, bounds))


def qubit_pair_contains(A: QubitObservable, B: QubitObservable, x: float, y: float, tol: float = DEFAULT_TOL) -> bool:
    a, b = A.require_nontrivial(), B.require_nontrivial()
    if not _in_box((x, y), ((0, a), (0, b)), tol):
        return False
    c = float(np.dot(A.a, B.a))
    return bool(pair_region_slack(a, b, c, min(x, a), min(y, b)) >= -tol)


def qubit_triple_contains(
    A: QubitObservable, B: QubitObservable, C: QubitObservable, x: float, y: float, z: float, tol: float = DEFAULT_TOL
) -> bool:
    obs = (A, B, C)
    norms = [q.require_nontrivial() for q in obs]
    vals = (x, y, z)
    if not _in_box(vals, [(0, n) for n in norms], tol):
        return False
    g = bloch_gram(obs)
    if g.numerical_rank == 3:
        return bool(uncertainty_surface_qubit3(A, B, C).contains(x, y, z, tol))
    vecs = np.array([q.a for q in obs])
    if g.numerical_rank == 2:
        for i, j in itertools.combinations(range(3), 2):
            if gram(list(vecs[[i, j]])).numerical_rank == 2:
                break
        k = ({0, 1, 2} - {i, j}).pop()
        kappa, *_ = np.linalg.lstsq(vecs[[i, j]].T, vecs[k], rcond=None)
        tinv = gram(list(vecs[[i, j]])).inverse()
        du = np.sqrt(max(norms[i] ** 2 - vals[i] ** 2, 0.0))
        dv = np.sqrt(max(norms[j] ** 2 - vals[j] ** 2, 0.0))
        for sv in (1.0, -1.0):
            p = np.array([du, sv * dv])
            if p @ tinv @ p > (1.0 + tol) ** 2:
                continue
            w = kappa @ p
            if abs(np.sqrt(max(norms[k] ** 2 - w * w, 0.0)) - vals[k]) <= tol:
                return True
        return False
    ratios = [n / norms[0] for n in norms]
    return all(abs(vals[m] - ratios[m] * x) <= tol for m in (1, 2))


# qubit minimization on the Bloch sphere


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    rho = np.sqrt(1.0 - z * z)
    theta = np.pi * (1.0 + np.sqrt(5.0)) * i
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta), z])


def _as_qubits(observables) -> list[QubitObservable]:
    out = []
    for obs in observables:
        if isinstance(obs, QubitObservable):
            out.append(obs)
            continue
        m = as_matrix(obs)
        if m.shape != (2, 2):
            raise NonQubit(f"minimize works on qubit observables only (got d = {m.shape[0]}); use minimize_heuristic")
        out.append(QubitObservable.from_matrix(m))
    return out


def _tangent_basis(n0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.eye(3)[int(np.argmin(np.abs(n0)))]
    e1 = np.cross(n0, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(n0, e1)


def minimize(objective: Objective, observables: Sequence) -> OptimResult:
    """Global minimum over pure qubit states.

    A Fibonacci lattice on the Bloch sphere, plus the eigenstates of every
    observable, seeds Nelder-Mead refinements in tangent-plane coordinates.
    """
    qubits = _as_qubits(observables)
    vecs = np.array([q.a for q in qubits])

    def value(n):
        n = np.atleast_2d(n)
        n = n / np.linalg.norm(n, axis=1, keepdims=True)
        # |a|^2 - <a, n>^2 written as |a x n|^2, exact near eigenstates
        cross = np.cross(n[:, None, :], vecs[None, :, :])
        return objective.from_variances(np.sum(cross * cross, axis=-1))

    pts = fibonacci_sphere(LATTICE_SIZE)
    eig = [s * v / np.linalg.norm(v) for v in vecs if np.linalg.norm(v) > 0 for s in (1.0, -1.0)]
    if eig:
        pts = np.vstack([pts, eig])
    coarse = value(pts)
    order = np.argsort(coarse, kind="stable")
    starts = list(pts[order[:REFINE_STARTS]])
    starts += [p for p in eig if not any(np.allclose(p, s) for s in starts)]

    best_n, best_val, iters, ok = starts[0], float(coarse[order[0]]), 0, True
    for n0 in starts:
        e1, e2 = _tangent_basis(n0)
        res = nelder_mead_minimize(
            lambda st: float(value(n0 + st[0] * e1 + st[1] * e2)[0]),
            np.zeros(2),
            method="Nelder-Mead",
            options={"xatol": SIMPLEX_TOL, "fatol": SIMPLEX_TOL, "initial_simplex": 0.05 * np.array([[0, 0], [1, 0], [0, 1]])},
        )
        iters += int(res.nit)
        cand = n0 + res.x[0] * e1 + res.x[1] * e2
        cand /= np.linalg.norm(cand)
        val = float(value(cand)[0])
        if val < best_val:
            best_n, best_val, ok = cand, val, bool(res.success)
    best_n = best_n / np.linalg.norm(best_n)
    witness = PureState.from_bloch(best_n)
    unc = tuple(std_dev(q, witness) for q in qubits)
    return OptimResult(
        minimum=objective(unc),
        argmin_uncertainties=unc,
        witness_state=witness,
        iterations=iters,
        converged=ok,
        witness_bloch=tuple(float(c) for c in best_n),
    )


# general d


def minimize_heuristic(
    objective: Objective, observables: Sequence, restarts: int = 16, seed: int = 0
) -> OptimResult:
    """Best local minimum over Haar-random starts (plus every observable's eigenvectors).

    Gives an upper bound on the pure-state minimum.  ``converged`` is set
    when the two best restarts agree within 1e-6.
    """
    mats = [as_matrix(o) for o in observables]
    d = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != d:
            raise DimMismatch("all observables must share one dimension")
    mats = [HermitianObservable(m).matrix for m in mats]
    stack = np.array(mats)

    def variances(psi: np.ndarray) -> np.ndarray:
        mv = np.einsum("kij,j->ki", stack, psi)
        mean = np.einsum("i,ki->k", psi.conj(), mv).real
        return np.sum(np.abs(mv - mean[:, None] * psi[None, :]) ** 2, axis=1)

    def unpack(p):
        psi = p[:d] + 1j * p[d:]
        return psi / np.linalg.norm(psi)

    def f(p):
        nrm = np.linalg.norm(p)
        if nrm == 0:
            return np.inf
        return float(objective.from_variances(variances(unpack(p))))

    starts = list(sample_array(SamplerConfig(seed=seed, dim=d, n_samples=max(restarts, 1))))
    for m in mats:
        _, vecs = np.linalg.eigh(m)
        starts += list(vecs.T)

    results = []
    iters = 0
    for psi0 in starts:
        x0 = np.concatenate([psi0.real, psi0.imag])
        res = nelder_mead_minimize(
            f, x0, method="Nelder-Mead",
            options={"xatol": SIMPLEX_TOL, "fatol": 1e-14, "maxiter": 4000 * d, "maxfev": 8000 * d, "adaptive": True},
        )
        iters += int(res.nit)
        results.append((float(res.fun), res.x))
    results.sort(key=lambda t: t[0])
    best_psi = unpack(results[0][1])
    witness = PureState.normalized(best_psi)
    unc = tuple(float(np.sqrt(max(v, 0.0))) for v in variances(witness.amplitudes))
    converged = len(results) > 1 and abs(results[1][0] - results[0][0]) < 1e-6
    return OptimResult(
        minimum=objective(unc),
        argmin_uncertainties=unc,
        witness_state=witness,
        iterations=iters,
        converged=converged,
        heuristic=True,
    )
