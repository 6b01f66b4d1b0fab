"""Observable representations and the state-wise statistics built on them.

Three input forms are supported: a dense Hermitian matrix, a bare spectrum
(all the single-observable densities need), and the qubit Bloch form
``A = a0 * 1 + a . sigma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateSpectrum, DimMismatch, DimTooSmall, NotHermitian, SingularGram

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12
DEFAULT_GAP_TOL = 1e-9  # relative to lambda_max - lambda_min
DEFAULT_RANK_TOL = 1e-10  # relative to the largest Gram eigenvalue

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
IDENTITY2 = np.eye(2, dtype=complex)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HermitianObservable:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimMismatch(f"observable must be a square matrix, got shape {m.shape}")
        scale = max(float(np.max(np.abs(m))), 1.0)
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL * scale:
            raise NotHermitian("matrix differs from its conjugate transpose")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __eq__(self, other):
        return isinstance(other, HermitianObservable) and np.array_equal(self.matrix, other.matrix)

    @classmethod
    def diag(cls, values: Sequence[float]) -> "HermitianObservable":
        return cls(np.diag(np.asarray(values, dtype=float)))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues of an observable.

    ``gap_tol`` defaults to ``1e-9 * (max - min)``; a spectrum is *simple*
    when every consecutive gap exceeds it.
    """

    values: np.ndarray
    gap_tol: float | None = None

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise ValueError("spectrum must be a non-empty list of finite reals")
        object.__setattr__(self, "values", _frozen(v))
        if self.gap_tol is None:
            object.__setattr__(self, "gap_tol", DEFAULT_GAP_TOL * float(v[-1] - v[0]))

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        return isinstance(other, Spectrum) and np.array_equal(self.values, other.values)

    @property
    def dim(self) -> int:
        return self.values.size

    @property
    def simple(self) -> bool:
        if self.dim < 2:
            return True
        return bool(np.all(np.diff(self.values) > self.gap_tol))

    def require_simple(self, min_dim: int = 2) -> np.ndarray:
        """Return the eigenvalues, raising if they cannot feed a density."""
        if self.dim < min_dim:
            raise DimTooSmall(f"need d >= {min_dim}, got d = {self.dim}")
        if not self.simple:
            raise DegenerateSpectrum(f"spectrum {self.values.tolist()} has repeated eigenvalues")
        return self.values

    def shifted(self, c: float) -> "Spectrum":
        return Spectrum(self.values + c)

    def scaled(self, k: float) -> "Spectrum":
        return Spectrum(self.values * k)


@dataclass(frozen=True, eq=False)
class QubitObservable:
    """``A = a0 * 1 + a . sigma``; eigenvalues ``a0 -+ |a|``."""

    a0: float
    a: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.a, dtype=float).ravel()
        if vec.size != 3:
            raise ValueError("Bloch vector must have 3 components")
        if not (np.isfinite(self.a0) and np.all(np.isfinite(vec))):
            raise ValueError("qubit observable components must be finite")
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a", _frozen(vec))

    def __eq__(self, other):
        return (
            isinstance(other, QubitObservable)
            and self.a0 == other.a0
            and np.array_equal(self.a, other.a)
        )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.a))

    @property
    def dim(self) -> int:
        return 2

    @property
    def matrix(self) -> np.ndarray:
        return self.a0 * IDENTITY2 + sum(c * p for c, p in zip(self.a, PAULI))

    def spectrum(self) -> Spectrum:
        return Spectrum([self.a0 - self.norm, self.a0 + self.norm])

    def to_hermitian(self) -> HermitianObservable:
        return HermitianObservable(self.matrix)

    def require_nontrivial(self) -> float:
        n = self.norm
        if n == 0.0:
            raise DegenerateSpectrum("qubit observable with a = 0 has zero variance in every state")
        return n

    @classmethod
    def from_matrix(cls, m) -> "QubitObservable":
        m = HermitianObservable(m).matrix
        if m.shape != (2, 2):
            raise DimMismatch("not a qubit observable")
        a0 = 0.5 * np.trace(m).real
        a = [0.5 * np.trace(m @ p).real for p in PAULI]
        return cls(a0, a)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.amplitudes, dtype=complex).ravel()
        if abs(np.vdot(psi, psi).real - 1.0) > NORM_TOL:
            raise ValueError("pure state must have unit norm")
        object.__setattr__(self, "amplitudes", _frozen(psi))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        psi = np.asarray(amplitudes, dtype=complex).ravel()
        return cls(psi / np.linalg.norm(psi))

    @classmethod
    def from_bloch(cls, n) -> "PureState":
        """Qubit state whose Bloch vector is the unit vector ``n``."""
        n = np.asarray(n, dtype=float)
        n = n / np.linalg.norm(n)
        theta = np.arccos(np.clip(n[2], -1.0, 1.0))
        phi = np.arctan2(n[1], n[0])
        return cls.normalized([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


ObservableLike = Union[HermitianObservable, QubitObservable, np.ndarray]


def as_matrix(obs: ObservableLike) -> np.ndarray:
    if isinstance(obs, (HermitianObservable, QubitObservable)):
        return np.asarray(obs.matrix)
    if isinstance(obs, Spectrum):
        return np.diag(obs.values).astype(complex)
    return HermitianObservable(obs).matrix


def _amplitudes(psi) -> np.ndarray:
    if isinstance(psi, PureState):
        return psi.amplitudes
    return PureState(psi).amplitudes


def spectrum_of(obs: ObservableLike, gap_tol: float | None = None) -> Spectrum:
    """Sorted eigenvalues of a Hermitian observable."""
    if isinstance(obs, QubitObservable):
        vals = obs.spectrum().values
    else:
        vals = np.linalg.eigvalsh(as_matrix(obs))
    return Spectrum(vals, gap_tol)


def expectation(obs: ObservableLike, psi) -> float:
    m = as_matrix(obs)
    v = _amplitudes(psi)
    if m.shape[0] != v.size:
        raise DimMismatch(f"observable has d={m.shape[0]}, state has d={v.size}")
    return float(np.vdot(v, m @ v).real)


def std_dev(obs: ObservableLike, psi) -> float:
    m = as_matrix(obs)
    v = _amplitudes(psi)
    if m.shape[0] != v.size:
        raise DimMismatch(f"observable has d={m.shape[0]}, state has d={v.size}")
    mv = m @ v
    mean = np.vdot(v, mv).real
    # ||(A - <A>) psi|| rather than sqrt(<A^2> - <A>^2): no cancellation near eigenstates
    return float(np.linalg.norm(mv - mean * v))


def max_variance(spec: Spectrum) -> float:
    """Largest variance over all states: a quarter of the squared spectral width."""
    if spec.dim < 2:
        raise DimTooSmall("max_variance needs d >= 2")
    v = spec.values
    return 0.25 * float(v[-1] - v[0]) ** 2


def max_variance_state(obs: ObservableLike) -> PureState:
    """Equal superposition of the extreme eigenvectors, which attains ``max_variance``."""
    m = as_matrix(obs)
    if m.shape[0] < 2:
        raise DimTooSmall("max_variance_state needs d >= 2")
    _, vecs = np.linalg.eigh(m)
    return PureState.normalized(vecs[:, 0] + vecs[:, -1])


@dataclass(frozen=True, eq=False)
class GramMatrix:
    entries: np.ndarray
    det: float
    numerical_rank: int
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def inverse(self) -> np.ndarray:
        if self.numerical_rank < self.order:
            raise SingularGram(f"Gram matrix has rank {self.numerical_rank} < {self.order}")
        return np.linalg.inv(self.entries)


def rank_from_eigenvalues(eigs: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    top = float(np.max(eigs))
    if top <= 0.0:
        return 0
    return int(np.sum(eigs > rank_tol * top))


def gram(vectors: Sequence, rank_tol: float = DEFAULT_RANK_TOL) -> GramMatrix:
    q = np.array([np.asarray(v, dtype=float).ravel() for v in vectors])
    t = q @ q.T
    t = 0.5 * (t + t.T)
    eigs = np.linalg.eigvalsh(t)
    return GramMatrix(
        entries=_frozen(t),
        det=float(np.linalg.det(t)),
        numerical_rank=rank_from_eigenvalues(eigs, rank_tol),
        eigenvalues=_frozen(eigs),
    )


def rank_classify(g: GramMatrix, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    return rank_from_eigenvalues(g.eigenvalues, rank_tol)


def bloch_gram(observables: Sequence[QubitObservable], rank_tol: float = DEFAULT_RANK_TOL) -> GramMatrix:
    return gram([q.a for q in observables], rank_tol)
