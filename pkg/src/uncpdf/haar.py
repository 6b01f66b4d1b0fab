"""Seeded Haar-random pure states and the statistics sampled from them.

A Haar state is a vector of i.i.d. standard complex Gaussians, normalized.
The sample stream is split into ``n_workers`` contiguous blocks; block ``w``
has its own generator spawned from ``(seed, w)`` so that the stream depends
only on ``(seed, n_workers)``, never on thread scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import DimMismatch, NonMonotoneEdges
from .observables import PureState, as_matrix

STATISTICS = ("expectation", "std_dev", "second_moment")
THREADS_ENV = "UNC_PDF_THREADS"


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    dim: int
    n_samples: int
    n_workers: int = 1
    chunk: int = 1 << 16

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.n_workers < 1:
            raise ValueError("n_workers must be >= 1")
        if self.chunk < 1:
            raise ValueError("chunk must be >= 1")

    def worker_counts(self) -> list[int]:
        base, extra = divmod(self.n_samples, self.n_workers)
        return [base + (w < extra) for w in range(self.n_workers)]

    def worker_rng(self, w: int) -> np.random.Generator:
        child = np.random.SeedSequence(int(self.seed)).spawn(self.n_workers)[w]
        return np.random.Generator(np.random.PCG64(child))


def _pool_size(cfg: SamplerConfig) -> int:
    env = os.environ.get(THREADS_ENV)
    limit = int(env) if env and env.isdigit() and int(env) > 0 else (os.cpu_count() or 1)
    return max(1, min(cfg.n_workers, limit))


def _draw(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    z = rng.standard_normal((m, d, 2))
    psi = z[..., 0] + 1j * z[..., 1]
    return psi / np.linalg.norm(psi, axis=1, keepdims=True)


def worker_chunks(cfg: SamplerConfig, w: int) -> Iterator[np.ndarray]:
    """Amplitude blocks of shape ``(m, dim)`` for worker ``w``."""
    rng = cfg.worker_rng(w)
    left = cfg.worker_counts()[w]
    while left > 0:
        m = min(cfg.chunk, left)
        yield _draw(rng, m, cfg.dim)
        left -= m


def sample_amplitudes(cfg: SamplerConfig) -> Iterator[np.ndarray]:
    """All amplitude blocks in stream order (worker 0 first)."""
    for w in range(cfg.n_workers):
        yield from worker_chunks(cfg, w)


def sample_array(cfg: SamplerConfig) -> np.ndarray:
    return np.concatenate(list(sample_amplitudes(cfg)), axis=0)


def sample_pure(cfg: SamplerConfig) -> Iterator[PureState]:
    for block in sample_amplitudes(cfg):
        for row in block:
            yield PureState(row)


def statistics_of(matrices: Sequence[np.ndarray], psi: np.ndarray, which: Sequence[str]) -> np.ndarray:
    """Column ``k`` holds statistic ``which[k]`` of observable ``k`` for each row of ``psi``."""
    out = np.empty((psi.shape[0], len(matrices)))
    for k, (m, kind) in enumerate(zip(matrices, which)):
        mv = psi @ m.T
        mean = np.einsum("ij,ij->i", psi.conj(), mv).real
        if kind == "expectation":
            out[:, k] = mean
        elif kind == "std_dev":
            # ||(A - <A>) psi|| avoids cancellation in <A^2> - <A>^2
            out[:, k] = np.linalg.norm(mv - mean[:, None] * psi, axis=1)
        elif kind == "second_moment":
            out[:, k] = np.einsum("ij,ij->i", mv.conj(), mv).real
        else:
            raise ValueError(f"unknown statistic {kind!r}; expected one of {STATISTICS}")
    return out


def _columns(which, k: int) -> list[str]:
    if isinstance(which, str):
        cols = [which] * k
    else:
        cols = list(which)
        if len(cols) != k:
            raise ValueError("need one statistic per observable")
    for c in cols:
        if c not in STATISTICS:
            raise ValueError(f"unknown statistic {c!r}; expected one of {STATISTICS}")
    return cols


def sample_statistics(observables: Sequence, cfg: SamplerConfig, which: Union[str, Sequence[str]] = "expectation") -> np.ndarray:
    """``(n_samples, len(observables))`` array of per-state statistics.

    ``which`` is one statistic name for every column or a list with one name
    per observable.
    """
    mats = [np.asarray(as_matrix(o), dtype=complex) for o in observables]
    for m in mats:
        if m.shape[0] != cfg.dim:
            raise DimMismatch(f"observable has d={m.shape[0]}, sampler has d={cfg.dim}")
    cols = _columns(which, len(mats))

    def run(w: int) -> np.ndarray:
        parts = [statistics_of(mats, block, cols) for block in worker_chunks(cfg, w)]
        return np.concatenate(parts, axis=0) if parts else np.empty((0, len(mats)))

    pool = _pool_size(cfg)
    if pool == 1:
        results = [run(w) for w in range(cfg.n_workers)]
    else:
        with ThreadPoolExecutor(max_workers=pool) as ex:
            results = list(ex.map(run, range(cfg.n_workers)))
    return np.concatenate(results, axis=0)


def _check_edges(edges) -> np.ndarray:
    e = np.asarray(edges, dtype=float).ravel()
    if e.size < 2 or not np.all(np.isfinite(e)) or np.any(np.diff(e) <= 0):
        raise NonMonotoneEdges("bin edges must be finite and strictly increasing")
    return e


@dataclass
class Histogram1D:
    edges: np.ndarray
    counts: np.ndarray
    overflow: int = 0

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.overflow

    def density(self) -> np.ndarray:
        n = self.total
        return self.counts / (n * np.diff(self.edges)) if n else np.zeros(self.counts.shape)

    def merge(self, other: "Histogram1D") -> "Histogram1D":
        if not np.array_equal(self.edges, other.edges):
            raise ValueError("cannot merge histograms with different edges")
        return Histogram1D(self.edges, self.counts + other.counts, self.overflow + other.overflow)


@dataclass
class Histogram2D:
    edges: tuple[np.ndarray, np.ndarray]
    counts: np.ndarray
    overflow: int = 0

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.overflow

    def probabilities(self) -> np.ndarray:
        n = self.total
        return self.counts / n if n else np.zeros(self.counts.shape)

    def merge(self, other: "Histogram2D") -> "Histogram2D":
        if not all(np.array_equal(a, b) for a, b in zip(self.edges, other.edges)):
            raise ValueError("cannot merge histograms with different edges")
        return Histogram2D(self.edges, self.counts + other.counts, self.overflow + other.overflow)


def histogram(samples, edges) -> Union[Histogram1D, Histogram2D]:
    """1D histogram when ``edges`` is one array, 2D when it is a pair.

    Samples outside the edge range go to ``overflow`` instead of a bin.
    """
    if isinstance(edges, tuple) and len(edges) == 2:
        ex, ey = _check_edges(edges[0]), _check_edges(edges[1])
        pts = np.asarray(samples, dtype=float).reshape(-1, 2)
        counts, _, _ = np.histogram2d(pts[:, 0], pts[:, 1], bins=(ex, ey))
        n_in = int(counts.sum())
        return Histogram2D((ex, ey), counts.astype(np.int64), pts.shape[0] - n_in)
    e = _check_edges(edges)
    x = np.asarray(samples, dtype=float).ravel()
    counts, _ = np.histogram(x, bins=e)
    return Histogram1D(e, counts.astype(np.int64), x.size - int(counts.sum()))


def samples_to_csv(path, samples: np.ndarray, header: Sequence[str]) -> None:
    """One tuple per row, 12 significant digits."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    np.savetxt(path, arr, delimiter=",", header=",".join(header), comments="", fmt="%.12g")


__all__ = [
    "SamplerConfig",
    "sample_pure",
    "sample_amplitudes",
    "sample_array",
    "sample_statistics",
    "statistics_of",
    "Histogram1D",
    "Histogram2D",
    "histogram",
    "samples_to_csv",
    "STATISTICS",
]
