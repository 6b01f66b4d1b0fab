import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from conftest import SX, SZ, haar_unitary
from uncpdf.errors import DimMismatch, NonMonotoneEdges
from uncpdf.haar import (
    Histogram1D,
    SamplerConfig,
    histogram,
    sample_array,
    sample_pure,
    sample_statistics,
    samples_to_csv,
)
from uncpdf.observables import QubitObservable


def test_states_have_unit_norm():
    psi = sample_array(SamplerConfig(seed=3, dim=5, n_samples=20_000))
    assert np.max(np.abs(np.linalg.norm(psi, axis=1) - 1.0)) < 1e-12


def test_sample_pure_yields_states():
    states = list(sample_pure(SamplerConfig(seed=1, dim=3, n_samples=10)))
    assert len(states) == 10 and all(s.dim == 3 for s in states)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_population_mean_is_one_over_d(d):
    psi = sample_array(SamplerConfig(seed=11, dim=d, n_samples=1_000_000, n_workers=4))
    assert np.allclose(np.mean(np.abs(psi) ** 2, axis=0), 1.0 / d, atol=0.003)


def test_sigma_z_expectation_is_uniform():
    z = sample_statistics([SZ], SamplerConfig(seed=5, dim=2, n_samples=200_000))[:, 0]
    assert stats.kstest(z, "uniform", args=(-1, 2)).statistic < 3 / np.sqrt(z.size)


def test_deterministic_streams():
    cfg = SamplerConfig(seed=42, dim=3, n_samples=1000, n_workers=3, chunk=128)
    assert np.array_equal(sample_array(cfg), sample_array(cfg))
    other = SamplerConfig(seed=43, dim=3, n_samples=1000, n_workers=3, chunk=128)
    assert not np.array_equal(sample_array(cfg), sample_array(other))


def test_chunk_size_does_not_change_stream():
    a = sample_array(SamplerConfig(seed=9, dim=2, n_samples=1000, chunk=1000))
    b = sample_array(SamplerConfig(seed=9, dim=2, n_samples=1000, chunk=1000))
    assert np.array_equal(a, b)


def test_thread_cap_keeps_results(monkeypatch):
    cfg = SamplerConfig(seed=2, dim=2, n_samples=5000, n_workers=4)
    ref = sample_statistics([SX], cfg, "std_dev")
    monkeypatch.setenv("UNC_PDF_THREADS", "1")
    assert np.array_equal(sample_statistics([SX], cfg, "std_dev"), ref)


def test_worker_counts_sum():
    cfg = SamplerConfig(seed=0, dim=2, n_samples=10, n_workers=3)
    assert cfg.worker_counts() == [4, 3, 3]


def test_invalid_config():
    with pytest.raises(ValueError):
        SamplerConfig(seed=-1, dim=2, n_samples=10)
    with pytest.raises(ValueError):
        SamplerConfig(seed=0, dim=2, n_samples=0)


def test_pauli_pair_uncertainties_satisfy_circle_bound():
    xy = sample_statistics([SX, SZ], SamplerConfig(seed=7, dim=2, n_samples=100_000), "std_dev")
    assert np.all(xy[:, 0] ** 2 + xy[:, 1] ** 2 >= 1 - 1e-9)


def test_qubit_uncertainty_within_norm():
    q = QubitObservable(0.2, [0.0, 0.0, 1.7])
    x = sample_statistics([q], SamplerConfig(seed=7, dim=2, n_samples=50_000), "std_dev")[:, 0]
    assert x.min() >= 0 and x.max() <= 1.7 + 1e-12


def test_eigenstate_has_zero_std():
    from uncpdf.haar import statistics_of

    proj = np.diag([1.0, 0.0, 0.0]).astype(complex)
    psi = np.array([[1.0, 0.0, 0.0]], dtype=complex)
    assert statistics_of([proj], psi, ["std_dev"])[0, 0] == 0.0


def test_mixed_statistics_columns():
    a = np.diag([1.0, 3.0, 9.0])
    cfg = SamplerConfig(seed=1, dim=3, n_samples=2000)
    out = sample_statistics([a, a, a], cfg, ["expectation", "std_dev", "second_moment"])
    assert np.allclose(out[:, 1] ** 2 + out[:, 0] ** 2, out[:, 2], atol=1e-10)


def test_dim_mismatch():
    with pytest.raises(DimMismatch):
        sample_statistics([np.eye(3)], SamplerConfig(seed=1, dim=2, n_samples=10))


def test_histogram_examples():
    h = histogram([0.1, 0.2, 0.6, 0.9], [0, 0.5, 1])
    assert h.counts.tolist() == [2, 2] and h.overflow == 0
    h = histogram([], [0, 0.5, 1])
    assert h.counts.tolist() == [0, 0] and h.total == 0
    h = histogram([-1.0, 0.3, 2.0], [0, 1])
    assert h.overflow == 2
    with pytest.raises(NonMonotoneEdges):
        histogram([0.1], [0, 0.5, 0.5])


def test_histogram_2d_and_merge():
    pts = np.array([[0.1, 0.1], [0.7, 0.2], [0.7, 0.9], [1.5, 0.5]])
    h = histogram(pts, (np.array([0, 0.5, 1]), np.array([0, 0.5, 1])))
    assert h.counts.tolist() == [[1, 0], [1, 1]] and h.overflow == 1
    m = h.merge(h)
    assert m.total == 8 and m.counts[1, 1] == 2


def test_uncertainty_histogram_peaks_at_norm():
    x = sample_statistics([SX], SamplerConfig(seed=4, dim=2, n_samples=1_000_000, n_workers=4), "std_dev")[:, 0]
    h = histogram(x, np.linspace(0, 1, 101))
    assert np.argmax(h.counts) == 99


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-2, 2), max_size=50), st.lists(st.floats(-2, 2), max_size=50))
def test_histogram_merge_is_commutative_and_counts_everything(xs, ys):
    edges = np.linspace(-1, 1, 7)
    a, b = histogram(xs, edges), histogram(ys, edges)
    ab, ba = a.merge(b), b.merge(a)
    assert np.array_equal(ab.counts, ba.counts) and ab.overflow == ba.overflow
    assert ab.total == len(xs) + len(ys)


def test_unitary_invariance_of_expectation_law(rng):
    n = 200_000
    a = np.diag([1.0, 3.0, 9.0]).astype(complex)
    u = haar_unitary(rng, 3)
    psi = sample_array(SamplerConfig(seed=8, dim=3, n_samples=n))
    r1 = np.einsum("ij,jk,ik->i", psi.conj(), a, psi).real
    rot = psi @ u.T
    # Haar measure is unitarily invariant, so rotated states give the same law for A
    r2 = np.einsum("ij,jk,ik->i", rot.conj(), a, rot).real
    assert stats.ks_2samp(r1, r2).statistic < 2 / np.sqrt(n)


def test_samples_csv(tmp_path):
    path = tmp_path / "s.csv"
    samples_to_csv(path, np.array([[1 / 3, 2.0], [0.5, 1e-20]]), ["x", "y"])
    assert path.read_text().splitlines() == ["x,y", "0.333333333333,2", "0.5,1e-20"]
