import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SX, SZ, haar_unitary, random_spectrum
from uncpdf.errors import DegenerateSpectrum, DimMismatch, DimTooSmall, SingularGram
from uncpdf.haar import SamplerConfig, sample_array
from uncpdf.observables import (
    HermitianObservable,
    PureState,
    QubitObservable,
    Spectrum,
    expectation,
    gram,
    max_variance,
    max_variance_state,
    rank_classify,
    spectrum_of,
    std_dev,
)


def test_spectrum_of_diagonal():
    assert np.allclose(spectrum_of(np.diag([9.0, 1.0, 3.0])).values, [1, 3, 9])


def test_spectrum_of_qubit():
    assert np.allclose(spectrum_of(SZ).values, [-1, 1])
    q = QubitObservable(0.5, [0.3, 0.4, 1.2])
    assert np.allclose(spectrum_of(q).values, [0.5 - 1.3, 0.5 + 1.3])
    assert np.allclose(spectrum_of(q.to_hermitian()).values, [0.5 - 1.3, 0.5 + 1.3])


def test_expectation_examples():
    up = PureState([1, 0])
    assert expectation(SZ, up) == pytest.approx(1.0)
    assert expectation(SX, up) == pytest.approx(0.0)
    psi = PureState.normalized([1, 1, 1])
    assert expectation(np.diag([1.0, 3.0, 9.0]), psi) == pytest.approx(13 / 3)


def test_std_dev_examples():
    assert std_dev(SZ, PureState([0, 1])) == 0.0
    assert std_dev(SZ, PureState.normalized([1, 1])) == pytest.approx(1.0)
    assert std_dev(np.diag([1.0, 3.0, 9.0]), PureState.normalized([1, 0, 1])) == pytest.approx(4.0)


def test_max_variance_examples():
    assert max_variance(Spectrum([-1, 1])) == 1.0
    assert max_variance(Spectrum([1, 3, 9])) == 16.0
    with pytest.raises(DimTooSmall):
        max_variance(Spectrum([2.0]))


def test_max_variance_state_attains_bound(rng):
    u = haar_unitary(rng, 4)
    a = u @ np.diag([-1.0, 0.5, 2.0, 7.0]) @ u.conj().T
    psi = max_variance_state(a)
    assert std_dev(a, psi) ** 2 == pytest.approx(max_variance(Spectrum([-1, 0.5, 2, 7])), rel=1e-12)


def test_state_dimension_mismatch():
    with pytest.raises(DimMismatch):
        expectation(SZ, PureState.normalized([1, 1, 1]))


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        HermitianObservable(np.array([[0, 1], [0, 0]], dtype=complex))


def test_simple_spectrum_checks():
    assert Spectrum([1, 3, 9]).simple
    assert not Spectrum([1, 1, 9]).simple
    with pytest.raises(DegenerateSpectrum):
        Spectrum([1, 1 + 1e-12, 9]).require_simple()


def test_gram_examples():
    g = gram([[1, 0, 0], [0, 0, 1]])
    assert np.allclose(g.entries, np.eye(2)) and g.det == pytest.approx(1.0) and g.numerical_rank == 2
    g = gram([[1, 0, 0], [2, 0, 0]])
    assert g.det == pytest.approx(0.0) and g.numerical_rank == 1
    with pytest.raises(SingularGram):
        g.inverse()
    g = gram(np.eye(3))
    assert np.allclose(g.entries, np.eye(3)) and g.numerical_rank == 3


def test_rank_classify_examples(rng):
    assert rank_classify(gram(np.eye(3))) == 3
    g = gram([[1, 0, 0], [1, 0, 0]])
    assert np.allclose(g.entries, [[1, 1], [1, 1]]) and rank_classify(g) == 1
    a, b = rng.normal(size=3), rng.normal(size=3)
    assert rank_classify(gram([a, b, a + b])) == 2


@settings(max_examples=30, deadline=None)
@given(d=st.integers(2, 6), seed=st.integers(0, 2**32 - 1))
def test_spectrum_is_unitarily_invariant(d, seed):
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=d) * 3
    u = haar_unitary(rng, d)
    got = spectrum_of(u @ np.diag(vals) @ u.conj().T).values
    assert np.allclose(got, np.sort(vals), atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(d=st.integers(2, 6), seed=st.integers(0, 2**32 - 1))
def test_variance_identity(d, seed):
    rng = np.random.default_rng(seed)
    u = haar_unitary(rng, d)
    a = u @ np.diag(rng.normal(size=d)) @ u.conj().T
    psi = PureState.normalized(rng.normal(size=d) + 1j * rng.normal(size=d))
    second = expectation(a @ a, psi)
    assert std_dev(a, psi) ** 2 + expectation(a, psi) ** 2 == pytest.approx(second, abs=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_std_dev_bounded_by_max_variance(d, rng):
    vals = random_spectrum(rng, d)
    u = haar_unitary(rng, d)
    a = u @ np.diag(vals) @ u.conj().T
    psi = sample_array(SamplerConfig(seed=d, dim=d, n_samples=100_000))
    mv = psi @ a.T
    mean = np.einsum("ij,ij->i", psi.conj(), mv).real
    sd = np.linalg.norm(mv - mean[:, None] * psi, axis=1)
    assert sd.min() >= 0.0
    assert sd.max() <= np.sqrt(max_variance(Spectrum(vals))) + 1e-12


@settings(max_examples=30, deadline=None)
@given(k=st.integers(2, 3), seed=st.integers(0, 2**32 - 1))
def test_gram_permutation_covariance(k, seed):
    rng = np.random.default_rng(seed)
    vecs = rng.normal(size=(k, 3))
    perm = rng.permutation(k)
    g, gp = gram(vecs), gram(vecs[perm])
    assert np.allclose(gp.entries, g.entries[np.ix_(perm, perm)])
    assert gp.numerical_rank == g.numerical_rank


def test_qubit_roundtrip_through_matrix(rng):
    q = QubitObservable(rng.normal(), rng.normal(size=3))
    back = QubitObservable.from_matrix(q.matrix)
    assert back.a0 == pytest.approx(q.a0) and np.allclose(back.a, q.a)


def test_bloch_state_expectations(rng):
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    psi = PureState.from_bloch(n)
    got = [expectation(QubitObservable(0, e), psi) for e in np.eye(3)]
    assert np.allclose(got, n, atol=1e-12)
