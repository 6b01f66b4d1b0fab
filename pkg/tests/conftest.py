import numpy as np
import pytest

from uncpdf.observables import QubitObservable

SX = QubitObservable(0.0, [1.0, 0.0, 0.0])
SY = QubitObservable(0.0, [0.0, 1.0, 0.0])
SZ = QubitObservable(0.0, [0.0, 0.0, 1.0])


def random_spectrum(rng, d, low=-5.0, high=5.0, min_gap=0.2):
    """Sorted spectrum whose consecutive gaps are at least ``min_gap``."""
    while True:
        v = np.sort(rng.uniform(low, high, d))
        if d == 1 or np.min(np.diff(v)) >= min_gap:
            return v


def random_qubit(rng, scale=1.5):
    return QubitObservable(rng.normal(), rng.normal(size=3) * scale)


def haar_unitary(rng, d):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
