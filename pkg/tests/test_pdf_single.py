import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from conftest import SX, SZ, random_spectrum
from uncpdf.errors import DegenerateSpectrum, DimTooSmall, UnsupportedDimension
from uncpdf.observables import QubitObservable, Spectrum
from uncpdf.pdf_analytic import (
    cdf_uncertainty_qubit,
    delta_roots,
    heaviside,
    pdf_expectation,
    pdf_uncertainty,
    pdf_uncertainty_qubit,
    quad_roots,
)


def scipy_total(pdf, lo, hi, points=()):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        val, _ = integrate.quad(lambda t: float(pdf(t)), lo, hi, points=list(points) or None, limit=400, epsabs=1e-12)
    return val


def test_quad_roots_examples():
    assert quad_roots(-1, 1, 0) == (-1.0, 1.0)
    assert quad_roots(-1, 1, 1) == (0.0, 0.0)
    assert quad_roots(0, 2, 0.6) == pytest.approx((0.2, 1.8))
    assert quad_roots(0, 2, 1.01) is None


@settings(max_examples=50, deadline=None)
@given(lo=st.floats(-10, 10), width=st.floats(0.1, 10), frac=st.floats(0, 1))
def test_quad_roots_solve_the_quadratic(lo, width, frac):
    hi = lo + width
    x = frac * (hi - lo) / 2 * (1 - 1e-12)
    r1, r2 = quad_roots(lo, hi, x)
    for r in (r1, r2):
        assert (r - lo) * (hi - r) == pytest.approx(x * x, abs=1e-9 * (1 + width**2))
    eps = 1e-12 * (1 + abs(lo) + abs(hi))
    assert lo - eps <= r1 <= r2 <= hi + eps


def test_delta_roots_weights():
    # delta(r^2 - 4) = (delta(r-2) + delta(r+2)) / 4
    assert delta_roots(lambda r: 2 * r, [2.0, -2.0]) == [(2.0, 0.25), (-2.0, 0.25)]


def test_heaviside_closed_at_zero():
    assert heaviside(0.0) == 1.0 and heaviside(-1e-300) == 0.0


def test_expectation_box_for_qubit():
    f = pdf_expectation(Spectrum([0.0, 1.0]))
    assert np.allclose(f(np.linspace(0.01, 0.99, 7)), 1.0)
    assert f(1.5) == 0.0 and f(-0.5) == 0.0
    g = pdf_expectation(SZ.spectrum())
    assert np.allclose(g(np.linspace(-0.9, 0.9, 5)), 0.5)


def test_expectation_qutrit_value():
    # 2 * (r - 1) / ((1 - 3)(1 - 9)) at r = 3, the other terms vanish
    assert pdf_expectation(Spectrum([1, 3, 9]))(3.0) == pytest.approx(0.25, abs=1e-14)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_expectation_normalized(d, rng):
    for _ in range(3):
        lam = random_spectrum(rng, d)
        f = pdf_expectation(Spectrum(lam))
        assert f.normalization() == pytest.approx(1.0, abs=1e-8)
        assert scipy_total(f, lam[0], lam[-1], lam[1:-1]) == pytest.approx(1.0, abs=1e-8)


def test_expectation_rejects_bad_spectra():
    with pytest.raises(DegenerateSpectrum):
        pdf_expectation(Spectrum([1, 1, 2]))
    with pytest.raises(DimTooSmall):
        pdf_expectation(Spectrum([1.0]))


def test_qubit_uncertainty_values():
    f = pdf_uncertainty_qubit(SX)
    assert f(0.0) == 0.0
    assert f(1 / math.sqrt(2)) == pytest.approx(1.0, rel=1e-12)
    assert math.isinf(f(1.0))
    assert f(1.2) == 0.0


def test_qubit_uncertainty_cdf_matches_closed_form():
    q = QubitObservable(0.3, [0.3, 0.4, 1.2])
    f = pdf_uncertainty_qubit(q)
    xs = np.linspace(0, 1.3, 41)
    assert np.allclose(f.cdf(xs), cdf_uncertainty_qubit(1.3, xs), atol=1e-9)
    assert f.normalization() == pytest.approx(1.0, abs=1e-9)


def test_qubit_uncertainty_from_spectrum():
    f = pdf_uncertainty_qubit(Spectrum([-2.0, 1.0]))
    assert f.upper == pytest.approx(1.5)
    assert f(1.0) == pytest.approx(1.0 / (1.5 * math.sqrt(1.5**2 - 1)))


def test_uncertainty_dispatch():
    assert pdf_uncertainty(Spectrum([-1, 1])).upper == pytest.approx(1.0)
    with pytest.raises(UnsupportedDimension):
        pdf_uncertainty(Spectrum([1, 2, 3, 4, 5]))


@settings(max_examples=20, deadline=None)
@given(d=st.integers(2, 4), seed=st.integers(0, 2**32 - 1), c=st.floats(-5, 5))
def test_shift_covariance(d, seed, c):
    lam = random_spectrum(np.random.default_rng(seed), d)
    spec = Spectrum(lam)
    r = np.linspace(lam[0] - 1, lam[-1] + 1, 23)
    assert np.allclose(pdf_expectation(spec.shifted(c))(r + c), pdf_expectation(spec)(r), atol=1e-9)
    x = np.linspace(0, (lam[-1] - lam[0]) / 2 * 0.999, 17)
    assert np.allclose(pdf_uncertainty(spec.shifted(c))(x), pdf_uncertainty(spec)(x), rtol=1e-7, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(d=st.integers(2, 4), seed=st.integers(0, 2**32 - 1), k=st.floats(0.1, 10))
def test_scale_covariance(d, seed, k):
    lam = random_spectrum(np.random.default_rng(seed), d)
    spec = Spectrum(lam)
    x = np.linspace(0, (lam[-1] - lam[0]) / 2 * 0.999, 17)
    lhs = pdf_uncertainty(spec.scaled(k))(k * x)
    rhs = pdf_uncertainty(spec)(x) / k
    assert np.allclose(lhs, rhs, rtol=1e-7, atol=1e-9)
