import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from conftest import random_spectrum
from uncpdf.errors import DimMismatch, UnsupportedDimension
from uncpdf.haar import SamplerConfig, sample_statistics
from uncpdf.observables import Spectrum
from uncpdf.pdf_analytic import (
    d4_cells,
    d4_pieces,
    d4_profile,
    joint_exp_exp2_d4,
    joint_exp_exp2_qutrit,
    joint_exp_std_d4,
    joint_exp_std_qutrit,
    pdf_uncertainty_d4,
    pdf_uncertainty_qutrit,
    pivot_d4,
    support_regions,
)

QUTRIT = (1.0, 3.0, 9.0)
QUART = (1.0, 3.0, 9.0, 27.0)


def eps(h, x):
    return math.sqrt(h * h - x * x) if x <= h else 0.0


def quart_example(x):
    """Reference piecewise form of the d = 4 uncertainty density for (1, 3, 9, 27), one branch per interval."""
    e12, e23, e13, e34, e24, e14 = (eps(h, x) for h in (1, 3, 4, 9, 12, 13))
    if x <= 1:
        return x / 33696 * (9 * e12**3 + 13 * e23**3 - 12 * e13**3 + e34**3 - 4 * e24**3 + 3 * e14**3)
    if x <= 3:
        return x / 33696 * (13 * e23**3 - 12 * e13**3 + e34**3 - 4 * e24**3 + 3 * e14**3)
    if x <= 4:
        return x / 33696 * (-12 * e13**3 + e34**3 - 4 * e24**3 + 3 * e14**3)
    if x <= 9:
        return x / 33696 * (e34**3 - 4 * e24**3 + 3 * e14**3)
    if x <= 12:
        return x / 33696 * (-4 * e24**3 + 3 * e14**3)
    if x <= 13:
        return x / 11232 * e14**3
    return 0.0


def test_qutrit_exp_exp2_is_constant():
    f = joint_exp_exp2_qutrit(QUTRIT)
    # Gamma(3) / ((3 - 1)(9 - 1)(9 - 3))
    assert f(3.0, 9.0 + 1e-9) == pytest.approx(1 / 48)
    assert f(3.0, 9.0) == pytest.approx(1 / 48)
    assert f(3.0, 8.0) == 0.0
    assert f.total() == pytest.approx(1.0, abs=1e-6)


def test_qutrit_uncertainty_values():
    f = pdf_uncertainty_qutrit(QUTRIT)
    assert f(2.0) == pytest.approx(2 / 12 * (math.sqrt(12) - math.sqrt(5)), rel=1e-12)
    assert f(2.0) == pytest.approx(0.20467227293966075, rel=1e-12)
    assert f(4.5) == 0.0
    assert f.normalization() == pytest.approx(1.0, abs=1e-6)


def test_qutrit_exp_std_normalized():
    assert joint_exp_std_qutrit(QUTRIT).total() == pytest.approx(1.0, abs=1e-5)


def test_pivot():
    assert pivot_d4(QUART) == pytest.approx(3.6)


def test_quart_uncertainty_matches_worked_example():
    f = pdf_uncertainty_d4(QUART)
    xs = np.concatenate([np.linspace(0, 13, 521), [0.5, 2, 3.5, 6, 10, 12.5]])
    assert np.allclose(f(xs), [quart_example(x) for x in xs], rtol=1e-10, atol=1e-15)
    assert f(12.5) == pytest.approx(12.5 * eps(13, 12.5) ** 3 / 11232, rel=1e-12)
    assert f(13.0) == 0.0 and f(14.0) == 0.0


def test_quart_breakpoints():
    assert sorted(set(pdf_uncertainty_d4(QUART).breakpoints)) == [1, 3, 4, 9, 12, 13]


def test_quart_densities_normalized():
    assert pdf_uncertainty_d4(QUART).normalization() == pytest.approx(1.0, abs=1e-6)
    assert joint_exp_exp2_d4(QUART).total() == pytest.approx(1.0, abs=1e-5)
    assert joint_exp_std_d4(QUART).total() == pytest.approx(1.0, abs=1e-5)


def test_random_spectra_normalized(rng):
    for d, pdf in ((3, pdf_uncertainty_qutrit), (4, pdf_uncertainty_d4)):
        for _ in range(3):
            assert pdf(random_spectrum(rng, d)).normalization() == pytest.approx(1.0, abs=1e-6)


def test_independent_double_integral_of_quart_joint():
    f = joint_exp_exp2_d4(QUART)
    a = np.array(QUART)
    chords = [(i, j) for i in range(4) for j in range(i + 1, 4)]

    def column(r):
        # linear in s between chord values, so trapezoid over them is exact
        s = np.array(sorted((a[i] + a[j]) * r - a[i] * a[j] for i, j in chords))
        return float(integrate.trapezoid(f(np.full_like(s, r), s), s))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        total, _ = integrate.quad(column, a[0], a[-1], points=list(a[1:-1]) + [pivot_d4(a)], epsabs=1e-10)
    assert total == pytest.approx(1.0, abs=1e-5)


def _boundary_points(a, rng, per_edge=40):
    pts = []
    for cell in d4_cells(a):
        lo, hi = cell["r_range"]
        for pair in (cell["lower"], cell["upper"]):
            i, j = pair
            r = rng.uniform(lo, hi, per_edge)
            pts.append(np.column_stack([r, (a[i] + a[j]) * r - a[i] * a[j]]))
        for r0 in (lo, hi):
            (i, j), (k, m) = cell["lower"], cell["upper"]
            s_lo, s_hi = (a[i] + a[j]) * r0 - a[i] * a[j], (a[k] + a[m]) * r0 - a[k] * a[m]
            s = rng.uniform(min(s_lo, s_hi), max(s_lo, s_hi), per_edge // 2)
            pts.append(np.column_stack([np.full_like(s, r0), s]))
    return np.vstack(pts)


def test_quart_profile_continuous_across_cells(rng):
    a = np.array(random_spectrum(rng, 4, 0, 10, 0.5))
    pieces = d4_pieces(a)
    pts = _boundary_points(a, rng)
    assert pts.shape[0] >= 1000
    scale = (a[-1] - a[0]) ** 2
    worst = 0.0
    for r, s in pts:
        vals = []
        for cell in d4_cells(a):
            lo, hi = cell["r_range"]
            (i, j), (k, m) = cell["lower"], cell["upper"]
            s_lo = (a[i] + a[j]) * r - a[i] * a[j]
            s_hi = (a[k] + a[m]) * r - a[k] * a[m]
            if lo - 1e-12 <= r <= hi + 1e-12 and s_lo - 1e-9 * scale <= s <= s_hi + 1e-9 * scale:
                vals.append(float(pieces[cell["piece"]](r, s)))
        assert vals, (r, s)
        worst = max(worst, max(vals) - min(vals))
    assert worst < 1e-8 * scale


def test_quart_profile_is_lower_envelope_of_pieces(rng):
    a = np.array(random_spectrum(rng, 4, 0, 10, 0.5))
    region = support_regions(a)
    r = rng.uniform(a[0], a[-1], 20000)
    s = rng.uniform(a[0] ** 2, a[-1] ** 2, 20000)
    ok = region.contains_rs(r, s, 0.0)
    r, s = r[ok], s[ok]
    envelope = np.min([p(r, s) for p in d4_pieces(a).values()], axis=0)
    assert np.allclose(d4_profile(a, r, s), envelope, atol=1e-9 * (a[-1] - a[0]) ** 3)


@pytest.mark.parametrize("d", [3, 4])
def test_joint_marginal_equals_uncertainty_law(d, rng):
    a = random_spectrum(rng, d, 0, 10, 0.5)
    joint = joint_exp_std_qutrit(a) if d == 3 else joint_exp_std_d4(a)
    single = pdf_uncertainty_qutrit(a) if d == 3 else pdf_uncertainty_d4(a)
    knots = list(a) + ([pivot_d4(a)] if d == 4 else [])
    xs = np.linspace(0.02, 0.98, 20) * (a[-1] - a[0]) / 2
    for x in xs:
        pts = sorted(set(knots) | {r for i in range(d) for j in range(i + 1, d)
                                   for r in np.roots([1, -(a[i] + a[j]), a[i] * a[j] + x * x]).real
                                   if a[0] < r < a[-1]})
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            val, _ = integrate.quad(lambda r: float(joint(r, x)), a[0], a[-1], points=pts, limit=500, epsabs=1e-10)
        assert val == pytest.approx(single(x), abs=1e-4)


def test_support_examples():
    reg = support_regions(QUTRIT)
    assert reg.contains(3.0, 0.1)
    assert not reg.contains(3.0, 4.5)
    assert not reg.contains(2.0, 0.5)  # inside the lower half-disc over [1, 3]
    qubit = support_regions((-1.0, 1.0))
    assert qubit.contains(0.0, 1.0)
    assert not qubit.contains(0.0, 0.5)


@pytest.mark.parametrize("spec", [QUTRIT, QUART])
def test_samples_lie_in_support(spec):
    a = np.diag(spec)
    rx = sample_statistics([a, a], SamplerConfig(seed=13, dim=len(spec), n_samples=100_000), ["expectation", "std_dev"])
    assert np.all(support_regions(spec).contains_rx(rx[:, 0], rx[:, 1], 1e-9 * spec[-1] ** 2))


def test_wrong_dimension_rejected():
    with pytest.raises((DimMismatch, UnsupportedDimension, ValueError)):
        pdf_uncertainty_qutrit((1.0, 2.0, 3.0, 4.0))
    with pytest.raises((DimMismatch, UnsupportedDimension, ValueError)):
        joint_exp_exp2_d4((1.0, 2.0, 3.0))
