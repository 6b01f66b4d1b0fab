"""Monte Carlo checks of the closed-form densities against Haar samples.

Every check returns a :class:`VerificationReport`.  A report passes when its
metric is below threshold and every attached sub-report passes.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import WrongVariant
from .haar import SamplerConfig, histogram, sample_statistics
from .observables import QubitObservable, Spectrum, as_matrix
from .pdf_analytic import (
    Density2D,
    LineSingular,
    Pdf1D,
    SurfaceSingular,
    joint_exp_exp2_d4,
    joint_exp_exp2_qutrit,
    joint_exp_std_d4,
    joint_exp_std_qutrit,
    joint_expectations_qubit2,
    joint_expectations_qubit3,
    joint_uncertainties_qubit2,
    pdf_expectation,
    pdf_uncertainty_d4,
    pdf_uncertainty_qubit,
    pdf_uncertainty_qutrit,
)

N_1D = 10**6
N_2D = 4 * 10**6
N_SINGULAR = 10**5
BINS_2D = 100
TV_BASE = 0.02
SLACK_THRESHOLD = 1e-9


@dataclass
class VerificationReport:
    test_name: str
    n_samples: int
    metric: str
    value: float
    threshold: float
    passed: bool
    seed: int
    runtime_seconds: float
    details: dict = field(default_factory=dict)
    sub_reports: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["sub_reports"] = [r.to_dict() for r in self.sub_reports]
        for key in ("value", "threshold"):
            if not math.isfinite(out[key]):
                out[key] = str(out[key])
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.test_name}: {self.metric}={self.value:.3g} (threshold {self.threshold:.3g}, n={self.n_samples})"


def _report(name, n, metric, value, threshold, seed, started, details=None, subs=()) -> VerificationReport:
    subs = list(subs)
    passed = bool(value < threshold) and all(r.passed for r in subs)
    return VerificationReport(
        test_name=name, n_samples=int(n), metric=metric, value=float(value), threshold=float(threshold),
        passed=passed, seed=int(seed), runtime_seconds=time.perf_counter() - started,
        details=details or {}, sub_reports=subs,
    )


@dataclass(frozen=True)
class SamplerSpec:
    """Which per-state statistic of which observables to sample; one column per observable."""

    observables: tuple
    which: Union[str, tuple[str, ...]] = "expectation"
    n_workers: int = 1

    @property
    def dim(self) -> int:
        return as_matrix(self.observables[0]).shape[0]

    def sample(self, n: int, seed: int) -> np.ndarray:
        cfg = SamplerConfig(seed=seed, dim=self.dim, n_samples=n, n_workers=self.n_workers)
        return sample_statistics(self.observables, cfg, self.which)


def ks_distance(cdf: Callable, samples: np.ndarray) -> float:
    """Exact two-sided KS statistic of sorted samples against a continuous CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def verify_pdf_1d(
    pdf: Pdf1D, spec: SamplerSpec, n: int = N_1D, seed: int = 0,
    threshold: Optional[float] = None, name: Optional[str] = None, samples: Optional[np.ndarray] = None,
) -> VerificationReport:
    started = time.perf_counter()
    if samples is None:
        samples = spec.sample(n, seed)[:, 0]
    n = samples.size
    thr = 3.0 / math.sqrt(n) if threshold is None else threshold
    ks = ks_distance(pdf.cdf, samples)
    return _report(name or f"ks: {pdf.label}", n, "ks", ks, thr, seed, started,
                   {"support": [list(iv) for iv in pdf.support]})


def tv_threshold(n: int, bins: int) -> float:
    """0.02 at n = 4e6 with 100 x 100 bins, scaled with the binomial noise floor."""
    return max(TV_BASE, TV_BASE * math.sqrt((bins * bins / 1e4) * (N_2D / n)))


def _outside_samples(density: Density2D, pts: np.ndarray, du: float, dv: float) -> int:
    """Samples with no support point within one bin width (checked on a 5 x 5 offset grid)."""
    bad = ~np.asarray(density.contains(pts[:, 0], pts[:, 1], 1e-9), dtype=bool)
    if not np.any(bad):
        return 0
    off = np.linspace(-1.0, 1.0, 5)
    pu = pts[bad, 0][:, None, None] + du * off[None, :, None]
    pv = pts[bad, 1][:, None, None] + dv * off[None, None, :]
    pu, pv = np.broadcast_arrays(pu, pv)
    hit = np.asarray(density.contains(pu, pv, 0.0), dtype=bool).reshape(pu.shape[0], -1)
    return int(np.sum(~hit.any(axis=1)))


def _snap_to_box(samples: np.ndarray, bbox, rel: float = 1e-9) -> np.ndarray:
    """Pull samples that miss the closed box by rounding error back onto its edge."""
    pts = np.array(samples, dtype=float, copy=True)
    for k, (lo, hi) in enumerate(bbox):
        band = rel * max(1.0, hi - lo)
        col = pts[:, k]
        col[(col < lo) & (col >= lo - band)] = lo
        col[(col > hi) & (col <= hi + band)] = hi
    return pts


def verify_joint_2d(
    density: Density2D, spec: SamplerSpec, n: int = N_2D, bins: int = BINS_2D, seed: int = 0,
    threshold: Optional[float] = None, name: Optional[str] = None, samples: Optional[np.ndarray] = None,
) -> VerificationReport:
    """Total variation between binned sample mass and the integrated density per bin.

    A support sub-report counts samples lying more than one bin width
    outside the analytic support, plus samples outside the bounding box.
    """
    if not isinstance(density, Density2D):
        raise WrongVariant(f"verify_joint_2d needs a Density2D, got {type(density).__name__}")
    started = time.perf_counter()
    if samples is None:
        samples = spec.sample(n, seed)[:, :2]
    n = samples.shape[0]
    (u0, u1), (v0, v1) = density.bbox
    ue = np.linspace(u0, u1, bins + 1)
    ve = np.linspace(v0, v1, bins + 1)
    pts = _snap_to_box(samples, density.bbox)
    h = histogram(pts, (ue, ve))
    analytic = density.cell_masses(ue, ve)
    tv = 0.5 * float(np.abs(h.counts / n - analytic).sum())
    thr = tv_threshold(n, bins) if threshold is None else threshold
    outside = _outside_samples(density, pts, ue[1] - ue[0], ve[1] - ve[0]) + h.overflow
    support = _report(
        f"support: {density.label}", n, "outside_samples", outside, 1, seed, started,
        {"overflow": h.overflow},
    )
    return _report(
        name or f"tv: {density.label}", n, "tv", tv, thr, seed, started,
        {"bins": bins, "analytic_mass": float(analytic.sum())}, [support],
    )


def verify_singular(
    dist, spec: SamplerSpec, n: int = N_SINGULAR, seed: int = 0,
    threshold: float = SLACK_THRESHOLD, name: Optional[str] = None, samples: Optional[np.ndarray] = None,
) -> VerificationReport:
    """Largest constraint violation over samples, with a profile check along the constraint.

    Surface: the first coordinate is uniform on ``a0 +- |a|`` (uniform sphere
    measure projected on an axis).  Line: the free coordinates follow the
    attached profile.
    """
    if not isinstance(dist, (LineSingular, SurfaceSingular)):
        raise WrongVariant(f"verify_singular needs a singular distribution, got {type(dist).__name__}")
    started = time.perf_counter()
    if samples is None:
        samples = spec.sample(n, seed)
    n = samples.shape[0]
    slack = float(np.max(dist.slack(samples)))
    subs = []
    if isinstance(dist, SurfaceSingular):
        a = math.sqrt(dist.gram.entries[0, 0])
        c = float(dist.center[0])
        profile = pdf_expectation(Spectrum([c - a * dist.scale, c + a * dist.scale]))
        subs.append(verify_pdf_1d(profile, spec, seed=seed, samples=samples[:, 0], name="profile: first coordinate"))
    elif isinstance(dist.profile, Pdf1D):
        col = samples[:, dist.basis[0]]
        subs.append(verify_pdf_1d(dist.profile, spec, seed=seed, samples=col, name=f"profile: {dist.profile.label}"))
    else:
        cols = samples[:, list(dist.basis)]
        bins = max(10, min(BINS_2D, int(math.sqrt(n) / 10)))
        subs.append(verify_joint_2d(dist.profile, spec, seed=seed, samples=cols, bins=bins,
                                    name=f"profile: {dist.profile.label}"))
    return _report(name or f"slack: {dist.label}", n, "max_slack", slack, threshold, seed, started,
                   {"variant": dist.variant}, subs)


# canonical suite

_PAULI_X = QubitObservable(0.0, [1.0, 0.0, 0.0])
_PAULI_Y = QubitObservable(0.0, [0.0, 1.0, 0.0])
_PAULI_Z = QubitObservable(0.0, [0.0, 0.0, 1.0])
_QUTRIT = (1.0, 3.0, 9.0)
_QUART = (1.0, 3.0, 9.0, 27.0)


def _diag(values: Sequence[float]) -> np.ndarray:
    return np.diag(np.asarray(values, dtype=float))


def _check(kind: str, build: Callable, observables: Sequence, which) -> Callable:
    spec = SamplerSpec(tuple(observables), which if isinstance(which, str) else tuple(which))

    def run(
        seed: int = 0, n: Optional[int] = None, name: str = "", n_workers: int = 1, impostor: bool = False
    ) -> VerificationReport:
        dist = build()
        if impostor:
            # negative control: same check against a support-doubled density
            dist = dist.impostor()
            name = f"{name} (impostor)" if name else ""
        sampler = replace(spec, n_workers=n_workers)
        if kind == "1d":
            return verify_pdf_1d(dist, sampler, n or N_1D, seed, name=name)
        if kind == "2d":
            return verify_joint_2d(dist, sampler, n or N_2D, seed=seed, name=name)
        return verify_singular(dist, sampler, n or N_SINGULAR, seed, name=name)

    return run


SUITE: dict[str, Callable] = {
    "expectation_qubit": _check("1d", lambda: pdf_expectation(_PAULI_Z.spectrum()), [_PAULI_Z], "expectation"),
    "expectation_d3": _check("1d", lambda: pdf_expectation(_QUTRIT), [_diag(_QUTRIT)], "expectation"),
    "expectation_d4": _check("1d", lambda: pdf_expectation(_QUART), [_diag(_QUART)], "expectation"),
    "uncertainty_qubit": _check("1d", lambda: pdf_uncertainty_qubit(_PAULI_X), [_PAULI_X], "std_dev"),
    "uncertainty_d3": _check("1d", lambda: pdf_uncertainty_qutrit(_QUTRIT), [_diag(_QUTRIT)], "std_dev"),
    "uncertainty_d4": _check("1d", lambda: pdf_uncertainty_d4(_QUART), [_diag(_QUART)], "std_dev"),
    "joint_expectations_qubit_pair": _check(
        "2d", lambda: joint_expectations_qubit2(_PAULI_X, _PAULI_Z), [_PAULI_X, _PAULI_Z], "expectation"),
    "joint_uncertainties_qubit_pair": _check(
        "2d", lambda: joint_uncertainties_qubit2(_PAULI_X, _PAULI_Z), [_PAULI_X, _PAULI_Z], "std_dev"),
    "exp_exp2_d3": _check(
        "2d", lambda: joint_exp_exp2_qutrit(_QUTRIT), [_diag(_QUTRIT)] * 2, ("expectation", "second_moment")),
    "exp_std_d3": _check(
        "2d", lambda: joint_exp_std_qutrit(_QUTRIT), [_diag(_QUTRIT)] * 2, ("expectation", "std_dev")),
    "exp_exp2_d4": _check(
        "2d", lambda: joint_exp_exp2_d4(_QUART), [_diag(_QUART)] * 2, ("expectation", "second_moment")),
    "exp_std_d4": _check(
        "2d", lambda: joint_exp_std_d4(_QUART), [_diag(_QUART)] * 2, ("expectation", "std_dev")),
    "surface_pauli_triple": _check(
        "singular", lambda: joint_expectations_qubit3(_PAULI_X, _PAULI_Y, _PAULI_Z),
        [_PAULI_X, _PAULI_Y, _PAULI_Z], "expectation"),
    "line_parallel_pair": _check(
        "singular", lambda: joint_expectations_qubit2(_PAULI_X, QubitObservable(0.0, [2.0, 0.0, 0.0])),
        [_PAULI_X, QubitObservable(0.0, [2.0, 0.0, 0.0])], "expectation"),
}


def run_suite(
    suite: str = "default", seed: int = 0, n: Optional[int] = None, n_workers: int = 1, impostor: bool = False
) -> list[VerificationReport]:
    """Run every check (``"default"``) or a single named one; ``KeyError`` for unknown names.

    ``impostor=True`` runs the negative controls instead.
    """
    if suite == "default":
        names = list(SUITE)
    elif suite in SUITE:
        names = [suite]
    else:
        raise KeyError(f"unknown suite {suite!r}; choose 'default' or one of {sorted(SUITE)}")
    return [SUITE[name](seed=seed, n=n, name=name, n_workers=n_workers, impostor=impostor) for name in names]
