"""Data behind the support plots and uncertainty-density curves for the reference spectra."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pdf_analytic import Pdf1D, SupportRegion, pdf_uncertainty_d4, pdf_uncertainty_qutrit, support_regions

QUTRIT_SPECTRUM = (1.0, 3.0, 9.0)
QUART_SPECTRUM = (1.0, 3.0, 9.0, 27.0)
FIGURES = ("fig1a", "fig1b", "fig2a", "fig2b")


@dataclass
class FigureData:
    name: str
    spectrum: tuple[float, ...]
    header: tuple[str, ...]
    rows: list
    meta: dict = field(default_factory=dict)
    region: SupportRegion | None = None
    pdf: Pdf1D | None = None


def _region_figure(name: str, spectrum, n_per_arc: int) -> FigureData:
    region = support_regions(spectrum)
    curves = region.boundary(n_per_arc)
    a = region.eigenvalues
    labels = ["outer"] + [f"lower_{k + 1}{k + 2}" for k in range(a.size - 1)]
    rows = [(lab, r, x) for lab, poly in zip(labels, curves) for r, x in poly]
    meta = {
        "figure": name,
        "spectrum": list(spectrum),
        "plane": "(<A>, Delta A)",
        "curves": labels,
        "arcs": [
            {"curve": lab, "center": 0.5 * float(a[i] + a[j]), "radius": 0.5 * float(a[j] - a[i])}
            for lab, (i, j) in zip(labels, [(0, a.size - 1)] + [(k, k + 1) for k in range(a.size - 1)])
        ],
    }
    return FigureData(name, tuple(spectrum), ("curve", "r", "x"), rows, meta, region=region)


def _pdf_figure(name: str, spectrum, pdf: Pdf1D, n: int) -> FigureData:
    xs, fs = pdf.grid(pdf.lower, pdf.upper, n)
    meta = {
        "figure": name,
        "spectrum": list(spectrum),
        "support": [pdf.lower, pdf.upper],
        "breakpoints": sorted(set(pdf.breakpoints)),
    }
    return FigureData(name, tuple(spectrum), ("x", "f"), list(zip(xs, fs)), meta, pdf=pdf)


def figure_data(name: str, n: int = 2000) -> FigureData:
    """``n`` is the curve resolution: points per arc for supports, grid size for densities."""
    if name == "fig1a":
        return _region_figure(name, QUTRIT_SPECTRUM, n)
    if name == "fig1b":
        return _region_figure(name, QUART_SPECTRUM, n)
    if name == "fig2a":
        return _pdf_figure(name, QUTRIT_SPECTRUM, pdf_uncertainty_qutrit(QUTRIT_SPECTRUM), n)
    if name == "fig2b":
        return _pdf_figure(name, QUART_SPECTRUM, pdf_uncertainty_d4(QUART_SPECTRUM), n)
    raise KeyError(f"unknown figure {name!r}; choose from {FIGURES}")


def halo_points(region: SupportRegion, n: int, offset: float = 1e-3) -> np.ndarray:
    """``n`` points just outside the (<A>, Delta A) support.

    Outer-arc points are pushed ``offset`` away from the arc centre, lower-arc
    points ``offset`` towards their centre (into the excluded half-discs).
    """
    a = region.eigenvalues
    arcs = [(0, a.size - 1, +1.0)] + [(k, k + 1, -1.0) for k in range(a.size - 1)]
    per = int(np.ceil(n / len(arcs)))
    out = []
    for i, j, sign in arcs:
        c, rho = 0.5 * (a[i] + a[j]), 0.5 * (a[j] - a[i])
        theta = np.linspace(0.0, np.pi, per + 2)[1:-1]
        rad = rho + sign * offset
        out.append(np.column_stack([c + rad * np.cos(theta), rad * np.sin(theta)]))
    return np.vstack(out)[:n]
