"""Closed-form densities of Haar-random pure-state statistics."""

from .core import (
    Density2D,
    JointDistribution,
    LineSingular,
    Pdf1D,
    SupportRegion,
    SurfaceSingular,
    describe,
    heaviside,
)
from .qubit import (
    UncertaintySurface,
    collinear_uncertainties_qubit2,
    joint_expectations_qubit2,
    joint_expectations_qubit3,
    joint_uncertainties_qubit2,
    omega2,
    omega3,
    pair_region_slack,
    pair_slack_for,
    uncertainty_surface_qubit3,
)
from .qudit import (
    d4_cells,
    d4_pieces,
    d4_profile,
    joint_exp_exp2_d4,
    joint_exp_exp2_qutrit,
    joint_exp_std_d4,
    joint_exp_std_qutrit,
    pdf_uncertainty,
    pdf_uncertainty_d4,
    pdf_uncertainty_qutrit,
    pivot_d4,
    support_regions,
    vandermonde,
)
from .single import cdf_uncertainty_qubit, delta_roots, pdf_expectation, pdf_uncertainty_qubit, quad_roots

__all__ = [name for name in dir() if not name.startswith("_")]
