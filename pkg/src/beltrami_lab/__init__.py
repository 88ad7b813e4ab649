"""Pseudo-spectral laboratory for the planar Beltrami equation."""

from .beltrami import (
    BeltramiSolution,
    Dilatation,
    inverse_jacobian_weight,
    invert_map,
    jacobian_power_at,
    principal_solution,
    resolvent,
    resolvent_domain,
    sigma_field,
)
from .domains import BoundaryCurve, DomainSpec, bp_norm, dini_character, domain_mask
from .errors import BeltramiLabError
from .grid import ComplexField, PeriodicGrid, d_z, d_zbar, read_field, write_field
from .kernels import BACKEND
from .norms import NormSpec, besov_boundary_norm, dini_norm, lp_norm, sobolev_norm
from .operators import DomainMask, beurling, cauchy, compress_beurling
from .weights import ApReport, CubeFamily, ap_characteristic, moser_certificate, rh_characteristic

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ApReport", "BeltramiLabError", "BeltramiSolution", "BoundaryCurve", "ComplexField", "CubeFamily",
    "Dilatation", "DomainMask", "DomainSpec", "NormSpec", "PeriodicGrid", "ap_characteristic", "besov_boundary_norm",
    "beurling", "bp_norm", "cauchy", "compress_beurling", "d_z", "d_zbar", "dini_character", "dini_norm",
    "domain_mask", "inverse_jacobian_weight", "invert_map", "jacobian_power_at", "lp_norm", "moser_certificate",
    "principal_solution", "read_field", "resolvent", "resolvent_domain", "rh_characteristic", "sigma_field",
    "sobolev_norm", "write_field",
]
