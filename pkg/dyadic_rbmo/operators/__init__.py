"""Discrete Calderón-Zygmund operators, maximal functions and decompositions."""

from .czd import CZDecomposition, Weak11Report, cz_decompose, weak11_report
from .discrete import DiscreteOperator, apply, l2_norm_estimate, spectral_norm
from .endpoint import EndpointTerms, endpoint_regions, endpoint_terms
from .maximal import maximal_centered, maximal_lattice

__all__ = [
    "DiscreteOperator",
    "apply",
    "l2_norm_estimate",
    "spectral_norm",
    "maximal_centered",
    "maximal_lattice",
    "CZDecomposition",
    "cz_decompose",
    "Weak11Report",
    "weak11_report",
    "EndpointTerms",
    "endpoint_regions",
    "endpoint_terms",
]
