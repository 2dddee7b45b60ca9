"""Medians, sparse families, sparse domination and A₂ weights."""

from .decomposition import (
    Domination, SparseCertificate, SparseFamily, check_sparse_family, dominate, sparse_decompose,
)
from .median import lambda_oscillation, weighted_median
from .weights import (
    Weight, a2_characteristic, a2_sweep, step_weight, weighted_norm_experiment, weighted_operator_norm,
)

__all__ = [
    "weighted_median",
    "lambda_oscillation",
    "SparseFamily",
    "SparseCertificate",
    "Domination",
    "sparse_decompose",
    "check_sparse_family",
    "dominate",
    "Weight",
    "a2_characteristic",
    "weighted_operator_norm",
    "weighted_norm_experiment",
    "step_weight",
    "a2_sweep",
]
