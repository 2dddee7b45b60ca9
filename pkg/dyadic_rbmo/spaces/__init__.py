"""Function spaces over the doubling filtration: RBMO_Σ, Tolsa RBMO and H¹_Σ."""

from .atomic import AtomicBlock, BlockCheck, block_constant_report, greedy_atomic_block, validate_atomic_block
from .john_nirenberg import JohnNirenbergReport, john_nirenberg_report, p_equivalence_report
from .norms import (
    NormReport, duality_report, h1_sigma_norm, inclusion_ratio, norm_bundle, rbmo_sigma_norm,
    rbmo_tolsa_norm, square_function,
)
from .tolsa import TolsaEvaluator

__all__ = [
    "NormReport",
    "rbmo_sigma_norm",
    "rbmo_tolsa_norm",
    "inclusion_ratio",
    "h1_sigma_norm",
    "square_function",
    "duality_report",
    "norm_bundle",
    "TolsaEvaluator",
    "AtomicBlock",
    "BlockCheck",
    "validate_atomic_block",
    "greedy_atomic_block",
    "block_constant_report",
    "JohnNirenbergReport",
    "john_nirenberg_report",
    "p_equivalence_report",
]
