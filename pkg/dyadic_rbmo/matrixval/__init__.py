"""Operator-valued RBMO_Σ over m x m matrix fields."""

from .endpoint import MatrixEndpointTerms, endpoint_corpus_report, theorem_d_terms
from .fields import MatrixField, load_matrix_field, save_matrix_field
from .kernels import MatrixKernel, hormander_report
from .linalg import hermitian_eigvalsh, jacobi_eigvalsh, operator_norm
from .norms import (
    column_oscillations, column_row_report, kadison_schwarz_check, rbmo_sigma_c_norm, rbmo_sigma_c_report,
    rbmo_sigma_norm_twosided,
)

__all__ = [
    "MatrixField",
    "load_matrix_field",
    "save_matrix_field",
    "MatrixKernel",
    "hormander_report",
    "hermitian_eigvalsh",
    "jacobi_eigvalsh",
    "operator_norm",
    "column_oscillations",
    "rbmo_sigma_c_norm",
    "rbmo_sigma_c_report",
    "rbmo_sigma_norm_twosided",
    "kadison_schwarz_check",
    "column_row_report",
    "MatrixEndpointTerms",
    "theorem_d_terms",
    "endpoint_corpus_report",
]
