"""
Operator-valued RBMO_Σ norms, the Kadison-Schwarz check and the column/row
boundedness of matrix kernels.
"""

import logging
from typing import Any, Dict, Sequence, Union

import numpy as np

from .fields import MatrixField, matrix_values
from .kernels import MatrixKernel
from .linalg import hermitian_eigvalsh, lambda_max
from ..core.filtration import Filtration
from ..core.measure import PointMeasure
from ..core.validator import InvariantLevel, InvariantReport
from ..spaces.norms import NormReport
from config.constants import KADISON_SCHWARZ_TOLERANCE

logger = logging.getLogger(__name__)

MatrixLike = Union[MatrixField, np.ndarray]


def _adjoint(values: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(values, -1, -2))


def matrix_average(values: np.ndarray, weights: np.ndarray, members: np.ndarray) -> np.ndarray:
    """⨍ f dmu over the given support indices."""
    w = weights[members]
    return np.einsum("i,iab->ab", w, values[members]) / w.sum()


def column_square_average(values: np.ndarray, weights: np.ndarray, members: np.ndarray) -> np.ndarray:
    """⨍ |f|^2 dmu = ⨍ f* f dmu over the given support indices."""
    g = values[members]
    w = weights[members]
    return np.einsum("i,iba,ibc->ac", w, np.conj(g), g) / w.sum()


def column_oscillations(F: Filtration, f: MatrixLike) -> Dict[int, float]:
    """||⨍_Q |f - <f>_Q̂|^2 dmu||^(1/2) for every atom Q."""
    mu = F.measure
    values = matrix_values(f, mu)
    atoms = F.atoms
    averages = []
    for atom in atoms:
        predecessor = F.sigma_parent.get(atom, F.root)
        center = matrix_average(values, mu.weights, F.lattice.cube(predecessor).members)
        averages.append(column_square_average(values - center[None, :, :], mu.weights, F.lattice.cube(atom).members))
    top = lambda_max(np.stack(averages))
    return {atom: float(np.sqrt(max(value, 0.0))) for atom, value in zip(atoms, top)}


def rbmo_sigma_c_report(F: Filtration, f: MatrixLike) -> NormReport:
    oscillations = column_oscillations(F, f)
    atom = max(oscillations, key=lambda a: (oscillations[a], -a))
    return NormReport(oscillations[atom], {"atom": atom, "level": F.level_of[atom]}, "rbmo_sigma_c")


def rbmo_sigma_c_norm(F: Filtration, f: MatrixLike) -> float:
    """
    Column norm sup_Q ||⨍_Q |f - <f>_Q̂|^2 dmu||^(1/2).

    At m = 1 this is the scalar RBMO_Σ norm with p = 2.
    """
    return rbmo_sigma_c_report(F, f).norm_value


def rbmo_sigma_norm_twosided(F: Filtration, f: MatrixLike) -> float:
    """max of the column norms of f and f*."""
    values = matrix_values(f, F.measure)
    return max(rbmo_sigma_c_norm(F, values), rbmo_sigma_c_norm(F, _adjoint(values)))


def kadison_schwarz_check(F: Filtration, f: MatrixLike) -> InvariantReport:
    """
    Smallest eigenvalue of <|f|^2>_Q - |<f>_Q|^2 over every atom Q.

    The gap is asserted to be >= -KADISON_SCHWARZ_TOLERANCE * ||f||_A^2.
    """
    mu = F.measure
    values = matrix_values(f, mu)
    gaps = []
    for atom in F.atoms:
        members = F.lattice.cube(atom).members
        mean = matrix_average(values, mu.weights, members)
        gaps.append(column_square_average(values, mu.weights, members) - _adjoint(mean) @ mean)
    smallest = hermitian_eigvalsh(np.stack(gaps))[:, 0]
    position = int(np.argmin(smallest))
    scale = float(np.max(lambda_max(_adjoint(values) @ values)))
    threshold = -KADISON_SCHWARZ_TOLERANCE * max(scale, 1.0)

    report = InvariantReport("kadison_schwarz", metadata={"atoms": len(F.atoms), "m": int(values.shape[1])})
    report.add(
        "psd_gap",
        InvariantLevel.ASSERTED,
        bool(smallest[position] >= threshold),
        float(smallest[position]),
        {"atom": F.atoms[position], "scale": scale},
    )
    return report


def column_row_report(
    K: MatrixKernel,
    mu: PointMeasure,
    fields: Sequence[MatrixLike],
) -> Dict[str, Any]:
    """
    Boundedness of K on L∞(M; L2^c(mu)) and L∞(M; L2^r(mu)).

    The column constant is the exact block operator norm; the row constant is
    the largest ratio ||Kf||_r / ||f||_r over ``fields``.
    """
    column = K.block_operator_norm()
    w = mu.weights
    best = 0.0
    witness = None
    for index, f in enumerate(fields):
        values = matrix_values(f, mu)
        row_norm = float(np.sqrt(max(lambda_max(np.einsum("i,iab,icb->ac", w, values, np.conj(values))), 0.0)))
        if row_norm == 0:
            continue
        image = K.apply(values)
        image_norm = float(np.sqrt(max(lambda_max(np.einsum("i,iab,icb->ac", w, image, np.conj(image))), 0.0)))
        ratio = image_norm / row_norm
        if ratio > best:
            best, witness = ratio, index
    return {"column_norm": column, "row_ratio": best, "row_witness": witness, "row_samples": len(fields)}
