"""
Discretized integral operators Tf(x_i) = sum_j k(x_i, x_j) f(x_j) w_j.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.measure import FieldLike, PointMeasure, field_values
from ..kernels.base import Kernel, KernelSpec
from config.constants import (
    ERROR_DIMENSION_MISMATCH, POWER_ITERATION_BLOCK, POWER_ITERATION_MAX_STEPS,
    POWER_ITERATION_TOLERANCE,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Weighted kernel matrix of an operator on one measure."""

    matrix: np.ndarray
    kernel_spec: Optional[KernelSpec]
    measure_id: str
    weights: np.ndarray

    @classmethod
    def from_kernel(cls, kernel: Kernel, mu: PointMeasure) -> "DiscreteOperator":
        weighted = kernel.matrix(mu) * mu.weights[None, :]
        weighted.setflags(write=False)
        return cls(weighted, kernel.spec(mu), mu.measure_id, mu.weights)

    @classmethod
    def zero(cls, mu: PointMeasure) -> "DiscreteOperator":
        return cls(np.zeros((mu.size, mu.size)), None, mu.measure_id, mu.weights)

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def kernel_matrix(self) -> np.ndarray:
        """k(x_i, x_j) without the weights."""
        return self.matrix / self.weights[None, :]


def apply(T: DiscreteOperator, f: FieldLike) -> np.ndarray:
    """
    Tf as a matrix-vector product (the diagonal is zero).

    Raises:
        ValueError: If the field length or measure does not match
    """
    if hasattr(f, "measure_id") and f.measure_id != T.measure_id:
        raise ValueError(f"{ERROR_DIMENSION_MISMATCH}: field and operator live on different measures")
    values = field_values(f)
    if values.shape[0] != T.size:
        raise ValueError(f"{ERROR_DIMENSION_MISMATCH}: field {values.shape[0]} vs operator {T.size}")
    return T.matrix @ values


def spectral_norm(C: np.ndarray) -> float:
    """
    Largest singular value of ``C``.

    Block power iteration on C^H C from a fixed start, with a Rayleigh-Ritz
    step per iteration. Falls back to a dense SVD when the iteration does not
    settle within the step cap.
    """
    C = np.asarray(C)
    if C.size == 0 or not np.any(C):
        return 0.0
    rows, cols = C.shape
    block = min(POWER_ITERATION_BLOCK, cols)
    if cols <= block:
        return float(np.linalg.norm(C, 2))

    rng = np.random.default_rng(0)
    start = rng.standard_normal((cols, block))
    if np.iscomplexobj(C):
        start = start + 1j * rng.standard_normal((cols, block))
    basis, _ = np.linalg.qr(start)
    previous = 0.0
    for _ in range(POWER_ITERATION_MAX_STEPS):
        image = C @ basis
        gram = image.conj().T @ image
        top = float(np.sqrt(max(np.linalg.eigvalsh(gram)[-1], 0.0)))
        if top > 0 and abs(top - previous) <= POWER_ITERATION_TOLERANCE * top:
            return top
        previous = top
        basis, _ = np.linalg.qr(C.conj().T @ image)
    logger.warning("Power iteration did not converge after %d steps; using dense SVD", POWER_ITERATION_MAX_STEPS)
    return float(np.linalg.norm(C, 2))


def l2_norm_estimate(T: DiscreteOperator) -> float:
    """||T||_{L2(mu) -> L2(mu)}, the norm of sqrt(w_i) k_ij sqrt(w_j)."""
    root = np.sqrt(T.weights)
    return spectral_norm(T.matrix * root[:, None] / root[None, :])
