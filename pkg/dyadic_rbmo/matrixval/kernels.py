"""
Matrix kernels acting on matrix fields by left multiplication.

Two forms are supported: a scalar kernel times a constant matrix U, and a
full table of m x m matrices per support pair.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from .fields import MatrixField, matrix_values
from .linalg import operator_norm
from ..core.lattice import Lattice
from ..core.measure import PointMeasure
from ..kernels.base import Kernel, _pair_distances
from ..operators.discrete import DiscreteOperator, l2_norm_estimate, spectral_norm
from config.constants import DEFAULT_HORMANDER_DILATION, ERROR_DIMENSION_MISMATCH, ERROR_MATRIX_SIZE, MAX_MATRIX_SIZE

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MatrixKernel:
    """
    k(x_i, x_j) for i != j as m x m matrices.

    Either ``scalar`` (N, N) with ``factor`` (m, m) or ``table`` (N, N, m, m) is set.
    """

    measure_id: str
    weights: np.ndarray
    degree: float
    scalar: Optional[np.ndarray] = None
    factor: Optional[np.ndarray] = None
    table: Optional[np.ndarray] = None
    name: str = "matrix"

    @classmethod
    def from_scalar(cls, kernel: Kernel, mu: PointMeasure, factor: Optional[np.ndarray] = None) -> "MatrixKernel":
        """k(x, y) U for a scalar kernel k; U defaults to the 1 x 1 identity."""
        U = np.eye(1, dtype=complex) if factor is None else np.asarray(factor, dtype=complex)
        if U.ndim != 2 or U.shape[0] != U.shape[1] or not 1 <= U.shape[0] <= MAX_MATRIX_SIZE:
            raise ValueError(f"{ERROR_MATRIX_SIZE}: factor shape {U.shape}")
        return cls(mu.measure_id, mu.weights, kernel.degree(mu), scalar=kernel.matrix(mu), factor=U,
                   name=f"{kernel.name}*U")

    @classmethod
    def from_table(cls, mu: PointMeasure, table: np.ndarray, degree: Optional[float] = None) -> "MatrixKernel":
        """
        Raises:
            ValueError: If the table is not (N, N, m, m)
        """
        arr = np.array(table, dtype=complex)
        if arr.ndim != 4 or arr.shape[:2] != (mu.size, mu.size) or arr.shape[2] != arr.shape[3]:
            raise ValueError(f"{ERROR_MATRIX_SIZE}: table shape {arr.shape}")
        idx = np.arange(mu.size)
        arr[idx, idx] = 0.0
        return cls(mu.measure_id, mu.weights, mu.growth_degree if degree is None else float(degree),
                   table=arr, name="table")

    @property
    def m(self) -> int:
        return int(self.factor.shape[0] if self.table is None else self.table.shape[2])

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    def entries(self) -> np.ndarray:
        """The full (N, N, m, m) table."""
        if self.table is not None:
            return self.table
        return self.scalar[:, :, None, None] * self.factor[None, None, :, :]

    def pair_norms(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Operator norms ||k(x_r, x_c)|| on the (rows x cols) grid."""
        if self.table is None:
            return np.abs(self.scalar[np.ix_(rows, cols)]) * float(operator_norm(self.factor))
        return operator_norm(self.table[np.ix_(rows, cols)])

    def apply(self, f) -> np.ndarray:
        """(Tf)(x_i) = sum_j k(x_i, x_j) f(x_j) w_j, shape (N, m, m)."""
        values = matrix_values(f)
        if isinstance(f, MatrixField) and f.measure_id != self.measure_id:
            raise ValueError(f"{ERROR_DIMENSION_MISMATCH}: field and kernel live on different measures")
        if values.shape[0] != self.size or values.shape[1] != self.m:
            raise ValueError(f"{ERROR_DIMENSION_MISMATCH}: field {values.shape} vs kernel N={self.size}, m={self.m}")
        weighted = values * self.weights[:, None, None]
        if self.table is None:
            summed = np.einsum("ij,jbc->ibc", self.scalar, weighted)
            return np.einsum("ab,ibc->iac", self.factor, summed)
        return np.einsum("ijab,jbc->iac", self.table, weighted)

    def size_constant(self, mu: PointMeasure) -> float:
        """max over pairs i != j of ||k(x_i, x_j)|| |x_i - x_j|^n."""
        if mu.size == 1:
            return 0.0
        idx = np.arange(mu.size)
        norms = self.pair_norms(idx, idx)
        return float(np.max(norms * _pair_distances(mu) ** self.degree))

    def block_operator_norm(self) -> float:
        """Norm of T on L2(mu) tensor C^m with the Euclidean norm, exact."""
        root = np.sqrt(self.weights)
        if self.table is None:
            scalar = DiscreteOperator(self.scalar * self.weights[None, :], None, self.measure_id, self.weights)
            return l2_norm_estimate(scalar) * float(operator_norm(self.factor))
        N, m = self.size, self.m
        blocks = self.table * (root[:, None] * root[None, :])[:, :, None, None]
        return spectral_norm(blocks.transpose(0, 2, 1, 3).reshape(N * m, N * m))


def hormander_report(
    K: MatrixKernel,
    lattice: Lattice,
    dilation: float = DEFAULT_HORMANDER_DILATION,
) -> Dict[str, Any]:
    """
    Operator Hörmander sums over the lattice balls.

    For every cube Q with ball B_Q = B(x_Q, r_Q):
    max over z in B_Q of sum over x outside dilation * B_Q of
    ||k(z, x) - k(x_Q, x)|| mu(x).
    """
    mu = lattice.measure
    sums: List[Dict[str, Any]] = []
    best = 0.0
    witness = None
    for cube in lattice.cubes:
        inner = np.flatnonzero(lattice.ball_mask(cube.id, 1.0))
        outer = np.flatnonzero(~lattice.ball_mask(cube.id, dilation))
        if inner.shape[0] == 0 or outer.shape[0] == 0:
            continue
        if K.table is None:
            diff = np.abs(K.scalar[np.ix_(inner, outer)] - K.scalar[cube.center_index, outer][None, :])
            norms = diff * float(operator_norm(K.factor))
        else:
            diff = K.table[np.ix_(inner, outer)] - K.table[cube.center_index, outer][None, :, :, :]
            norms = operator_norm(diff)
        value = float(np.max(norms @ mu.weights[outer]))
        sums.append({"cube": cube.id, "value": value})
        if value > best:
            best, witness = value, cube.id
    logger.info("Hormander sums over %d cubes, max %.6g", len(sums), best)
    return {
        "dilation": dilation,
        "cubes": len(sums),
        "max_sum": best,
        "witness": witness,
        "finite": bool(np.isfinite(best)),
    }
