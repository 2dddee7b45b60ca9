"""
Matrix-valued fields: one m x m complex matrix per support point.

File format: a JSON array with one entry per point, each an m x m array of
[re, im] pairs.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .linalg import operator_norm
from ..core.measure import FieldLike, PointMeasure, field_values
from ..utils.io_utils import read_json, write_json
from config.constants import (
    ERROR_FIELD_LENGTH, ERROR_FIELD_MEASURE, ERROR_MATRIX_SIZE, ERROR_MEASURE_PARSE, MAX_MATRIX_SIZE,
)


@dataclass(frozen=True, eq=False)
class MatrixField:
    """Values of shape (N, m, m), complex."""

    values: np.ndarray
    measure_id: str

    @classmethod
    def on(cls, mu: PointMeasure, values: Union[np.ndarray, Sequence]) -> "MatrixField":
        """
        Raises:
            ValueError: If the shape does not fit mu, m exceeds MAX_MATRIX_SIZE or an entry is not finite
        """
        arr = np.array(values, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"{ERROR_MATRIX_SIZE}: expected (N, m, m), got {arr.shape}")
        if arr.shape[0] != mu.size:
            raise ValueError(f"{ERROR_FIELD_LENGTH}: {arr.shape[0]} != {mu.size}")
        if not 1 <= arr.shape[1] <= MAX_MATRIX_SIZE:
            raise ValueError(f"{ERROR_MATRIX_SIZE}: m = {arr.shape[1]} (max {MAX_MATRIX_SIZE})")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{ERROR_MEASURE_PARSE}: non-finite matrix entries")
        arr.setflags(write=False)
        return cls(arr, mu.measure_id)

    @classmethod
    def from_scalar(cls, mu: PointMeasure, f: FieldLike) -> "MatrixField":
        """The 1 x 1 matrix field of a scalar field."""
        return cls.on(mu, field_values(f, mu)[:, None, None])

    @classmethod
    def diagonal(cls, mu: PointMeasure, fields: Sequence[FieldLike]) -> "MatrixField":
        """diag(f_1, ..., f_m) at every point."""
        stacked = np.stack([field_values(f, mu) for f in fields], axis=1)
        values = np.zeros((mu.size, stacked.shape[1], stacked.shape[1]), dtype=complex)
        idx = np.arange(stacked.shape[1])
        values[:, idx, idx] = stacked
        return cls.on(mu, values)

    @classmethod
    def random_hermitian(cls, mu: PointMeasure, m: int, rng: np.random.Generator) -> "MatrixField":
        raw = rng.standard_normal((mu.size, m, m)) + 1j * rng.standard_normal((mu.size, m, m))
        return cls.on(mu, 0.5 * (raw + np.conj(np.swapaxes(raw, 1, 2))))

    @property
    def m(self) -> int:
        return int(self.values.shape[1])

    @property
    def size(self) -> int:
        return int(self.values.shape[0])

    def adjoint(self) -> "MatrixField":
        """f* pointwise."""
        arr = np.conj(np.swapaxes(self.values, 1, 2)).copy()
        arr.setflags(write=False)
        return MatrixField(arr, self.measure_id)

    def left_multiply(self, u: np.ndarray) -> "MatrixField":
        """The field u f for a constant matrix u."""
        arr = np.einsum("ab,ibc->iac", np.asarray(u, dtype=complex), self.values)
        arr.setflags(write=False)
        return MatrixField(arr, self.measure_id)

    def shifted(self, c: np.ndarray) -> "MatrixField":
        """The field f + c for a constant matrix c."""
        arr = self.values + np.asarray(c, dtype=complex)[None, :, :]
        arr.setflags(write=False)
        return MatrixField(arr, self.measure_id)

    def norm_inf(self) -> float:
        """||f||_A = max over points of the operator norm."""
        return float(np.max(operator_norm(self.values)))

    def check(self, mu: PointMeasure) -> None:
        if self.measure_id != mu.measure_id:
            raise ValueError(ERROR_FIELD_MEASURE)


def load_matrix_field(path: Union[str, Path], mu: PointMeasure) -> MatrixField:
    """
    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If the entries are not [re, im] pairs of a consistent shape
    """
    data = read_json(path)
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise ValueError(f"{ERROR_MEASURE_PARSE}: matrix field {path}: {e}")
    if arr.ndim != 4 or arr.shape[-1] != 2:
        raise ValueError(f"{ERROR_MEASURE_PARSE}: matrix field entries must be [re, im] pairs")
    return MatrixField.on(mu, arr[..., 0] + 1j * arr[..., 1])


def save_matrix_field(f: MatrixField, path: Union[str, Path]) -> None:
    pairs = np.stack([f.values.real, f.values.imag], axis=-1)
    write_json(Path(path), pairs.tolist())


def matrix_values(f: Union[MatrixField, np.ndarray], mu: Optional[PointMeasure] = None) -> np.ndarray:
    """Value array of a matrix field, checked against ``mu``."""
    if isinstance(f, MatrixField):
        if mu is not None:
            f.check(mu)
        return f.values
    arr = np.asarray(f, dtype=complex)
    if mu is not None and arr.shape[0] != mu.size:
        raise ValueError(f"{ERROR_FIELD_LENGTH}: {arr.shape[0]} != {mu.size}")
    return arr
