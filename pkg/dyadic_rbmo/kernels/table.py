"""Custom kernels given as a dense matrix file."""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .base import Kernel, KernelSpec
from ..core.measure import PointMeasure
from ..utils.io_utils import read_json
from config.constants import (
    CSV_EXTENSION, DEFAULT_EPSILON, DEFAULT_LIPSCHITZ_GAMMA, ERROR_DIMENSION_MISMATCH,
    ERROR_FILE_NOT_FOUND, ERROR_MEASURE_PARSE,
)

logger = logging.getLogger(__name__)


class TableKernel(Kernel):
    """Kernel values k(x_i, x_j) read from a table aligned to the sorted measure."""

    def __init__(
        self,
        values: np.ndarray,
        degree: Optional[float] = None,
        source: Optional[str] = None,
        epsilon: float = DEFAULT_EPSILON,
        gamma: float = DEFAULT_LIPSCHITZ_GAMMA,
    ):
        super().__init__(epsilon, gamma)
        table = np.asarray(values, dtype=float)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError(f"{ERROR_MEASURE_PARSE}: kernel table must be square (got shape {table.shape})")
        if not np.all(np.isfinite(table)):
            raise ValueError(f"{ERROR_MEASURE_PARSE}: kernel table has non-finite entries")
        self.table = table
        self._degree = degree
        self.source = source

    @classmethod
    def from_file(cls, path: Union[str, Path], **kwargs) -> "TableKernel":
        """Load a JSON array of rows or a headerless CSV matrix."""
        file_path = Path(path)
        if not file_path.exists():
            raise FileNotFoundError(f"{ERROR_FILE_NOT_FOUND}: {path}")
        if file_path.suffix.lower() == CSV_EXTENSION:
            try:
                values = np.loadtxt(file_path, delimiter=",", ndmin=2)
            except ValueError as e:
                raise ValueError(f"{ERROR_MEASURE_PARSE}: {file_path.name}: {e}")
        else:
            values = np.asarray(read_json(file_path), dtype=float)
        return cls(values, source=str(file_path), **kwargs)

    @property
    def name(self) -> str:
        return "custom"

    @property
    def description(self) -> str:
        return "Dense kernel table" + (f" from {self.source}" if self.source else "")

    def degree(self, mu: PointMeasure) -> float:
        return float(self._degree) if self._degree is not None else mu.growth_degree

    def kernel_values(self, mu: PointMeasure) -> np.ndarray:
        if self.table.shape[0] != mu.size:
            raise ValueError(f"{ERROR_DIMENSION_MISMATCH}: table {self.table.shape[0]} vs measure {mu.size}")
        return self.table

    def spec(self, mu: PointMeasure) -> KernelSpec:
        return KernelSpec("custom", self.degree(mu), self.epsilon, self.gamma, source=self.source)
