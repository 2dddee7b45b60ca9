"""Cauchy kernel on the line and (real part) in the plane."""

import numpy as np

from .base import Kernel, _pair_distances
from ..core.measure import PointMeasure


class CauchyKernel(Kernel):
    """
    k(x, y) = 1 / (x - y) for d = 1 and Re 1 / (z - w) = (x1 - y1) / |x - y|^2
    for d = 2. The size condition has exponent n = 1 in both cases.
    """

    @property
    def name(self) -> str:
        return "cauchy"

    @property
    def description(self) -> str:
        return "Cauchy kernel 1/(x - y) (real part in the plane), n = 1"

    @property
    def antisymmetric(self) -> bool:
        return True

    @property
    def exact_size_bound(self) -> bool:
        return True

    def degree(self, mu: PointMeasure) -> float:
        return 1.0

    def kernel_values(self, mu: PointMeasure) -> np.ndarray:
        if mu.dim not in (1, 2):
            raise ValueError(f"The Cauchy kernel needs d = 1 or d = 2 (got d = {mu.dim})")
        diff = mu.points[:, None, 0] - mu.points[None, :, 0]
        dist = _pair_distances(mu)
        return diff / dist ** 2
