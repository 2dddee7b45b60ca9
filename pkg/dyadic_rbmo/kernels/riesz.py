"""Riesz transform kernels."""

import numpy as np

from .base import Kernel, KernelSpec, _pair_distances
from ..core.measure import PointMeasure
from config.constants import DEFAULT_EPSILON, DEFAULT_LIPSCHITZ_GAMMA


class RieszKernel(Kernel):
    """
    Component j of the n-dimensional Riesz kernel,
    k(x, y) = (x_j - y_j) / |x - y|^(n + 1), with n the growth degree of the
    measure.
    """

    def __init__(self, component: int = 0, epsilon: float = DEFAULT_EPSILON, gamma: float = DEFAULT_LIPSCHITZ_GAMMA):
        super().__init__(epsilon, gamma)
        if component < 0:
            raise ValueError(f"Riesz component must be >= 0 (got {component})")
        self.component = int(component)

    @property
    def name(self) -> str:
        return f"riesz:{self.component}"

    @property
    def description(self) -> str:
        return "Riesz kernel (x_j - y_j) / |x - y|^(n + 1)"

    @property
    def antisymmetric(self) -> bool:
        return True

    @property
    def exact_size_bound(self) -> bool:
        return True

    def degree(self, mu: PointMeasure) -> float:
        return mu.growth_degree

    def kernel_values(self, mu: PointMeasure) -> np.ndarray:
        if self.component >= mu.dim:
            raise ValueError(f"Riesz component {self.component} out of range for d = {mu.dim}")
        diff = mu.points[:, None, self.component] - mu.points[None, :, self.component]
        return diff / _pair_distances(mu) ** (mu.growth_degree + 1.0)

    def spec(self, mu: PointMeasure) -> KernelSpec:
        return KernelSpec("riesz", self.degree(mu), self.epsilon, self.gamma, component=self.component)
