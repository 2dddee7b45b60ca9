"""
Base kernel interface.

A kernel k(x, y) is evaluated on every pair of support points of a measure.
The diagonal and every pair closer than the truncation epsilon are set to 0.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from ..core.measure import PointMeasure
from config.constants import DEFAULT_EPSILON, DEFAULT_LIPSCHITZ_GAMMA, DEFAULT_LIPSCHITZ_SAMPLES, DEFAULT_SEED


@dataclass(frozen=True)
class KernelSpec:
    """Reporting view of a kernel bound to a measure."""

    kind: str
    degree: float
    epsilon: float
    gamma: float
    component: Optional[int] = None
    source: Optional[str] = None


@dataclass(frozen=True)
class KernelConditions:
    """Measured size and Lipschitz constants of a kernel on a measure."""

    size_constant: float
    lipschitz_ratio: float
    lipschitz_samples: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "size_constant": self.size_constant,
            "lipschitz_ratio": self.lipschitz_ratio,
            "lipschitz_samples": self.lipschitz_samples,
        }


class Kernel(ABC):
    """
    Abstract base class for Calderón-Zygmund kernels.

    Subclasses provide raw values on support pairs; truncation and the
    zero diagonal are applied here.
    """

    def __init__(self, epsilon: float = DEFAULT_EPSILON, gamma: float = DEFAULT_LIPSCHITZ_GAMMA):
        if epsilon < 0:
            raise ValueError(f"Truncation epsilon must be >= 0 (got {epsilon})")
        self.epsilon = float(epsilon)
        self.gamma = float(gamma)

    @property
    @abstractmethod
    def name(self) -> str:
        """Kernel name as accepted by ``--kernel``."""
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        """Human-readable description of the kernel."""
        pass

    @property
    def antisymmetric(self) -> bool:
        """Whether k(x, y) = -k(y, x)."""
        return False

    @property
    def exact_size_bound(self) -> bool:
        """Whether |k(x, y)| <= 1 / |x - y|^n holds by formula."""
        return False

    @abstractmethod
    def degree(self, mu: PointMeasure) -> float:
        """Homogeneity exponent n of the size condition on ``mu``."""
        pass

    @abstractmethod
    def kernel_values(self, mu: PointMeasure) -> np.ndarray:
        """
        Raw (N, N) kernel values on support pairs.

        Diagonal entries are ignored and may hold anything finite.
        """
        pass

    def matrix(self, mu: PointMeasure) -> np.ndarray:
        """Kernel values with the zero diagonal and epsilon truncation applied."""
        values = np.array(self.kernel_values(mu), dtype=float)
        cut = mu.distances < self.epsilon
        np.fill_diagonal(cut, True)
        values[cut] = 0.0
        return values

    def spec(self, mu: PointMeasure) -> KernelSpec:
        return KernelSpec(self.name, self.degree(mu), self.epsilon, self.gamma)


def _pair_distances(mu: PointMeasure) -> np.ndarray:
    # distances with ones on the diagonal, safe to divide by
    dist = np.array(mu.distances)
    np.fill_diagonal(dist, 1.0)
    return dist


def kernel_conditions(
    kernel: Kernel,
    mu: PointMeasure,
    seed: int = DEFAULT_SEED,
    samples: int = DEFAULT_LIPSCHITZ_SAMPLES,
) -> KernelConditions:
    """
    Measure the size constant and a sampled Lipschitz ratio.

    Size: max over pairs of |k(x, y)| |x - y|^n. Lipschitz: max over sampled
    triples with 0 < |x - x'| <= |x - y| / 2 of
    |k(x, y) - k(x', y)| |x - y|^(n + gamma) / |x - x'|^gamma.

    Args:
        kernel: kernel to measure
        mu: measure providing the support pairs
        seed: seed for the triple sampler
        samples: number of (x, y) pairs to draw

    Returns:
        KernelConditions: the two constants and the number of usable triples
    """
    n = kernel.degree(mu)
    values = kernel.matrix(mu)
    dist = _pair_distances(mu)
    size = float(np.max(np.abs(values) * dist ** n)) if mu.size > 1 else 0.0

    rng = np.random.default_rng(seed)
    gamma = kernel.gamma
    best = 0.0
    used = 0
    if mu.size > 2:
        for _ in range(samples):
            x, y = rng.choice(mu.size, size=2, replace=False)
            reach = mu.distances[x, y] / 2.0
            near = np.flatnonzero((mu.distances[x] > 0) & (mu.distances[x] <= reach))
            near = near[near != y]
            if near.shape[0] == 0:
                continue
            xp = int(rng.choice(near))
            used += 1
            ratio = abs(values[x, y] - values[xp, y]) * mu.distances[x, y] ** (n + gamma) / mu.distances[x, xp] ** gamma
            best = max(best, float(ratio))
    return KernelConditions(size, best, used)
