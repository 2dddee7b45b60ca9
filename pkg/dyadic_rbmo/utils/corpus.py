"""
Bundled test measures and random field corpora.

Measures are addressed as ``builtin:<name>[:<size>]``; anything else is read
as a measure file.
"""

import logging
from typing import Callable, Dict, List, Tuple

import numpy as np

from ..core.measure import PointMeasure, ScalarField, load_measure
from ..matrixval.fields import MatrixField
from config.constants import (
    BUILTIN_PREFIX, CANTOR_DEPTH, COMB_BLOCK, COMB_THIN_FACTOR, DEFAULT_UNIFORM_SIZE, ERROR_UNKNOWN_MEASURE,
    GAUSSIAN_HALF_WIDTH, SPIKE_FACTOR,
)

logger = logging.getLogger(__name__)


def uniform_measure(size: int = DEFAULT_UNIFORM_SIZE) -> PointMeasure:
    """Grid i / (N - 1) on [0, 1] with mass 1 / N per point."""
    if size == 1:
        return PointMeasure.from_arrays([0.0], [1.0])
    return PointMeasure.from_arrays(np.linspace(0.0, 1.0, size), np.full(size, 1.0 / size))


def uniform2d_measure(size: int = DEFAULT_UNIFORM_SIZE) -> PointMeasure:
    """Square grid on [0, 1]^2 with side floor(sqrt(N)) and equal masses."""
    side = max(int(np.sqrt(size)), 1)
    axis = np.linspace(0.0, 1.0, side) if side > 1 else np.zeros(1)
    xs, ys = np.meshgrid(axis, axis, indexing="ij")
    points = np.column_stack([xs.ravel(), ys.ravel()])
    return PointMeasure.from_arrays(points, np.full(points.shape[0], 1.0 / points.shape[0]))


def cantor_measure(size: int = 2 ** CANTOR_DEPTH) -> PointMeasure:
    """
    Midpoints of the middle-thirds Cantor iterate with 2^depth intervals,
    natural weights 2^-depth and growth degree log 2 / log 3.
    """
    depth = int(round(np.log2(size)))
    if 2 ** depth != size:
        raise ValueError(f"{ERROR_UNKNOWN_MEASURE}: cantor size must be a power of 2 (got {size})")
    left = np.zeros(1)
    for level in range(1, depth + 1):
        left = np.concatenate([left, left + 2.0 / 3.0 ** level])
    length = 3.0 ** -depth
    return PointMeasure.from_arrays(left + length / 2.0, np.full(left.shape[0], 2.0 ** -depth),
                                    growth_degree=np.log(2.0) / np.log(3.0))


def gaussian_measure(size: int = DEFAULT_UNIFORM_SIZE) -> PointMeasure:
    """Standard Gaussian density sampled on a uniform grid over [-4, 4]."""
    x = np.linspace(-GAUSSIAN_HALF_WIDTH, GAUSSIAN_HALF_WIDTH, size)
    h = x[1] - x[0] if size > 1 else 1.0
    return PointMeasure.from_arrays(x, np.exp(-x ** 2 / 2.0) / np.sqrt(2.0 * np.pi) * h)


def spike_measure(size: int = DEFAULT_UNIFORM_SIZE + 1) -> PointMeasure:
    """Uniform grid with the middle point SPIKE_FACTOR times heavier."""
    weights = np.full(size, 1.0 / size)
    weights[size // 2] *= SPIKE_FACTOR
    return PointMeasure.from_arrays(np.linspace(0.0, 1.0, size), weights)


def comb_measure(size: int = DEFAULT_UNIFORM_SIZE) -> PointMeasure:
    """Uniform grid whose blocks of COMB_BLOCK points alternate between full and thin masses."""
    blocks = (np.arange(size) // COMB_BLOCK) % 2
    weights = np.where(blocks == 0, 1.0, COMB_THIN_FACTOR) / size
    return PointMeasure.from_arrays(np.linspace(0.0, 1.0, size), weights)


BUILTIN_MEASURES: Dict[str, Tuple[Callable[..., PointMeasure], str]] = {
    "uniform": (uniform_measure, "Uniform grid on [0, 1] (doubling)"),
    "uniform2d": (uniform2d_measure, "Uniform grid on [0, 1]^2 (doubling)"),
    "cantor": (cantor_measure, "Middle-thirds Cantor iterate, n = log 2 / log 3"),
    "gaussian": (gaussian_measure, "Discretized Gaussian on [-4, 4] (nondoubling tails)"),
    "spike": (spike_measure, "Uniform grid with one heavy point (nondoubling near the spike)"),
    "comb": (comb_measure, "Alternating full and thin blocks (nondoubling at block edges)"),
}


def resolve_measure(spec: str) -> PointMeasure:
    """
    Build a bundled measure or load a measure file.

    Args:
        spec: ``builtin:<name>[:<size>]`` or a path

    Returns:
        PointMeasure: the measure

    Raises:
        ValueError: If the builtin name or size is invalid
        FileNotFoundError: If the file does not exist
    """
    if not spec.startswith(BUILTIN_PREFIX):
        return load_measure(spec)
    parts = spec[len(BUILTIN_PREFIX):].split(":")
    name = parts[0]
    if name not in BUILTIN_MEASURES or len(parts) > 2:
        raise ValueError(f"{ERROR_UNKNOWN_MEASURE}: {spec} (available: {', '.join(BUILTIN_MEASURES)})")
    builder, _ = BUILTIN_MEASURES[name]
    if len(parts) == 1:
        return builder()
    try:
        size = int(parts[1])
    except ValueError:
        raise ValueError(f"{ERROR_UNKNOWN_MEASURE}: size must be an integer in {spec}")
    if size < 1:
        raise ValueError(f"{ERROR_UNKNOWN_MEASURE}: size must be positive in {spec}")
    logger.info("Building builtin measure %s with %d points", name, size)
    return builder(size)


def list_measures() -> List[Dict[str, str]]:
    return [{"name": f"{BUILTIN_PREFIX}{name}", "description": desc} for name, (_, desc) in BUILTIN_MEASURES.items()]


def random_fields(mu: PointMeasure, count: int, seed: int) -> List[ScalarField]:
    """``count`` fields with independent standard Gaussian values."""
    rng = np.random.default_rng(seed)
    return [ScalarField.on(mu, row) for row in rng.standard_normal((count, mu.size))]


def random_hermitian_fields(mu: PointMeasure, count: int, m: int, seed: int) -> List[MatrixField]:
    """``count`` random Hermitian m x m matrix fields."""
    rng = np.random.default_rng(seed)
    return [MatrixField.random_hermitian(mu, m, rng) for _ in range(count)]
