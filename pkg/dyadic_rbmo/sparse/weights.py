"""
A₂ weights over the canonical doubling balls and weighted L₂ experiments.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from ..core.measure import PointMeasure, doubling_mask
from ..operators.discrete import DiscreteOperator, l2_norm_estimate, spectral_norm
from config.constants import (
    DEFAULT_A2_ALPHA, DEFAULT_STEP_LEVELS, ERROR_A2_PARAMETERS, ERROR_FIELD_LENGTH,
    ERROR_FIELD_MEASURE, ERROR_NO_DOUBLING_BALL, ERROR_NONPOSITIVE_WEIGHT_FIELD,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Weight:
    """Positive density w on the support of one measure."""

    values: np.ndarray
    measure_id: str
    characteristic_cache: Dict[str, float] = field(default_factory=dict, compare=False)

    @classmethod
    def on(cls, mu: PointMeasure, values: Union[np.ndarray, Sequence[float]]) -> "Weight":
        """
        Raises:
            ValueError: If the length is wrong or a value is not positive
        """
        arr = np.array(values, dtype=float).ravel()
        if arr.shape[0] != mu.size:
            raise ValueError(f"{ERROR_FIELD_LENGTH}: {arr.shape[0]} != {mu.size}")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise ValueError(ERROR_NONPOSITIVE_WEIGHT_FIELD)
        arr.setflags(write=False)
        return cls(arr, mu.measure_id)

    def scaled(self, c: float) -> "Weight":
        if not c > 0:
            raise ValueError(ERROR_NONPOSITIVE_WEIGHT_FIELD)
        arr = self.values * float(c)
        arr.setflags(write=False)
        return Weight(arr, self.measure_id)


def _check(mu: PointMeasure, w: Weight) -> None:
    if w.measure_id != mu.measure_id:
        raise ValueError(ERROR_FIELD_MEASURE)


def a2_characteristic(
    mu: PointMeasure,
    w: Weight,
    alpha_p: float = DEFAULT_A2_ALPHA,
    beta_p: Optional[float] = None,
) -> float:
    """
    [w]_{A2} = sup (w(B)/mu(B)) (w^{-1}(B)/mu(B)) over the (alpha', beta')-doubling
    balls of the canonical family.

    Args:
        mu: the measure
        w: positive weight on mu
        alpha_p: dilation alpha'
        beta_p: doubling constant beta' (defaults to 2^(d+1))

    Raises:
        ValueError: If beta' <= alpha'^d or no canonical ball is doubling
    """
    _check(mu, w)
    beta_p = 2.0 ** (mu.dim + 1) if beta_p is None else float(beta_p)
    if not beta_p > alpha_p ** mu.dim:
        raise ValueError(f"{ERROR_A2_PARAMETERS}: alpha'={alpha_p}, beta'={beta_p}, d={mu.dim}")
    key = f"{alpha_p:g}:{beta_p:g}"
    if key in w.characteristic_cache:
        return w.characteristic_cache[key]

    family = mu.canonical_balls(alpha_p)
    centers, counts = family.centers, family.counts
    masses = mu.cumulative_masses[centers, counts - 1]
    dilated = np.concatenate([mu.mass_at(i, alpha_p * family.radii[centers == i]) for i in range(mu.size)])
    doubling = doubling_mask(masses, dilated, beta_p)
    if not doubling.any():
        raise ValueError(f"{ERROR_NO_DOUBLING_BALL} (alpha'={alpha_p:g}, beta'={beta_p:g})")

    # the same prefix sums for mu, w mu and w^{-1} mu keep w == 1 exact
    order = mu.sorted_order
    upper = np.cumsum(w.values[order] * mu.weights[order], axis=1)[centers, counts - 1]
    lower = np.cumsum(mu.weights[order] / w.values[order], axis=1)[centers, counts - 1]
    products = (upper / masses) * (lower / masses)
    best = float(np.max(products[doubling]))
    w.characteristic_cache[key] = best
    return best


def weighted_operator_norm(T: DiscreteOperator, mu: PointMeasure, w: Weight) -> float:
    """||T||_{L2(w dmu) -> L2(w dmu)} as the norm of D M D^{-1}, D = diag(sqrt(w mu))."""
    _check(mu, w)
    root = np.sqrt(w.values * mu.weights)
    return spectral_norm(T.matrix * root[:, None] / root[None, :])


def weighted_norm_experiment(
    T: DiscreteOperator,
    mu: PointMeasure,
    w: Weight,
    alpha_p: float = DEFAULT_A2_ALPHA,
    beta_p: Optional[float] = None,
) -> Dict[str, Any]:
    """op_norm, [w]_{A2}, op_norm / [w]^2 and op_norm / [w]."""
    op_norm = weighted_operator_norm(T, mu, w)
    a2 = a2_characteristic(mu, w, alpha_p, beta_p)
    return {
        "op_norm": op_norm,
        "characteristic": a2,
        "ratio2": op_norm / a2 ** 2,
        "ratio1": op_norm / a2,
        "unweighted_norm": l2_norm_estimate(T),
    }


def step_weight(mu: PointMeasure, c: float) -> Weight:
    """1 on the first half of the support points, c on the second half."""
    values = np.ones(mu.size)
    values[mu.size // 2:] = float(c)
    return Weight.on(mu, values)


def a2_sweep(
    T: DiscreteOperator,
    mu: PointMeasure,
    levels: Sequence[float] = DEFAULT_STEP_LEVELS,
    alpha_p: float = DEFAULT_A2_ALPHA,
    beta_p: Optional[float] = None,
) -> List[Dict[str, float]]:
    """Weighted norm experiment for the step weights with the given levels."""
    rows = []
    for level in levels:
        result = weighted_norm_experiment(T, mu, step_weight(mu, level), alpha_p, beta_p)
        rows.append({
            "level": float(level),
            "characteristic": result["characteristic"],
            "op_norm": result["op_norm"],
            "ratio2": result["ratio2"],
            "ratio1": result["ratio1"],
        })
        logger.info("Step weight %g: [w]_A2 = %.6g, ratio2 = %.6g", level, result["characteristic"], result["ratio2"])
    return rows
