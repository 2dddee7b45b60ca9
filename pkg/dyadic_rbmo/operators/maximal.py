"""Centered and lattice maximal operators."""

from typing import Optional

import numpy as np

from ..core.lattice import Lattice
from ..core.measure import FieldLike, PointMeasure, field_values
from config.constants import BALL_TOLERANCE, CENTERED_MAXIMAL_DILATION, LATTICE_MAXIMAL_DILATION


def maximal_centered(mu: PointMeasure, f: FieldLike) -> np.ndarray:
    """
    M^c f(x) = sup_r mu(B(x, 5r))^-1 int_{B(x, r)} |f| dmu.

    The numerator only jumps at the distances from x, where the ratio is
    largest on each step, so the sup is a max over those distances (r -> 0
    gives |f(x)|).
    """
    values = np.abs(field_values(f, mu))
    result = np.empty(mu.size)
    for x in range(mu.size):
        order = mu.sorted_order[x]
        row = mu.sorted_distances[x]
        numerators = np.cumsum(values[order] * mu.weights[order])
        denominators = mu.mass_at(x, CENTERED_MAXIMAL_DILATION * row)
        # closed balls: use the last index of each tie group
        ends = np.searchsorted(row, row * (1.0 + BALL_TOLERANCE), side="right") - 1
        result[x] = float(np.max(numerators[ends] / denominators))
    return result


def maximal_lattice(lattice: Lattice, f: FieldLike, alpha: Optional[float] = None) -> np.ndarray:
    """
    M_D f(x) = sup over cubes Q containing x of
    mu(alpha B_Q)^-1 int_{56 B_Q} |f| dmu.
    """
    mu = lattice.measure
    alpha = lattice.params.alpha if alpha is None else alpha
    weighted = np.abs(field_values(f, mu)) * mu.weights
    result = np.zeros(mu.size)
    for cube in lattice.cubes:
        numerator = float(weighted[lattice.ball_mask(cube.id, LATTICE_MAXIMAL_DILATION)].sum())
        value = numerator / lattice.ball_mass(cube.id, alpha)
        np.maximum.at(result, cube.members, value)
    return result
