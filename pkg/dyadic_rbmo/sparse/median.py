"""Weighted medians and lambda-oscillations on index sets."""

from typing import Sequence, Union

import numpy as np

from ..core.measure import FieldLike, PointMeasure, field_values
from config.constants import ERROR_EMPTY_INDEX_SET, ERROR_LAMBDA_RANGE, MASS_TOLERANCE

IndexSet = Union[np.ndarray, Sequence[int]]


def _restricted(mu: PointMeasure, S: IndexSet, f: FieldLike):
    idx = np.asarray(S, dtype=int).ravel()
    if idx.shape[0] == 0:
        raise ValueError(ERROR_EMPTY_INDEX_SET)
    values = field_values(f, mu)[idx]
    weights = mu.weights[idx]
    order = np.argsort(values, kind="stable")
    return values[order], weights[order]


def weighted_median(mu: PointMeasure, S: IndexSet, f: FieldLike) -> float:
    """
    Lower weighted median of f on S: the smallest value m of f(S) with
    mu(S ∩ {f > m}) <= mu(S) / 2 and mu(S ∩ {f < m}) <= mu(S) / 2.

    Raises:
        ValueError: If S is empty
    """
    values, weights = _restricted(mu, S, f)
    total = float(weights.sum())
    half = 0.5 * total * (1.0 + MASS_TOLERANCE)
    distinct, first = np.unique(values, return_index=True)
    cumulative = np.concatenate([[0.0], np.cumsum(weights)])
    last = np.concatenate([first[1:], [values.shape[0]]])
    below = cumulative[first]
    above = total - cumulative[last]
    admissible = (below <= half) & (above <= half)
    return float(distinct[int(np.argmax(admissible))])


def lambda_oscillation(mu: PointMeasure, S: IndexSet, f: FieldLike, lam: float) -> float:
    """
    omega_lam(f; S): the smallest spread max f - min f over subsets of S of
    mass at least lam mu(S).

    An optimal subset is a run of consecutive values, so a sliding window
    over the sorted values finds it.

    Raises:
        ValueError: If S is empty or lam is outside (0, 1]
    """
    if not 0 < lam <= 1:
        raise ValueError(f"{ERROR_LAMBDA_RANGE}: {lam} (expected 0 < lambda <= 1)")
    values, weights = _restricted(mu, S, f)
    cumulative = np.concatenate([[0.0], np.cumsum(weights)])
    target = lam * cumulative[-1] * (1.0 - MASS_TOLERANCE)
    # for every start i, the first end j whose window i..j reaches the target mass
    ends = np.searchsorted(cumulative, cumulative[:-1] + target, side="left") - 1
    valid = ends < values.shape[0]
    starts = np.flatnonzero(valid)
    ends = np.maximum(ends[valid], starts)
    return float(np.min(values[ends] - values[starts]))
