"""
Tolsa's RBMO norm over the canonical ball family.

||f||_* is the sup over (2, beta)-doubling balls B of the mean oscillation
of f on B; ||f||_d is the sup over nested doubling pairs B1 ⊂ B2 of
|<f>_B1 - <f>_B2| / K_{B1,B2}. Balls are support-centered, with one radius
per distinct support set. ||f||_* always runs over the whole family; above
TOLSA_EXACT_MAX_POINTS points only the pairs of ||f||_d are restricted.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.measure import BallFamily, FieldLike, PointMeasure, doubling_mask, field_values
from config.constants import BALL_TOLERANCE, TOLSA_DILATION, TOLSA_EXACT_MAX_POINTS

logger = logging.getLogger(__name__)

VARIANT_EXACT = "tolsa"
VARIANT_CONCENTRIC = "tolsa-concentric"


@dataclass(frozen=True)
class _CenterBalls:
    """Doubling balls around one center: prefix ends in its distance order."""

    center: int
    ends: np.ndarray
    radii: np.ndarray
    masses: np.ndarray
    k_table: np.ndarray


class TolsaEvaluator:
    """
    Precomputed ball family of one measure, reusable across fields.

    Args:
        mu: measure
        beta: doubling constant of the (2, beta)-doubling balls
        exact: evaluate all nested pairs (default: only up to
            TOLSA_EXACT_MAX_POINTS points, concentric pairs on a geometric
            radius subsample above that); ||f||_* is exact either way
    """

    def __init__(self, mu: PointMeasure, beta: float, exact: Optional[bool] = None):
        self.mu = mu
        self.beta = float(beta)
        self.exact = mu.size <= TOLSA_EXACT_MAX_POINTS if exact is None else exact
        if not self.exact:
            logger.warning(
                "Tolsa norm on %d points: restricting to concentric pairs on a geometric radius subsample",
                mu.size,
            )
        self.variant = VARIANT_EXACT if self.exact else VARIANT_CONCENTRIC
        family = mu.canonical_balls(TOLSA_DILATION)
        self.centers = [self._center_balls(c, family) for c in range(mu.size)]
        self.pair_index: Optional[List[np.ndarray]] = None
        if not self.exact:
            self.pair_index = [self._geometric_subsample(balls.radii) for balls in self.centers]

    def _center_balls(self, center: int, family: BallFamily) -> _CenterBalls:
        mu = self.mu
        pick = family.centers == center
        radii = family.radii[pick]
        ends = family.counts[pick] - 1
        small = mu.mass_at(center, radii)
        big = mu.mass_at(center, TOLSA_DILATION * radii)
        keep = doubling_mask(small, big, self.beta)
        radii, ends, small = radii[keep], ends[keep], small[keep]

        span = max(mu.diameter, 1.0)
        steps = int(np.ceil(np.log2(span / radii.min()))) + 2 if radii.shape[0] else 1
        table = np.empty((radii.shape[0], steps + 1))
        for b, r in enumerate(radii):
            scaled = r * 2.0 ** np.arange(steps + 1)
            table[b] = 1.0 + np.cumsum(mu.mass_at(center, scaled) / scaled ** mu.growth_degree)
        return _CenterBalls(center, ends, radii, small, table)

    @staticmethod
    def _geometric_subsample(radii: np.ndarray) -> np.ndarray:
        # first ball at or beyond each half-octave step, plus the largest ball
        if not radii.shape[0]:
            return np.zeros(0, dtype=int)
        targets = radii.min() * 2.0 ** (0.5 * np.arange(int(2 * np.log2(radii.max() / radii.min())) + 2))
        nearest = np.searchsorted(radii, targets).clip(0, radii.shape[0] - 1)
        return np.unique(np.concatenate([nearest, [radii.shape[0] - 1]]))

    @staticmethod
    def _subset(balls: _CenterBalls, idx: np.ndarray) -> _CenterBalls:
        return _CenterBalls(balls.center, balls.ends[idx], balls.radii[idx], balls.masses[idx], balls.k_table[idx])

    def _averages(self, values: np.ndarray, balls: _CenterBalls) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        order = self.mu.sorted_order[balls.center]
        v = values[order]
        w = self.mu.weights[order]
        sums = np.cumsum(v * w)
        return sums[balls.ends] / balls.masses, v, w

    def norm(self, f: FieldLike) -> Dict[str, Any]:
        """
        Evaluate both parts of the norm for one field.

        Returns:
            Dict with ``value``, ``star``, ``d``, their witnesses and ``variant``
        """
        mu = self.mu
        values = field_values(f, mu)
        averages: List[np.ndarray] = []
        star, star_witness = 0.0, None
        for balls in self.centers:
            avg, v, w = self._averages(values, balls)
            averages.append(avg)
            if not balls.ends.shape[0]:
                continue
            inside = np.arange(mu.size)[None, :] <= balls.ends[:, None]
            spread = (np.abs(v[None, :] - avg[:, None]) * w[None, :] * inside).sum(axis=1) / balls.masses
            b = int(np.argmax(spread))
            if spread[b] > star:
                star = float(spread[b])
                star_witness = {"center": balls.center, "radius": float(balls.radii[b])}

        dual, dual_witness = (self._pairs_exact(averages) if self.exact else self._pairs_concentric(averages))
        return {
            "value": max(star, dual),
            "star": star,
            "d": dual,
            "star_witness": star_witness,
            "d_witness": dual_witness,
            "variant": self.variant,
        }

    def _pairs_concentric(self, averages: List[np.ndarray]) -> Tuple[float, Optional[Dict[str, Any]]]:
        best, witness = 0.0, None
        for full, full_avg, idx in zip(self.centers, averages, self.pair_index or []):
            if idx.shape[0] < 2:
                continue
            balls, avg = self._subset(full, idx), full_avg[idx]
            ratios = self._pair_ratios(balls, avg, 0.0, balls, avg)
            b1, b2 = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
            if ratios[b1, b2] > best:
                best = float(ratios[b1, b2])
                witness = {"B1": [balls.center, float(balls.radii[b1])], "B2": [balls.center, float(balls.radii[b2])]}
        return best, witness

    def _pairs_exact(self, averages: List[np.ndarray]) -> Tuple[float, Optional[Dict[str, Any]]]:
        best, witness = 0.0, None
        for outer, outer_avg in zip(self.centers, averages):
            if not outer.radii.shape[0]:
                continue
            for inner, inner_avg in zip(self.centers, averages):
                if not inner.radii.shape[0]:
                    continue
                gap = self.mu.distances[inner.center, outer.center]
                if gap + inner.radii[0] > outer.radii[-1] * (1.0 + BALL_TOLERANCE):
                    continue
                ratios = self._pair_ratios(inner, inner_avg, gap, outer, outer_avg)
                b1, b2 = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
                if ratios[b1, b2] > best:
                    best = float(ratios[b1, b2])
                    witness = {
                        "B1": [inner.center, float(inner.radii[b1])],
                        "B2": [outer.center, float(outer.radii[b2])],
                    }
        return best, witness

    def _pair_ratios(
        self,
        inner: _CenterBalls,
        inner_avg: np.ndarray,
        gap: float,
        outer: _CenterBalls,
        outer_avg: np.ndarray,
    ) -> np.ndarray:
        # |<f>_B1 - <f>_B2| / K_{B1,B2} for B1 around inner.center, B2 around outer.center
        mu = self.mu
        r1 = inner.radii[:, None]
        r2 = outer.radii[None, :]
        nested = gap + r1 <= r2 * (1.0 + BALL_TOLERANCE)
        order = mu.sorted_order[outer.center]
        reach_curve = np.maximum.accumulate(mu.distances[inner.center, order])
        reach = reach_curve[outer.ends][None, :]
        with np.errstate(divide="ignore"):
            steps = np.ceil(np.log2(np.maximum(reach / (r1 * (1.0 + BALL_TOLERANCE)), 1.0)) - 1e-12)
        steps = np.clip(steps, 0, inner.k_table.shape[1] - 1).astype(int)
        k_values = np.take_along_axis(inner.k_table, steps, axis=1)
        ratios = np.abs(inner_avg[:, None] - outer_avg[None, :]) / k_values
        return np.where(nested, ratios, 0.0)
