"""
Discrete measures of polynomial growth.

A PointMeasure is a finite weighted point cloud in R^d. Points are kept in
lexicographic order with coincident points merged, and every ball mass is
computed with the closed-ball convention (boundary points included).
"""

import hashlib
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.io_utils import read_csv_rows, read_json, write_csv, write_json
from config.constants import (
    BALL_TOLERANCE, CSV_EXTENSION, ERROR_ALPHA, ERROR_EMPTY_INDEX_SET, ERROR_EMPTY_MEASURE,
    ERROR_FIELD_LENGTH, ERROR_FIELD_MEASURE, ERROR_FILE_NOT_FOUND, ERROR_MEASURE_PARSE,
    ERROR_NONPOSITIVE_WEIGHT, ERROR_RADIUS, FIELD_VALUE_COLUMN, MASS_TOLERANCE,
    MEASURE_WEIGHT_COLUMN,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball B(center, radius)."""

    center: Tuple[float, ...]
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"{ERROR_RADIUS}: {self.radius}")
        object.__setattr__(
            self, "center", tuple(float(c) for c in np.atleast_1d(np.asarray(self.center, float)))
        )

    @classmethod
    def around(cls, mu: "PointMeasure", index: int, radius: float) -> "Ball":
        """Ball centered at the support point with the given index."""
        return cls(tuple(mu.points[index]), float(radius))

    def dilate(self, factor: float) -> "Ball":
        """Concentric ball with radius multiplied by ``factor``."""
        return Ball(self.center, self.radius * factor)


@dataclass(frozen=True)
class BallFamily:
    """Support-centered balls given as (center index, radius, point count)."""

    centers: np.ndarray
    radii: np.ndarray
    counts: np.ndarray

    def __len__(self) -> int:
        return int(self.centers.shape[0])


@dataclass(frozen=True, eq=False)
class PointMeasure:
    """
    Finite measure sum_i w_i delta_{x_i} on R^d with growth degree n.

    Use :meth:`from_arrays` (or :func:`load_measure`) to build instances; it
    sorts, merges duplicates and computes the growth constant.
    """

    points: np.ndarray
    weights: np.ndarray
    growth_degree: float
    growth_constant: float

    @classmethod
    def from_arrays(
        cls,
        points: Union[np.ndarray, Sequence[Any]],
        weights: Union[np.ndarray, Sequence[float]],
        growth_degree: Optional[float] = None,
    ) -> "PointMeasure":
        """
        Build a measure from raw coordinates and weights.

        Args:
            points: (N, d) coordinates, or a length-N sequence for d = 1
            weights: N positive masses
            growth_degree: exponent n of the growth bound (defaults to d)

        Returns:
            PointMeasure: sorted, merged measure with its growth constant

        Raises:
            ValueError: If the measure is empty or a weight is not positive
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        w = np.asarray(weights, dtype=float).ravel()

        if pts.shape[0] == 0:
            raise ValueError(ERROR_EMPTY_MEASURE)
        if w.shape[0] != pts.shape[0]:
            raise ValueError(f"{ERROR_MEASURE_PARSE}: {pts.shape[0]} points but {w.shape[0]} weights")
        if not np.all(np.isfinite(pts)):
            raise ValueError(f"{ERROR_MEASURE_PARSE}: non-finite coordinates")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError(ERROR_NONPOSITIVE_WEIGHT)

        unique, inverse = np.unique(pts, axis=0, return_inverse=True)
        merged = np.bincount(np.asarray(inverse).ravel(), weights=w, minlength=unique.shape[0])
        if unique.shape[0] < pts.shape[0]:
            logger.info("Merged %d coincident points", pts.shape[0] - unique.shape[0])

        degree = float(growth_degree) if growth_degree is not None else float(unique.shape[1])
        unique.setflags(write=False)
        merged.setflags(write=False)
        constant = _growth_constant(unique, merged, degree)
        if constant > 1.0 + MASS_TOLERANCE:
            logger.warning(
                "Measure exceeds the normalized growth bound mu(B(x,r)) <= r^%g: C_growth = %.6g",
                degree, constant,
            )
        return cls(unique, merged, degree, constant)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @cached_property
    def measure_id(self) -> str:
        """Content digest of the sorted points and weights."""
        digest = hashlib.sha1()
        digest.update(np.ascontiguousarray(self.points).tobytes())
        digest.update(np.ascontiguousarray(self.weights).tobytes())
        digest.update(repr(self.growth_degree).encode())
        return digest.hexdigest()[:16]

    @cached_property
    def distances(self) -> np.ndarray:
        """Dense (N, N) Euclidean distance matrix."""
        diff = self.points[:, None, :] - self.points[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        dist.setflags(write=False)
        return dist

    @cached_property
    def _profile(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        # per-center sort of distances with cumulative masses
        order = np.argsort(self.distances, axis=1, kind="stable")
        sorted_dist = np.take_along_axis(self.distances, order, axis=1)
        cumulative = np.cumsum(self.weights[order], axis=1)
        return order, sorted_dist, cumulative

    @property
    def sorted_order(self) -> np.ndarray:
        return self._profile[0]

    @property
    def sorted_distances(self) -> np.ndarray:
        return self._profile[1]

    @property
    def cumulative_masses(self) -> np.ndarray:
        return self._profile[2]

    @cached_property
    def min_distance(self) -> float:
        """Smallest positive pairwise distance (0.0 for a one-point measure)."""
        if self.size == 1:
            return 0.0
        return float(self.sorted_distances[:, 1].min())

    @cached_property
    def diameter(self) -> float:
        return float(self.distances.max())

    @cached_property
    def nearest_distances(self) -> np.ndarray:
        """Distance from each point to its nearest neighbour (1.0 when alone)."""
        if self.size == 1:
            return np.ones(1)
        return self.sorted_distances[:, 1].copy()

    def mass_at(self, index: int, radii: Union[float, np.ndarray]) -> np.ndarray:
        """Masses of the closed balls B(x_index, r) for every r in ``radii``."""
        r = np.atleast_1d(np.asarray(radii, dtype=float))
        row = self.sorted_distances[index]
        pos = np.searchsorted(row, r * (1.0 + BALL_TOLERANCE), side="right")
        cumulative = self.cumulative_masses[index]
        return np.where(pos > 0, cumulative[np.maximum(pos - 1, 0)], 0.0)

    def ball_indices(self, ball: Ball) -> np.ndarray:
        """Indices of support points inside the closed ball."""
        center = np.asarray(ball.center, dtype=float)
        dist = np.linalg.norm(self.points - center[None, :], axis=1)
        return np.flatnonzero(dist <= ball.radius * (1.0 + BALL_TOLERANCE))

    def support_ball_mask(self, index: int, radius: float) -> np.ndarray:
        """Boolean mask of B(x_index, radius) ∩ supp(mu)."""
        return self.distances[index] <= radius * (1.0 + BALL_TOLERANCE)

    def canonical_radii(self, alpha: float) -> np.ndarray:
        """
        Canonical radius grid: pairwise distances with their alpha-multiples
        and 1/alpha-scalings.

        Every ball mass and every dilate mass is a step function of the radius
        that only jumps on this grid. A one-point measure has the grid {1}.
        """
        if self.size == 1:
            return np.ones(1)
        upper = np.triu_indices(self.size, k=1)
        base = np.unique(self.distances[upper])
        return np.unique(np.concatenate([base, base * alpha, base / alpha]))

    def canonical_balls(self, alpha: float) -> BallFamily:
        """
        One ball per distinct support set around every center.

        Radii are the center's positive distances plus an atomic radius
        (nearest distance / (2 alpha)) whose alpha-dilate holds the center only.
        """
        centers: List[np.ndarray] = []
        radii: List[np.ndarray] = []
        counts: List[np.ndarray] = []
        for i in range(self.size):
            row = self.sorted_distances[i]
            distinct = np.unique(row[1:])
            atomic = self.nearest_distances[i] / (2.0 * alpha)
            rad = np.concatenate([[atomic], distinct])
            cnt = np.searchsorted(row, rad * (1.0 + BALL_TOLERANCE), side="right")
            centers.append(np.full(rad.shape[0], i, dtype=int))
            radii.append(rad)
            counts.append(cnt)
        return BallFamily(np.concatenate(centers), np.concatenate(radii), np.concatenate(counts))


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real values indexed like the support points of one measure."""

    values: np.ndarray
    measure_id: str

    @classmethod
    def on(cls, mu: PointMeasure, values: Union[np.ndarray, Sequence[float]]) -> "ScalarField":
        arr = np.array(values, dtype=float).ravel()
        if arr.shape[0] != mu.size:
            raise ValueError(f"{ERROR_FIELD_LENGTH}: {arr.shape[0]} != {mu.size}")
        arr.setflags(write=False)
        return cls(arr, mu.measure_id)

    def __len__(self) -> int:
        return int(self.values.shape[0])


FieldLike = Union[ScalarField, np.ndarray, Sequence[float]]


def field_values(f: FieldLike, mu: Optional[PointMeasure] = None) -> np.ndarray:
    """
    Return the value array of a field, checking it against ``mu``.

    Raises:
        ValueError: If the length or the measure id does not match
    """
    if isinstance(f, ScalarField):
        if mu is not None and f.measure_id != mu.measure_id:
            raise ValueError(ERROR_FIELD_MEASURE)
        values = f.values
    else:
        values = np.asarray(f, dtype=float).ravel()
    if mu is not None and values.shape[0] != mu.size:
        raise ValueError(f"{ERROR_FIELD_LENGTH}: {values.shape[0]} != {mu.size}")
    return values


def doubling_mask(small: np.ndarray, big: np.ndarray, beta: float) -> np.ndarray:
    """Elementwise doubling test mu(alpha B) <= beta mu(B) with the zero-mass convention."""
    small = np.asarray(small, dtype=float)
    big = np.asarray(big, dtype=float)
    return np.where(small > 0, big <= beta * small * (1.0 + MASS_TOLERANCE), big <= 0)


def ball_mass(mu: PointMeasure, ball: Ball) -> float:
    """Mass of the closed ball: sum of w_y over |y - center| <= radius."""
    return float(mu.weights[mu.ball_indices(ball)].sum())


def is_doubling(mu: PointMeasure, ball: Ball, alpha: float, beta: float) -> bool:
    """
    Check whether ``ball`` is (alpha, beta)-doubling.

    A zero-mass ball counts as doubling iff its alpha-dilate is also null.
    """
    if not alpha > 1:
        raise ValueError(f"{ERROR_ALPHA}: {alpha}")
    small = ball_mass(mu, ball)
    big = ball_mass(mu, ball.dilate(alpha))
    return bool(doubling_mask(np.array(small), np.array(big), beta))


def restrict(mu: PointMeasure, indices: Sequence[int]) -> PointMeasure:
    """Restriction of ``mu`` to a nonempty set of support indices."""
    idx = np.unique(np.asarray(list(indices), dtype=int))
    if idx.shape[0] == 0:
        raise ValueError(ERROR_EMPTY_INDEX_SET)
    return PointMeasure.from_arrays(mu.points[idx], mu.weights[idx], mu.growth_degree)


def _growth_constant(points: np.ndarray, weights: np.ndarray, degree: float) -> float:
    # sup of mu(B(x,r)) / r^n over centers and grid radii r >= min distance
    if points.shape[0] == 1:
        return float(weights[0])
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    order = np.argsort(dist, axis=1, kind="stable")
    sorted_dist = np.take_along_axis(dist, order, axis=1)
    cumulative = np.cumsum(weights[order], axis=1)
    floor = sorted_dist[:, 1].min()
    radii = np.maximum(sorted_dist, floor)
    return float((cumulative / radii ** degree).max())


def load_measure(path: Union[str, Path], growth_degree: Optional[float] = None) -> PointMeasure:
    """
    Load a measure from a JSON or CSV file.

    JSON: {"dim", "growth_degree", "points", "weights"}. CSV: coordinate
    columns plus a "weight" column, with a header row.

    Args:
        path: measure file
        growth_degree: overrides the degree stored in the file

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: On parse failures, nonpositive weights or an empty measure
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"{ERROR_FILE_NOT_FOUND}: {path}")

    if file_path.suffix.lower() == CSV_EXTENSION:
        rows = read_csv_rows(file_path)
        if not rows:
            raise ValueError(ERROR_EMPTY_MEASURE)
        columns = [c for c in rows[0].keys() if c != MEASURE_WEIGHT_COLUMN]
        if MEASURE_WEIGHT_COLUMN not in rows[0] or not columns:
            raise ValueError(f"{ERROR_MEASURE_PARSE}: expected coordinate columns and '{MEASURE_WEIGHT_COLUMN}'")
        try:
            points = [[float(row[c]) for c in columns] for row in rows]
            weights = [float(row[MEASURE_WEIGHT_COLUMN]) for row in rows]
        except (TypeError, ValueError) as e:
            raise ValueError(f"{ERROR_MEASURE_PARSE}: {e}")
        degree = growth_degree
    else:
        data = read_json(file_path)
        if not isinstance(data, dict) or "points" not in data or "weights" not in data:
            raise ValueError(f"{ERROR_MEASURE_PARSE}: missing 'points' or 'weights'")
        points = data["points"]
        weights = data["weights"]
        degree = growth_degree if growth_degree is not None else data.get("growth_degree")
        if not points:
            raise ValueError(ERROR_EMPTY_MEASURE)
        declared = data.get("dim")
        if declared is not None and np.asarray(points, dtype=float).reshape(len(points), -1).shape[1] != int(declared):
            raise ValueError(f"{ERROR_MEASURE_PARSE}: points do not have dim {declared}")

    return PointMeasure.from_arrays(points, weights, degree)


def measure_to_dict(mu: PointMeasure) -> Dict[str, Any]:
    return {
        "dim": mu.dim,
        "growth_degree": mu.growth_degree,
        "points": mu.points.tolist(),
        "weights": mu.weights.tolist(),
    }


def save_measure(mu: PointMeasure, path: Union[str, Path]) -> None:
    """Write a measure in the JSON format (CSV when the suffix is .csv)."""
    file_path = Path(path)
    if file_path.suffix.lower() == CSV_EXTENSION:
        header = [f"x{j}" for j in range(mu.dim)] + [MEASURE_WEIGHT_COLUMN]
        rows = [list(p) + [w] for p, w in zip(mu.points.tolist(), mu.weights.tolist())]
        write_csv(file_path, header, rows)
    else:
        write_json(file_path, measure_to_dict(mu))


def load_field(path: Union[str, Path], mu: PointMeasure) -> ScalarField:
    """Load a field file (JSON array or CSV column "value") aligned to ``mu``."""
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"{ERROR_FILE_NOT_FOUND}: {path}")
    if file_path.suffix.lower() == CSV_EXTENSION:
        rows = read_csv_rows(file_path)
        try:
            values = [float(row[FIELD_VALUE_COLUMN]) for row in rows]
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"{ERROR_MEASURE_PARSE}: field column '{FIELD_VALUE_COLUMN}': {e}")
    else:
        values = read_json(file_path)
        if not isinstance(values, list):
            raise ValueError(f"{ERROR_MEASURE_PARSE}: field must be a JSON array")
    return ScalarField.on(mu, values)


def save_field(f: ScalarField, path: Union[str, Path]) -> None:
    file_path = Path(path)
    if file_path.suffix.lower() == CSV_EXTENSION:
        write_csv(file_path, [FIELD_VALUE_COLUMN], [[v] for v in f.values.tolist()])
    else:
        write_json(file_path, f.values.tolist())
