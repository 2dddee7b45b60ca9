"""
Cube lattice construction.

Builds nested partitions D_k of the support of a PointMeasure. Each
generation is built separately inside every cube of the previous one:
radii come from :func:`choose_radius`, centers from :func:`five_r_cover`,
and every member point joins the nearest selected center.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .measure import Ball, PointMeasure, doubling_mask
from config.constants import (
    BALL_TOLERANCE, BOUNDARY_BALL_DILATION, BOUNDARY_CONSTANT, CONTAINMENT_DILATION,
    COVER_DILATION, DEFAULT_ALPHA, DEFAULT_ELL, DEFAULT_MODE, DEFAULT_RADIUS_INDEX,
    ERROR_FORCED_RADIUS, ERROR_LATTICE_MEASURE, MAX_GENERATIONS, PAPER_ALPHA, PAPER_MIN_ALPHA,
    PAPER_MODE, TEST_MODE, X0_RADIUS_FACTOR,
)

logger = logging.getLogger(__name__)


class LatticeError(ValueError):
    """Raised when the lattice cannot be constructed."""


@dataclass(frozen=True)
class LatticeParams:
    """
    Constants of the lattice construction.

    beta = alpha^ell and radius_index is the fixed residue i. Unless given, A is
    alpha^(ell*m) with m the smallest integer making A > beta in paper mode, and
    A = beta in test mode.
    """

    alpha: float = DEFAULT_ALPHA
    ell: int = DEFAULT_ELL
    A: Optional[float] = None
    k_min: Optional[int] = None
    k_max: Optional[int] = None
    mode: str = DEFAULT_MODE
    radius_index: int = DEFAULT_RADIUS_INDEX
    x0_scaled_radius: Optional[bool] = None

    def __post_init__(self) -> None:
        if self.A is None:
            m = 2 if self.mode == PAPER_MODE and self.alpha > 1 else 1
            object.__setattr__(self, "A", float(self.alpha ** (m * self.ell)))
        if self.x0_scaled_radius is None:
            object.__setattr__(self, "x0_scaled_radius", self.mode == PAPER_MODE)

    @classmethod
    def for_mode(cls, mode: str, dim: int, alpha: Optional[float] = None, **overrides: Any) -> "LatticeParams":
        """Default parameters for ``mode``; paper mode ties beta to alpha^(d+1)."""
        if mode == PAPER_MODE:
            values = {"alpha": alpha if alpha is not None else float(PAPER_ALPHA), "ell": dim + 1}
        else:
            values = {"alpha": alpha if alpha is not None else DEFAULT_ALPHA}
        values.update(overrides)
        return cls(mode=mode, **values)

    @property
    def beta(self) -> float:
        return float(self.alpha ** self.ell)

    def base_radius(self, k: int) -> float:
        """alpha^i A^(-k), the lower end of the admissible radius range."""
        return float(self.alpha ** self.radius_index * self.A ** (-k))

    def validate(self, dim: int) -> List[str]:
        """
        Validate the parameters for a measure of dimension ``dim``.

        Returns:
            List[str]: issues found (empty if valid)
        """
        issues = []
        if not self.alpha > 1:
            issues.append(f"alpha must be > 1 (got {self.alpha})")
        if self.ell < 1:
            issues.append(f"ell must be >= 1 (got {self.ell})")
        if not self.A > 1:
            issues.append(f"A must be > 1 (got {self.A})")
        if self.mode not in (TEST_MODE, PAPER_MODE):
            issues.append(f"mode must be '{TEST_MODE}' or '{PAPER_MODE}' (got '{self.mode}')")
        if self.mode == PAPER_MODE:
            if self.alpha < PAPER_MIN_ALPHA:
                issues.append(f"paper mode requires alpha >= {PAPER_MIN_ALPHA:g} (got {self.alpha:g})")
            if self.ell != dim + 1:
                issues.append(f"paper mode requires beta = alpha^(d+1), i.e. ell = {dim + 1} (got {self.ell})")
            if not self.A > self.beta:
                issues.append(f"paper mode requires A > beta (A = {self.A:g}, beta = {self.beta:g})")
        if self.k_min is not None and self.k_max is not None and self.k_max < self.k_min:
            issues.append("k_max must not be smaller than k_min")
        return issues

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "ell": self.ell,
            "beta": self.beta,
            "A": self.A,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "mode": self.mode,
            "radius_index": self.radius_index,
            "x0_scaled_radius": self.x0_scaled_radius,
        }


@dataclass(eq=False)
class Cube:
    """A cell of the lattice with its ball B_Q = B(x_Q, r(Q))."""

    id: int
    generation: int
    center_index: int
    radius: float
    members: np.ndarray
    parent_id: Optional[int]
    is_db_doubling: bool
    children: List[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return int(self.members.shape[0])

    @property
    def is_singleton(self) -> bool:
        return self.members.shape[0] == 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "generation": self.generation,
            "center_index": self.center_index,
            "radius": self.radius,
            "member_indices": self.members.tolist(),
            "parent_id": self.parent_id,
            "flags": {"is_db_doubling": self.is_db_doubling},
        }


@dataclass(frozen=True)
class BoundaryReport:
    """Masses of the outer and inner boundary collars of a cube."""

    cube_id: int
    scale_index: int
    ext_mass: float
    int_mass: float
    bound: float
    passed: bool


@dataclass(eq=False)
class Lattice:
    """The lattice D = {D_k}: cubes by id plus the cube ids of each generation."""

    measure: PointMeasure
    params: LatticeParams
    cubes: List[Cube]
    generations: Dict[int, List[int]]
    x0: int
    forced_skips: List[int] = field(default_factory=list)
    _labels: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def k_min(self) -> int:
        return min(self.generations)

    @property
    def k_max(self) -> int:
        return max(self.generations)

    @property
    def root(self) -> Cube:
        return self.cubes[self.generations[self.k_min][0]]

    def cube(self, cube_id: int) -> Cube:
        return self.cubes[cube_id]

    def generation(self, k: int) -> List[Cube]:
        return [self.cubes[i] for i in self.generations[k]]

    def labels(self, k: int) -> np.ndarray:
        """Map support index -> id of its generation-k cube."""
        if k not in self._labels:
            lab = np.full(self.measure.size, -1, dtype=int)
            for cube in self.generation(k):
                lab[cube.members] = cube.id
            self._labels[k] = lab
        return self._labels[k]

    def ancestors(self, cube_id: int) -> List[int]:
        """Chain from ``cube_id`` up to the root, both included."""
        chain = [cube_id]
        parent = self.cubes[cube_id].parent_id
        while parent is not None:
            chain.append(parent)
            parent = self.cubes[parent].parent_id
        return chain

    def ball(self, cube_id: int, dilation: float = 1.0) -> Ball:
        cube = self.cubes[cube_id]
        return Ball.around(self.measure, cube.center_index, cube.radius * dilation)

    def ball_mask(self, cube_id: int, dilation: float = 1.0) -> np.ndarray:
        """Support points inside the dilated ball of the cube."""
        cube = self.cubes[cube_id]
        return self.measure.support_ball_mask(cube.center_index, cube.radius * dilation)

    def ball_mass(self, cube_id: int, dilation: float = 1.0) -> float:
        cube = self.cubes[cube_id]
        return float(self.measure.mass_at(cube.center_index, cube.radius * dilation)[0])

    # -- invariant measurements -------------------------------------------------

    def partition_violations(self) -> List[Dict[str, Any]]:
        expected = np.arange(self.measure.size)
        witnesses = []
        for k, ids in sorted(self.generations.items()):
            members = np.sort(np.concatenate([self.cubes[i].members for i in ids]))
            if members.shape != expected.shape or np.any(members != expected):
                witnesses.append({"generation": k, "covered": int(np.unique(members).shape[0])})
        return witnesses

    def nesting_violations(self) -> List[Dict[str, Any]]:
        witnesses = []
        for cube in self.cubes:
            if cube.parent_id is None:
                continue
            parent = self.cubes[cube.parent_id]
            if parent.generation != cube.generation - 1 or not np.all(np.isin(cube.members, parent.members)):
                witnesses.append({"cube_id": cube.id, "parent_id": parent.id})
        return witnesses

    def disjointness_violations(self) -> List[Dict[str, Any]]:
        """Sibling pairs whose balls 5B_Q intersect."""
        distances = self.measure.distances
        witnesses = []
        for parent in self.cubes:
            kids = parent.children
            for a in range(len(kids)):
                for b in range(a + 1, len(kids)):
                    qa, qb = self.cubes[kids[a]], self.cubes[kids[b]]
                    gap = distances[qa.center_index, qb.center_index]
                    if not gap > COVER_DILATION * (qa.radius + qb.radius):
                        witnesses.append({"cube_ids": [qa.id, qb.id], "distance": float(gap)})
        roots = self.generations[self.k_min]
        if len(roots) != 1:
            witnesses.append({"generation": self.k_min, "cubes": len(roots)})
        return witnesses

    def sandwich_violations(self) -> List[Dict[str, Any]]:
        witnesses = []
        for cube in self.cubes:
            base = self.params.base_radius(cube.generation)
            lower = base * (1.0 - BALL_TOLERANCE)
            upper = self.params.beta * base * (1.0 + BALL_TOLERANCE)
            if not lower <= cube.radius <= upper:
                witnesses.append({"cube_id": cube.id, "radius": cube.radius, "range": [base, self.params.beta * base]})
        return witnesses

    def containment_report(self) -> Dict[str, Any]:
        """Fraction of cubes with B_Q ∩ supp ⊂ Q and Q ⊂ 28 B_Q."""
        inner_ok = 0
        outer_ok = 0
        both_ok = 0
        failures = []
        for cube in self.cubes:
            in_ball = np.flatnonzero(self.ball_mask(cube.id))
            inner = bool(np.all(np.isin(in_ball, cube.members)))
            outer = bool(np.all(self.ball_mask(cube.id, CONTAINMENT_DILATION)[cube.members]))
            inner_ok += inner
            outer_ok += outer
            both_ok += inner and outer
            if not (inner and outer) and len(failures) < 10:
                failures.append({"cube_id": cube.id, "ball_inside_cube": inner, "cube_inside_28_ball": outer})
        total = len(self.cubes)
        return {
            "fraction": both_ok / total,
            "ball_inside_cube_fraction": inner_ok / total,
            "cube_inside_dilated_ball_fraction": outer_ok / total,
            "failures": failures,
        }

    def nondoubling_decay_report(self) -> Dict[str, Any]:
        """For non-doubling cubes, check that every scale up to beta r(Q) fails to double."""
        alpha, beta = self.params.alpha, self.params.beta
        checked = 0
        held = 0
        for cube in self.cubes:
            if cube.is_db_doubling:
                continue
            checked += 1
            radii = cube.radius * alpha ** np.arange(self.params.ell + 1)
            masses = self.measure.mass_at(cube.center_index, radii)
            held += bool(np.all(masses[1:] > beta * masses[:-1]))
        return {"non_doubling_cubes": checked, "fraction": (held / checked) if checked else 1.0}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "measure_id": self.measure.measure_id,
            "params": self.params.to_dict(),
            "x0": self.x0,
            "generations": {str(k): list(ids) for k, ids in sorted(self.generations.items())},
            "cubes": [cube.to_dict() for cube in self.cubes],
        }

    @classmethod
    def from_dict(cls, mu: PointMeasure, data: Dict[str, Any]) -> "Lattice":
        """Rebuild a lattice exported by :meth:`to_dict` over the same measure."""
        if data.get("measure_id") != mu.measure_id:
            raise ValueError(f"{ERROR_LATTICE_MEASURE}: {data.get('measure_id')} != {mu.measure_id}")
        raw = dict(data["params"])
        raw.pop("beta", None)
        params = LatticeParams(**raw)
        cubes = []
        for record in data["cubes"]:
            cubes.append(Cube(
                id=int(record["id"]),
                generation=int(record["generation"]),
                center_index=int(record["center_index"]),
                radius=float(record["radius"]),
                members=np.asarray(record["member_indices"], dtype=int),
                parent_id=record["parent_id"],
                is_db_doubling=bool(record["flags"]["is_db_doubling"]),
            ))
        for cube in cubes:
            if cube.parent_id is not None:
                cubes[cube.parent_id].children.append(cube.id)
        generations = {int(k): [int(i) for i in ids] for k, ids in data["generations"].items()}
        return cls(mu, params, cubes, generations, int(data["x0"]))


def five_r_cover(
    mu: PointMeasure,
    candidates: Sequence[Tuple[int, float]],
    forced: Optional[int] = None,
) -> List[int]:
    """
    Greedy 5R covering selection.

    Candidates are visited by decreasing radius (stable on ties) with the
    forced candidate first; a candidate is kept when its closed ball misses
    every ball kept so far.

    Args:
        mu: measure providing the center coordinates
        candidates: (center index, radius) pairs
        forced: position in ``candidates`` of the designated ball

    Returns:
        List[int]: positions of the selected candidates, in selection order

    Raises:
        LatticeError: If the forced radius is below half the largest radius
    """
    if not candidates:
        return []
    centers = np.array([c for c, _ in candidates], dtype=int)
    radii = np.array([r for _, r in candidates], dtype=float)

    order = list(np.argsort(-radii, kind="stable"))
    if forced is not None:
        if radii[forced] < 0.5 * radii.max() * (1.0 - BALL_TOLERANCE):
            raise LatticeError(f"{ERROR_FORCED_RADIUS}: {radii[forced]:g} < {0.5 * radii.max():g}")
        order.remove(forced)
        order.insert(0, forced)

    selected: List[int] = []
    for pos in order:
        if selected:
            chosen = np.asarray(selected)
            gaps = mu.distances[centers[pos], centers[chosen]]
            if np.any(gaps <= radii[pos] + radii[chosen]):
                continue
        selected.append(int(pos))
    return selected


def choose_radius(mu: PointMeasure, x: int, k: int, params: LatticeParams) -> float:
    """
    Smallest (alpha, beta)-doubling radius in [alpha^i A^-k, beta alpha^i A^-k].

    Only the lower end and the radii where B(x, r) or B(x, alpha r) change
    mass need testing. Falls back to the lower end when none doubles.
    """
    base = params.base_radius(k)
    top = params.beta * base * (1.0 + BALL_TOLERANCE)
    row = mu.sorted_distances[x, 1:]
    change = np.concatenate([row, row / params.alpha])
    candidates = np.unique(np.concatenate([[base], change[(change > base) & (change <= top)]]))
    small = mu.mass_at(x, candidates)
    big = mu.mass_at(x, params.alpha * candidates)
    ok = doubling_mask(small, big, params.beta)
    if not ok.any():
        return base
    return float(candidates[int(np.argmax(ok))])


def designated_point(mu: PointMeasure) -> int:
    """Support point with the largest mass within the median pairwise distance."""
    if mu.size == 1:
        return 0
    upper = np.triu_indices(mu.size, k=1)
    median = float(np.median(mu.distances[upper]))
    inside = mu.distances <= median * (1.0 + BALL_TOLERANCE)
    masses = inside.astype(float) @ mu.weights
    return int(np.argmax(masses))


def generation_range(mu: PointMeasure, params: LatticeParams) -> Tuple[int, int]:
    """
    Default (k_min, k_max).

    k_min is the largest k with beta alpha^i A^-k >= diam(supp) and k_max the
    smallest k with beta alpha^i A^-k < the minimum pairwise distance.
    """
    top = params.beta * params.alpha ** params.radius_index
    if mu.size == 1:
        k_min = params.k_min if params.k_min is not None else 0
        return k_min, params.k_max if params.k_max is not None else k_min + 1

    A = params.A
    diam = mu.diameter
    k_min = math.floor(math.log(top / diam) / math.log(A))
    while top * A ** (-k_min) < diam:
        k_min -= 1
    while top * A ** (-(k_min + 1)) >= diam:
        k_min += 1

    floor_dist = mu.min_distance
    k_max = math.floor(math.log(top / floor_dist) / math.log(A)) + 1
    while top * A ** (-(k_max - 1)) < floor_dist:
        k_max -= 1
    while top * A ** (-k_max) >= floor_dist:
        k_max += 1

    if params.k_min is not None:
        k_min = params.k_min
    if params.k_max is not None:
        k_max = params.k_max
    return k_min, max(k_max, k_min)


def _generation_radii(mu: PointMeasure, k: int, params: LatticeParams, x0: int) -> Tuple[np.ndarray, np.ndarray]:
    radii = np.array([choose_radius(mu, x, k, params) for x in range(mu.size)])
    if params.x0_scaled_radius:
        scaled = X0_RADIUS_FACTOR * params.beta * params.base_radius(k)
        small, big = mu.mass_at(x0, [scaled, params.alpha * scaled])
        if doubling_mask(np.array(small), np.array(big), params.beta):
            radii[x0] = scaled
    small = np.array([mu.mass_at(x, r)[0] for x, r in enumerate(radii)])
    big = np.array([mu.mass_at(x, params.alpha * r)[0] for x, r in enumerate(radii)])
    return radii, doubling_mask(small, big, params.beta)


def _split(
    mu: PointMeasure,
    members: np.ndarray,
    radii: np.ndarray,
    x0: int,
    skips: List[int],
    k: int,
) -> List[Tuple[int, np.ndarray]]:
    # one parent: cover its members, then assign each member to the nearest center
    if members.shape[0] == 1:
        return [(int(members[0]), members)]
    candidates = [(int(i), COVER_DILATION * radii[i]) for i in members]
    forced = None
    hits = np.flatnonzero(members == x0)
    if hits.shape[0]:
        pos = int(hits[0])
        if radii[x0] >= 0.5 * radii[members].max() * (1.0 - BALL_TOLERANCE):
            forced = pos
        else:
            skips.append(k)
            logger.info("Generation %d: designated ball too small to force, covering without it", k)
    selected = five_r_cover(mu, candidates, forced)
    centers = np.sort(members[selected])
    nearest = np.argmin(mu.distances[np.ix_(members, centers)], axis=1)
    return [(int(c), members[nearest == j]) for j, c in enumerate(centers)]


def build_lattice(mu: PointMeasure, params: Optional[LatticeParams] = None) -> Lattice:
    """
    Build the cube lattice of ``mu``.

    The coarse end is lowered until generation k_min is a single cube; the
    fine end is extended past k_max until every cube is a doubling singleton.

    Args:
        mu: measure to partition
        params: construction constants (test-mode defaults if omitted)

    Returns:
        Lattice: the finished lattice

    Raises:
        LatticeError: If the coarse generation cannot be made a single cube
    """
    params = params or LatticeParams()
    if params.mode != PAPER_MODE and params.A < params.beta:
        logger.warning("A = %g is below beta = %g (allowed in test mode)", params.A, params.beta)
    k_min, k_max = generation_range(mu, params)
    x0 = designated_point(mu)
    everything = np.arange(mu.size)
    skips: List[int] = []

    for _ in range(MAX_GENERATIONS):
        radii, doubling = _generation_radii(mu, k_min, params, x0)
        top = _split(mu, everything, radii, x0, skips, k_min)
        if len(top) == 1:
            break
        logger.info("Generation %d has %d cubes; lowering k_min", k_min, len(top))
        k_min -= 1
    else:
        raise LatticeError(f"Could not reach a single coarse cube within {MAX_GENERATIONS} generations")

    center, members = top[0]
    cubes = [Cube(0, k_min, center, float(radii[center]), members, None, bool(doubling[center]))]
    generations: Dict[int, List[int]] = {k_min: [0]}

    k = k_min
    while True:
        current = [cubes[i] for i in generations[k]]
        finished = all(c.is_singleton and c.is_db_doubling for c in current)
        if k >= k_max and finished:
            break
        if k - k_min >= MAX_GENERATIONS:
            logger.warning("Stopped after %d generations with unfinished cubes", MAX_GENERATIONS)
            break
        k += 1
        radii, doubling = _generation_radii(mu, k, params, x0)
        ids = []
        for parent in current:
            for center, members in _split(mu, parent.members, radii, x0, skips, k):
                cube = Cube(len(cubes), k, center, float(radii[center]), members, parent.id, bool(doubling[center]))
                cubes.append(cube)
                parent.children.append(cube.id)
                ids.append(cube.id)
        generations[k] = ids

    logger.info("Built lattice with %d cubes over generations %d..%d", len(cubes), k_min, k)
    return Lattice(mu, params, cubes, generations, x0, skips)


def boundary_report(lattice: Lattice, cube_id: int, i: int) -> BoundaryReport:
    """
    Boundary collars of a cube at scale A^(-k-i).

    The outer collar holds points outside Q closer than the scale to Q, the
    inner collar points of Q closer than the scale to the rest of the support.
    """
    if i < 1:
        raise ValueError(f"Boundary scale index must be >= 1 (got {i})")
    mu = lattice.measure
    cube = lattice.cube(cube_id)
    params = lattice.params
    scale = params.A ** (-(cube.generation + i))

    inside = np.zeros(mu.size, dtype=bool)
    inside[cube.members] = True
    outside = np.flatnonzero(~inside)
    ext_mass = 0.0
    int_mass = 0.0
    if outside.shape[0]:
        to_cube = mu.distances[np.ix_(outside, cube.members)].min(axis=1)
        ext_mass = float(mu.weights[outside][to_cube < scale].sum())
        to_rest = mu.distances[np.ix_(cube.members, outside)].min(axis=1)
        int_mass = float(mu.weights[cube.members][to_rest < scale].sum())

    factor = BOUNDARY_CONSTANT * params.beta ** (-3 * mu.dim - 1) * params.A
    bound = factor ** (-i) * lattice.ball_mass(cube_id, BOUNDARY_BALL_DILATION)
    return BoundaryReport(cube_id, i, ext_mass, int_mass, float(bound), ext_mass + int_mass <= bound)
