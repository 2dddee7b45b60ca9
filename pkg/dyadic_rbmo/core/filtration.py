"""
Doubling martingale filtration over a cube lattice.

The atoms of level 0 are the root cube; the atoms of level k+1 are the
maximal doubling cubes properly contained in the level-k atoms. Singleton
atoms are carried unchanged to deeper levels so that every level is a
partition of the support.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .lattice import Cube, Lattice
from .measure import Ball, FieldLike, PointMeasure, ScalarField, field_values
from config.constants import (
    BALL_TOLERANCE, ERROR_INVALID_LEVEL, ERROR_NON_DOUBLING_ROOT, ERROR_ROOT_HAS_NO_PARENT,
    ERROR_UNKNOWN_ATOM, KEY_DECAY_EXPONENT, MASS_TOLERANCE, PROPERTY_IV_DILATION,
)

logger = logging.getLogger(__name__)


class FiltrationError(ValueError):
    """Raised when the doubling filtration cannot be extracted."""


@dataclass(frozen=True)
class GenerationGap:
    """Lattice-generation distance between an atom and its filtration parent."""

    cube_id: int
    ancestor_id: int
    gap: int

    def __post_init__(self) -> None:
        if self.gap < 1:
            raise ValueError(f"Generation gap must be >= 1 (got {self.gap})")


@dataclass(eq=False)
class Filtration:
    """
    Levels of atoms (cube ids) with the parent map Q -> Q̂.

    ``level_of`` and ``sigma_parent`` refer to the level where an atom first
    appears. ``orphans`` lists atoms attached without being doubling.
    """

    lattice: Lattice
    levels: Dict[int, List[int]]
    sigma_parent: Dict[int, int]
    level_of: Dict[int, int]
    gaps: Dict[int, GenerationGap]
    orphans: List[int] = field(default_factory=list)
    _partition: Dict[int, Tuple[np.ndarray, np.ndarray, np.ndarray]] = field(default_factory=dict, repr=False)

    @property
    def measure(self) -> PointMeasure:
        return self.lattice.measure

    @property
    def root(self) -> int:
        return self.levels[0][0]

    @property
    def last_level(self) -> int:
        return max(self.levels)

    @property
    def atoms(self) -> List[int]:
        """Every atom id, in order of first appearance."""
        return sorted(self.level_of, key=lambda c: (self.level_of[c], c))

    def cube(self, cube_id: int) -> Cube:
        if cube_id not in self.level_of:
            raise ValueError(f"{ERROR_UNKNOWN_ATOM}: {cube_id}")
        return self.lattice.cube(cube_id)

    def check_level(self, k: int) -> None:
        if k not in self.levels:
            raise ValueError(f"{ERROR_INVALID_LEVEL}: {k} (levels 0..{self.last_level})")

    def partition(self, k: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Compact description of level k.

        Returns:
            Tuple of (atom ids, point -> position in atom ids, atom masses)
        """
        self.check_level(k)
        if k not in self._partition:
            labels = np.empty(self.measure.size, dtype=int)
            ids = np.asarray(sorted(self.levels[k]), dtype=int)
            for pos, atom in enumerate(ids):
                labels[self.lattice.cube(int(atom)).members] = pos
            masses = np.bincount(labels, weights=self.measure.weights, minlength=ids.shape[0])
            self._partition[k] = (ids, labels, masses)
        return self._partition[k]

    def atom_of(self, index: int, k: int) -> int:
        ids, labels, _ = self.partition(k)
        return int(ids[labels[index]])

    def children(self, atom: int) -> List[int]:
        return sorted(c for c, p in self.sigma_parent.items() if p == atom)

    def atom_average(self, f: FieldLike, atom: int) -> float:
        """<f>_Q = mu(Q)^-1 sum_{x in Q} f(x) w_x."""
        values = field_values(f, self.measure)
        members = self.cube(atom).members
        w = self.measure.weights[members]
        return float(np.dot(values[members], w) / w.sum())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lattice_measure_id": self.measure.measure_id,
            "levels": {str(k): sorted(ids) for k, ids in sorted(self.levels.items())},
            "sigma_parent": {str(c): p for c, p in sorted(self.sigma_parent.items())},
            "level_of": {str(c): k for c, k in sorted(self.level_of.items())},
            "gaps": [
                {"cube_id": g.cube_id, "ancestor_id": g.ancestor_id, "gap": g.gap}
                for _, g in sorted(self.gaps.items())
            ],
            "orphans": sorted(self.orphans),
        }


def _maximal_doubling_descendants(lattice: Lattice, atom: Cube, orphans: List[int]) -> List[int]:
    # maximal doubling cubes properly inside ``atom``; unreachable stragglers become orphan atoms
    found: List[int] = []
    stack = list(reversed(atom.children))
    while stack:
        cube = lattice.cube(stack.pop())
        if cube.is_db_doubling and cube.size < atom.size:
            found.append(cube.id)
        elif cube.children:
            stack.extend(reversed(cube.children))
        elif cube.size < atom.size:
            orphans.append(cube.id)
            found.append(cube.id)
    return found


def build_filtration(lattice: Lattice) -> Filtration:
    """
    Extract the doubling filtration from ``lattice``.

    Args:
        lattice: a finished cube lattice

    Returns:
        Filtration: levels 0..L, the last one made of singletons

    Raises:
        FiltrationError: If the root cube is not (alpha, beta)-doubling
    """
    root = lattice.root
    if not root.is_db_doubling:
        raise FiltrationError(f"{ERROR_NON_DOUBLING_ROOT} (root cube {root.id}, generation {root.generation})")

    levels: Dict[int, List[int]] = {0: [root.id]}
    level_of: Dict[int, int] = {root.id: 0}
    sigma_parent: Dict[int, int] = {}
    gaps: Dict[int, GenerationGap] = {}
    orphans: List[int] = []

    k = 0
    while True:
        next_level: List[int] = []
        split = False
        for atom_id in levels[k]:
            atom = lattice.cube(atom_id)
            kids = [] if atom.is_singleton else _maximal_doubling_descendants(lattice, atom, orphans)
            if not kids:
                next_level.append(atom_id)
                continue
            split = True
            for kid in kids:
                next_level.append(kid)
                level_of[kid] = k + 1
                sigma_parent[kid] = atom_id
                gaps[kid] = GenerationGap(kid, atom_id, lattice.cube(kid).generation - atom.generation)
        if not split:
            break
        k += 1
        levels[k] = sorted(next_level)

    if orphans:
        logger.warning("Attached %d non-doubling orphan atoms: %s", len(orphans), sorted(orphans)[:10])
    logger.info("Built filtration with %d levels and %d atoms", len(levels), len(level_of))
    return Filtration(lattice, levels, sigma_parent, level_of, gaps, sorted(set(orphans)))


def expectation_values(F: Filtration, f: FieldLike, k: int) -> np.ndarray:
    """Values of E_k f as a plain array."""
    values = field_values(f, F.measure)
    _, labels, masses = F.partition(k)
    sums = np.bincount(labels, weights=values * F.measure.weights, minlength=masses.shape[0])
    return (sums / masses)[labels]


def difference_values(F: Filtration, f: FieldLike, k: int) -> np.ndarray:
    """Values of D_k f as a plain array."""
    F.check_level(k)
    if k == 0:
        return expectation_values(F, f, 0)
    return expectation_values(F, f, k) - expectation_values(F, f, k - 1)


def cond_exp(F: Filtration, f: FieldLike, k: int) -> ScalarField:
    """
    Conditional expectation E_k f: the mu-weighted average of f on the
    level-k atom of each point.

    Raises:
        ValueError: If k is not a level of F
    """
    return ScalarField.on(F.measure, expectation_values(F, f, k))


def mart_diff(F: Filtration, f: FieldLike, k: int) -> ScalarField:
    """
    Martingale difference D_k f = E_k f - E_{k-1} f, with D_0 = E_0.

    Raises:
        ValueError: If k is not a level of F
    """
    return ScalarField.on(F.measure, difference_values(F, f, k))


def _annulus_mask(F: Filtration, atom: int) -> np.ndarray:
    parent = F.sigma_parent[atom]
    alpha = F.lattice.params.alpha
    return F.lattice.ball_mask(parent, alpha) & ~F.lattice.ball_mask(atom, PROPERTY_IV_DILATION)


def property_iv_integral(F: Filtration, atom: int, x: int) -> float:
    """
    Sum of w_y / |x - y|^n over y in alpha B_R minus 56 B_Q, with R = Q̂.

    Raises:
        ValueError: If Q is the root or x is not a point of Q
    """
    cube = F.cube(atom)
    if atom not in F.sigma_parent:
        raise ValueError(ERROR_ROOT_HAS_NO_PARENT)
    if x not in set(cube.members.tolist()):
        raise ValueError(f"Point {x} is not in atom {atom}")
    mu = F.measure
    mask = _annulus_mask(F, atom)
    mask[x] = False
    dist = mu.distances[x, mask]
    return float(np.sum(mu.weights[mask] / dist ** mu.growth_degree))


def property_iv_constant(F: Filtration) -> Dict[str, Any]:
    """C_iv: sup of :func:`property_iv_integral` over every atom with a parent and every point in it."""
    mu = F.measure
    best = 0.0
    witness: Optional[Dict[str, int]] = None
    for atom in F.sigma_parent:
        mask = _annulus_mask(F, atom)
        if not mask.any():
            continue
        members = F.cube(atom).members
        dist = mu.distances[np.ix_(members, np.flatnonzero(mask))]
        with np.errstate(divide="ignore"):
            terms = np.where(dist > 0, mu.weights[mask][None, :] / dist ** mu.growth_degree, 0.0)
        sums = terms.sum(axis=1)
        pos = int(np.argmax(sums))
        if sums[pos] > best:
            best = float(sums[pos])
            witness = {"atom": int(atom), "point": int(members[pos])}
    return {"value": best, "witness": witness}


def _k_coefficient_at(mu: PointMeasure, c1: int, r1: float, c2: int, r2: float) -> Tuple[float, int]:
    inside = mu.support_ball_mask(c2, r2)
    reach = float(mu.distances[c1, inside].max()) if inside.any() else 0.0
    n_steps = 0
    while reach > (2.0 ** n_steps) * r1 * (1.0 + BALL_TOLERANCE):
        n_steps += 1
    radii = r1 * 2.0 ** np.arange(n_steps + 1)
    masses = mu.mass_at(c1, radii)
    return 1.0 + float(np.sum(masses / radii ** mu.growth_degree)), n_steps


def K_coefficient(mu: PointMeasure, B1: Ball, B2: Ball) -> float:
    """
    K_{B1,B2} = 1 + sum_{j=0}^{N} mu(2^j B1) / (2^j r(B1))^n, where N is the
    smallest integer with supp(mu) ∩ B2 ⊂ 2^N B1.
    """
    center = np.asarray(B1.center)
    inside = mu.ball_indices(B2)
    reach = float(np.linalg.norm(mu.points[inside] - center[None, :], axis=1).max()) if inside.shape[0] else 0.0
    n_steps = 0
    while reach > (2.0 ** n_steps) * B1.radius * (1.0 + BALL_TOLERANCE):
        n_steps += 1
    total = 1.0
    for j in range(n_steps + 1):
        ball = B1.dilate(2.0 ** j)
        mass = float(mu.weights[mu.ball_indices(ball)].sum())
        total += mass / ball.radius ** mu.growth_degree
    return total


def k_coefficient_report(F: Filtration) -> Dict[str, Any]:
    """Range of K_{B_Q,B_R} / (k1 - k2) over all nested atom pairs Q ⊂ R."""
    mu = F.measure
    ratios: List[float] = []
    lowest: Optional[Dict[str, Any]] = None
    highest: Optional[Dict[str, Any]] = None
    for atom in F.sigma_parent:
        q = F.lattice.cube(atom)
        k1 = F.level_of[atom]
        ancestor = F.sigma_parent[atom]
        while True:
            r = F.lattice.cube(ancestor)
            k2 = F.level_of[ancestor]
            value, _ = _k_coefficient_at(mu, q.center_index, q.radius, r.center_index, r.radius)
            ratio = value / (k1 - k2)
            record = {"atom": atom, "ancestor": ancestor, "K": value, "level_gap": k1 - k2, "ratio": ratio}
            if lowest is None or ratio < lowest["ratio"]:
                lowest = record
            if highest is None or ratio > highest["ratio"]:
                highest = record
            ratios.append(ratio)
            if ancestor not in F.sigma_parent:
                break
            ancestor = F.sigma_parent[ancestor]
    return {
        "pairs": len(ratios),
        "min_ratio": min(ratios) if ratios else None,
        "max_ratio": max(ratios) if ratios else None,
        "min_witness": lowest,
        "max_witness": highest,
    }


def keyproperty_report(F: Filtration) -> Dict[str, Any]:
    """
    Decay of the non-doubling cubes strictly between each atom and its parent:
    mu(alpha B_T) <= A^(-10 n (gen(T) - gen(R) - 1)) mu(alpha B_R).

    Also reports the smallest effective exponent e with
    mu(alpha B_T) = A^(-e n (gen(T) - gen(R) - 1)) mu(alpha B_R).
    """
    lattice = F.lattice
    mu = F.measure
    alpha, A = lattice.params.alpha, lattice.params.A
    n = mu.growth_degree
    checked = 0
    witnesses: List[Dict[str, Any]] = []
    exponents: List[float] = []
    for atom, parent in F.sigma_parent.items():
        r = lattice.cube(parent)
        top = lattice.ball_mass(parent, alpha)
        for t_id in lattice.ancestors(atom)[1:]:
            t = lattice.cube(t_id)
            if t.generation <= r.generation:
                break
            if t.size >= r.size:
                continue
            checked += 1
            steps = t.generation - r.generation - 1
            mass = lattice.ball_mass(t_id, alpha)
            bound = A ** (-KEY_DECAY_EXPONENT * n * steps) * top
            if mass > bound * (1.0 + MASS_TOLERANCE):
                witnesses.append({"atom": atom, "parent": parent, "cube": t_id, "mass": mass, "bound": bound})
            if steps > 0 and mass > 0:
                exponents.append(-math.log(mass / top) / (n * steps * math.log(A)))
    return {
        "checked": checked,
        "violations": len(witnesses),
        "witnesses": witnesses[:10],
        "min_decay_exponent": min(exponents) if exponents else None,
    }
