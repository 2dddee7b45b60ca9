"""
Calderón-Zygmund decomposition over the doubling filtration, and the
empirical weak (1,1) check.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .discrete import DiscreteOperator, apply
from ..core.filtration import Filtration
from ..core.measure import FieldLike, field_values
from ..core.validator import InvariantLevel, InvariantReport
from config.constants import (
    DEFAULT_LAMBDA_GRID, ERROR_LAMBDA_TOO_SMALL, ERROR_NEGATIVE_FIELD, RECONSTRUCTION_TOLERANCE,
)

logger = logging.getLogger(__name__)


@dataclass
class CZDecomposition:
    """f = g + sum_k phi_k at height lam."""

    lam: float
    good: np.ndarray
    phis: Dict[int, np.ndarray]
    maximal_cubes: List[int]
    report: InvariantReport
    bad_mass_ratio: float = 0.0
    good_square_ratio: float = 0.0
    good_linear_ratio: float = 0.0

    @property
    def bad(self) -> np.ndarray:
        if not self.phis:
            return np.zeros_like(self.good)
        return np.sum(list(self.phis.values()), axis=0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda": self.lam,
            "maximal_cubes": self.maximal_cubes,
            "levels": sorted(self.phis),
            "bad_mass_ratio": self.bad_mass_ratio,
            "good_square_ratio": self.good_square_ratio,
            "good_linear_ratio": self.good_linear_ratio,
            "invariants": self.report.to_dict(),
        }


def _maximal_atoms(F: Filtration, averages: Dict[int, float], lam: float) -> List[int]:
    # top-down: an atom is maximal when it exceeds lam and none of its ancestors did
    chosen: List[int] = []
    stack = [F.root]
    while stack:
        atom = stack.pop()
        if averages[atom] > lam:
            chosen.append(atom)
            continue
        stack.extend(F.children(atom))
    return sorted(chosen)


def cz_decompose(F: Filtration, f: FieldLike, lam: float) -> CZDecomposition:
    """
    Decompose a nonnegative field at height ``lam``.

    The maximal atoms Q with <f>_Q > lam give the pieces
    phi_k = sum over level-k maximal Q of (f chi_Q - (int_Q f / mu(Q̂)) chi_Q̂),
    and g = f - sum_k phi_k.

    Args:
        F: doubling filtration
        f: nonnegative field
        lam: height, above the mean <f> of the whole measure

    Returns:
        CZDecomposition: the parts, the maximal atoms and the invariant checks

    Raises:
        ValueError: If f has a negative value or lam is too small
    """
    mu = F.measure
    values = field_values(f, mu)
    if np.any(values < 0):
        raise ValueError(ERROR_NEGATIVE_FIELD)
    l1 = float(np.dot(values, mu.weights))
    if not lam > 0 or not lam > l1 / mu.total_mass:
        raise ValueError(f"{ERROR_LAMBDA_TOO_SMALL}: lambda = {lam:g}, ||f||_1 / ||mu|| = {l1 / mu.total_mass:g}")

    averages = {atom: F.atom_average(values, atom) for atom in F.level_of}
    maximal = _maximal_atoms(F, averages, lam)

    phis: Dict[int, np.ndarray] = {}
    piece_means = 0.0
    parent_excess: List[Dict[str, Any]] = []
    for atom in maximal:
        level = F.level_of[atom]
        parent = F.sigma_parent[atom]
        members = F.lattice.cube(atom).members
        parent_members = F.lattice.cube(parent).members
        piece = np.zeros(mu.size)
        integral = float(np.dot(values[members], mu.weights[members]))
        piece[members] += values[members]
        piece[parent_members] -= integral / float(mu.weights[parent_members].sum())
        scale = max(integral, 1e-300)
        piece_means = max(piece_means, abs(float(np.dot(piece[parent_members], mu.weights[parent_members]))) / scale)
        phis[level] = phis.get(level, np.zeros(mu.size)) + piece
        if averages[parent] > lam:
            parent_excess.append({"atom": atom, "parent": parent, "average": averages[parent]})

    bad = np.sum(list(phis.values()), axis=0) if phis else np.zeros(mu.size)
    good = values - bad
    scale = max(float(np.max(np.abs(values))), 1e-300)
    reconstruction = float(np.max(np.abs(values - good - bad))) / scale

    parents = sorted({F.sigma_parent[a] for a in maximal})
    good_parent = max((F.atom_average(good, p) / lam for p in parents), default=0.0)

    report = InvariantReport("czd", metadata={"lambda": lam, "maximal_cubes": len(maximal)})
    report.add("reconstruction", InvariantLevel.ASSERTED, reconstruction <= RECONSTRUCTION_TOLERANCE, reconstruction)
    report.add("piece_mean_zero", InvariantLevel.ASSERTED, piece_means <= RECONSTRUCTION_TOLERANCE, piece_means)
    report.add("parent_average_bound", InvariantLevel.ASSERTED, not parent_excess, len(parent_excess),
               parent_excess[:10])
    report.add("good_parent_average_ratio", InvariantLevel.MEASURED, True, good_parent)

    decomposition = CZDecomposition(lam, good, phis, maximal, report)
    if l1 > 0:
        bad_l1 = sum(float(np.dot(np.abs(phi), mu.weights)) for phi in phis.values())
        good_l2_squared = float(np.dot(good ** 2, mu.weights))
        decomposition.bad_mass_ratio = bad_l1 / l1
        decomposition.good_square_ratio = good_l2_squared / (lam * l1)
        decomposition.good_linear_ratio = float(np.sqrt(good_l2_squared)) / (lam * l1)
    report.add("bad_mass_ratio", InvariantLevel.MEASURED, True, decomposition.bad_mass_ratio)
    report.add("good_square_ratio", InvariantLevel.MEASURED, True, decomposition.good_square_ratio)
    report.add("good_linear_ratio", InvariantLevel.MEASURED, True, decomposition.good_linear_ratio)
    return decomposition


@dataclass
class Weak11Report:
    """lam mu(|Tf| > lam) / ||f||_1 over a corpus and a grid of heights."""

    rows: List[Dict[str, float]] = field(default_factory=list)
    exact_sups: List[float] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max([r["ratio"] for r in self.rows] + self.exact_sups, default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {"max_ratio": self.max_ratio, "exact_sups": self.exact_sups, "rows": self.rows}


def weak11_report(
    T: DiscreteOperator,
    fields: Sequence[FieldLike],
    lambdas: Optional[Sequence[float]] = None,
) -> Weak11Report:
    """
    Tabulate lam mu(|Tf| > lam) / ||f||_1.

    ``lambdas`` are absolute heights; when omitted the grid is expressed in
    units of ||f||_1 / ||mu||. For each field the exact sup over lam > 0,
    max over values v of |Tf| of v mu(|Tf| >= v), is recorded too.
    """
    weights = T.weights
    total = float(np.sum(weights))
    report = Weak11Report()
    for index, f in enumerate(fields):
        values = field_values(f)
        l1 = float(np.dot(np.abs(values), weights))
        image = np.abs(apply(T, values))
        if l1 == 0:
            grid = list(lambdas) if lambdas is not None else list(DEFAULT_LAMBDA_GRID)
            report.rows.extend({"field": index, "lambda": lam, "ratio": 0.0} for lam in grid)
            report.exact_sups.append(0.0)
            continue
        grid = list(lambdas) if lambdas is not None else [s * l1 / total for s in DEFAULT_LAMBDA_GRID]
        for lam in grid:
            ratio = lam * float(weights[image > lam].sum()) / l1
            report.rows.append({"field": index, "lambda": lam, "ratio": ratio})
        order = np.argsort(-image, kind="stable")
        tails = np.cumsum(weights[order])
        report.exact_sups.append(float(np.max(image[order] * tails)) / l1)
    return report
