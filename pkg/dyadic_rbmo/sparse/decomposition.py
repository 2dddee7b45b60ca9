"""
Stopping-time sparse families and pointwise sparse domination.

Starting from Q0, every selected atom Q stops at the maximal atoms R ⊊ Q on
which the exceptional set {|f - m_Q f| > omega_lam(f; Q)} takes more than
half of the mass. The family comes with a pointwise certificate comparing
|f - m_Q0 f| with twice the sum of local oscillations and median jumps.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .median import lambda_oscillation, weighted_median
from ..core.filtration import Filtration
from ..core.measure import FieldLike, field_values
from ..core.validator import InvariantLevel, InvariantReport
from ..operators.discrete import DiscreteOperator, apply
from ..operators.maximal import maximal_centered
from config.constants import (
    DEFAULT_SPARSE_LAMBDA, ERROR_LAMBDA_RANGE, ERROR_SUPPORT, ERROR_UNKNOWN_ATOM, SPARSE_CERTIFICATE_CONSTANT,
    MASS_TOLERANCE, SPARSE_LAMBDA_LOWER, SPARSE_LAMBDA_UPPER, STOPPING_MASS_FRACTION,
)

logger = logging.getLogger(__name__)


@dataclass
class SparseFamily:
    """Atoms with pairwise disjoint witness sets E_Q ⊂ Q."""

    cubes: List[int]
    witness: Dict[int, np.ndarray]
    eta: float
    parent: Dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cubes": self.cubes,
            "eta": self.eta,
            "witness": {str(q): w.tolist() for q, w in sorted(self.witness.items())},
            "parent": {str(q): p for q, p in sorted(self.parent.items())},
        }


@dataclass
class SparseCertificate:
    """Pointwise comparison of |f - m_Q0 f| chi_Q0 with the sparse sum."""

    lhs: np.ndarray
    rhs: np.ndarray
    constant: float
    medians: Dict[int, float]
    oscillations: Dict[int, float]

    @property
    def ratios(self) -> np.ndarray:
        positive = self.lhs > 0
        return self.rhs[positive] / self.lhs[positive]

    @property
    def min_ratio(self) -> Optional[float]:
        r = self.ratios
        return float(r.min()) if r.size else None

    @property
    def max_ratio(self) -> Optional[float]:
        r = self.ratios
        return float(r.max()) if r.size else None

    @property
    def holds(self) -> bool:
        r = self.ratios
        return bool(np.all(r >= 1.0 - MASS_TOLERANCE))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "constant": self.constant,
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "holds": self.holds,
        }


def _check_support(F: Filtration, values: np.ndarray, Q0: int) -> np.ndarray:
    if Q0 not in F.level_of:
        raise ValueError(f"{ERROR_UNKNOWN_ATOM}: {Q0}")
    inside = np.zeros(F.measure.size, dtype=bool)
    inside[F.lattice.cube(Q0).members] = True
    if np.any(values[~inside] != 0):
        raise ValueError(f"{ERROR_SUPPORT} (atom {Q0})")
    return inside


def sparse_decompose(
    F: Filtration,
    f: FieldLike,
    Q0: int,
    lam: float = DEFAULT_SPARSE_LAMBDA,
) -> Tuple[SparseFamily, SparseCertificate]:
    """
    Build the stopping-time family of f below Q0 and its certificate.

    Args:
        F: doubling filtration
        f: field supported in Q0
        Q0: starting atom
        lam: oscillation parameter, 1/4 < lam < 1/2

    Returns:
        Tuple of the family and the pointwise certificate

    Raises:
        ValueError: If lam is out of range, Q0 is not an atom or f leaves Q0
    """
    if not SPARSE_LAMBDA_LOWER < lam < SPARSE_LAMBDA_UPPER:
        raise ValueError(
            f"{ERROR_LAMBDA_RANGE}: {lam} (expected {SPARSE_LAMBDA_LOWER} < lambda < {SPARSE_LAMBDA_UPPER})"
        )
    mu = F.measure
    values = field_values(f, mu)
    inside = _check_support(F, values, Q0)

    medians: Dict[int, float] = {}
    oscillations: Dict[int, float] = {}

    def median_of(atom: int) -> float:
        if atom not in medians:
            medians[atom] = weighted_median(mu, F.lattice.cube(atom).members, values)
        return medians[atom]

    cubes: List[int] = []
    witness: Dict[int, np.ndarray] = {}
    parent: Dict[int, int] = {}
    queue = [Q0]
    while queue:
        atom = queue.pop(0)
        cubes.append(atom)
        members = F.lattice.cube(atom).members
        m = median_of(atom)
        omega = lambda_oscillation(mu, members, values, lam)
        oscillations[atom] = omega
        exceptional = np.zeros(mu.size, dtype=bool)
        exceptional[members] = np.abs(values[members] - m) > omega

        chosen: List[int] = []
        stack = list(reversed(F.children(atom)))
        while stack:
            candidate = stack.pop()
            cand_members = F.lattice.cube(candidate).members
            w = mu.weights[cand_members]
            threshold = STOPPING_MASS_FRACTION * float(w.sum()) * (1.0 + MASS_TOLERANCE)
            if float(w[exceptional[cand_members]].sum()) > threshold:
                chosen.append(candidate)
            else:
                stack.extend(reversed(F.children(candidate)))

        covered = np.zeros(mu.size, dtype=bool)
        for child in chosen:
            covered[F.lattice.cube(child).members] = True
            parent[child] = atom
        witness[atom] = np.asarray([i for i in members if not covered[i]], dtype=int)
        queue.extend(sorted(chosen))

    eta = min(float(mu.weights[witness[q]].sum()) / float(mu.weights[F.lattice.cube(q).members].sum()) for q in cubes)
    family = SparseFamily(cubes, witness, eta, parent)

    lhs = np.where(inside, np.abs(values - median_of(Q0)), 0.0)
    rhs = np.zeros(mu.size)
    for atom in cubes:
        jump = 0.0 if atom == Q0 else abs(median_of(atom) - median_of(F.sigma_parent[atom]))
        rhs[F.lattice.cube(atom).members] += SPARSE_CERTIFICATE_CONSTANT * (oscillations[atom] + jump)
    certificate = SparseCertificate(lhs, rhs, SPARSE_CERTIFICATE_CONSTANT, medians, oscillations)
    if not certificate.holds:
        logger.warning("Sparse certificate below 1 (min ratio %s)", certificate.min_ratio)
    return family, certificate


def check_sparse_family(F: Filtration, family: SparseFamily) -> InvariantReport:
    """Witness disjointness and containment (asserted) and the measured eta."""
    mu = F.measure
    report = InvariantReport("sparse_family", metadata={"cubes": len(family.cubes)})
    counts = np.zeros(mu.size, dtype=int)
    outside = []
    heavy = []
    for q in family.cubes:
        members = F.lattice.cube(q).members
        counts[family.witness[q]] += 1
        if not np.all(np.isin(family.witness[q], members)):
            outside.append(q)
        children = [c for c, p in family.parent.items() if p == q]
        child_mass = sum(float(mu.weights[F.lattice.cube(c).members].sum()) for c in children)
        if child_mass > STOPPING_MASS_FRACTION * float(mu.weights[members].sum()) * (1.0 + MASS_TOLERANCE):
            heavy.append(q)
    overlap = np.flatnonzero(counts > 1)
    report.add("witness_disjoint", InvariantLevel.ASSERTED, overlap.shape[0] == 0, int(overlap.shape[0]),
               overlap[:10].tolist())
    report.add("witness_inside_cube", InvariantLevel.ASSERTED, not outside, len(outside), outside[:10])
    report.add("eta", InvariantLevel.MEASURED, family.eta >= 0.5 * STOPPING_MASS_FRACTION, family.eta)
    report.add("children_mass_condition", InvariantLevel.DIAGNOSTIC, not heavy, len(heavy), heavy[:10])
    return report


@dataclass
class Domination:
    """Sparse bound for |Tf| on Q0 and its sup ratio."""

    family: SparseFamily
    certificate: SparseCertificate
    bound: np.ndarray
    image: np.ndarray
    ratio: float
    failure: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ratio": self.ratio,
            "failure": self.failure,
            "family_size": len(self.family.cubes),
            "eta": self.family.eta,
            "certificate": self.certificate.to_dict(),
        }


def dominate(
    T: DiscreteOperator,
    F: Filtration,
    f: FieldLike,
    Q0: int,
    lam: float = DEFAULT_SPARSE_LAMBDA,
) -> Domination:
    """
    Compare |Tf| on Q0 with sum over the sparse family of min_Q M^c f.

    The family is the stopping-time family of Tf chi_Q0.

    Raises:
        ValueError: If f is not supported in Q0
    """
    mu = F.measure
    values = field_values(f, mu)
    inside = _check_support(F, values, Q0)
    image = apply(T, values)
    family, certificate = sparse_decompose(F, np.where(inside, image, 0.0), Q0, lam)

    maximal = maximal_centered(mu, values)
    bound = np.zeros(mu.size)
    for atom in family.cubes:
        members = F.lattice.cube(atom).members
        bound[members] += float(maximal[members].min())

    target = np.where(inside, np.abs(image), 0.0)
    failure = None
    zero_bound = (target > 0) & (bound <= 0)
    if zero_bound.any():
        point = int(np.flatnonzero(zero_bound)[0])
        failure = {"point": point, "Tf": float(image[point]), "bound": 0.0}
        ratio = float("inf")
    else:
        positive = target > 0
        ratio = float(np.max(target[positive] / bound[positive])) if positive.any() else 0.0
    return Domination(family, certificate, bound, image, ratio, failure)
