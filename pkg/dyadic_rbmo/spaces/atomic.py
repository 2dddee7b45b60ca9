"""
p-atomic blocks of H¹_Σ: validation, a greedy constructive block and the
block constant report.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from .norms import h1_sigma_norm
from ..core.filtration import Filtration, difference_values, expectation_values
from ..core.measure import FieldLike, field_values
from config.constants import ATOMIC_BLOCK_TOLERANCE


@dataclass
class AtomicBlock:
    """b = sum_j lambda_j a_j with supp a_j ⊂ A_j ∈ Σ_{k_j}, k_j >= base_level."""

    base_level: int
    coefficients: List[float]
    atoms: List[np.ndarray]
    supports: List[int]
    levels: Optional[List[int]] = None
    p: float = 2.0

    def resolved_levels(self, F: Filtration) -> List[int]:
        if self.levels is not None:
            return list(self.levels)
        return [F.level_of.get(s, -1) for s in self.supports]

    def evaluate(self) -> np.ndarray:
        """The function b itself."""
        if not self.atoms:
            raise ValueError("Empty block has no length to evaluate on")
        return np.sum([c * np.asarray(a, dtype=float) for c, a in zip(self.coefficients, self.atoms)], axis=0)

    @property
    def value(self) -> float:
        """|b| = sum_j |lambda_j|."""
        return float(np.sum(np.abs(self.coefficients)))


class BlockCheck(NamedTuple):
    valid: bool
    value: float
    reason: Optional[str]


def _lp_norm(values: np.ndarray, weights: np.ndarray, p: float) -> float:
    if np.isinf(p):
        return float(np.max(np.abs(values))) if values.size else 0.0
    return float(np.dot(np.abs(values) ** p, weights) ** (1.0 / p))


def _dual_exponent_inverse(p: float) -> float:
    # 1 / p'
    return 1.0 if np.isinf(p) else 1.0 - 1.0 / p


def validate_atomic_block(F: Filtration, b: AtomicBlock) -> BlockCheck:
    """
    Check the block conditions.

    Reasons for rejection: "length", "exponent", "level", "support", "size"
    and "cancellation".

    Returns:
        BlockCheck: (valid, sum_j |lambda_j|, reason or None)
    """
    mu = F.measure
    value = b.value
    if not (len(b.coefficients) == len(b.atoms) == len(b.supports)):
        return BlockCheck(False, value, "length")
    if b.levels is not None and len(b.levels) != len(b.supports):
        return BlockCheck(False, value, "length")
    if not b.p > 1:
        return BlockCheck(False, value, "exponent")
    if not b.atoms:
        return BlockCheck(True, 0.0, None)
    for atom in b.atoms:
        if np.asarray(atom).shape != (mu.size,):
            return BlockCheck(False, value, "length")

    levels = b.resolved_levels(F)
    for support, level in zip(b.supports, levels):
        if level < b.base_level or level not in F.levels or support not in F.levels[level]:
            return BlockCheck(False, value, "level")

    inverse_dual = _dual_exponent_inverse(b.p)
    for atom, support, level in zip(b.atoms, b.supports, levels):
        a = np.asarray(atom, dtype=float)
        members = F.lattice.cube(support).members
        outside = np.ones(mu.size, dtype=bool)
        outside[members] = False
        scale = max(float(np.max(np.abs(a))), 1e-300)
        if np.any(np.abs(a[outside]) > ATOMIC_BLOCK_TOLERANCE * scale):
            return BlockCheck(False, value, "support")
        bound = float(mu.weights[members].sum()) ** (-inverse_dual) / (level - b.base_level + 1)
        if _lp_norm(a[members], mu.weights[members], b.p) > bound * (1.0 + ATOMIC_BLOCK_TOLERANCE):
            return BlockCheck(False, value, "size")

    block = b.evaluate()
    scale = sum(abs(c) * float(np.max(np.abs(a))) for c, a in zip(b.coefficients, b.atoms))
    if scale > 0 and float(np.max(np.abs(expectation_values(F, block, b.base_level)))) > ATOMIC_BLOCK_TOLERANCE * scale:
        return BlockCheck(False, value, "cancellation")
    return BlockCheck(True, value, None)


def greedy_atomic_block(F: Filtration, f: FieldLike, p: float = 2.0) -> AtomicBlock:
    """
    Block for f - E_0 f built from the martingale differences.

    Every nonzero piece D_k f chi_P, with P a level-(k-1) atom, is an atom
    supported on P scaled to the size bound; its coefficient is
    ||D_k f chi_P||_p mu(P)^(1/p') k.
    """
    mu = F.measure
    values = field_values(f, mu)
    inverse_dual = _dual_exponent_inverse(p)
    coefficients: List[float] = []
    atoms: List[np.ndarray] = []
    supports: List[int] = []
    levels: List[int] = []
    for k in sorted(F.levels)[1:]:
        diff = difference_values(F, values, k)
        for parent in sorted(F.levels[k - 1]):
            members = F.lattice.cube(parent).members
            piece = np.zeros(mu.size)
            piece[members] = diff[members]
            size = _lp_norm(piece[members], mu.weights[members], p)
            if size == 0:
                continue
            coefficient = size * float(mu.weights[members].sum()) ** inverse_dual * k
            coefficients.append(coefficient)
            atoms.append(piece / coefficient)
            supports.append(parent)
            levels.append(k - 1)
    return AtomicBlock(0, coefficients, atoms, supports, levels, p)


def block_constant_report(F: Filtration, blocks: Sequence[AtomicBlock]) -> Dict[str, Any]:
    """max ||b||_{H¹_Σ} / sum_j |lambda_j| over the valid blocks."""
    best = 0.0
    witness = None
    invalid: List[Dict[str, Any]] = []
    for index, block in enumerate(blocks):
        check = validate_atomic_block(F, block)
        if not check.valid:
            invalid.append({"block": index, "reason": check.reason})
            continue
        if check.value == 0 or not block.atoms:
            continue
        ratio = h1_sigma_norm(F, block.evaluate()) / check.value
        if ratio > best:
            best, witness = ratio, index
    return {"blocks": len(blocks), "max_ratio": best, "witness": witness, "invalid": invalid}
