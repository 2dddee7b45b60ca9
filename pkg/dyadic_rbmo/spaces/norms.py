"""
RBMO_Σ, Tolsa RBMO and H¹_Σ norms.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .tolsa import TolsaEvaluator
from ..core.filtration import Filtration, difference_values, expectation_values
from ..core.measure import FieldLike, PointMeasure, field_values
from config.constants import ERROR_CONSTANT_FIELDS, SUPPORTED_NORM_EXPONENTS

logger = logging.getLogger(__name__)


@dataclass
class NormReport:
    """A norm value with the cube, ball or pair attaining it."""

    norm_value: float
    witness: Any
    variant: str
    experimental: bool = False
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "norm_value": self.norm_value,
            "witness": self.witness,
            "variant": self.variant,
            "experimental": self.experimental,
            "details": self.details,
        }


def predecessor_average(F: Filtration, values: np.ndarray, atom: int) -> float:
    """<f>_Q̂, or <f>_root for the root atom."""
    return F.atom_average(values, F.sigma_parent.get(atom, F.root))


def atom_oscillations(F: Filtration, f: FieldLike, p: float = 1.0) -> Dict[int, float]:
    """(⨍_Q |f - <f>_Q̂|^p dmu)^(1/p) for every atom Q."""
    mu = F.measure
    values = field_values(f, mu)
    result = {}
    for atom in F.atoms:
        members = F.lattice.cube(atom).members
        w = mu.weights[members]
        gap = np.abs(values[members] - predecessor_average(F, values, atom))
        if np.isinf(p):
            result[atom] = float(gap.max())
        else:
            result[atom] = float((np.dot(gap ** p, w) / w.sum()) ** (1.0 / p))
    return result


def rbmo_sigma_norm(F: Filtration, f: FieldLike, p: float = 1.0) -> NormReport:
    """
    ||f||_{RBMO_Σ,p} = sup over atoms Q of (⨍_Q |f - <f>_Q̂|^p dmu)^(1/p).

    Exponents other than 1 and 2 use the same formula and are flagged
    experimental.

    Raises:
        ValueError: If p < 1
    """
    if not p >= 1:
        raise ValueError(f"Norm exponent must be >= 1 (got {p})")
    experimental = p not in SUPPORTED_NORM_EXPONENTS
    if experimental:
        logger.warning("RBMO_Σ norm with p = %g is experimental", p)
    oscillations = atom_oscillations(F, f, p)
    atom = max(oscillations, key=lambda a: (oscillations[a], -a))
    return NormReport(
        oscillations[atom],
        {"atom": atom, "level": F.level_of[atom]},
        f"rbmo_sigma_p{p:g}",
        experimental,
    )


def rbmo_tolsa_norm(
    mu: PointMeasure,
    f: FieldLike,
    beta: float,
    evaluator: Optional[TolsaEvaluator] = None,
) -> NormReport:
    """
    Tolsa's norm max(||f||_*, ||f||_d) over the canonical ball family.

    Pass a prebuilt ``evaluator`` to reuse the ball family across fields.
    """
    evaluator = evaluator or TolsaEvaluator(mu, beta)
    result = evaluator.norm(f)
    if result["star"] >= result["d"]:
        witness = {"part": "star", **(result["star_witness"] or {})}
    else:
        witness = {"part": "d", **(result["d_witness"] or {})}
    return NormReport(
        result["value"],
        witness,
        result["variant"],
        details={"star": result["star"], "d": result["d"], "beta": beta},
    )


def inclusion_ratio(
    F: Filtration,
    fields: Sequence[FieldLike],
    beta: Optional[float] = None,
) -> Tuple[float, Dict[str, Any]]:
    """
    max over nonconstant fields of ||f||_{RBMO_Σ,1} / ||f||_{RBMO}.

    Returns:
        Tuple of the ratio and a witness record

    Raises:
        ValueError: If every field is constant
    """
    mu = F.measure
    beta = F.lattice.params.beta if beta is None else beta
    evaluator = TolsaEvaluator(mu, beta)
    best = -1.0
    witness: Dict[str, Any] = {}
    for index, f in enumerate(fields):
        sigma = rbmo_sigma_norm(F, f, 1.0).norm_value
        tolsa = evaluator.norm(f)["value"]
        if sigma == 0 and tolsa == 0:
            continue
        ratio = sigma / tolsa if tolsa > 0 else float("inf")
        if ratio > best:
            best = ratio
            witness = {"field": index, "sigma_norm": sigma, "tolsa_norm": tolsa}
    if best < 0:
        raise ValueError(ERROR_CONSTANT_FIELDS)
    return best, witness


def square_function(F: Filtration, f: FieldLike) -> np.ndarray:
    """(sum_{k >= 1} |D_k f|^2)^(1/2), pointwise."""
    values = field_values(f, F.measure)
    total = np.zeros(F.measure.size)
    for k in sorted(F.levels)[1:]:
        total += difference_values(F, values, k) ** 2
    return np.sqrt(total)


def h1_sigma_norm(F: Filtration, f: FieldLike) -> float:
    """L1 norm of the martingale square function."""
    return float(np.dot(square_function(F, f), F.measure.weights))


def duality_report(F: Filtration, pairs: Sequence[Tuple[FieldLike, FieldLike]]) -> Dict[str, Any]:
    """
    Largest |int f g dmu| / (||f||_{H¹_Σ} ||g||_{RBMO_Σ,2}) over the pairs,
    with f replaced by its mean-zero part f - E_0 f.
    """
    mu = F.measure
    best = 0.0
    witness = None
    used = 0
    for index, (f, g) in enumerate(pairs):
        values = field_values(f, mu)
        centered = values - expectation_values(F, values, 0)
        h1 = h1_sigma_norm(F, centered)
        bmo = rbmo_sigma_norm(F, g, 2.0).norm_value
        if h1 == 0 or bmo == 0:
            continue
        used += 1
        ratio = abs(float(np.dot(centered * field_values(g, mu), mu.weights))) / (h1 * bmo)
        if ratio > best:
            best, witness = ratio, {"pair": index, "h1": h1, "rbmo": bmo}
    return {"pairs": used, "max_ratio": best, "witness": witness}


def norm_bundle(F: Filtration, f: FieldLike, beta: Optional[float] = None) -> Dict[str, Any]:
    """Every scalar norm of one field, as written to the norms artifact."""
    beta = F.lattice.params.beta if beta is None else beta
    reports: List[NormReport] = [rbmo_sigma_norm(F, f, 1.0), rbmo_sigma_norm(F, f, 2.0)]
    tolsa = rbmo_tolsa_norm(F.measure, f, beta)
    return {
        "rbmo_sigma_p1": reports[0].to_dict(),
        "rbmo_sigma_p2": reports[1].to_dict(),
        "rbmo_tolsa": tolsa.to_dict(),
        "h1_sigma": h1_sigma_norm(F, f),
    }
