"""
John-Nirenberg diagnostics for RBMO_Σ: level-set decay and p-norm equivalence.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .norms import predecessor_average, rbmo_sigma_norm
from ..core.filtration import Filtration
from ..core.measure import FieldLike, field_values
from config.constants import DEFAULT_P_GRID, ERROR_ZERO_NORM, JN_DEFAULT_STEPS, JN_MIN_DISTINCT_RATIOS, MASS_TOLERANCE

logger = logging.getLogger(__name__)


@dataclass
class JohnNirenbergReport:
    """Decay table of sup_Q mu(Q ∩ {|f - <f>_Q̂| > t}) / mu(Q) with a fitted exponential rate."""

    norm: float
    rows: List[Dict[str, float]] = field(default_factory=list)
    rate: Optional[float] = None
    intercept: Optional[float] = None
    degenerate: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "norm": self.norm,
            "rate": self.rate,
            "intercept": self.intercept,
            "degenerate": self.degenerate,
            "rows": self.rows,
        }

    def csv_rows(self) -> List[List[float]]:
        return [[r["s"], r["t"], r["ratio"]] for r in self.rows]


def john_nirenberg_report(
    F: Filtration,
    f: FieldLike,
    steps: Sequence[float] = JN_DEFAULT_STEPS,
) -> JohnNirenbergReport:
    """
    Tabulate level-set decay at t = s ||f||_{RBMO_Σ,1} for s in ``steps``.

    The rate is a least-squares fit of log(ratio) against s over the rows
    with a positive ratio; fewer than JN_MIN_DISTINCT_RATIOS distinct
    positive ratios mark the fit degenerate.

    Raises:
        ValueError: If the norm of f is zero
    """
    mu = F.measure
    values = field_values(f, mu)
    norm = rbmo_sigma_norm(F, values, 1.0).norm_value
    if norm == 0:
        raise ValueError(ERROR_ZERO_NORM)

    # per-atom deviations are field dependent but step independent
    deviations = []
    for atom in F.atoms:
        members = F.lattice.cube(atom).members
        w = mu.weights[members]
        deviations.append((np.abs(values[members] - predecessor_average(F, values, atom)), w, float(w.sum())))

    report = JohnNirenbergReport(norm)
    for s in steps:
        t = float(s) * norm
        ratio = max(float(w[gap > t].sum()) / mass for gap, w, mass in deviations)
        report.rows.append({"s": float(s), "t": t, "ratio": ratio})

    positive = [(r["s"], r["ratio"]) for r in report.rows if r["ratio"] > 0]
    distinct = {round(ratio, 12) for _, ratio in positive}
    if len(distinct) < JN_MIN_DISTINCT_RATIOS:
        report.degenerate = True
        return report
    xs = np.array([s for s, _ in positive])
    ys = np.log(np.array([ratio for _, ratio in positive]))
    slope, intercept = np.polyfit(xs, ys, 1)
    report.rate = float(-slope)
    report.intercept = float(intercept)
    return report


def p_equivalence_report(
    F: Filtration,
    f: FieldLike,
    ps: Sequence[float] = DEFAULT_P_GRID,
) -> Dict[str, Any]:
    """
    RBMO_Σ norms for every p in ``ps``, whether they are nondecreasing in p
    (exact), and the ratios norm_p / norm_1.
    """
    exponents = sorted(float(p) for p in ps)
    norms = {p: rbmo_sigma_norm(F, f, p).norm_value for p in exponents}
    monotone = all(
        norms[a] <= norms[b] * (1.0 + MASS_TOLERANCE) + MASS_TOLERANCE
        for a, b in zip(exponents, exponents[1:])
    )
    base = norms.get(1.0, rbmo_sigma_norm(F, f, 1.0).norm_value)
    ratios = {f"{p:g}": (norms[p] / base if base > 0 else None) for p in exponents}
    return {"norms": {f"{p:g}": v for p, v in norms.items()}, "monotone": monotone, "ratios": ratios}
