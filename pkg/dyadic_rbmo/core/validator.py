"""
Invariant verification engine.

Checks are recorded as data rather than raised: ASSERTED checks are exact or
toleranced identities and decide the exit status, MEASURED checks carry the
empirical constant behind an inequality with unspecified constant, and
DIAGNOSTIC checks are informational.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .filtration import (
    Filtration, difference_values, expectation_values, k_coefficient_report, keyproperty_report, property_iv_constant,
)
from .lattice import Lattice
from .measure import FieldLike, field_values
from config.constants import (
    ERROR_INVALID_CONFIG, MASS_TOLERANCE, ORTHOGONALITY_TOLERANCE, PAPER_MODE, PROJECTION_TOLERANCE, TOLERANCE_KEYS,
)

logger = logging.getLogger(__name__)


class InvariantLevel(Enum):
    """How a check takes part in the verdict."""

    ASSERTED = "asserted"       # failure makes the run fail
    MEASURED = "measured"       # constant reported for regression
    DIAGNOSTIC = "diagnostic"   # informational


@dataclass
class InvariantCheck:
    """Outcome of a single invariant check."""

    name: str
    level: InvariantLevel
    passed: bool
    value: Any = None
    witness: Any = None
    message: str = ""


@dataclass
class InvariantReport:
    """All checks run against one subject (lattice, filtration, run, ...)."""

    subject: str
    checks: List[InvariantCheck] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def add(
        self,
        name: str,
        level: InvariantLevel,
        passed: bool,
        value: Any = None,
        witness: Any = None,
        message: str = "",
    ) -> InvariantCheck:
        check = InvariantCheck(name, level, bool(passed), value, witness, message)
        self.checks.append(check)
        if level == InvariantLevel.ASSERTED and not check.passed:
            logger.warning("%s: asserted invariant '%s' failed (%s)", self.subject, name, witness)
        return check

    def merge(self, other: "InvariantReport") -> "InvariantReport":
        """Append the checks of ``other`` with its subject as a name prefix."""
        for check in other.checks:
            self.checks.append(InvariantCheck(
                f"{other.subject}.{check.name}", check.level, check.passed,
                check.value, check.witness, check.message,
            ))
        return self

    def get(self, name: str) -> Optional[InvariantCheck]:
        return next((c for c in self.checks if c.name == name), None)

    @property
    def passed(self) -> bool:
        """True iff every asserted check passed."""
        return not self.failures

    @property
    def failures(self) -> List[InvariantCheck]:
        return [c for c in self.checks if c.level == InvariantLevel.ASSERTED and not c.passed]

    @property
    def asserted_count(self) -> int:
        return len([c for c in self.checks if c.level == InvariantLevel.ASSERTED])

    @property
    def measured_count(self) -> int:
        return len([c for c in self.checks if c.level == InvariantLevel.MEASURED])

    @property
    def diagnostic_count(self) -> int:
        return len([c for c in self.checks if c.level == InvariantLevel.DIAGNOSTIC])

    def to_dict(self) -> Dict[str, Any]:
        grouped: Dict[str, Dict[str, Any]] = {level.value: {} for level in InvariantLevel}
        for check in self.checks:
            grouped[check.level.value][check.name] = {
                "passed": check.passed,
                "value": check.value,
                "witness": check.witness,
                "message": check.message,
            }
        return {"subject": self.subject, "passed": self.passed, "metadata": self.metadata, **grouped}


def _relative_gap(a: np.ndarray, b: np.ndarray, scale: float) -> float:
    return float(np.max(np.abs(a - b))) / scale if a.size else 0.0


class InvariantEngine:
    """
    Runs the invariant checks of the lattice and the filtration.

    Checks of the analysis modules (decompositions, sparse families, matrix
    norms) live next to those operations and return InvariantReports too.
    """

    def __init__(self, tolerances: Optional[Dict[str, float]] = None):
        """
        Args:
            tolerances: overrides for the keys of TOLERANCE_KEYS
        """
        self.tolerances = {
            "projection": PROJECTION_TOLERANCE,
            "mass": MASS_TOLERANCE,
            "orthogonality": ORTHOGONALITY_TOLERANCE,
        }
        unknown = sorted(set(tolerances or {}) - set(TOLERANCE_KEYS))
        if unknown:
            raise ValueError(f"{ERROR_INVALID_CONFIG}: unknown tolerance keys {unknown}")
        self.tolerances.update({k: float(v) for k, v in (tolerances or {}).items()})

    def check_lattice(self, lattice: Lattice) -> InvariantReport:
        """
        Verify partition, nesting, 5B disjointness and the radius sandwich;
        measure the containment B_Q ⊂ Q ⊂ 28 B_Q.

        Args:
            lattice (Lattice): Lattice to verify

        Returns:
            InvariantReport: Checks for the lattice
        """
        report = InvariantReport("lattice", metadata={
            "cubes": len(lattice.cubes),
            "k_min": lattice.k_min,
            "k_max": lattice.k_max,
            "x0": lattice.x0,
            "forced_skips": len(lattice.forced_skips),
        })

        partition = lattice.partition_violations()
        report.add("partition", InvariantLevel.ASSERTED, not partition, len(partition), partition[:10])
        nesting = lattice.nesting_violations()
        report.add("nesting", InvariantLevel.ASSERTED, not nesting, len(nesting), nesting[:10])
        disjoint = lattice.disjointness_violations()
        report.add("five_ball_disjointness", InvariantLevel.ASSERTED, not disjoint, len(disjoint), disjoint[:10])
        sandwich = lattice.sandwich_violations()
        report.add("radius_sandwich", InvariantLevel.ASSERTED, not sandwich, len(sandwich), sandwich[:10])

        containment = lattice.containment_report()
        report.add(
            "containment", InvariantLevel.MEASURED, containment["fraction"] >= 1.0,
            containment["fraction"], containment["failures"],
            "fraction of cubes with B_Q ∩ supp ⊂ Q ⊂ 28 B_Q",
        )
        decay = lattice.nondoubling_decay_report()
        report.add(
            "nondoubling_decay", InvariantLevel.DIAGNOSTIC, decay["fraction"] >= 1.0,
            decay["fraction"], {"non_doubling_cubes": decay["non_doubling_cubes"]},
        )
        return report

    def check_filtration(self, F: Filtration, fields: Sequence[FieldLike] = ()) -> InvariantReport:
        """
        Verify the filtration structure and, over ``fields``, the tower
        property, mass conservation, orthogonality of martingale differences
        and recovery at the finest level.

        Args:
            F (Filtration): Filtration to verify
            fields: Random or user fields to test the projections on

        Returns:
            InvariantReport: Checks for the filtration
        """
        mu = F.measure
        paper_mode = F.lattice.params.mode == PAPER_MODE
        report = InvariantReport("filtration", metadata={
            "levels": len(F.levels),
            "atoms": len(F.level_of),
            "orphans": len(F.orphans),
            "fields": len(fields),
        })

        bad_levels = []
        for k in sorted(F.levels):
            _, labels, _ = F.partition(k)
            covered = np.zeros(mu.size, dtype=int)
            for atom in F.levels[k]:
                covered[F.lattice.cube(atom).members] += 1
            if np.any(covered != 1):
                bad_levels.append(k)
        report.add("level_partition", InvariantLevel.ASSERTED, not bad_levels, len(bad_levels), bad_levels)

        non_doubling = sorted(a for a in F.level_of if not F.lattice.cube(a).is_db_doubling)
        report.add("atoms_doubling", InvariantLevel.ASSERTED, not non_doubling, len(non_doubling), non_doubling[:10])

        bad_parents = []
        for child, parent in F.sigma_parent.items():
            c, p = F.lattice.cube(child), F.lattice.cube(parent)
            proper = c.size < p.size and bool(np.all(np.isin(c.members, p.members)))
            if not proper or F.level_of[child] != F.level_of[parent] + 1:
                bad_parents.append({"atom": child, "parent": parent})
        report.add("parent_structure", InvariantLevel.ASSERTED, not bad_parents, len(bad_parents), bad_parents[:10])

        if fields:
            self._check_projections(F, fields, report)

        c_iv = property_iv_constant(F)
        report.add("property_iv_constant", InvariantLevel.MEASURED, np.isfinite(c_iv["value"]),
                   c_iv["value"], c_iv["witness"])

        key = keyproperty_report(F)
        report.add(
            "key_decay", InvariantLevel.ASSERTED if paper_mode else InvariantLevel.MEASURED,
            key["violations"] == 0, key["min_decay_exponent"], key["witnesses"],
            f"{key['checked']} intermediate cubes checked",
        )

        k_report = k_coefficient_report(F)
        report.add("k_coefficient_ratio", InvariantLevel.DIAGNOSTIC, True,
                   [k_report["min_ratio"], k_report["max_ratio"]], k_report["max_witness"])
        return report

    def _check_projections(self, F: Filtration, fields: Sequence[FieldLike], report: InvariantReport) -> None:
        mu = F.measure
        levels = sorted(F.levels)
        tower = 0.0
        mass = 0.0
        ortho = 0.0
        finest = 0.0
        witness: Dict[str, Any] = {}
        for index, f in enumerate(fields):
            values = field_values(f, mu)
            scale = max(float(np.max(np.abs(values))), 1e-300)
            expectations = {k: expectation_values(F, values, k) for k in levels}
            for k in levels:
                for j in levels:
                    gap = _relative_gap(expectation_values(F, expectations[k], j), expectations[min(j, k)], scale)
                    if gap > tower:
                        tower, witness["tower"] = gap, {"field": index, "levels": [k, j]}
            integral = float(np.dot(values, mu.weights))
            l1 = max(float(np.dot(np.abs(values), mu.weights)), 1e-300)
            for k in levels:
                gap = abs(float(np.dot(expectations[k], mu.weights)) - integral) / l1
                if gap > mass:
                    mass, witness["mass"] = gap, {"field": index, "level": k}
            diffs = np.stack([difference_values(F, values, k) for k in levels])
            gram = (diffs * mu.weights[None, :]) @ diffs.T
            np.fill_diagonal(gram, 0.0)
            norm2 = float(np.dot(values ** 2, mu.weights))
            if norm2 > 0:
                gap = float(np.max(np.abs(gram))) / norm2
                if gap > ortho:
                    ortho, witness["orthogonality"] = gap, {"field": index}
            gap = _relative_gap(expectations[levels[-1]], values, scale)
            if gap > finest:
                finest, witness["finest"] = gap, {"field": index}

        tol = self.tolerances
        report.add("tower_property", InvariantLevel.ASSERTED, tower <= tol["projection"], tower, witness.get("tower"))
        report.add("mass_conservation", InvariantLevel.ASSERTED, mass <= tol["mass"], mass, witness.get("mass"))
        report.add("orthogonality", InvariantLevel.ASSERTED, ortho <= tol["orthogonality"], ortho,
                   witness.get("orthogonality"))
        report.add("finest_level_recovery", InvariantLevel.ASSERTED, finest <= tol["projection"], finest,
                   witness.get("finest"))


def generate_invariant_report(report: InvariantReport) -> str:
    """
    Render a human-readable markdown report.

    Args:
        report (InvariantReport): Report to render

    Returns:
        str: Formatted report
    """
    lines = []
    lines.append(f"# Invariant Report: {report.subject}")
    lines.append(f"**Status**: {'✅ PASSED' if report.passed else '❌ FAILED'}")
    lines.append(f"**Total Checks**: {len(report.checks)}")
    lines.append("")

    lines.append(f"🔴 **Asserted**: {report.asserted_count} ({len(report.failures)} failed)")
    if report.measured_count > 0:
        lines.append(f"🟡 **Measured**: {report.measured_count}")
    if report.diagnostic_count > 0:
        lines.append(f"🔵 **Diagnostic**: {report.diagnostic_count}")
    lines.append("")

    icons = {"asserted": "🔴", "measured": "🟡", "diagnostic": "🔵"}
    for level in InvariantLevel:
        level_checks = [c for c in report.checks if c.level == level]
        if not level_checks:
            continue
        lines.append(f"## {icons[level.value]} {level.value.title()} Checks")
        lines.append("")
        for i, check in enumerate(level_checks, 1):
            mark = "✅" if check.passed else "❌"
            lines.append(f"{i}. {mark} **{check.name}**: {check.value}")
            if check.message:
                lines.append(f"   - {check.message}")
            if check.witness and not check.passed:
                lines.append(f"   - Witness: {check.witness}")
        lines.append("")

    if report.metadata:
        lines.append("## Details")
        lines.append("")
        for key, value in report.metadata.items():
            lines.append(f"- **{key.replace('_', ' ').title()}**: {value}")

    return "\n".join(lines)
