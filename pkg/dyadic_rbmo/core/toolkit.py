"""
Core RBMO Toolkit.

Main orchestration class that builds the measure, lattice, filtration,
operator and field corpora of one run configuration and drives every
analysis, collecting invariant reports and writing artifacts.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np

from .filtration import Filtration, build_filtration
from .lattice import Lattice, LatticeParams, build_lattice
from .measure import PointMeasure, ScalarField, load_field
from .validator import InvariantEngine, InvariantLevel, InvariantReport
from ..kernels import KERNEL_REGISTRY, Kernel, kernel_conditions, parse_kernel_flag
from ..matrixval import (
    MatrixField, MatrixKernel, column_row_report, endpoint_corpus_report, hormander_report, kadison_schwarz_check,
    load_matrix_field, rbmo_sigma_c_norm, theorem_d_terms,
)
from ..operators import DiscreteOperator, apply, cz_decompose, endpoint_terms, l2_norm_estimate, weak11_report
from ..spaces import (
    block_constant_report, duality_report, greedy_atomic_block, inclusion_ratio, john_nirenberg_report, norm_bundle,
    p_equivalence_report, rbmo_sigma_norm,
)
from ..sparse import Weight, a2_characteristic, a2_sweep, check_sparse_family, dominate, sparse_decompose
from ..utils.config_parser import RunConfig
from ..utils.corpus import random_fields, random_hermitian_fields, resolve_measure
from ..utils.io_utils import read_json, write_csv, write_json
from config.constants import (
    A2_SCALING_FACTOR, ARTIFACT_A2_SWEEP, ARTIFACT_APPLY, ARTIFACT_CZD, ARTIFACT_FILTRATION,
    ARTIFACT_JOHN_NIRENBERG, ARTIFACT_LATTICE, ARTIFACT_MATRIX_ENDPOINT, ARTIFACT_NORMS, ARTIFACT_SPARSE,
    ARTIFACT_SUMMARY, ARTIFACT_WEAK11, ERROR_INVALID_CONFIG, ERROR_PAPER_MODE, MASS_TOLERANCE, PAPER_MODE,
    SCALAR_CONSISTENCY_ATOMS, SCALAR_CONSISTENCY_TOLERANCE, STOPPING_MASS_FRACTION, UNITARY_INVARIANCE_TOLERANCE,
)

logger = logging.getLogger(__name__)

R = TypeVar("R")


@dataclass
class RunResult:
    """Result of one toolkit command."""

    command: str
    report: InvariantReport
    artifacts: Dict[str, Path] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.report.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "passed": self.passed,
            "artifacts": sorted(self.artifacts),
            "summary": self.summary,
            "failures": [
                {"name": c.name, "value": c.value, "witness": c.witness, "message": c.message}
                for c in self.report.failures
            ],
        }


def _relative(a: float, b: float, floor: float = 0.0) -> float:
    scale = max(abs(a), abs(b), floor)
    return abs(a - b) / scale if scale > 0 else 0.0


class RBMOToolkit:
    """
    Orchestrates one run over a single measure.

    Everything derived from the configuration (measure, lattice, filtration,
    operator, corpora) is built lazily once and shared by the commands.
    """

    def __init__(self, config: Optional[RunConfig] = None):
        """Initialize the toolkit with the run configuration and the kernel registry."""
        self.config = config or RunConfig()
        issues = self.config.validate()
        if issues:
            raise ValueError(f"{ERROR_INVALID_CONFIG}: {'; '.join(issues)}")
        self.engine = InvariantEngine(self.config.tolerances)
        self.kernels: Dict[str, Type[Kernel]] = dict(KERNEL_REGISTRY)
        self.out_dir = Path(self.config.out)

    # -- shared inputs ----------------------------------------------------------

    @cached_property
    def measure(self) -> PointMeasure:
        return resolve_measure(self.config.measure)

    @cached_property
    def params(self) -> LatticeParams:
        """
        Raises:
            ValueError: If paper-mode rules are violated
        """
        params = LatticeParams.for_mode(
            self.config.mode, self.measure.dim, self.config.alpha, **self.config.lattice_overrides()
        )
        issues = params.validate(self.measure.dim)
        if issues and params.mode == PAPER_MODE:
            raise ValueError(f"{ERROR_PAPER_MODE}: {'; '.join(issues)}")
        if issues:
            raise ValueError(f"{ERROR_INVALID_CONFIG}: {'; '.join(issues)}")
        return params

    @cached_property
    def lattice(self) -> Lattice:
        if self.config.lattice:
            logger.info("Loading lattice from %s", self.config.lattice)
            data = read_json(self.config.lattice)
            # accepts both a bare export and the lattice.json artifact
            if isinstance(data, dict) and "lattice" in data:
                data = data["lattice"]
            return Lattice.from_dict(self.measure, data)
        return build_lattice(self.measure, self.params)

    @cached_property
    def filtration(self) -> Filtration:
        return build_filtration(self.lattice)

    @cached_property
    def kernel(self) -> Kernel:
        name = self.config.kernel.strip()
        if name in self.kernels and name not in KERNEL_REGISTRY:
            return self.kernels[name](epsilon=self.config.epsilon)
        return parse_kernel_flag(name, self.config.epsilon)

    @cached_property
    def operator(self) -> DiscreteOperator:
        return DiscreteOperator.from_kernel(self.kernel, self.measure)

    @cached_property
    def fields(self) -> List[ScalarField]:
        if self.config.field:
            return [load_field(self.config.field, self.measure)]
        return random_fields(self.measure, self.config.field_count, self.config.seed)

    @cached_property
    def matrix_fields(self) -> List[MatrixField]:
        if self.config.matrix_field:
            return [load_matrix_field(self.config.matrix_field, self.measure)]
        return random_hermitian_fields(
            self.measure, self.config.matrix_field_count, self.config.matrix_size, self.config.seed
        )

    @property
    def matrix_size(self) -> int:
        return self.matrix_fields[0].m

    @cached_property
    def matrix_kernel(self) -> MatrixKernel:
        # scalar kernel times a fixed Hermitian direction of norm 1
        rng = np.random.default_rng(self.config.seed)
        m = self.matrix_size
        raw = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        factor = 0.5 * (raw + raw.conj().T)
        factor /= np.linalg.norm(factor, 2)
        return MatrixKernel.from_scalar(self.kernel, self.measure, factor)

    def register_kernel(self, name: str, kernel_cls: Type[Kernel]) -> None:
        """
        Register a new kernel class.

        Args:
            name (str): Kernel name
            kernel_cls: Kernel implementation
        """
        self.kernels[name] = kernel_cls

    def get_available_kernels(self) -> List[str]:
        """Get list of all registered kernel names."""
        return sorted(self.kernels)

    def _map(self, fn: Callable[[Any], R], items: Sequence[Any]) -> List[R]:
        # order-preserving, so results do not depend on --jobs
        if self.config.jobs <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.config.jobs) as executor:
            return list(executor.map(fn, items))

    def _write(self, name: str, data: Any, result: RunResult) -> None:
        result.artifacts[name] = write_json(self.out_dir / name, data)

    # -- commands ---------------------------------------------------------------

    def run_lattice(self) -> RunResult:
        """Build the lattice, verify it and write lattice.json."""
        report = self.engine.check_lattice(self.lattice)
        result = RunResult("lattice build", report)
        self._write(ARTIFACT_LATTICE, {"lattice": self.lattice.to_dict(), "invariants": report.to_dict()}, result)
        result.summary = {
            "cubes": len(self.lattice.cubes),
            "generations": [self.lattice.k_min, self.lattice.k_max],
            "containment": report.get("containment").value,
            "growth_constant": self.measure.growth_constant,
        }
        return result

    def run_filtration(self) -> RunResult:
        """Build the filtration, verify it over the field corpus and write filtration.json."""
        F = self.filtration
        report = self.engine.check_filtration(F, self.fields)
        result = RunResult("filtration verify", report)
        self._write(ARTIFACT_FILTRATION, {"filtration": F.to_dict(), "invariants": report.to_dict()}, result)
        result.summary = {
            "levels": len(F.levels),
            "atoms": len(F.level_of),
            "orphans": len(F.orphans),
            "property_iv_constant": report.get("property_iv_constant").value,
        }
        return result

    def run_norms(self) -> RunResult:
        """Scalar norms, inclusion ratio, p-equivalence, John-Nirenberg, atomic blocks and duality."""
        F = self.filtration
        fields = self.fields
        report = InvariantReport("norms", metadata={"fields": len(fields)})
        result = RunResult("spaces norms", report)

        bundles = self._map(lambda f: norm_bundle(F, f), fields)
        monotone = [p_equivalence_report(F, f, self.config.p_grid) for f in fields]
        failed = [i for i, r in enumerate(monotone) if not r["monotone"]]
        report.add("p_monotone", InvariantLevel.ASSERTED, not failed, len(failed), failed[:10])

        try:
            ratio, witness = inclusion_ratio(F, fields)
            report.add("inclusion_ratio", InvariantLevel.MEASURED, bool(np.isfinite(ratio)), ratio, witness)
        except ValueError as e:
            ratio = None
            report.add("inclusion_ratio", InvariantLevel.DIAGNOSTIC, True, None, None, str(e))

        blocks = [greedy_atomic_block(F, f) for f in fields]
        blocks_report = block_constant_report(F, blocks)
        report.add("atomic_blocks_valid", InvariantLevel.ASSERTED, not blocks_report["invalid"],
                   len(blocks_report["invalid"]), blocks_report["invalid"][:10])
        report.add("atomic_block_constant", InvariantLevel.MEASURED, True, blocks_report["max_ratio"],
                   blocks_report["witness"])

        pairs = list(zip(fields, fields[1:] + fields[:1]))
        duality = duality_report(F, pairs)
        report.add("duality_constant", InvariantLevel.MEASURED, bool(np.isfinite(duality["max_ratio"])),
                   duality["max_ratio"], duality["witness"])

        jn = None
        for f in fields:
            if rbmo_sigma_norm(F, f, 1.0).norm_value > 0:
                jn = john_nirenberg_report(F, f)
                break
        if jn is not None:
            result.artifacts[ARTIFACT_JOHN_NIRENBERG] = write_csv(
                self.out_dir / ARTIFACT_JOHN_NIRENBERG, ["s", "t", "ratio"], jn.csv_rows()
            )
            report.add("john_nirenberg_rate", InvariantLevel.DIAGNOSTIC, True, jn.rate, {"degenerate": jn.degenerate})

        self._write(ARTIFACT_NORMS, {
            "fields": bundles,
            "p_equivalence": monotone,
            "inclusion_ratio": ratio,
            "atomic_blocks": blocks_report,
            "duality": duality,
            "john_nirenberg": jn.to_dict() if jn is not None else None,
            "invariants": report.to_dict(),
        }, result)
        result.summary = {"inclusion_ratio": ratio, "atomic_block_constant": blocks_report["max_ratio"]}
        return result

    def run_apply(self) -> RunResult:
        """Apply the operator to the corpus and measure the kernel conditions."""
        T = self.operator
        conditions = kernel_conditions(self.kernel, self.measure, self.config.seed)
        report = InvariantReport("apply", metadata={"kernel": self.kernel.name})
        if self.kernel.exact_size_bound:
            report.add("size_condition", InvariantLevel.ASSERTED,
                       conditions.size_constant <= 1.0 + MASS_TOLERANCE, conditions.size_constant)
        else:
            report.add("size_condition", InvariantLevel.MEASURED, True, conditions.size_constant)
        report.add("lipschitz_ratio", InvariantLevel.MEASURED, bool(np.isfinite(conditions.lipschitz_ratio)),
                   conditions.lipschitz_ratio)
        norm = l2_norm_estimate(T)
        report.add("l2_norm", InvariantLevel.MEASURED, bool(np.isfinite(norm)), norm)
        result = RunResult("operators apply", report)
        self._write(ARTIFACT_APPLY, {
            "kernel": self.kernel.spec(self.measure),
            "conditions": conditions.to_dict(),
            "l2_norm": norm,
            "images": [apply(T, f) for f in self.fields],
            "invariants": report.to_dict(),
        }, result)
        result.summary = {"l2_norm": norm, "size_constant": conditions.size_constant}
        return result

    def _cz_heights(self, values: np.ndarray) -> List[float]:
        # the grid is in units of ||f||_1 / ||mu||; heights at or below the mean are skipped
        mean = float(np.dot(values, self.measure.weights)) / self.measure.total_mass
        if mean == 0:
            return []
        return [s * mean for s in self.config.lambda_grid if s > 1]

    def run_czd(self) -> RunResult:
        """Calderón-Zygmund decompositions of the positive and negative parts over the height grid."""
        F = self.filtration
        report = InvariantReport("czd")
        result = RunResult("operators czd", report)

        def decompose(f: ScalarField) -> List[Any]:
            parts = (np.maximum(f.values, 0.0), np.maximum(-f.values, 0.0))
            return [cz_decompose(F, part, lam) for part in parts for lam in self._cz_heights(part)]

        decompositions = [d for group in self._map(decompose, self.fields) for d in group]
        for d in decompositions:
            report.merge(d.report)
        for name in ("bad_mass_ratio", "good_square_ratio", "good_linear_ratio"):
            worst = max((getattr(d, name) for d in decompositions), default=0.0)
            report.add(name, InvariantLevel.MEASURED, bool(np.isfinite(worst)), worst)
        self._write(ARTIFACT_CZD, {
            "decompositions": [d.to_dict() for d in decompositions],
            "invariants": report.to_dict(),
        }, result)
        result.summary = {"decompositions": len(decompositions)}
        return result

    def run_weak11(self) -> RunResult:
        """Weak (1,1) table of the operator over the corpus."""
        weak = weak11_report(self.operator, self.fields)
        report = InvariantReport("weak11", metadata={"fields": len(self.fields)})
        report.add("weak11_constant", InvariantLevel.MEASURED, bool(np.isfinite(weak.max_ratio)), weak.max_ratio)
        result = RunResult("operators weak11", report)
        self._write(ARTIFACT_WEAK11, {"weak11": weak.to_dict(), "invariants": report.to_dict()}, result)
        result.summary = {"weak11_constant": weak.max_ratio}
        return result

    def run_sparse(self) -> RunResult:
        """Sparse decompositions and pointwise domination of Tf on the root atom."""
        F = self.filtration
        T = self.operator
        root = F.root
        lam = self.config.sparse_lambda
        report = InvariantReport("sparse", metadata={"Q0": root, "lambda": lam})
        result = RunResult("sparse dominate", report)

        def analyze(f: ScalarField) -> Dict[str, Any]:
            family, certificate = sparse_decompose(F, f, root, lam)
            checks = check_sparse_family(F, family)
            domination = dominate(T, F, f, root, lam)
            return {"family": family, "certificate": certificate, "checks": checks, "domination": domination}

        runs = self._map(analyze, self.fields)
        weak_certificates = [i for i, r in enumerate(runs) if not r["certificate"].holds]
        report.add("certificate", InvariantLevel.ASSERTED, not weak_certificates, len(weak_certificates),
                   [{"field": i, "min_ratio": runs[i]["certificate"].min_ratio} for i in weak_certificates[:10]])
        for r in runs:
            report.merge(r["checks"])
        etas = [r["family"].eta for r in runs]
        min_eta = min(etas, default=1.0)
        report.add("eta_min", InvariantLevel.MEASURED, min_eta >= 0.5 * STOPPING_MASS_FRACTION, min_eta)
        ratios = [r["domination"].ratio for r in runs]
        infinite = [i for i, r in enumerate(runs) if r["domination"].failure is not None]
        report.add("domination_finite", InvariantLevel.ASSERTED, not infinite, len(infinite),
                   [runs[i]["domination"].failure for i in infinite[:10]])
        max_ratio = max((r for r in ratios if np.isfinite(r)), default=0.0)
        report.add("domination_constant", InvariantLevel.MEASURED, True, max_ratio)

        self._write(ARTIFACT_SPARSE, {
            "runs": [
                {"field": i, "family": r["family"].to_dict(), "domination": r["domination"].to_dict()}
                for i, r in enumerate(runs)
            ],
            "invariants": report.to_dict(),
        }, result)
        result.summary = {"domination_constant": max_ratio, "eta_min": min_eta}
        return result

    def _step_levels(self) -> List[float]:
        if not self.config.weights:
            return list(self.config.step_levels)
        data = read_json(self.config.weights)
        levels = data.get("levels") if isinstance(data, dict) else data
        if not isinstance(levels, list) or not levels:
            raise ValueError(f"{ERROR_INVALID_CONFIG}: weights file must list step levels")
        return [float(v) for v in levels]

    def run_a2_sweep(self) -> RunResult:
        """A₂ sanity checks and the step-weight sweep table."""
        mu = self.measure
        T = self.operator
        report = InvariantReport("a2")
        result = RunResult("sparse a2-sweep", report)

        unit = Weight.on(mu, np.ones(mu.size))
        unit_value = a2_characteristic(mu, unit)
        report.add("unit_weight", InvariantLevel.ASSERTED, unit_value == 1.0, unit_value)
        sample = Weight.on(mu, np.exp(np.random.default_rng(self.config.seed).standard_normal(mu.size)))
        base = a2_characteristic(mu, sample)
        scaled = a2_characteristic(mu, sample.scaled(A2_SCALING_FACTOR))
        report.add("scaling_invariance", InvariantLevel.ASSERTED, scaled == base, abs(scaled - base))

        rows = a2_sweep(T, mu, self._step_levels())
        header = ["level", "characteristic", "op_norm", "ratio2", "ratio1"]
        result.artifacts[ARTIFACT_A2_SWEEP] = write_csv(
            self.out_dir / ARTIFACT_A2_SWEEP, header, [[row[h] for h in header] for row in rows]
        )
        max_ratio = max((row["ratio2"] for row in rows), default=0.0)
        report.add("ratio2_max", InvariantLevel.MEASURED, bool(np.isfinite(max_ratio)), max_ratio)
        result.summary = {"ratio2_max": max_ratio, "levels": len(rows)}
        return result

    def run_matrix(self) -> RunResult:
        """Matrix-valued norms, Kadison-Schwarz, scalar consistency and the endpoint split."""
        F = self.filtration
        K = self.matrix_kernel
        fields = self.matrix_fields
        report = InvariantReport("matrix", metadata={"m": self.matrix_size, "fields": len(fields)})
        result = RunResult("matrixval endpoint", report)

        for f in fields:
            report.merge(kadison_schwarz_check(F, f))

        rng = np.random.default_rng(self.config.seed + 1)
        m = self.matrix_size
        u, _ = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
        gaps = [_relative(rbmo_sigma_c_norm(F, f.left_multiply(u)), rbmo_sigma_c_norm(F, f)) for f in fields]
        worst = max(gaps, default=0.0)
        report.add("unitary_invariance", InvariantLevel.ASSERTED, worst <= UNITARY_INVARIANCE_TOLERANCE, worst)

        report.add(*self._scalar_consistency())

        corpus = endpoint_corpus_report(F, K, fields)
        report.add("endpoint_constant", InvariantLevel.MEASURED, bool(np.isfinite(corpus["max_ratio"])),
                   corpus["max_ratio"], corpus["witness"])
        report.add("endpoint_split", InvariantLevel.ASSERTED, corpus["split_failures"] == 0, corpus["split_failures"])
        report.add("boundedness_ratio", InvariantLevel.MEASURED, bool(np.isfinite(corpus["boundedness_ratio"])),
                   corpus["boundedness_ratio"])

        hormander = hormander_report(K, self.lattice)
        report.add("hormander", InvariantLevel.MEASURED, hormander["finite"], hormander["max_sum"],
                   hormander["witness"])
        column_row = column_row_report(K, self.measure, fields)
        report.add("column_norm", InvariantLevel.MEASURED, bool(np.isfinite(column_row["column_norm"])),
                   column_row["column_norm"])
        report.add("row_ratio", InvariantLevel.MEASURED, bool(np.isfinite(column_row["row_ratio"])),
                   column_row["row_ratio"], column_row["row_witness"])

        self._write(ARTIFACT_MATRIX_ENDPOINT, {
            "endpoint": corpus,
            "size_constant": K.size_constant(self.measure),
            "hormander": hormander,
            "column_row": column_row,
            "invariants": report.to_dict(),
        }, result)
        result.summary = {"endpoint_constant": corpus["max_ratio"], "boundedness_ratio": corpus["boundedness_ratio"]}
        return result

    def _scalar_consistency(self) -> Tuple[Any, ...]:
        # the m = 1 matrix path against the scalar path on the first nonzero field
        F = self.filtration
        scalar_kernel = MatrixKernel.from_scalar(self.kernel, self.measure)
        worst = 0.0
        witness = None
        for index, f in enumerate(self.fields):
            if not np.any(f.values):
                continue
            matrix = MatrixField.from_scalar(self.measure, f)
            gap = _relative(rbmo_sigma_c_norm(F, matrix), rbmo_sigma_norm(F, f, 2.0).norm_value)
            if gap > worst:
                worst, witness = gap, {"field": index, "check": "norm"}
            for atom in sorted(F.sigma_parent)[:SCALAR_CONSISTENCY_ATOMS]:
                matrix_terms = theorem_d_terms(F, scalar_kernel, matrix, atom)
                scalar_terms = endpoint_terms(self.operator, F, f, atom)
                for name in ("I", "II", "III", "IV", "lhs"):
                    gap = _relative(getattr(matrix_terms, name), getattr(scalar_terms, name), matrix_terms.total)
                    if gap > worst:
                        worst, witness = gap, {"field": index, "atom": atom, "term": name}
            break
        return ("scalar_consistency", InvariantLevel.ASSERTED, worst <= SCALAR_CONSISTENCY_TOLERANCE, worst, witness)

    def run_all(self) -> RunResult:
        """Every command in order, with a summary.json over all of them."""
        commands = [
            self.run_lattice, self.run_filtration, self.run_norms, self.run_apply, self.run_czd,
            self.run_weak11, self.run_sparse, self.run_a2_sweep, self.run_matrix,
        ]
        report = InvariantReport("run", metadata={"measure": self.config.measure, "seed": self.config.seed})
        result = RunResult("report all", report)
        for command in commands:
            sub = command()
            report.merge(sub.report)
            result.artifacts.update(sub.artifacts)
            result.summary[sub.command] = {"passed": sub.passed, **sub.summary}
        self._write(ARTIFACT_SUMMARY, {
            "config": {k: v for k, v in self.config.to_dict().items() if k != "out"},
            "measure_id": self.measure.measure_id,
            "passed": report.passed,
            "commands": result.summary,
            "invariants": report.to_dict(),
        }, result)
        return result
