"""
Run Configuration Parser.

Builds a RunConfig from CLI flags, optionally overlaid by a JSON or YAML
config file.
"""

import json
from dataclasses import asdict, dataclass, fields
from dataclasses import field as dataclass_field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from config.constants import (
    DEFAULT_FIELD_COUNT, DEFAULT_JOBS, DEFAULT_KERNEL, DEFAULT_LAMBDA_GRID, DEFAULT_MATRIX_FIELD_COUNT,
    DEFAULT_MATRIX_SIZE, DEFAULT_MODE, DEFAULT_OUTPUT_DIR, DEFAULT_P_GRID, DEFAULT_SEED, DEFAULT_SPARSE_LAMBDA,
    DEFAULT_STEP_LEVELS, DEFAULT_UNIFORM_SIZE, ERROR_FILE_NOT_FOUND, ERROR_INVALID_CONFIG, ERROR_PAPER_MODE,
    ERROR_YAML_UNAVAILABLE, MAX_MATRIX_SIZE, PAPER_MIN_ALPHA, PAPER_MODE, SPARSE_LAMBDA_LOWER,
    SPARSE_LAMBDA_UPPER, TEST_MODE, TOLERANCE_KEYS, UTF8_ENCODING, YAML_EXTENSIONS,
)


@dataclass
class RunConfig:
    """Everything one CLI run needs; CLI flags override file values."""

    measure: str = f"builtin:uniform:{DEFAULT_UNIFORM_SIZE}"
    mode: str = DEFAULT_MODE
    alpha: Optional[float] = None
    ell: Optional[int] = None
    A: Optional[float] = None
    k_min: Optional[int] = None
    k_max: Optional[int] = None
    kernel: str = DEFAULT_KERNEL
    epsilon: float = 0.0
    seed: int = DEFAULT_SEED
    field_count: int = DEFAULT_FIELD_COUNT
    matrix_field_count: int = DEFAULT_MATRIX_FIELD_COUNT
    matrix_size: int = DEFAULT_MATRIX_SIZE
    jobs: int = DEFAULT_JOBS
    out: str = DEFAULT_OUTPUT_DIR
    field: Optional[str] = None
    matrix_field: Optional[str] = None
    lattice: Optional[str] = None
    weights: Optional[str] = None
    step_levels: List[float] = dataclass_field(default_factory=lambda: list(DEFAULT_STEP_LEVELS))
    sparse_lambda: float = DEFAULT_SPARSE_LAMBDA
    lambda_grid: List[float] = dataclass_field(default_factory=lambda: list(DEFAULT_LAMBDA_GRID))
    p_grid: List[float] = dataclass_field(default_factory=lambda: list(DEFAULT_P_GRID))
    tolerances: Dict[str, float] = dataclass_field(default_factory=dict)

    def lattice_overrides(self) -> Dict[str, Any]:
        """Keyword overrides for LatticeParams.for_mode."""
        return {k: getattr(self, k) for k in ("ell", "A", "k_min", "k_max") if getattr(self, k) is not None}

    def validate(self, dim: Optional[int] = None) -> List[str]:
        """
        Validate the configuration.

        Args:
            dim: dimension of the measure, when known, for the paper-mode beta rule

        Returns:
            List[str]: Validation issues (empty if valid)
        """
        issues = []

        if self.mode not in (TEST_MODE, PAPER_MODE):
            issues.append(f"Mode must be '{TEST_MODE}' or '{PAPER_MODE}'")
        if self.alpha is not None and not self.alpha > 1:
            issues.append("Alpha must be greater than 1")
        if self.mode == PAPER_MODE and self.alpha is not None and self.alpha < PAPER_MIN_ALPHA:
            issues.append(f"{ERROR_PAPER_MODE} (alpha = {self.alpha:g})")
        if self.ell is not None and self.ell < 1:
            issues.append("Ell must be a positive integer")
        if self.mode == PAPER_MODE and dim is not None and self.ell is not None and self.ell != dim + 1:
            issues.append(f"{ERROR_PAPER_MODE} (ell = {self.ell}, d = {dim})")
        if self.k_min is not None and self.k_max is not None and self.k_min > self.k_max:
            issues.append("k_min must not exceed k_max")

        if self.field_count < 1 or self.matrix_field_count < 1:
            issues.append("Field counts must be positive")
        if not 1 <= self.matrix_size <= MAX_MATRIX_SIZE:
            issues.append(f"Matrix size must be between 1 and {MAX_MATRIX_SIZE}")
        if self.jobs < 1:
            issues.append("Jobs must be a positive integer")
        if self.epsilon < 0:
            issues.append("Epsilon must be >= 0")

        if not SPARSE_LAMBDA_LOWER < self.sparse_lambda < SPARSE_LAMBDA_UPPER:
            issues.append(f"Sparse lambda must lie in ({SPARSE_LAMBDA_LOWER}, {SPARSE_LAMBDA_UPPER})")
        if any(not v > 0 for v in self.lambda_grid):
            issues.append("CZ heights must be positive")
        if any(not v >= 1 for v in self.p_grid):
            issues.append("Norm exponents must be >= 1")
        if any(not v > 0 for v in self.step_levels):
            issues.append("Step weight levels must be positive")

        unknown = sorted(set(self.tolerances) - set(TOLERANCE_KEYS))
        if unknown:
            issues.append(f"Unknown tolerance keys: {', '.join(unknown)}")
        return issues

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class ConfigParser:
    """
    Parses run-configuration files and merges them with CLI flags.

    JSON is always available; YAML needs the optional ``pyyaml`` package.
    """

    def __init__(self):
        self.known_keys = {f.name for f in fields(RunConfig)}

    def load_file(self, path: Union[str, Path]) -> Dict[str, Any]:
        """
        Read a config file into a dictionary.

        Args:
            path: JSON or YAML file

        Returns:
            Dict[str, Any]: Raw key/value pairs

        Raises:
            FileNotFoundError: If the file does not exist
            ValueError: If the file is malformed, not a mapping or has unknown keys
        """
        file_path = Path(path)
        if not file_path.exists():
            raise FileNotFoundError(f"{ERROR_FILE_NOT_FOUND}: {path}")
        text = file_path.read_text(encoding=UTF8_ENCODING)

        if file_path.suffix.lower() in YAML_EXTENSIONS:
            try:
                import yaml
            except ImportError:
                raise ValueError(ERROR_YAML_UNAVAILABLE)
            try:
                data = yaml.safe_load(text)
            except yaml.YAMLError as e:
                raise ValueError(f"{ERROR_INVALID_CONFIG}: {file_path.name}: {e}")
        else:
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise ValueError(f"{ERROR_INVALID_CONFIG}: {file_path.name}: {e}")

        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ValueError(f"{ERROR_INVALID_CONFIG}: top level must be a mapping")
        unknown = sorted(set(data) - self.known_keys)
        if unknown:
            raise ValueError(f"{ERROR_INVALID_CONFIG}: unknown keys {', '.join(unknown)}")
        return data

    def build(
        self,
        config_path: Optional[Union[str, Path]] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> RunConfig:
        """
        Build a RunConfig: defaults, then the config file, then non-None overrides.

        Raises:
            ValueError: If a value has the wrong type
        """
        values: Dict[str, Any] = {}
        if config_path is not None:
            values.update(self.load_file(config_path))
        for key, value in (overrides or {}).items():
            if value is not None and key in self.known_keys:
                values[key] = value
        try:
            config = RunConfig(**values)
        except TypeError as e:
            raise ValueError(f"{ERROR_INVALID_CONFIG}: {e}")
        return _coerce(config)

    def parse_and_validate(
        self,
        config_path: Optional[Union[str, Path]] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> Tuple[RunConfig, List[str]]:
        config = self.build(config_path, overrides)
        return config, config.validate()


def _coerce(config: RunConfig) -> RunConfig:
    # file values arrive as JSON scalars; normalize numeric types
    try:
        config.alpha = None if config.alpha is None else float(config.alpha)
        config.A = None if config.A is None else float(config.A)
        config.ell = None if config.ell is None else int(config.ell)
        config.seed = int(config.seed)
        config.jobs = int(config.jobs)
        config.field_count = int(config.field_count)
        config.matrix_field_count = int(config.matrix_field_count)
        config.matrix_size = int(config.matrix_size)
        config.epsilon = float(config.epsilon)
        config.sparse_lambda = float(config.sparse_lambda)
        config.step_levels = [float(v) for v in config.step_levels]
        config.lambda_grid = [float(v) for v in config.lambda_grid]
        config.p_grid = [float(v) for v in config.p_grid]
        config.tolerances = {str(k): float(v) for k, v in dict(config.tolerances).items()}
    except (TypeError, ValueError) as e:
        raise ValueError(f"{ERROR_INVALID_CONFIG}: {e}")
    return config
