"""
File helpers for JSON and CSV artifacts.

JSON output is deterministic: keys sorted, floats as Python floats in their
shortest round-trip form, non-finite values replaced by null.
"""

import csv
import json
import math
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from config.constants import ERROR_FILE_NOT_FOUND, ERROR_MEASURE_PARSE, JSON_INDENT, UTF8_ENCODING


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy values, dataclasses and enums to plain JSON types."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, complex):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(data: Any) -> str:
    return json.dumps(to_jsonable(data), indent=JSON_INDENT, sort_keys=True, ensure_ascii=False)


def read_json(path: Union[str, Path]) -> Any:
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"{ERROR_FILE_NOT_FOUND}: {path}")
    with open(file_path, "r", encoding=UTF8_ENCODING) as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"{ERROR_MEASURE_PARSE}: {file_path.name}: {e}")


def write_json(path: Union[str, Path], data: Any) -> Path:
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding=UTF8_ENCODING) as f:
        f.write(dumps(data))
        f.write("\n")
    return file_path


def read_csv_rows(path: Union[str, Path]) -> List[Dict[str, str]]:
    """Read a headed CSV file into a list of row dictionaries, skipping empty rows."""
    rows: List[Dict[str, str]] = []
    with open(path, "r", encoding=UTF8_ENCODING, newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            cleaned = {k.strip(): (v or "").strip() for k, v in row.items() if k}
            if any(cleaned.values()):
                rows.append(cleaned)
    return rows


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding=UTF8_ENCODING, newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])
    return file_path


def _csv_cell(value: Any) -> Any:
    plain = to_jsonable(value)
    return "" if plain is None else plain
