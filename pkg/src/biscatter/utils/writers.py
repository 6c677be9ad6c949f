import csv
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .converters import format_float
from .digest import Digest


def _cell(value: Any) -> str:
    """Formats one CSV cell; floats keep round-trip precision"""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def write_csv(rows: Iterable[Mapping[str, Any]], path: str | Path, columns: Sequence[str]) -> Digest:
    """Writes rows with a fixed header order

    Args:
        rows (Iterable[Mapping[str, Any]]): One mapping per row
        path (str | Path): The target file
        columns (Sequence[str]): The header, also the column order

    Returns:
        Digest: The SHA-256 digest of the written file

    Raises:
        KeyError: If a row lacks a column
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[column]) for column in columns])
    return Digest.from_file(path)


def _json_default(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, '_to_dict'):
        return value._to_dict()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serialisable")


def _finite(value: Any) -> Any:
    """JSON has no inf or nan; they are written as strings"""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value


def write_json(document: Mapping[str, Any], path: str | Path) -> Path:
    """Writes a JSON document with sorted keys"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(document, indent=4, sort_keys=True, default=_json_default)
    path.write_text(json.dumps(_finite(json.loads(text)), indent=4, sort_keys=True) + "\n", encoding='utf-8')
    return path
