"""Deterministic text serialization of numeric results."""

import csv
import json
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

FLOAT_DIGITS = 17


def format_float(value: float) -> str:
    """Format a float with 17 significant digits (round-trip safe)."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{FLOAT_DIGITS}g}"


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)

    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        text = format_float(obj)
        # JSON has no literal for non-finite numbers
        return json.dumps(text) if not math.isfinite(float(obj)) else text
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Path):
        return json.dumps(str(obj), ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(key), ensure_ascii=False)}: "
            f"{_encode(value, indent, level + 1)}"
            for key, value in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        if not seq:
            return "[]"
        items = [f"{pad}{_encode(value, indent, level + 1)}" for value in seq]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"

    raise TypeError(f"Object of type {type(obj).__name__} is not serializable")


def dumps_json(obj: Any, indent: int = 2) -> str:
    """
    Serialize to JSON with fixed float formatting.

    Key order is the insertion order of the dictionaries, so callers control
    the layout; identical inputs always give byte-identical text.
    """
    return _encode(obj, indent, 0) + "\n"


def write_json(path: Path, obj: Any) -> Path:
    """Write an object as deterministic JSON, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(obj), encoding="utf-8")
    return path


def read_json(path: Path) -> Any:
    """Read a JSON document; non-finite numbers written as strings stay strings."""
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def parse_float(value: Any) -> float:
    """Parse a number written by this module (including "inf" and "nan")."""
    return float(value)


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write rows as CSV with the fixed float format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
    return path


def read_csv(path: Path) -> list[dict[str, str]]:
    """Read a CSV file into a list of row dictionaries."""
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))
