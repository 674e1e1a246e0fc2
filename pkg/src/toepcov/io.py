"""Reading series and Toeplitz matrices from CSV/JSON and writing results back."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .base import SymmetricToeplitz

__all__ = [
    "InputFormatError",
    "read_series_csv",
    "parse_series_csv",
    "read_toeplitz",
    "toeplitz_to_json",
    "toeplitz_to_csv",
    "dense_to_csv",
    "format_value",
    "json_safe",
    "header_line",
]


class InputFormatError(ValueError):
    """Malformed input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, path=None):
        where = f"{path}:" if path else ""
        where += f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.path = path


def parse_series_csv(text: str, path=None) -> np.ndarray:
    """Parse one value per line; blank lines and ``#`` comments are skipped.

    A single non-numeric first data line is taken as a header. Lines with
    several comma-separated fields use the first field.
    """
    values = []
    seen_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        field_ = line.split(",")[0].strip()
        try:
            v = float(field_)
        except ValueError:
            if not seen_data:
                seen_data = True  # header
                continue
            raise InputFormatError(f"cannot parse {field_!r} as a number", lineno, path)
        if not math.isfinite(v):
            raise InputFormatError(f"non-finite value {field_!r}", lineno, path)
        seen_data = True
        values.append(v)
    return np.asarray(values, dtype=float)


def read_series_csv(path, min_length: int = 1) -> np.ndarray:
    x = parse_series_csv(Path(path).read_text(), path=path)
    if x.size < min_length:
        raise InputFormatError(f"need at least {min_length} values, found {x.size}", path=path)
    return x


def read_toeplitz(path) -> SymmetricToeplitz:
    """First column from a JSON ``{dimension, first_column}`` file or a one-per-line CSV."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputFormatError(exc.msg, exc.lineno, path) from exc
        if isinstance(d, dict) and "estimate" in d:
            d = d["estimate"]
        try:
            return SymmetricToeplitz.from_dict(d)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputFormatError(f"invalid Toeplitz JSON: {exc}", path=path) from exc
    col = parse_series_csv(text, path=path)
    if col.size == 0:
        raise InputFormatError("no values found", path=path)
    return SymmetricToeplitz(col)


def format_value(v: float) -> str:
    """Ten significant digits, as used in every CSV output."""
    return f"{v:.10g}"


def json_safe(obj):
    """Replace non-finite floats by ``None`` and numpy scalars by Python ones."""
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return json_safe(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def header_line(header: dict) -> str:
    return "# " + json.dumps(json_safe(header), sort_keys=True)


def toeplitz_to_json(m: SymmetricToeplitz, **extra) -> str:
    """JSON object ``{dimension, first_column, ...extra}`` at full precision."""
    d = dict(extra)
    d.update(m.to_dict())
    return json.dumps(json_safe(d), indent=2)


def toeplitz_to_csv(m: SymmetricToeplitz, header: dict | None = None) -> str:
    lines = [header_line(header)] if header is not None else []
    lines += [format_value(v) for v in m.first_column]
    return "\n".join(lines) + "\n"


def dense_to_csv(m: SymmetricToeplitz, header: dict | None = None) -> str:
    lines = [header_line(header)] if header is not None else []
    for row in m.to_dense():
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"
