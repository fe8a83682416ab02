"""Deterministic artifact writers.

Reals are serialized with 17 significant digits (lossless for float64) in
both CSV and JSON so that reruns can be compared byte for byte. CSV rows
end in a bare newline on every platform; JSON is emitted by a small
recursive formatter because the stdlib encoder offers no hook for float
formatting.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from .errors import InputError


def format_real(x: float) -> str:
    if not math.isfinite(x):
        raise InputError(f"cannot serialize non-finite value {x!r}")
    return format(float(x), ".17g")


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_real(value)
    return str(value)


def write_table(path, header: list[str], rows, fmt: str = "csv") -> None:
    """Write rows (sequences aligned with ``header``) as CSV or JSON."""
    path = Path(path)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_format_cell(v) for v in row])
    elif fmt == "json":
        objects = [dict(zip(header, row)) for row in rows]
        write_json(path, objects)
    else:
        raise InputError(f"format must be 'csv' or 'json', got {fmt!r}")


def dumps_json(obj, indent: int = 0) -> str:
    """JSON text with 17-significant-digit floats and sorted-key-free,
    insertion-ordered objects."""
    buf = io.StringIO()
    _dump(obj, buf, indent)
    buf.write("\n")
    return buf.getvalue()


def write_json(path, obj) -> None:
    Path(path).write_text(dumps_json(obj))


def _dump(obj, buf, depth) -> None:
    pad = "  " * depth
    inner = "  " * (depth + 1)
    if obj is None:
        buf.write("null")
    elif isinstance(obj, bool):
        buf.write("true" if obj else "false")
    elif isinstance(obj, float):
        buf.write(format_real(obj))
    elif isinstance(obj, int):
        buf.write(str(obj))
    elif isinstance(obj, str):
        buf.write('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, dict):
        if not obj:
            buf.write("{}")
            return
        buf.write("{\n")
        for i, (key, value) in enumerate(obj.items()):
            buf.write(f'{inner}"{key}": ')
            _dump(value, buf, depth + 1)
            buf.write(",\n" if i < len(obj) - 1 else "\n")
        buf.write(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            buf.write("[]")
            return
        buf.write("[\n")
        for i, value in enumerate(obj):
            buf.write(inner)
            _dump(value, buf, depth + 1)
            buf.write(",\n" if i < len(obj) - 1 else "\n")
        buf.write(pad + "]")
    else:
        raise InputError(f"cannot serialize {type(obj).__name__}")


def table_extension(fmt: str) -> str:
    return ".csv" if fmt == "csv" else ".json"
