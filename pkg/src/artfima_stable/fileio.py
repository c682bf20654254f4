"""CSV and JSON input/output.

CSV files are comma separated, UTF-8, with a header row; floats are
written with 17 significant digits so that reading them back is lossless.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import ParseError

SCHEMA = "artfima-stable/1"


def format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_columns(path, columns: dict) -> None:
    """Write equal-length columns to ``path`` (``"-"`` for stdout)."""
    names = list(columns)
    cols = [np.asarray(columns[k]) for k in names]
    lengths = {c.size for c in cols}
    if len(lengths) > 1:
        raise ValueError("columns have different lengths")
    rows = zip(*cols) if cols else []
    if str(path) == "-":
        import sys

        _write_rows(sys.stdout, names, rows)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(fh, names, rows)


def _write_rows(fh, names, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(names)
    for row in rows:
        w.writerow([format_value(v) for v in row])


def read_table(path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    """Header and ``(line_number, cells)`` rows of a CSV file."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError(f"{path}: empty file") from None
            header = [h.strip() for h in header]
            rows = []
            for cells in reader:
                if not cells or all(not c.strip() for c in cells):
                    continue
                if len(cells) != len(header):
                    raise ParseError(f"{path}:{reader.line_num}: expected {len(header)} fields, "
                                     f"got {len(cells)}")
                rows.append((reader.line_num, cells))
    except csv.Error as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    return header, rows


def read_column(path, column: str | None = None) -> np.ndarray:
    """Numeric column by name, or the last column when ``column`` is None."""
    header, rows = read_table(path)
    idx = len(header) - 1 if column is None else _column_index(path, header, column)
    out = np.empty(len(rows))
    for k, (line, cells) in enumerate(rows):
        try:
            out[k] = float(cells[idx])
        except ValueError:
            raise ParseError(f"{path}:{line}: non-numeric value {cells[idx]!r}") from None
    return out


def _column_index(path, header, column) -> int:
    try:
        return header.index(column)
    except ValueError:
        raise ParseError(f"{path}: no column {column!r} (have {', '.join(header)})") from None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path, payload: dict) -> None:
    doc = {"schema": SCHEMA, **_jsonable(payload)}
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if str(path) == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
