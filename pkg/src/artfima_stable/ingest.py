"""Loading observed series from CSV files.

Several sources (for example two satellites measuring the same channel)
can be merged row by row: where two or more readings are present their
mean is used, otherwise the single available reading. A chain of
transforms (``log``, ``demean``, ``subseries``) is then applied left to
right and recorded in the series metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ArtfimaError, ParseError, TransformError
from .fileio import _column_index, read_table
from .series import SeriesData

DEFAULT_MISSING = ("", "nan", "NaN", "NA", "null")


@dataclass
class IngestSpec:
    """What to read and how to turn it into one series.

    ``columns`` holds one selector per path (a single selector is reused for
    every path). ``transforms`` items are ``("log",)``, ``("demean",)`` or
    ``("subseries", start, end)`` with a half-open, 0-based index range.
    """

    paths: list
    columns: list = field(default_factory=list)
    merge: str = "mean_else_max"
    transforms: list = field(default_factory=list)
    key: str | None = None
    missing_values: tuple = DEFAULT_MISSING

    def __post_init__(self):
        if not self.paths:
            raise ArtfimaError("at least one input path is required")
        if self.merge not in ("mean_else_max", "single"):
            raise ArtfimaError(f"unknown merge rule {self.merge!r}")
        if self.merge == "single" and len(self.paths) != 1:
            raise ArtfimaError("merge rule 'single' takes exactly one path")
        self.transforms = [parse_transform(t) if isinstance(t, str) else tuple(t)
                           for t in self.transforms]


def parse_transform(text: str) -> tuple:
    """``"log"``, ``"demean"`` or ``"subseries:START:END"``."""
    parts = text.split(":")
    name = parts[0].strip().lower()
    if name in ("log", "demean") and len(parts) == 1:
        return (name,)
    if name == "subseries" and len(parts) == 3:
        try:
            return ("subseries", int(parts[1]), int(parts[2]))
        except ValueError:
            pass
    raise ArtfimaError(f"cannot parse transform {text!r}")


def _read_source(path, column, key, missing) -> tuple[list, list]:
    header, rows = read_table(path)
    ci = len(header) - 1 if column is None else _column_index(path, header, column)
    ki = None if key is None else _column_index(path, header, key)
    missing = set(missing)
    missing_nums = set()
    for m in missing:
        try:
            missing_nums.add(float(m))
        except ValueError:
            pass
    keys, vals = [], []
    for pos, (line, cells) in enumerate(rows):
        raw = cells[ci].strip()
        if raw in missing:
            v = math.nan
        else:
            try:
                v = float(raw)
            except ValueError:
                raise ParseError(f"{path}:{line}: non-numeric value {raw!r}") from None
            if v in missing_nums or not math.isfinite(v):
                v = math.nan
        keys.append(pos if ki is None else cells[ki].strip())
        vals.append(v)
    return keys, vals


def _sorted_keys(keys):
    try:
        return sorted(keys, key=float)
    except (TypeError, ValueError):
        return sorted(keys, key=str)


def merge_readings(readings: np.ndarray) -> tuple[np.ndarray, dict]:
    """Row-wise merge of a ``(rows, sources)`` array with NaN for missing."""
    present = ~np.isnan(readings)
    count = present.sum(axis=1)
    out = np.full(readings.shape[0], np.nan)
    multi = count >= 2
    if np.any(multi):
        out[multi] = np.nanmean(readings[multi], axis=1)
    single = count == 1
    if np.any(single):
        out[single] = np.nanmax(readings[single], axis=1)
    stats = {"rows_mean": int(multi.sum()), "rows_single": int(single.sum()),
             "rows_dropped": int((count == 0).sum())}
    return out[count > 0], stats


def apply_transform(values: np.ndarray, step: tuple) -> np.ndarray:
    name = step[0]
    if name == "log":
        bad = np.flatnonzero(values <= 0)
        if bad.size:
            raise TransformError(f"log of non-positive value {values[bad[0]]!r} at row {int(bad[0])}")
        return np.log(values)
    if name == "demean":
        return values - values.mean()
    if name == "subseries":
        start, end = int(step[1]), int(step[2])
        if not 0 <= start < end <= values.size:
            raise TransformError(f"subseries [{start}, {end}) outside 0..{values.size}")
        return values[start:end]
    raise TransformError(f"unknown transform {name!r}")


def ingest(spec: IngestSpec) -> SeriesData:
    """Read, merge and transform the sources described by ``spec``."""
    cols = list(spec.columns) or [None]
    if len(cols) == 1:
        cols = cols * len(spec.paths)
    if len(cols) != len(spec.paths):
        raise ArtfimaError("need one column selector per path, or a single shared one")

    sources = [_read_source(p, c, spec.key, spec.missing_values) for p, c in zip(spec.paths, cols)]
    if spec.key is None:
        n_rows = max(len(k) for k, _ in sources)
        readings = np.full((n_rows, len(sources)), np.nan)
        for s, (_, vals) in enumerate(sources):
            readings[:len(vals), s] = vals
    else:
        all_keys = _sorted_keys({k for keys, _ in sources for k in keys})
        index = {k: i for i, k in enumerate(all_keys)}
        readings = np.full((len(all_keys), len(sources)), np.nan)
        for s, (keys, vals) in enumerate(sources):
            for k, v in zip(keys, vals):
                readings[index[k], s] = v
    values, stats = merge_readings(readings)

    meta = {"source": "ingest", "paths": [str(p) for p in spec.paths], "columns": cols,
            "key": spec.key, "merge": spec.merge, **stats, "transforms": []}
    for step in spec.transforms:
        values = apply_transform(values, step)
        meta["transforms"].append(list(step))
    return SeriesData(values, meta)
