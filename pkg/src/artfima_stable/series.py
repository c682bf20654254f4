"""Container for observed or simulated series."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ArtfimaError


@dataclass(frozen=True)
class SeriesData:
    """Real-valued series plus a free-form provenance record.

    ``values`` is stored as a read-only float array; ``meta`` typically holds
    the source, seed, parameters and the list of transforms applied.
    """

    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise ArtfimaError("series contains NaN or infinite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def with_values(self, values, step: dict | None = None) -> "SeriesData":
        """New series with the same provenance, optionally recording one more step."""
        meta = dict(self.meta)
        if step is not None:
            meta["transforms"] = list(meta.get("transforms", [])) + [step]
        return SeriesData(values, meta)


def as_array(series) -> np.ndarray:
    if isinstance(series, SeriesData):
        return series.values
    return np.asarray(series, dtype=float).ravel()
