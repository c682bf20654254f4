"""Symmetric alpha-stable innovations.

Variates are produced with the Chambers-Mallows-Stuck transform of a
uniform angle ``U ~ U(-pi/2, pi/2)`` and an independent unit exponential
``W``:

    X = sin(alpha U) / cos(U)^(1/alpha) * (cos((1 - alpha) U) / W)^((1 - alpha)/alpha)

which has characteristic function ``exp(-|t|^alpha)``; ``alpha = 1`` reduces
to ``tan(U)`` (Cauchy) and ``alpha = 2`` to ``2 sqrt(W) sin(U)``, a normal
with variance 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ArtfimaError, DegenerateSeriesError
from .series import SeriesData, as_array

#: alpha values this close to 1 use the Cauchy branch.
ALPHA_ONE_SNAP = 1e-8


@dataclass(frozen=True)
class StableSpec:
    """Stability index ``alpha`` in (0, 2] and scale ``sigma`` > 0."""

    alpha: float
    sigma: float = 1.0

    def __post_init__(self):
        a, s = float(self.alpha), float(self.sigma)
        if not 0.0 < a <= 2.0:
            raise ArtfimaError(f"alpha must lie in (0, 2], got {a}")
        if not (s > 0.0 and math.isfinite(s)):
            raise ArtfimaError(f"sigma must be positive, got {s}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "sigma", s)


def substream(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent PCG64 generator keyed by ``(seed, stream)``.

    Streams with distinct ids never share draws, so Monte Carlo replicate
    ``r`` can own stream ``r`` regardless of execution order.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def cms_transform(alpha: float, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Map angles ``u`` in (-pi/2, pi/2) and exponentials ``w`` to standard SaS draws."""
    if abs(alpha - 1.0) < ALPHA_ONE_SNAP:
        return np.tan(u)
    if alpha == 2.0:
        return 2.0 * np.sqrt(w) * np.sin(u)
    w = np.maximum(w, np.finfo(float).tiny)
    cos_u = np.cos(u)
    return (np.sin(alpha * u) / cos_u ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha))


def sample_sas(spec: StableSpec, n: int, seed: int, stream: int = 0) -> SeriesData:
    """Draw ``n`` i.i.d. SaS(sigma) variates, deterministic in ``(seed, stream)``."""
    n = int(n)
    if n < 1:
        raise ArtfimaError("n must be >= 1")
    rng = substream(seed, stream)
    u = math.pi * (rng.random(n) - 0.5)
    w = rng.standard_exponential(n)
    z = spec.sigma * cms_transform(spec.alpha, u, w)
    meta = {"source": "sample_sas", "alpha": spec.alpha, "sigma": spec.sigma,
            "seed": int(seed), "stream": int(stream)}
    return SeriesData(z, meta)


def empirical_cf(series, thetas) -> np.ndarray:
    """Real part of the empirical characteristic function at each ``theta``."""
    x = as_array(series)
    if x.size == 0:
        raise DegenerateSeriesError("empty series")
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    return np.array([np.mean(np.cos(t * x)) for t in thetas])
