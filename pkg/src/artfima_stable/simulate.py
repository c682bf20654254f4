"""Sample paths of stable ARTFIMA processes."""

from __future__ import annotations

import numpy as np
from scipy.signal import oaconvolve

from .exceptions import ArtfimaError, DegenerateSeriesError
from .kernel import DEFAULT_TOL, ArtfimaParams, filter_length, ma_coefficients
from .series import SeriesData, as_array
from .stable import StableSpec, sample_sas

#: Above this many multiply-adds the moving-average filter is applied by FFT.
FFT_THRESHOLD = 10_000_000


def apply_ma_filter(coef, z, method: str = "auto") -> np.ndarray:
    """Fully-overlapped part of ``sum_j coef[j] z[t - j]``.

    Returns ``len(z) - len(coef) + 1`` values; output ``k`` uses
    ``z[k .. k + M]`` with ``M = len(coef) - 1``.
    """
    coef = np.asarray(coef, dtype=float)
    z = np.asarray(z, dtype=float)
    if z.size < coef.size:
        raise ArtfimaError("innovation stream shorter than the filter")
    if method == "auto":
        method = "fft" if (z.size - coef.size + 1) * coef.size > FFT_THRESHOLD else "direct"
    if method == "fft":
        return oaconvolve(z, coef, mode="valid")
    if method == "direct":
        return np.convolve(z, coef, mode="valid")
    raise ValueError(f"unknown method {method!r}")


def simulate_with_innovations(params: ArtfimaParams, spec: StableSpec, n: int, seed: int,
                              tol: float = DEFAULT_TOL, stream: int = 0,
                              method: str = "auto") -> tuple[SeriesData, SeriesData]:
    """Simulate a path and also return the innovation stream that produced it.

    The innovation stream has ``n + M`` entries; path value ``t`` (0-based)
    is ``sum_{j=0}^{M} a(j) Z[t + M - j]``.
    """
    params.validate()
    n = int(n)
    if n < 1:
        raise ArtfimaError("n must be >= 1")
    m = filter_length(params, tol)
    a = ma_coefficients(params, m + 1).values
    z = sample_sas(spec, n + m, seed, stream)
    x = apply_ma_filter(a, z.values, method)
    meta = {
        "source": "simulate_artfima",
        "params": params.as_dict(),
        "alpha": spec.alpha,
        "sigma": spec.sigma,
        "seed": int(seed),
        "stream": int(stream),
        "tol": tol,
        "filter_length": m,
    }
    return SeriesData(x, meta), z


def simulate_artfima(params: ArtfimaParams, spec: StableSpec, n: int, seed: int,
                     tol: float = DEFAULT_TOL, stream: int = 0) -> SeriesData:
    """ARTFIMA(p, d, lam, q) path of length ``n`` driven by SaS innovations.

    Uses the truncated moving-average representation with ``M`` pre-sample
    innovations, so every returned value is filtered over the full length.
    """
    return simulate_with_innovations(params, spec, n, seed, tol, stream)[0]


def cumulative_variance(series) -> SeriesData:
    """Running sample variance (divisor ``k - 1``) of ``x_1..x_k`` for ``k = 2..n``."""
    x = as_array(series)
    if x.size < 2:
        raise DegenerateSeriesError("need at least two observations")
    # shifting by the first value keeps the running sums small
    y = x - x[0]
    k = np.arange(1, x.size + 1, dtype=float)
    s1 = np.cumsum(y)
    s2 = np.cumsum(y * y)
    v = (s2 - s1 * s1 / k)[1:] / (k[1:] - 1.0)
    v = np.maximum(v, 0.0)
    meta = {"source": "cumulative_variance"}
    if isinstance(series, SeriesData):
        meta["parent"] = series.meta
    return SeriesData(v, meta)
