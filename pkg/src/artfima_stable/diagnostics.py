"""Residuals and goodness-of-fit checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from .exceptions import ArtfimaError, DegenerateSeriesError
from .kernel import ArtfimaParams, ar_coefficients, filter_length
from .series import SeriesData, as_array
from .simulate import apply_ma_filter

DEFAULT_LB_LAGS = 20
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class AcfResult:
    """Autocorrelations at lags ``0..H`` with the white-noise band ``1.96 / sqrt(n)``."""

    lags: np.ndarray
    values: np.ndarray
    band: float
    n: int

    def outside_band(self) -> np.ndarray:
        """Lags ``h >= 1`` whose value falls outside the band."""
        return self.lags[1:][np.abs(self.values[1:]) > self.band]


def residuals(series, params: ArtfimaParams, tol: float = RESIDUAL_TOL,
              max_length: int | None = None) -> SeriesData:
    """Innovations recovered through the inverse filter ``Z(t) = sum c(j) X(t-j)``.

    The first ``M`` observations only serve as filter history, so the result
    has ``n - M`` values, where ``M`` is the truncation index at ``tol``.
    Weak tempering can make ``M`` exceed the data; ``max_length`` caps it,
    in which case ``meta["truncated"]`` is set and ``meta["tail_weight"]``
    holds ``|c(M)| / max |c|``.
    """
    params.validate()
    x = as_array(series)
    m = filter_length(params, tol, sign="difference")
    truncated = max_length is not None and m > max_length
    if truncated:
        m = int(max_length)
    if x.size <= m:
        raise ArtfimaError(f"series of length {x.size} is shorter than the inverse filter ({m + 1})")
    c = ar_coefficients(params, m + 1).values
    z = apply_ma_filter(c, x)
    meta = {"source": "residuals", "params": params.as_dict(), "tol": tol, "filter_length": m,
            "truncated": bool(truncated)}
    if truncated:
        meta["tail_weight"] = float(abs(c[-1]) / np.max(np.abs(c)))
    return SeriesData(z, meta)


def sample_acf(series, max_lag: int) -> AcfResult:
    """Mean-corrected sample autocorrelations ``rho(0..max_lag)``."""
    x = as_array(series)
    n = x.size
    if not 0 <= max_lag < n / 2:
        raise ArtfimaError("max_lag must be below half the series length")
    y = x - x.mean()
    denom = float(np.dot(y, y))
    if denom == 0.0:
        raise DegenerateSeriesError("constant series has no autocorrelation")
    vals = np.array([np.dot(y[:n - h], y[h:]) for h in range(max_lag + 1)]) / denom
    return AcfResult(np.arange(max_lag + 1), vals, 1.96 / np.sqrt(n), n)


def normalized_sample_acvf(series, alpha: float, max_lag: int) -> AcfResult:
    """``sum_{t<=n-h} x_t x_{t+h} / sum_t x_t^2``; the ``n^(-2/alpha)`` factors cancel.

    No mean correction, unlike :func:`sample_acf`.
    """
    if not 0.0 < alpha <= 2.0:
        raise ArtfimaError(f"alpha must lie in (0, 2], got {alpha}")
    x = as_array(series)
    n = x.size
    if not 0 <= max_lag < n:
        raise ArtfimaError("max_lag must be below the series length")
    energy = float(np.dot(x, x))
    if energy == 0.0:
        raise DegenerateSeriesError("series has zero energy")
    vals = np.array([np.dot(x[:n - h], x[h:]) for h in range(max_lag + 1)]) / energy
    return AcfResult(np.arange(max_lag + 1), vals, 1.96 / np.sqrt(n), n)


def ljung_box_from_acf(rho, n: int, df: int | None = None) -> tuple[float, float]:
    """Ljung-Box ``Q`` and p-value from autocorrelations ``rho(1..H)``."""
    rho = np.asarray(rho, dtype=float)
    h = rho.size
    k = np.arange(1, h + 1)
    q = float(n * (n + 2) * np.sum(rho ** 2 / (n - k)))
    df = h if df is None else int(df)
    if df <= 0:
        raise ArtfimaError("degrees of freedom must be positive")
    # chi-square upper tail: Q(df/2, q/2)
    return q, float(gammaincc(df / 2.0, q / 2.0))


def ljung_box(series, lags: int = DEFAULT_LB_LAGS, df: int | None = None) -> tuple[float, float]:
    """Ljung-Box portmanteau test on the mean-corrected ACF.

    ``df`` defaults to ``lags``; pass ``lags - (p + q + 2)`` to account for
    fitted parameters.
    """
    n = len(as_array(series))
    if not 0 < lags < n / 4:
        raise ArtfimaError("lags must be positive and below a quarter of the series length")
    acf = sample_acf(series, lags)
    return ljung_box_from_acf(acf.values[1:], n, df)
