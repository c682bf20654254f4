"""Theoretical co-difference of stable ARTFIMA processes and its asymptotics.

For a causal moving average ``X(t) = sum_j a(j) Z(t - j)`` with SaS
innovations the co-difference at lag ``n`` is

    tau(n) = sum_j |a(j)|^alpha + |a(j+n)|^alpha - |a(j) - a(j+n)|^alpha,

which equals twice the autocovariance when ``alpha = 2``. For large lags
the summand is a difference of nearly equal powers, so it is evaluated
through ``expm1``/``log1p`` instead of literally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gamma

from .exceptions import ArtfimaError, UnsupportedError
from .kernel import DEFAULT_TOL, ArtfimaParams, filter_length, ma_coefficients, tempered_weights
from .series import SeriesData

TINY = 1e-300

RATE_ALPHA_BELOW_ONE = "exp(-lambda*alpha*n) * n**(alpha*(d-1))"
RATE_ALPHA_ABOVE_ONE = "exp(-lambda*n) * n**(d-1)"


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha <= 2.0:
        raise ArtfimaError(f"alpha must lie in (0, 2], got {alpha}")
    return alpha


def _abs_pow(x: np.ndarray, alpha: float) -> np.ndarray:
    ax = np.abs(x)
    out = np.zeros_like(ax)
    nz = ax >= TINY
    out[nz] = np.exp(alpha * np.log(ax[nz]))
    return out


def codifference_terms(x, y, alpha: float) -> np.ndarray:
    """``|x|^a + |y|^a - |x - y|^a`` elementwise without cancellation.

    With ``big`` the larger and ``small`` the smaller of ``|x|, |y|`` (keeping
    signs) and ``r = small / big`` in [-1, 1], the expression equals
    ``|small|^a - |big|^a * expm1(a * log1p(-r))``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    swap = np.abs(y) > np.abs(x)
    big = np.where(swap, y, x)
    small = np.where(swap, x, y)
    out = np.zeros(np.broadcast(x, y).shape)
    nz = np.abs(big) >= TINY
    r = small[nz] / big[nz]
    with np.errstate(divide="ignore"):
        tail = np.expm1(alpha * np.log1p(-r))
    out[nz] = _abs_pow(small[nz], alpha) - _abs_pow(big[nz], alpha) * tail
    return out


@dataclass(frozen=True)
class CodiffCurve:
    lags: np.ndarray
    tau: np.ndarray
    alpha: float
    params: ArtfimaParams
    inner_truncation: int


def inner_truncation(params: ArtfimaParams, alpha: float, tol: float = DEFAULT_TOL) -> int:
    """Index beyond which ``|a(j)|^alpha`` is negligible at level ``tol``."""
    return filter_length(params, tol ** max(1.0, 1.0 / alpha))


def codifference_from_coefficients(a, alpha: float, max_lag: int, m: int) -> np.ndarray:
    """``tau(0..max_lag)`` from MA coefficients ``a[0..m+max_lag]``, summing ``j = 0..m``."""
    a = np.asarray(a, dtype=float)
    head = a[:m + 1]
    out = np.empty(max_lag + 1)
    for n in range(max_lag + 1):
        out[n] = float(np.sum(codifference_terms(head, a[n:n + m + 1], alpha)))
    return out


def theoretical_codifference(params: ArtfimaParams, alpha: float, max_lag: int,
                             tol: float = DEFAULT_TOL) -> CodiffCurve:
    """Co-difference curve ``tau(0..max_lag)`` of ARTFIMA(p, d, lam, q)."""
    alpha = _check_alpha(alpha)
    params.validate()
    max_lag = int(max_lag)
    if max_lag < 0:
        raise ArtfimaError("max_lag must be >= 0")
    m = inner_truncation(params, alpha, tol)
    a = ma_coefficients(params, m + max_lag + 1).values
    tau = codifference_from_coefficients(a, alpha, max_lag, m)
    return CodiffCurve(np.arange(max_lag + 1), tau, alpha, params, m)


class Asymptotics(NamedTuple):
    rate: str
    constant: float
    candidates: dict


def _require_pure(params: ArtfimaParams, alpha: float) -> None:
    if params.p or params.q:
        raise UnsupportedError("asymptotic constants are available for ARTFIMA(0, d, lam, 0) only")
    if alpha == 1.0:
        raise UnsupportedError("no asymptotic result for alpha = 1")
    params.validate()


def _weighted_power_series(params: ArtfimaParams, alpha: float, tol: float = 1e-10) -> float:
    """``sum_j exp(-lam j) <w_{-d,lam}(j)>^(alpha - 1)`` with signed powers, summed to
    relative tolerance ``tol``."""
    lam = params.lam
    m = max(64, math.ceil(math.log(1.0 / tol) / (lam * alpha)) + 1)
    prev = None
    while True:
        w = tempered_weights(params.order, "integrate", m).values
        terms = np.exp(-lam * np.arange(m)) * np.sign(w) * _abs_pow(w, alpha - 1.0)
        total = float(np.sum(terms))
        if prev is not None and abs(total - prev) <= tol * abs(total):
            return total
        prev = total
        m *= 2


def asymptotic_constant(params: ArtfimaParams, alpha: float) -> Asymptotics:
    """Normalising sequence and limit of ``tau(n) / rate(n)`` for ARTFIMA(0, d, lam, 0).

    For ``alpha < 1`` the limit is ``|Gamma(d)|^-alpha (1 - exp(-lam alpha))^-1``.
    For ``alpha > 1`` two closed forms circulate for the limit; both are
    returned in ``candidates``:

    ``gamma_inverse``
        ``(alpha / Gamma(d)) sum_j exp(-lam j) w_{-d,lam}(j)^(alpha-1)``
    ``gamma_power``
        ``Gamma(d)^-alpha sum_j alpha exp(-lam alpha j) w_{-d}(j)^(alpha-1)``

    and ``constant`` is the ``gamma_inverse`` form, which is the one the
    direct series converges to (see :func:`compare_asymptotic_forms`).
    """
    alpha = _check_alpha(alpha)
    _require_pure(params, alpha)
    g = float(gamma(params.d))
    if alpha < 1.0:
        c = abs(g) ** (-alpha) / (-math.expm1(-params.lam * alpha))
        return Asymptotics(RATE_ALPHA_BELOW_ONE, c, {"closed_form": c})
    series = _weighted_power_series(params, alpha)
    inverse = alpha / g * series
    # exp(-lam j) w_{-d,lam}^(alpha-1) == exp(-lam alpha j) w_{-d}^(alpha-1), so the two
    # forms differ only in the gamma prefactor
    power = math.copysign(abs(g) ** (-alpha), g) * alpha * series
    return Asymptotics(RATE_ALPHA_ABOVE_ONE, inverse,
                       {"gamma_inverse": inverse, "gamma_power": power})


def normalizer(params: ArtfimaParams, alpha: float, n) -> np.ndarray:
    """Rate sequence against which ``tau(n)`` converges."""
    n = np.asarray(n, dtype=float)
    d, lam = params.d, params.lam
    if alpha < 1.0:
        return np.exp(-lam * alpha * n) * n ** (alpha * (d - 1.0))
    return np.exp(-lam * n) * n ** (d - 1.0)


def asymptotic_ratio(params: ArtfimaParams, alpha: float, lags, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Direct ``tau(n) / rate(n)`` at the requested (positive) lags."""
    lags = np.asarray(lags, dtype=int)
    curve = theoretical_codifference(params, alpha, int(lags.max()), tol)
    return curve.tau[lags] / normalizer(params, alpha, lags)


def compare_asymptotic_forms(params: ArtfimaParams, alpha: float, lags=(500, 1000, 2000),
                             tol: float = DEFAULT_TOL) -> dict:
    """Evaluate the direct ratio at large lags and report which closed form it approaches."""
    asym = asymptotic_constant(params, alpha)
    ratios = asymptotic_ratio(params, alpha, lags, tol)
    last = float(ratios[-1])
    errors = {name: abs(last / c - 1.0) for name, c in asym.candidates.items()}
    return {
        "rate": asym.rate,
        "lags": [int(v) for v in lags],
        "ratios": ratios.tolist(),
        "candidates": asym.candidates,
        "relative_errors": errors,
        "match": min(errors, key=errors.get),
        "relative_change_last": abs(last / float(ratios[-2]) - 1.0) if len(ratios) > 1 else None,
    }


def codiff_abs_partial_sums(curve: CodiffCurve) -> SeriesData:
    """Running sums ``S_N = sum_{n<=N} |tau(n)|``."""
    s = np.cumsum(np.abs(curve.tau))
    return SeriesData(s, {"source": "codiff_abs_partial_sums", "alpha": curve.alpha,
                          "params": curve.params.as_dict()})
