"""Periodograms and the tempered power transfer function."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ArtfimaError, DegenerateSeriesError, UnsupportedError
from .kernel import ArtfimaParams
from .series import as_array


@dataclass(frozen=True)
class Periodogram:
    """Periodogram ordinates at the Fourier frequencies ``2 pi j / n``.

    By default ``j = 1..floor(n/2)``: zero is excluded and ``pi`` is present
    for even ``n``. ``full=True`` periodograms cover all ``j = 0..n-1``.
    """

    freqs: np.ndarray
    ordinates: np.ndarray
    normalization: str
    n: int
    alpha: float | None = None
    full: bool = False

    @property
    def has_nyquist(self) -> bool:
        return (not self.full) and self.n % 2 == 0


def _prepare(series, demean: bool) -> np.ndarray:
    x = np.array(as_array(series), dtype=float)
    if x.size < 4:
        raise DegenerateSeriesError("periodogram needs at least 4 observations")
    if demean:
        x = x - x.mean()
    return x


def _dft_power(x: np.ndarray, full: bool) -> tuple[np.ndarray, np.ndarray]:
    n = x.size
    if full:
        power = np.abs(np.fft.fft(x)) ** 2
        return 2.0 * np.pi * np.arange(n) / n, power
    power = np.abs(np.fft.rfft(x)) ** 2
    j = np.arange(1, n // 2 + 1)
    return 2.0 * np.pi * j / n, power[1:n // 2 + 1]


def self_normalized_periodogram(series, demean: bool = False, full: bool = False) -> Periodogram:
    """``|sum_t x_t exp(-i t w)|^2 / sum_t x_t^2`` at the Fourier frequencies."""
    x = _prepare(series, demean)
    energy = float(np.dot(x, x))
    if energy == 0.0:
        raise DegenerateSeriesError("series has zero energy")
    freqs, power = _dft_power(x, full)
    return Periodogram(freqs, power / energy, "self_normalized", x.size, None, full)


def alpha_scaled_periodogram(series, alpha: float, demean: bool = False,
                             full: bool = False) -> Periodogram:
    """``n^(-2/alpha) |sum_t x_t exp(-i t w)|^2`` at the Fourier frequencies."""
    if not 0.0 < alpha <= 2.0:
        raise ArtfimaError(f"alpha must lie in (0, 2], got {alpha}")
    x = _prepare(series, demean)
    freqs, power = _dft_power(x, full)
    return Periodogram(freqs, power * float(x.size) ** (-2.0 / alpha), "alpha_scaled", x.size,
                       float(alpha), full)


def _poly_sq_modulus(coeffs: np.ndarray, omegas: np.ndarray) -> np.ndarray:
    """``|sum_k c_k exp(-i k w)|^2`` for low-order polynomials."""
    k = np.arange(coeffs.size)
    val = np.exp(-1j * np.outer(omegas, k)) @ coeffs
    return val.real ** 2 + val.imag ** 2


def tempered_base(lam: float, omegas) -> np.ndarray:
    """``|1 - exp(-(lam + i w))|^2 = 1 - 2 exp(-lam) cos w + exp(-2 lam)``.

    Evaluated as ``(1 - exp(-lam))^2 + 4 exp(-lam) sin^2(w/2)``, which stays
    accurate for small ``lam`` and ``w``.
    """
    omegas = np.asarray(omegas, dtype=float)
    return np.expm1(-lam) ** 2 + 4.0 * np.exp(-lam) * np.sin(0.5 * omegas) ** 2


def transfer_function(params: ArtfimaParams, omegas) -> np.ndarray:
    """Tempered power transfer function

        g(w) = |Theta(e^{-iw})|^2 / |Phi(e^{-iw})|^2 * (1 - 2 e^{-lam} cos w + e^{-2 lam})^(-d)
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    base = tempered_base(params.lam, omegas)
    if params.d > 0 and np.any(base == 0.0):
        raise UnsupportedError("untempered long-memory spectrum is singular at w = 0")
    g = base ** (-params.d) if params.d else np.ones_like(omegas)
    if params.q:
        g = g * _poly_sq_modulus(params.arma.ma_poly, omegas)
    if params.p:
        g = g / _poly_sq_modulus(params.arma.ar_poly, omegas)
    return g
