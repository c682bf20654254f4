"""Coefficient engine for tempered fractional ARMA filters.

The tempered fractional integration operator ``(1 - exp(-lam) B) ** (-d)``
expands into the weights

    w(j) = Gamma(j + d) / (Gamma(d) Gamma(j + 1)) * exp(-lam * j),

and the ARTFIMA moving-average and autoregressive representations are the
convolutions of those weights with the power series of ``Theta / Phi`` and
``Phi / Theta``. Everything here is a pure function of its inputs.

Gamma ratios are always built by the multiplicative recursion
``w(j) = w(j - 1) * (j - 1 + d) / j`` so that no gamma function is ever
evaluated at a large argument; the tempering factor is applied afterwards
in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.signal import lfilter, oaconvolve
from scipy.special import gammaln

from .exceptions import EmptyRequestError, InvalidArmaError, InvalidOrderError, UnsupportedError

DEFAULT_TOL = 1e-12
MAX_COEFFICIENTS = 1_000_000

#: Tolerance used when deciding that Phi and Theta share a root.
COMMON_ROOT_TOL = 1e-10

_DIRECT_CONV_LIMIT = 4096


class WeightKind(str, Enum):
    OMEGA_NEG_D = "omega_neg_d"
    OMEGA_POS_D = "omega_pos_d"
    B = "b"
    C = "c"
    A_MA = "a_ma"
    C_AR = "c_ar"
    SECOND_KIND = "second_kind"


def _is_negative_integer(x: float) -> bool:
    return x < 0 and float(x).is_integer()


@dataclass(frozen=True)
class TemperedOrder:
    """Memory parameter ``d`` and tempering rate ``lam``.

    ``lam == 0`` is accepted so that untempered weights can be generated for
    cross-checks; :meth:`ArtfimaParams.validate` rejects it.
    """

    d: float
    lam: float

    def __post_init__(self):
        d, lam = float(self.d), float(self.lam)
        if not (math.isfinite(d) and math.isfinite(lam)):
            raise InvalidOrderError(f"non-finite order (d={d}, lam={lam})")
        if _is_negative_integer(d):
            raise InvalidOrderError(f"d must not be a negative integer, got {d}")
        if lam < 0:
            raise InvalidOrderError(f"lam must be >= 0, got {lam}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "lam", lam)


def _as_coeffs(values) -> tuple[float, ...]:
    return tuple(float(v) for v in np.atleast_1d(np.asarray(values, dtype=float)))


def _poly_roots(coeffs_low_first: np.ndarray) -> np.ndarray:
    """Roots of c0 + c1 z + ... with trailing zeros stripped."""
    c = np.trim_zeros(np.asarray(coeffs_low_first, dtype=float), "b")
    if c.size <= 1:
        return np.empty(0, dtype=complex)
    return np.roots(c[::-1])


@dataclass(frozen=True)
class ArmaPoly:
    """AR polynomial ``1 - phi_1 z - ... - phi_p z^p`` and MA polynomial
    ``1 + theta_1 z + ... + theta_q z^q``."""

    phi: tuple[float, ...] = ()
    theta: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "phi", _as_coeffs(self.phi) if len(self.phi) else ())
        object.__setattr__(self, "theta", _as_coeffs(self.theta) if len(self.theta) else ())

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def q(self) -> int:
        return len(self.theta)

    @property
    def ar_poly(self) -> np.ndarray:
        """Coefficients of Phi in increasing powers of z."""
        return np.concatenate(([1.0], -np.asarray(self.phi, dtype=float)))

    @property
    def ma_poly(self) -> np.ndarray:
        """Coefficients of Theta in increasing powers of z."""
        return np.concatenate(([1.0], np.asarray(self.theta, dtype=float)))

    def ar_roots(self) -> np.ndarray:
        return _poly_roots(self.ar_poly)

    def ma_roots(self) -> np.ndarray:
        return _poly_roots(self.ma_poly)

    def problems(self) -> list[str]:
        """Human-readable list of violated conditions (empty when valid)."""
        out = []
        if not all(math.isfinite(v) for v in self.phi + self.theta):
            return ["non-finite ARMA coefficient"]
        if self.p and self.phi[-1] == 0:
            out.append("leading AR coefficient is zero")
        if self.q and self.theta[-1] == 0:
            out.append("leading MA coefficient is zero")
        ar, ma = self.ar_roots(), self.ma_roots()
        if ar.size and np.min(np.abs(ar)) <= 1.0:
            out.append("AR polynomial has a root in the closed unit disk")
        if ma.size and np.min(np.abs(ma)) <= 1.0:
            out.append("MA polynomial has a root in the closed unit disk")
        if ar.size and ma.size:
            gaps = np.abs(ar[:, None] - ma[None, :])
            if np.min(gaps) < COMMON_ROOT_TOL * max(1.0, float(np.max(np.abs(ar)))):
                out.append("AR and MA polynomials share a root")
        return out

    def validate(self) -> None:
        problems = self.problems()
        if problems:
            raise InvalidArmaError("; ".join(problems))


@dataclass(frozen=True)
class ArtfimaParams:
    """Full parameter vector ``beta = (phi_1..phi_p, d, lam, theta_1..theta_q)``."""

    order: TemperedOrder
    arma: ArmaPoly = field(default_factory=ArmaPoly)

    @classmethod
    def make(cls, d: float, lam: float, phi: Sequence[float] = (), theta: Sequence[float] = ()):
        return cls(TemperedOrder(d, lam), ArmaPoly(tuple(phi), tuple(theta)))

    @property
    def d(self) -> float:
        return self.order.d

    @property
    def lam(self) -> float:
        return self.order.lam

    @property
    def phi(self) -> tuple[float, ...]:
        return self.arma.phi

    @property
    def theta(self) -> tuple[float, ...]:
        return self.arma.theta

    @property
    def p(self) -> int:
        return self.arma.p

    @property
    def q(self) -> int:
        return self.arma.q

    def to_vector(self) -> np.ndarray:
        return np.array([*self.phi, self.d, self.lam, *self.theta], dtype=float)

    @classmethod
    def from_vector(cls, beta, p: int, q: int) -> "ArtfimaParams":
        beta = np.asarray(beta, dtype=float)
        if beta.size != p + q + 2:
            raise ValueError(f"expected {p + q + 2} entries, got {beta.size}")
        return cls.make(beta[p], beta[p + 1], beta[:p], beta[p + 2:])

    def names(self) -> list[str]:
        return ([f"phi{i + 1}" for i in range(self.p)] + ["d", "lambda"]
                + [f"theta{j + 1}" for j in range(self.q)])

    def as_dict(self) -> dict:
        return {"d": self.d, "lambda": self.lam, "phi": list(self.phi), "theta": list(self.theta)}

    def problems(self) -> list[str]:
        out = []
        if not self.lam > 0:
            out.append("lam must be > 0")
        return out + self.arma.problems()

    def is_valid(self) -> bool:
        return not self.problems()

    def validate(self) -> None:
        """Raise unless the parameters lie in the admissible space E."""
        if not self.lam > 0:
            raise InvalidOrderError(f"lam must be > 0 for fitting and simulation, got {self.lam}")
        self.arma.validate()


@dataclass(frozen=True)
class WeightSeq:
    """Finite prefix ``values[0..M]`` of an infinite coefficient sequence."""

    values: np.ndarray
    kind: WeightKind
    truncation_tol: float | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "kind", WeightKind(self.kind))

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def to_csv(self, path) -> None:
        from .fileio import write_columns

        write_columns(path, {"index": np.arange(self.values.size), "value": self.values})


def _check_count(m: int) -> int:
    m = int(m)
    if m <= 0:
        raise EmptyRequestError("at least one coefficient must be requested")
    return m


def _binomial_series(e: float, m: int) -> np.ndarray:
    """Coefficients of ``(1 - z) ** (-e)``: Gamma(j+e) / (Gamma(e) Gamma(j+1))."""
    out = np.empty(m)
    out[0] = 1.0
    if m > 1:
        j = np.arange(1, m, dtype=float)
        out[1:] = np.cumprod((j - 1.0 + e) / j)
    return out


def _exponent(order: TemperedOrder, sign: str) -> float:
    if sign == "integrate":
        return order.d
    if sign == "difference":
        return -order.d
    raise ValueError(f"sign must be 'integrate' or 'difference', got {sign!r}")


def tempered_weights(order: TemperedOrder, sign: str = "integrate", m: int = 1) -> WeightSeq:
    """Tempered fractional weights ``w_{-d,lam}(0..m-1)`` (``sign='integrate'``)
    or ``w_{d,lam}(0..m-1)`` (``sign='difference'``)."""
    m = _check_count(m)
    e = _exponent(order, sign)
    w = _binomial_series(e, m)
    if order.lam:
        w *= np.exp(-order.lam * np.arange(m))
    kind = WeightKind.OMEGA_NEG_D if sign == "integrate" else WeightKind.OMEGA_POS_D
    return WeightSeq(w, kind)


def arma_expansion(arma: ArmaPoly, direction: str = "theta_over_phi", m: int = 1) -> WeightSeq:
    """Power-series coefficients of ``Theta/Phi`` (b) or ``Phi/Theta`` (c)."""
    m = _check_count(m)
    arma.validate()
    impulse = np.zeros(m)
    impulse[0] = 1.0
    if direction == "theta_over_phi":
        return WeightSeq(lfilter(arma.ma_poly, arma.ar_poly, impulse), WeightKind.B)
    if direction == "phi_over_theta":
        return WeightSeq(lfilter(arma.ar_poly, arma.ma_poly, impulse), WeightKind.C)
    raise ValueError(f"unknown direction {direction!r}")


def ma_coefficients(params: ArtfimaParams, m: int) -> WeightSeq:
    """Causal moving-average coefficients ``a_{-d,lam}(0..m-1)``.

    Equal to the convolution of the tempered integration weights with the
    expansion of ``Theta/Phi``; the convolution is carried out by running the
    weights through the rational filter, which is exact and O(m (p + q)).
    """
    m = _check_count(m)
    params.arma.validate()
    w = tempered_weights(params.order, "integrate", m).values
    return WeightSeq(lfilter(params.arma.ma_poly, params.arma.ar_poly, w), WeightKind.A_MA)


def ar_coefficients(params: ArtfimaParams, m: int) -> WeightSeq:
    """Invertibility coefficients ``c_{d,lam}(0..m-1)`` with ``Z = sum c(j) X(t-j)``."""
    m = _check_count(m)
    params.arma.validate()
    w = tempered_weights(params.order, "difference", m).values
    return WeightSeq(lfilter(params.arma.ar_poly, params.arma.ma_poly, w), WeightKind.C_AR)


def second_kind_ma_weights(params: ArtfimaParams, m: int) -> WeightSeq:
    """Weights ``exp(-lam j) a_{-d}(j)`` of the second-kind process, where
    ``a_{-d}`` uses the untempered fractional weights."""
    m = _check_count(m)
    params.arma.validate()
    w0 = _binomial_series(params.d, m)
    a0 = lfilter(params.arma.ma_poly, params.arma.ar_poly, w0)
    return WeightSeq(a0 * np.exp(-params.lam * np.arange(m)), WeightKind.SECOND_KIND)


def _log_abs_weight(e: float, lam: float, j: int) -> float:
    return float(gammaln(j + e) - gammaln(e) - gammaln(j + 1.0) - lam * j)


def truncation_length(order: TemperedOrder, tol: float = DEFAULT_TOL, sign: str = "integrate",
                      cap: int = MAX_COEFFICIENTS) -> int:
    """Smallest index ``M`` beyond which the tempered weights are below ``tol``.

    Solves ``|Gamma(e)|^-1 M^(e-1) exp(-lam M) = tol`` (``e = d`` for
    integration, ``-d`` for differencing) by fixed-point iteration, then
    steps forward until the exact weight at ``M`` satisfies the bound.
    """
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")
    if order.lam <= 0:
        raise UnsupportedError("truncation needs lam > 0 (untempered weights have no exponential tail)")
    e = _exponent(order, sign)
    lam = order.lam
    if e <= 0 and float(e).is_integer():
        # (1 - z)^k is a polynomial of degree k
        return min(max(1, int(-e) + 1), cap)

    log_tol = math.log(tol)
    base = -log_tol - float(gammaln(e))
    m = max(1.0, base / lam)
    for _ in range(200):
        nxt = max(1.0, (base + (e - 1.0) * math.log(m)) / lam)
        if abs(nxt - m) < 1e-10:
            m = nxt
            break
        m = nxt
    m_int = max(1, math.ceil(m - 1e-9))
    if m_int >= cap:
        return cap
    while m_int < cap and _log_abs_weight(e, lam, m_int) > log_tol + 1e-12:
        m_int += 1
    return m_int


def _decay_radius(roots: np.ndarray) -> float:
    """Geometric decay ratio of the power series of 1/P when P has these roots."""
    if roots.size == 0:
        return 0.0
    return 1.0 / float(np.min(np.abs(roots)))


def filter_length(params: ArtfimaParams, tol: float = DEFAULT_TOL, sign: str = "integrate",
                  cap: int = MAX_COEFFICIENTS) -> int:
    """Truncation index for the full ARTFIMA filter (tempered part and ARMA part).

    For p = q = 0 this is :func:`truncation_length`. With ARMA terms the
    slower of the tempered tail and the rational tail governs; the result is
    checked on the actual coefficients so that the last few retained values
    are below ``tol`` relative to the largest one.
    """
    params.validate()
    m = truncation_length(params.order, tol, sign, cap)
    if params.p == 0 and params.q == 0:
        return m
    roots = params.arma.ar_roots() if sign == "integrate" else params.arma.ma_roots()
    rho = _decay_radius(roots)
    if rho > 0:
        m = max(m, math.ceil(math.log(tol) / math.log(rho)) + params.p + params.q)
    m = min(m, cap)
    coef_fn = ma_coefficients if sign == "integrate" else ar_coefficients
    window = 2 * (params.p + params.q) + 4
    while True:
        c = np.abs(coef_fn(params, m + 1).values)
        if np.max(c[max(0, m + 1 - window):]) <= tol * np.max(c) or m >= cap:
            return m
        m = min(cap, int(m * 1.25) + 1)


def convolve_truncated(x, y, m: int | None = None) -> np.ndarray:
    """First ``m`` coefficients of the Cauchy product of two sequences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if m is None:
        m = min(x.size, y.size)
    x, y = x[:m], y[:m]
    if min(x.size, y.size) <= _DIRECT_CONV_LIMIT:
        return np.convolve(x, y)[:m]
    return oaconvolve(x, y)[:m]
