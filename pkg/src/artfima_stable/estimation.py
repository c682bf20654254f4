"""Whittle estimation for ARTFIMA models and McCulloch tail-index estimation.

The Whittle objective uses the self-normalised periodogram, so it is free
of the (unknown) stability index and invariant under rescaling of the data.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .exceptions import DegenerateSeriesError, GradientError, NoFeasiblePointError
from .kernel import ArtfimaParams
from .series import as_array
from .spectral import Periodogram, self_normalized_periodogram, tempered_base, transfer_function
from .stable import substream

# McCulloch (1986), nu_alpha = (q95 - q05) / (q75 - q25) for beta = 0 and
# alpha = 2.0, 1.9, ..., 0.5.
MCCULLOCH_ALPHA = np.round(np.arange(2.0, 0.45, -0.1), 1)
MCCULLOCH_NU = np.array([
    2.4388, 2.5120, 2.6080, 2.7369, 2.9115, 3.1480, 3.4635, 3.8824,
    4.4468, 5.2172, 6.3140, 7.9098, 10.4480, 14.8378, 23.4831, 44.2813,
])


@dataclass
class SearchConfig:
    """Search box and multistart settings for :func:`fit_whittle`.

    Starts are the lattice ``d_starts x lam_starts`` crossed with
    ``arma_starts`` random ARMA vectors (one zero vector when p = q = 0).
    All lattice points are screened by objective value and the best
    ``n_refine`` are refined with a bounded Nelder-Mead search in
    ``(phi, d, log lam, theta)`` coordinates.
    """

    p: int = 0
    q: int = 0
    d_bounds: tuple[float, float] = (-0.95, 1.5)
    lam_bounds: tuple[float, float] = (1e-4, 3.0)
    arma_bound: float = 0.98
    d_starts: tuple[float, ...] = (-0.3, 0.1, 0.45, 0.9)
    lam_starts: tuple[float, ...] = (0.003, 0.03, 0.2, 1.0)
    arma_starts: int = 4
    n_refine: int = 3
    xatol: float = 1e-7
    fatol: float = 1e-10
    max_evals: int = 4000
    seed: int = 20230101
    demean: bool = False

    def __post_init__(self):
        lo, hi = self.d_bounds
        if not lo < hi:
            raise ValueError("empty d box")
        if any(float(k).is_integer() and k < 0 for k in range(math.ceil(lo), math.floor(hi) + 1)):
            raise ValueError("d box must not contain a negative integer")
        llo, lhi = self.lam_bounds
        if not 0.0 < llo < lhi:
            raise ValueError("lam box must be a non-empty subset of (0, inf)")
        if not 0.0 < self.arma_bound < 1.0:
            raise ValueError("arma_bound must lie in (0, 1)")
        if self.p < 0 or self.q < 0:
            raise ValueError("orders must be non-negative")

    def bounds(self) -> list[tuple[float, float]]:
        b = self.arma_bound
        return ([(-b, b)] * self.p + [tuple(self.d_bounds),
                                      (math.log(self.lam_bounds[0]), math.log(self.lam_bounds[1]))]
                + [(-b, b)] * self.q)


@dataclass
class FitResult:
    beta_hat: ArtfimaParams
    sigma2_hat: float
    converged: bool
    trace: list = field(default_factory=list)
    W: np.ndarray | None = None
    n_evals: int = 0

    def to_dict(self) -> dict:
        out = {
            "params": self.beta_hat.as_dict(),
            "beta": dict(zip(self.beta_hat.names(), self.beta_hat.to_vector().tolist())),
            "sigma2_hat": self.sigma2_hat,
            "converged": self.converged,
            "n_evals": self.n_evals,
            "trace": self.trace,
        }
        if self.W is not None:
            out["W"] = np.asarray(self.W).tolist()
        return out


def _grid_weights(pgram: Periodogram) -> np.ndarray:
    """Multiplicity of each ordinate on the symmetric (-pi, pi] grid."""
    w = np.full(pgram.freqs.size, 2.0)
    if pgram.has_nyquist:
        w[-1] = 1.0
    return w


def whittle_objective(pgram: Periodogram, params: ArtfimaParams) -> float:
    """Riemann sum ``(2 pi / n) sum_j I(w_j) / g(w_j)`` over the symmetric
    Fourier grid without ``w = 0``."""
    if pgram.normalization != "self_normalized" or pgram.full:
        raise ValueError("whittle_objective needs a positive-frequency self-normalised periodogram")
    params.validate()
    g = transfer_function(params, pgram.freqs)
    return float(2.0 * np.pi / pgram.n * np.sum(_grid_weights(pgram) * pgram.ordinates / g))


class _Objective:
    """Vectorised objective over ``x = (phi, d, log lam, theta)`` with a fixed periodogram."""

    PENALTY = 1e12

    def __init__(self, pgram: Periodogram, p: int, q: int):
        self.p, self.q = p, q
        self.n = pgram.n
        self.weighted = _grid_weights(pgram) * pgram.ordinates * (2.0 * np.pi / pgram.n)
        self.sin2 = np.sin(0.5 * pgram.freqs) ** 2
        k = np.arange(max(p, q) + 1)
        self.cis = np.exp(-1j * np.outer(pgram.freqs, k))
        self.n_evals = 0

    def params(self, x) -> ArtfimaParams:
        p = self.p
        return ArtfimaParams.make(x[p], math.exp(x[p + 1]), x[:p], x[p + 2:])

    def __call__(self, x) -> float:
        self.n_evals += 1
        p, q = self.p, self.q
        d, lam = x[p], math.exp(x[p + 1])
        if p or q:
            if not self.params(x).is_valid():
                return self.PENALTY
        base = np.expm1(-lam) ** 2 + 4.0 * math.exp(-lam) * self.sin2
        inv_g = np.exp(d * np.log(base))
        if p:
            ar = self.cis[:, :p + 1] @ np.concatenate(([1.0], -np.asarray(x[:p])))
            inv_g *= ar.real ** 2 + ar.imag ** 2
        if q:
            ma = self.cis[:, :q + 1] @ np.concatenate(([1.0], np.asarray(x[p + 2:])))
            inv_g /= ma.real ** 2 + ma.imag ** 2
        val = float(np.dot(self.weighted, inv_g))
        return val if math.isfinite(val) else self.PENALTY

    def value_and_grad(self, x) -> tuple[float, np.ndarray]:
        """Objective and its analytic gradient in ``(phi, d, log lam, theta)``."""
        self.n_evals += 1
        p, q = self.p, self.q
        x = np.asarray(x, dtype=float)
        grad = np.zeros(x.size)
        if (p or q) and not self.params(x).is_valid():
            return self.PENALTY, grad
        d, lam = x[p], math.exp(x[p + 1])
        e = math.exp(-lam)
        base = np.expm1(-lam) ** 2 + 4.0 * e * self.sin2
        log_base = np.log(base)
        terms = self.weighted * np.exp(d * log_base)
        if p:
            ar = self.cis[:, :p + 1] @ np.concatenate(([1.0], -x[:p]))
            a2 = ar.real ** 2 + ar.imag ** 2
            terms = terms * a2
        if q:
            ma = self.cis[:, :q + 1] @ np.concatenate(([1.0], x[p + 2:]))
            m2 = ma.real ** 2 + ma.imag ** 2
            terms = terms / m2
        val = float(np.sum(terms))
        if not math.isfinite(val):
            return self.PENALTY, grad
        grad[p] = np.dot(terms, log_base)
        dbase = 2.0 * (-math.expm1(-lam)) * e - 4.0 * e * self.sin2
        grad[p + 1] = lam * d * np.dot(terms, dbase / base)
        for k in range(1, p + 1):
            # d|Phi|^2 / d phi_k = -2 Re(conj(Phi) z^k)
            dk = -2.0 * np.real(np.conj(ar) * self.cis[:, k])
            grad[k - 1] = np.dot(terms, dk / a2)
        for k in range(1, q + 1):
            dk = 2.0 * np.real(np.conj(ma) * self.cis[:, k])
            grad[p + 1 + k] = -np.dot(terms, dk / m2)
        return val, grad


def _starts(config: SearchConfig, rng: np.random.Generator) -> list[np.ndarray]:
    p, q = config.p, config.q
    n_arma = config.arma_starts if (p or q) else 1
    arma = [np.zeros(p + q)]
    while len(arma) < n_arma:
        cand = rng.uniform(-0.6, 0.6, size=p + q)
        trial = ArtfimaParams.make(0.1, 0.1, cand[:p], cand[p:])
        if trial.is_valid():
            arma.append(cand)
    out = []
    for d in config.d_starts:
        for lam in config.lam_starts:
            for a in arma:
                out.append(np.concatenate((a[:p], [d, math.log(lam)], a[p:])))
    return out


def _newton_polish(obj: _Objective, x, lo, hi, max_steps: int = 20, h: float = 1e-5):
    """Newton iteration on the gradient, with a finite-difference Hessian.

    Stops when the step falls below 1e-13, the Hessian stops being positive
    definite, or a step would leave the box. Returns ``(x, f, steps)``.
    """
    x = np.array(x, dtype=float)
    f, g = obj.value_and_grad(x)
    k = x.size
    for step in range(max_steps):
        H = np.empty((k, k))
        for i in range(k):
            e = np.zeros(k)
            e[i] = h
            H[:, i] = (obj.value_and_grad(x + e)[1] - obj.value_and_grad(x - e)[1]) / (2.0 * h)
        H = 0.5 * (H + H.T)
        try:
            np.linalg.cholesky(H)
        except np.linalg.LinAlgError:
            return x, f, step
        dx = -np.linalg.solve(H, g)
        x_new = x + dx
        if np.any(x_new < lo) or np.any(x_new > hi):
            return x, f, step
        f_new, g_new = obj.value_and_grad(x_new)
        if f_new >= obj.PENALTY:
            return x, f, step
        x, f, g = x_new, f_new, g_new
        if np.max(np.abs(dx)) < 1e-13:
            return x, f, step + 1
    return x, f, max_steps


def fit_whittle(series, config: SearchConfig | None = None) -> FitResult:
    """Whittle estimate ``argmin sigma_n^2(beta)`` over the search box.

    Returns the best local minimum found from the multistart lattice; ties
    are broken by the lowest start index.
    """
    config = config or SearchConfig()
    x = as_array(series)
    if x.size < 128:
        raise DegenerateSeriesError("Whittle fitting needs at least 128 observations")
    pgram = self_normalized_periodogram(x, demean=config.demean)
    obj = _Objective(pgram, config.p, config.q)
    bounds = config.bounds()
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])

    starts = [np.clip(s, lo, hi) for s in _starts(config, substream(config.seed, 1))]
    screened = [(obj(s), i) for i, s in enumerate(starts)]
    feasible = sorted((v, i) for v, i in screened if v < obj.PENALTY)
    if not feasible:
        raise NoFeasiblePointError("no admissible starting point inside the search box")

    opts = {"xatol": config.xatol, "fatol": config.fatol, "maxfev": config.max_evals,
            "adaptive": len(bounds) > 3}
    trace = []
    best = None
    for v0, i in feasible[:config.n_refine]:
        res = minimize(obj, starts[i], method="Nelder-Mead", bounds=bounds, options=opts)
        # restart from the optimum to undo premature simplex collapse
        res2 = minimize(obj, res.x, method="Nelder-Mead", bounds=bounds, options=opts)
        if res2.fun <= res.fun:
            res = res2
        trace.append({"start_index": i, "start": starts[i].tolist(), "start_value": v0,
                      "x": res.x.tolist(), "value": float(res.fun), "success": bool(res.success),
                      "nfev": int(res.nfev)})
        if res.fun < obj.PENALTY and (best is None or res.fun < best[0].fun):
            best = (res, i)
    if best is None:
        raise NoFeasiblePointError("every refinement left the admissible set")
    res = best[0]
    x_best, f_best = res.x, float(res.fun)
    # the simplex only locates the minimum to the objective's rounding noise;
    # Newton steps on the analytic gradient pin it down far more tightly
    x_pol, f_pol, steps = _newton_polish(obj, x_best, lo, hi)
    polished = f_pol <= f_best * (1.0 + 1e-12)
    if polished:
        x_best, f_best = x_pol, f_pol
    trace.append({"polish": True, "accepted": bool(polished), "x": x_pol.tolist(), "value": f_pol,
                  "steps": steps})
    beta = obj.params(x_best)
    return FitResult(beta, f_best, bool(res.success), trace, None, obj.n_evals)


def _fd_step(v: float) -> float:
    return 1e-6 * abs(v) if v != 0.0 else 1e-6


def log_transfer_gradient(params: ArtfimaParams, omegas) -> np.ndarray:
    """Central-difference gradient of ``log g(w, beta)``; shape ``(len(omegas), p+q+2)``."""
    beta = params.to_vector()
    p, q = params.p, params.q
    grads = np.empty((np.size(omegas), beta.size))
    for i in range(beta.size):
        h = _fd_step(beta[i])
        up, dn = beta.copy(), beta.copy()
        up[i] += h
        dn[i] -= h
        # only the tempering rate needs the admissibility check to stay meaningful
        if i == p + 1 and dn[i] <= 0:
            raise GradientError("lam too close to zero for a central difference")
        gu = transfer_function(ArtfimaParams.from_vector(up, p, q), omegas)
        gd = transfer_function(ArtfimaParams.from_vector(dn, p, q), omegas)
        grads[:, i] = (np.log(gu) - np.log(gd)) / (2.0 * h)
    if not np.all(np.isfinite(grads)):
        raise GradientError("non-finite gradient of log g")
    return grads


def periodic_grid(quad_points: int) -> np.ndarray:
    """``-pi + 2 pi k / N`` for ``k = 1..N``: the trapezoid nodes on (-pi, pi]."""
    return -np.pi + 2.0 * np.pi * np.arange(1, quad_points + 1) / quad_points


def compute_W(params: ArtfimaParams, quad_points: int = 1024) -> np.ndarray:
    """``W = int_{-pi}^{pi} grad log g  grad log g'  dw`` by the periodic trapezoid rule."""
    params.validate()
    omegas = periodic_grid(int(quad_points))
    grads = log_transfer_gradient(params, omegas)
    W = (2.0 * np.pi / omegas.size) * grads.T @ grads
    return 0.5 * (W + W.T)


def quad_points_for(lam: float, minimum: int = 1024) -> int:
    """Trapezoid node count resolving a spectral peak of width ``lam`` (error ~ exp(-lam N))."""
    return max(minimum, int(2 ** math.ceil(math.log2(60.0 / lam))))


def spectral_ratio_integral(beta1: ArtfimaParams, beta2: ArtfimaParams,
                            quad_points: int | None = None) -> float:
    """``(1 / 2 pi) int g(w, beta1) / g(w, beta2) dw``; exceeds 1 whenever beta1 != beta2."""
    if quad_points is None:
        quad_points = quad_points_for(min(beta1.lam, beta2.lam))
    omegas = periodic_grid(quad_points)
    ratio = transfer_function(beta1, omegas) / transfer_function(beta2, omegas)
    return float(np.mean(ratio))


def log_base_d_gradient(lam: float, omegas) -> np.ndarray:
    """Closed-form ``d log g / d d = -log(1 - 2 e^-lam cos w + e^-2lam)``."""
    return -np.log(tempered_base(lam, omegas))


def mcculloch_nu(series) -> float:
    x = as_array(series)
    if x.size < 100:
        raise DegenerateSeriesError("McCulloch estimation needs at least 100 observations")
    q05, q25, q75, q95 = np.percentile(x, [5, 25, 75, 95], method="hazen")
    iqr = q75 - q25
    if iqr <= 0:
        raise DegenerateSeriesError("zero interquartile range")
    return float((q95 - q05) / iqr)


def mcculloch_alpha(series) -> float:
    """Quantile-ratio estimate of the stability index, clamped to [0.5, 2]."""
    nu = mcculloch_nu(series)
    return float(np.interp(nu, MCCULLOCH_NU, MCCULLOCH_ALPHA))


def search_config_dict(config: SearchConfig) -> dict:
    return asdict(config)
