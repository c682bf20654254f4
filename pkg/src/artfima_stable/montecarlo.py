"""Replicated simulate-then-fit studies."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .estimation import SearchConfig, fit_whittle
from .exceptions import ArtfimaError, StudyUnreliableError
from .kernel import DEFAULT_TOL, ArtfimaParams
from .simulate import simulate_artfima
from .stable import StableSpec

MAX_FAILURE_FRACTION = 0.10


def worker_count(requested: int | None = None) -> int:
    """Worker processes: explicit request, else ``ARTFIMA_THREADS``, else the CPU count."""
    if requested:
        return max(1, int(requested))
    env = os.environ.get("ARTFIMA_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class McConfig:
    params: ArtfimaParams
    spec: StableSpec
    n: int = 4096
    replicates: int = 200
    base_seed: int = 20230101
    search: SearchConfig = field(default_factory=SearchConfig)
    tol: float = DEFAULT_TOL
    #: Substream ids, one per replicate; defaults to ``range(replicates)``.
    streams: list | None = None
    workers: int | None = None

    def __post_init__(self):
        if self.replicates < 2:
            raise ArtfimaError("a study needs at least two replicates")
        if self.n < 256:
            raise ArtfimaError("replicate length must be at least 256")
        if self.streams is not None and len(self.streams) != self.replicates:
            raise ArtfimaError("need one stream id per replicate")
        if (self.search.p, self.search.q) != (self.params.p, self.params.q):
            raise ArtfimaError("search orders must match the true model orders")
        self.params.validate()

    def stream_ids(self) -> list:
        return list(range(self.replicates)) if self.streams is None else list(self.streams)


@dataclass
class McReport:
    names: list
    truth: np.ndarray
    estimates: np.ndarray
    replicate_ids: list
    failures: list
    mean: np.ndarray
    bias: np.ndarray
    mse: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    config: dict

    def summary(self) -> dict:
        return {name: {"true": float(self.truth[i]), "mean": float(self.mean[i]),
                       "bias": float(self.bias[i]), "mse": float(self.mse[i]),
                       "ci": [float(self.ci_low[i]), float(self.ci_high[i])]}
                for i, name in enumerate(self.names)}

    def to_dict(self) -> dict:
        return {"summary": self.summary(), "replicates_used": len(self.replicate_ids),
                "failures": self.failures, "config": self.config}

    def table(self) -> str:
        """Table with one block of Mean / Bias / MSE / CI columns per parameter."""
        lines = [f"alpha = {self.config['alpha']}, n = {self.config['n']}, "
                 f"R = {len(self.replicate_ids)} (failed: {len(self.failures)})"]
        head = f"{'param':>8} {'true':>9} {'mean':>9} {'bias':>10} {'mse':>10}  95% CI"
        lines += [head, "-" * len(head)]
        for i, name in enumerate(self.names):
            lines.append(f"{name:>8} {self.truth[i]:9.4f} {self.mean[i]:9.4f} {self.bias[i]:10.4g} "
                         f"{self.mse[i]:10.3g}  [{self.ci_low[i]:.3f}, {self.ci_high[i]:.3f}]")
        return "\n".join(lines)

    def replicate_columns(self) -> dict:
        cols = {"replicate": np.asarray(self.replicate_ids, dtype=int)}
        for i, name in enumerate(self.names):
            cols[name] = self.estimates[:, i]
        return cols


def _one_replicate(args):
    config, stream = args
    try:
        x = simulate_artfima(config.params, config.spec, config.n, config.base_seed,
                             config.tol, stream=stream)
        fit = fit_whittle(x, config.search)
        return stream, fit.beta_hat.to_vector(), None
    except ArtfimaError as exc:
        return stream, None, f"{type(exc).__name__}: {exc}"


def summarize(estimates: np.ndarray, truth: np.ndarray) -> dict:
    """Mean, bias, MSE (population divisor) and 2.5/97.5 % percentile interval per column."""
    dev = estimates - truth
    mean = estimates.mean(axis=0)
    lo, hi = np.percentile(estimates, [2.5, 97.5], axis=0)
    return {"mean": mean, "bias": mean - truth, "mse": np.mean(dev ** 2, axis=0),
            "ci_low": lo, "ci_high": hi}


def run_mc_study(config: McConfig) -> McReport:
    """Simulate and fit ``config.replicates`` independent series.

    Replicate ``r`` draws innovations from substream ``(base_seed, streams[r])``
    so results do not depend on scheduling. Failed fits are excluded and
    listed; more than 10 % failures raises :class:`StudyUnreliableError`.
    """
    streams = config.stream_ids()
    jobs = [(config, s) for s in streams]
    workers = min(worker_count(config.workers), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_replicate, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_one_replicate(j) for j in jobs]

    ok = [(s, est) for s, est, err in results if err is None]
    failures = [{"stream": s, "error": err} for s, _, err in results if err is not None]
    if len(failures) > MAX_FAILURE_FRACTION * len(results):
        raise StudyUnreliableError(f"{len(failures)} of {len(results)} replicates failed")
    truth = config.params.to_vector()
    estimates = np.array([est for _, est in ok])
    stats = summarize(estimates, truth)
    cfg = {"params": config.params.as_dict(), "alpha": config.spec.alpha,
           "sigma": config.spec.sigma, "n": config.n, "replicates": config.replicates,
           "base_seed": config.base_seed, "tol": config.tol, "search": asdict(config.search)}
    return McReport(config.params.names(), truth, estimates, [s for s, _ in ok], failures,
                    stats["mean"], stats["bias"], stats["mse"], stats["ci_low"], stats["ci_high"], cfg)
