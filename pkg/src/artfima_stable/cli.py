"""Command-line interface.

Every subcommand writes CSV or JSON to ``--out`` (stdout by default). Exit
status is 0 on success, 1 on a domain error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fileio
from .codifference import (asymptotic_constant, compare_asymptotic_forms, normalizer,
                           theoretical_codifference)
from .diagnostics import DEFAULT_LB_LAGS, RESIDUAL_TOL, ljung_box, normalized_sample_acvf, residuals, sample_acf
from .estimation import SearchConfig, compute_W, fit_whittle, mcculloch_alpha, mcculloch_nu
from .exceptions import ArtfimaError
from .ingest import IngestSpec, ingest
from .kernel import DEFAULT_TOL, ArtfimaParams
from .montecarlo import McConfig, run_mc_study
from .series import SeriesData
from .simulate import simulate_with_innovations
from .spectral import alpha_scaled_periodogram, self_normalized_periodogram
from .stable import StableSpec

DEFAULT_SEED = 20230101


def _floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_model(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--d", type=float, required=required, help="memory parameter")
    p.add_argument("--lambda", dest="lam", type=float, required=required, help="tempering rate")
    p.add_argument("--phi", type=_floats, default=(), help="AR coefficients, comma separated")
    p.add_argument("--theta", type=_floats, default=(), help="MA coefficients, comma separated")


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="CSV file with a header row")
    p.add_argument("--column", default=None, help="column to read (default: last)")


def _model(args) -> ArtfimaParams:
    return ArtfimaParams.make(args.d, args.lam, args.phi, args.theta)


def _series(args) -> SeriesData:
    values = fileio.read_column(args.input, args.column)
    return SeriesData(values, {"source": args.input, "column": args.column})


def _echo(text: str, out: str) -> None:
    # keep stdout clean for data when it carries the payload
    print(text, file=sys.stderr if out == "-" else sys.stdout)


def cmd_simulate(args) -> None:
    params = _model(args)
    spec = StableSpec(args.alpha, args.sigma)
    x, z = simulate_with_innovations(params, spec, args.n, args.seed, args.tol, args.stream)
    fileio.write_columns(args.out, {"t": np.arange(1, len(x) + 1), "x": x.values})
    if args.out != "-":
        fileio.write_json(args.out + ".json", x.meta)
    if args.innovations:
        fileio.write_columns(args.innovations, {"t": np.arange(1 - x.meta["filter_length"], len(x) + 1),
                                                "z": z.values})


def _search_config(args) -> SearchConfig:
    kw = dict(p=args.p, q=args.q, seed=args.seed, demean=args.demean)
    if args.d_bounds:
        kw["d_bounds"] = tuple(args.d_bounds)
    if args.lambda_bounds:
        kw["lam_bounds"] = tuple(args.lambda_bounds)
    if args.arma_bound is not None:
        kw["arma_bound"] = args.arma_bound
    if args.arma_starts is not None:
        kw["arma_starts"] = args.arma_starts
    if args.refine is not None:
        kw["n_refine"] = args.refine
    return SearchConfig(**kw)


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=int, default=0, help="AR order")
    p.add_argument("--q", type=int, default=0, help="MA order")
    p.add_argument("--d-bounds", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--lambda-bounds", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--arma-bound", type=float)
    p.add_argument("--arma-starts", type=int, help="random ARMA starts per (d, lambda) lattice node")
    p.add_argument("--refine", type=int, help="number of screened starts refined by Nelder-Mead")
    p.add_argument("--demean", action="store_true", help="subtract the sample mean before fitting")


def cmd_fit(args) -> None:
    x = _series(args)
    config = _search_config(args)
    fit = fit_whittle(x, config)
    if args.W:
        fit.W = compute_W(fit.beta_hat, args.quad_points)
    payload = {"n": len(x), "input": args.input, **fit.to_dict()}
    if not args.trace:
        payload.pop("trace")
    fileio.write_json(args.out, payload)
    rows = [f"{'parameter':>10}  estimate"] + [
        f"{k:>10}  {v:.6f}" for k, v in zip(fit.beta_hat.names(), fit.beta_hat.to_vector())]
    rows.append(f"{'sigma2':>10}  {fit.sigma2_hat:.6f}  (converged: {fit.converged})")
    _echo("\n".join(rows), args.out)


def cmd_codiff(args) -> None:
    params = _model(args)
    curve = theoretical_codifference(params, args.alpha, args.max_lag, args.tol)
    fileio.write_columns(args.out, {"lag": curve.lags, "tau": curve.tau})
    if args.asymptotics:
        asym = asymptotic_constant(params, args.alpha)
        lags = curve.lags[1:]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ratio = curve.tau[1:] / normalizer(params, args.alpha, lags)
        fileio.write_columns(args.asymptotics, {"lag": lags, "ratio": ratio,
                                                "limit": np.full(lags.size, asym.constant)})
        if args.alpha > 1 and args.max_lag >= 4:
            top = args.max_lag
            report = compare_asymptotic_forms(params, args.alpha, (top // 4, top // 2, top), args.tol)
            _echo(f"rate {report['rate']}; ratio at lag {top} = {report['ratios'][-1]:.6g}; "
                  f"closest closed form: {report['match']} {report['candidates']}", args.out)
        else:
            _echo(f"rate {asym.rate}; limit {asym.constant:.6g}", args.out)


def cmd_periodogram(args) -> None:
    x = _series(args)
    if args.kind == "self":
        pg = self_normalized_periodogram(x, demean=args.demean)
    else:
        if args.alpha is None:
            raise ArtfimaError("--alpha is required for the alpha-scaled periodogram")
        pg = alpha_scaled_periodogram(x, args.alpha, demean=args.demean)
    fileio.write_columns(args.out, {"omega": pg.freqs, "ordinate": pg.ordinates})


def cmd_acf(args) -> None:
    x = _series(args)
    if args.kind == "acf":
        res = sample_acf(x, args.max_lag)
    else:
        res = normalized_sample_acvf(x, args.alpha, args.max_lag)
    band = np.full(res.lags.size, res.band)
    fileio.write_columns(args.out, {"lag": res.lags, "value": res.values,
                                    "band_low": -band, "band_high": band})


def _residual_params(args) -> ArtfimaParams:
    if args.fit:
        doc = fileio.read_json(args.fit)
        p = doc["params"]
        return ArtfimaParams.make(p["d"], p["lambda"], p.get("phi", ()), p.get("theta", ()))
    if args.d is None or args.lam is None:
        raise ArtfimaError("give --fit FIT.json or both --d and --lambda")
    return _model(args)


def cmd_residuals(args) -> None:
    x = _series(args)
    params = _residual_params(args)
    z = residuals(x, params, args.tol, args.max_length)
    m = z.meta["filter_length"]
    fileio.write_columns(args.out, {"t": np.arange(m + 1, m + 1 + len(z)), "z": z.values})


def cmd_lb(args) -> None:
    x = _series(args)
    q, pval = ljung_box(x, args.lags, args.df)
    fileio.write_json(args.out, {"input": args.input, "n": len(x), "lags": args.lags,
                                 "df": args.df or args.lags, "statistic": q, "p_value": pval})


def cmd_alpha(args) -> None:
    x = _series(args)
    fileio.write_json(args.out, {"input": args.input, "n": len(x), "nu_alpha": mcculloch_nu(x),
                                 "alpha": mcculloch_alpha(x)})


def cmd_mc(args) -> None:
    if args.full_scale:
        args.replicates, args.n = 1000, 10_000
    params = _model(args)
    search = SearchConfig(p=params.p, q=params.q, seed=args.seed)
    config = McConfig(params, StableSpec(args.alpha, args.sigma), args.n, args.replicates,
                      args.seed, search, workers=args.workers)
    report = run_mc_study(config)
    fileio.write_json(args.out, report.to_dict())
    if args.table:
        with open(args.table, "w", encoding="utf-8") as fh:
            fh.write(report.table() + "\n")
    if args.replicates_csv:
        fileio.write_columns(args.replicates_csv, report.replicate_columns())
    _echo(report.table(), args.out)


def cmd_ingest(args) -> None:
    spec = IngestSpec(args.inputs, args.column or [], args.merge, args.transform or [],
                      args.key, tuple(args.missing or ()) + IngestSpec.__dataclass_fields__[
                          "missing_values"].default)
    x = ingest(spec)
    fileio.write_columns(args.out, {"t": np.arange(1, len(x) + 1), "x": x.values})
    if args.out != "-":
        fileio.write_json(args.out + ".json", x.meta)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artfima",
                                     description="Stable ARTFIMA simulation, analysis and fitting")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate an ARTFIMA path with SaS innovations")
    _add_model(p)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--innovations", help="also write the innovation stream to this CSV")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="Whittle fit of ARTFIMA(p, d, lambda, q)")
    _add_input(p)
    _add_search(p)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--W", action="store_true", help="also compute the W matrix at the estimate")
    p.add_argument("--quad-points", type=int, default=1024)
    p.add_argument("--trace", action="store_true", help="include the optimizer trace")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("codiff", help="theoretical co-difference curve")
    _add_model(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--max-lag", type=int, default=200)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--asymptotics", help="write (lag, ratio, limit) to this CSV (p = q = 0)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_codiff)

    p = sub.add_parser("periodogram", help="periodogram at positive Fourier frequencies")
    _add_input(p)
    p.add_argument("--kind", choices=("self", "alpha"), default="self")
    p.add_argument("--alpha", type=float)
    p.add_argument("--demean", action="store_true")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_periodogram)

    p = sub.add_parser("acf", help="sample ACF or normalised sample autocovariance")
    _add_input(p)
    p.add_argument("--max-lag", type=int, default=40)
    p.add_argument("--kind", choices=("acf", "acvf"), default="acf")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_acf)

    p = sub.add_parser("residuals", help="innovations through the inverse filter")
    _add_input(p)
    _add_model(p, required=False)
    p.add_argument("--fit", help="JSON written by 'fit' to take parameters from")
    p.add_argument("--tol", type=float, default=RESIDUAL_TOL)
    p.add_argument("--max-length", type=int, help="cap on the inverse filter length")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_residuals)

    p = sub.add_parser("lb", help="Ljung-Box test")
    _add_input(p)
    p.add_argument("--lags", type=int, default=DEFAULT_LB_LAGS)
    p.add_argument("--df", type=int, help="degrees of freedom (default: lags)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_lb)

    p = sub.add_parser("alpha", help="McCulloch estimate of the stability index")
    _add_input(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("mc", help="Monte Carlo bias / MSE study")
    _add_model(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--replicates", type=int, default=200)
    p.add_argument("--full-scale", action="store_true", help="1000 replicates of length 10000")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, help="worker processes (default: ARTFIMA_THREADS or CPU count)")
    p.add_argument("--table", help="write the text table here")
    p.add_argument("--replicates-csv", help="write per-replicate estimates here")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("ingest", help="merge and transform CSV sources into one series")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--column", action="append", help="column per input (repeat) or one shared")
    p.add_argument("--key", help="column used to align rows across inputs")
    p.add_argument("--merge", choices=("mean_else_max", "single"), default="mean_else_max")
    p.add_argument("--transform", action="append",
                   help="log | demean | subseries:START:END (repeat, applied in order)")
    p.add_argument("--missing", action="append", help="extra token meaning 'no reading', e.g. -99999")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ArtfimaError as exc:
        print(f"artfima {args.command}: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        # downstream reader (e.g. head) closed early
        sys.stderr.close()
        return 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
