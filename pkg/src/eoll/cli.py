"""Command-line entry point.

Subcommands: ``fit``, ``compare``, ``simulate``, ``shape``, ``sample``, ``eval``.
Exit codes: 0 success, 1 input error, 2 numerical non-convergence. Outputs go to
``--outdir``, defaulting to ``$EOLL_OUTPUT_DIR`` or the working directory.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, mcstudy, regress, shape
from .distcore import EollGParams, Gumbel, eollg_cdf, eollg_hazard, eollg_pdf, eollg_quantile, eollg_survival
from .distcore import make_rng, sample as eollg_sample
from .eollw import (
    EollwParams,
    LeollwParams,
    eollw_cdf,
    eollw_hazard,
    eollw_pdf,
    eollw_quantile,
    eollw_survival,
    leollw_cdf,
    leollw_pdf,
    leollw_quantile,
    leollw_survival,
)
from .errors import (
    DataError,
    DomainError,
    OptimizerFailure,
    ParameterError,
    RankDeficientError,
    TooManyFailures,
)

OUTPUT_ENV = "EOLL_OUTPUT_DIR"
EXIT_OK, EXIT_INPUT, EXIT_NONCONV = 0, 1, 2


class InputError(Exception):
    """Malformed command-line input or data file."""


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _write_json(path: Path, payload: dict) -> Path:
    # json writes floats with repr, the shortest string that round-trips exactly
    path.write_text(json.dumps(_clean(payload), indent=2) + "\n", encoding="utf-8")
    return path


def _outdir(args) -> Path:
    out = Path(args.outdir or os.environ.get(OUTPUT_ENV) or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise InputError(f"output directory {out} is not writable")
    return out


def _columns(text: str | None) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(c.strip() for c in text.split(",") if c.strip())


def _floats(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise InputError(f"--{name}: {exc}") from exc


# ---------------------------------------------------------------------------
# data ingestion
# ---------------------------------------------------------------------------


def read_dataset(path, response: str, status: str, covariates: tuple[str, ...]) -> regress.CensoredDataset:
    """Read a headered UTF-8 CSV; ``status`` is 1 for a failure and 0 for a censored row."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        for col in (response, status, *covariates):
            if col not in header:
                raise InputError(f"{path}: missing column {col!r}")
        idx = {h: j for j, h in enumerate(header)}
        y, delta, X = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                yi = float(row[idx[response]])
                di = float(row[idx[status]])
                xi = [float(row[idx[c]]) for c in covariates]
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
            if not math.isfinite(yi) or any(not math.isfinite(v) for v in xi):
                raise InputError(f"{path}:{lineno}: non-finite value")
            if di not in (0.0, 1.0):
                raise InputError(f"{path}:{lineno}: status must be 0 or 1, got {row[idx[status]]!r}")
            y.append(yi)
            delta.append(int(di))
            X.append(xi)
    if not y:
        raise InputError(f"{path}: no data rows")
    X = np.array(X, dtype=float).reshape(len(y), len(covariates))
    try:
        return regress.CensoredDataset(np.array(y), np.array(delta), X, covariates)
    except DataError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load(args) -> tuple[regress.CensoredDataset, tuple[str, ...], tuple[str, ...]]:
    mu_cols, sigma_cols = _columns(args.mu), _columns(args.sigma)
    covs = tuple(dict.fromkeys(mu_cols + sigma_cols))
    return read_dataset(args.data, args.response, args.status, covs), mu_cols, sigma_cols


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_fit(args) -> int:
    data, mu_cols, sigma_cols = _load(args)
    out = _outdir(args)
    model = regress.RegressionModel(args.family, mu_cols, sigma_cols)
    res = regress.fit(model, data)
    _write_json(out / "fit.json", res.to_dict())
    rep = diagnostics.residuals(res, data)
    diagnostics.write_residuals_csv(rep, out / "residuals.csv")
    if not res.converged:
        print(f"fit did not converge: {res.message}", file=sys.stderr)
        return EXIT_NONCONV
    if args.envelope:
        env = diagnostics.envelope(res, data, K=args.envelope, seed=args.seed)
        diagnostics.write_envelope_csv(env, out / "envelope.csv")
    print(f"{model.family}: loglik={res.loglik:.6f} AIC={res.aic:.4f} converged={res.converged}")
    return EXIT_OK


def cmd_compare(args) -> int:
    data, mu_cols, sigma_cols = _load(args)
    out = _outdir(args)
    fits = regress.fit_families(regress.RegressionModel("leollw", mu_cols, sigma_cols), data)
    rows = {
        fam: {"loglik": f.loglik, "n_params": f.n_params, "AIC": f.aic, "BIC": f.bic, "CAIC": f.caic,
              "converged": f.converged, "a": f.a, "b": f.b}
        for fam, f in fits.items()
    }
    tests = {}
    for sub, hyp in (("lollw", "b=1"), ("lew", "a=1"), ("lw", "a=b=1")):
        t = regress.lr_test(fits["leollw"], fits[sub])
        tests[f"leollw vs {sub}"] = {"hypothesis": hyp, "statistic": t.statistic, "p_value": t.p_value, "df": t.df}
    _write_json(out / "compare.json", {"fits": rows, "lr_tests": tests})
    for name, t in tests.items():
        print(f"{name} ({t['hypothesis']}): w={t['statistic']:.6g} p={t['p_value']:.6g}")
    if not all(f.converged for f in fits.values()):
        print("at least one fit did not converge", file=sys.stderr)
        return EXIT_NONCONV
    return EXIT_OK


def cmd_simulate(args) -> int:
    ns = [int(v) for v in _floats(args.n, "n")]
    cens = list(_floats(args.censoring, "censoring"))
    reps = args.reps if args.reps is not None else (1000 if args.full else mcstudy.DESK_REPLICATES)
    try:
        configs = [mcstudy.SimConfig(n=n, censoring=c, replicates=reps, seed=args.seed, workers=args.workers)
                   for c in cens for n in ns]
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = _outdir(args)
    reports = [mcstudy.run_study(cfg) for cfg in configs]
    mcstudy.write_reports(reports, out)
    for rep in reports:
        print(f"n={rep.config.n} censoring={rep.config.censoring:g}: realized={rep.realized_censoring:.3f} "
              f"failures={rep.failures}")
    return EXIT_OK


def _eollw_from_args(args) -> EollwParams:
    if args.mu is not None or args.sigma is not None:
        if args.mu is None or args.sigma is None:
            raise InputError("--mu and --sigma must be given together")
        return LeollwParams(args.mu, args.sigma, args.a, args.b).to_linear()
    return EollwParams(args.a, args.b, args.alpha, args.lam)


def cmd_shape(args) -> int:
    p = _eollw_from_args(args)
    out = _outdir(args)
    report = shape.shape_report(p).to_dict()
    if args.mu is not None:
        lo = shape.classify_leollw(p.a, p.b)
        report["leollw_density_class"] = lo.density_class
        report["leollw_critical_points"] = [args.mu + args.sigma * z for z in lo.critical_points]
    report["parameters"] = {"a": p.a, "b": p.b, "alpha": p.alpha, "lambda": p.lam}
    _write_json(out / "shape.json", report)
    hi = float(eollw_quantile(p, 1.0 - 1e-6))
    lo_x = float(eollw_quantile(p, 1e-6))
    x = np.geomspace(lo_x, hi, args.points)
    with (out / "curves.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "pdf", "hazard"])
        with np.errstate(over="ignore"):
            for xi, fi, hi_ in zip(x, np.atleast_1d(eollw_pdf(p, x)), np.atleast_1d(eollw_hazard(p, x))):
                w.writerow([_fmt(xi), _fmt(fi), _fmt(hi_)])
    print(f"density={report['density_class']} hazard={report['hazard_class']} tail={report['tail_class']}")
    return EXIT_OK


def _dist(args):
    """(pdf, cdf, sf, hazard, quantile) callables for the distribution chosen on the command line."""
    if args.dist == "eollw":
        p = EollwParams(args.a, args.b, args.alpha, args.lam)
        return p, (eollw_pdf, eollw_cdf, eollw_survival, eollw_hazard, eollw_quantile)
    if args.dist == "leollw":
        p = LeollwParams(args.mu if args.mu is not None else 0.0, args.sigma if args.sigma is not None else 1.0,
                         args.a, args.b)
        hazard = lambda q, y: leollw_pdf(q, y) / leollw_survival(q, y)  # noqa: E731
        return p, (leollw_pdf, leollw_cdf, leollw_survival, hazard, leollw_quantile)
    p = EollGParams(args.a, args.b, Gumbel(args.mu if args.mu is not None else 0.0,
                                           args.sigma if args.sigma is not None else 1.0))
    return p, (eollg_pdf, eollg_cdf, eollg_survival, eollg_hazard, eollg_quantile)


def cmd_sample(args) -> int:
    if args.n < 1:
        raise InputError("--n must be at least 1")
    p, funcs = _dist(args)
    out = _outdir(args)
    if isinstance(p, LeollwParams):
        u = make_rng(args.seed).random(args.n)
        u = np.where(u == 0.0, 0.5, u)
        draws = np.atleast_1d(leollw_quantile(p, u))
    else:
        base = p.as_eollg() if isinstance(p, EollwParams) else p
        draws = np.atleast_1d(eollg_sample(base, args.n, args.seed))
    with (out / "sample.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x"])
        for v in draws:
            w.writerow([_fmt(v)])
    print(f"wrote {draws.size} draws")
    return EXIT_OK


def cmd_eval(args) -> int:
    p, (pdf, cdf, sf, hazard, quantile) = _dist(args)
    if args.what == "quantile":
        if args.u is None:
            raise InputError("quantile evaluation needs --u")
        inputs = _floats(args.u, "u")
        if np.any((inputs <= 0.0) | (inputs >= 1.0)):
            raise InputError("--u values must lie strictly inside (0, 1)")
        values = np.atleast_1d(quantile(p, inputs))
    else:
        if args.x is None:
            raise InputError(f"{args.what} evaluation needs --x")
        inputs = _floats(args.x, "x")
        func = {"pdf": pdf, "cdf": cdf, "sf": sf, "hazard": hazard}[args.what]
        values = np.atleast_1d(func(p, inputs))
    out = _outdir(args)
    col = "u" if args.what == "quantile" else "x"
    with (out / "eval.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([col, args.what])
        for i, v in zip(inputs, values):
            w.writerow([_fmt(i), _fmt(v)])
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_data_flags(sp):
    sp.add_argument("--data", required=True, help="headered CSV file")
    sp.add_argument("--response", default="y", help="log-time column (default: y)")
    sp.add_argument("--status", default="status", help="1 = failure, 0 = censored (default: status)")
    sp.add_argument("--mu", default="", help="comma-separated covariates for the location")
    sp.add_argument("--sigma", default="", help="comma-separated covariates for the log-scale")


def _add_shape_flags(sp, need_alpha: bool = True):
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--mu", type=float, default=None, help="location (LEOLLW or Gumbel baseline)")
    sp.add_argument("--sigma", type=float, default=None, help="scale (LEOLLW or Gumbel baseline)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eoll", description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", default=None, help=f"output directory (default: ${OUTPUT_ENV} or .)")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fit", help="fit a censored regression")
    _add_data_flags(sp)
    sp.add_argument("--family", default="leollw", choices=sorted(regress.FAMILIES))
    sp.add_argument("--envelope", type=int, default=0, metavar="K", help="bootstrap envelope replicates")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("compare", help="fit all four families; information criteria and LR tests")
    _add_data_flags(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("simulate", help="Monte Carlo study")
    sp.add_argument("--n", default="100,250,500", help="comma-separated sample sizes")
    sp.add_argument("--censoring", default="0,0.1,0.3", help="comma-separated censoring targets")
    sp.add_argument("--reps", type=int, default=None, help="replicates per cell")
    sp.add_argument("--full", action="store_true", help="1000 replicates per cell")
    sp.add_argument("--seed", type=int, default=20240917)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("shape", help="density, hazard and tail shape of EOLLW")
    _add_shape_flags(sp)
    sp.add_argument("--points", type=int, default=512)
    sp.set_defaults(func=cmd_shape)

    for name, func in (("sample", cmd_sample), ("eval", cmd_eval)):
        sp = sub.add_parser(name, help=f"{name} a distribution")
        sp.add_argument("--dist", default="eollw", choices=["eollw", "leollw", "eollg-gumbel"])
        _add_shape_flags(sp)
        if name == "sample":
            sp.add_argument("--n", type=int, required=True)
            sp.add_argument("--seed", type=int, default=0)
        else:
            sp.add_argument("--what", default="pdf", choices=["pdf", "cdf", "sf", "hazard", "quantile"])
            sp.add_argument("--x", default=None, help="comma-separated points")
            sp.add_argument("--u", default=None, help="comma-separated probabilities")
        sp.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DataError, DomainError, ParameterError, RankDeficientError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OptimizerFailure, TooManyFailures) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONV


if __name__ == "__main__":
    sys.exit(main())
