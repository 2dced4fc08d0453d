"""Martingale and modified deviance residuals, with bootstrap envelopes."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from .errors import DomainError, OptimizerFailure, TooManyFailures
from .regress import CensoredDataset, FitOptions, FitResult, fit, fitted_log_survival, simulate_responses

RADICAND_TOL = 1e-12
MAX_FAILURE_FRACTION = 0.20


def martingale_residuals(fit_result: FitResult, data: CensoredDataset) -> np.ndarray:
    """``r_M = delta + log S(y | v)`` with the survival evaluated in log space."""
    return data.delta + fitted_log_survival(fit_result, data)


def deviance_residuals(r_m, delta) -> np.ndarray:
    """Signed square-root transform ``sign(r_M) sqrt(-2 [r_M + delta log(delta - r_M)])``."""
    r_m = np.asarray(r_m, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(r_m > delta):
        raise DomainError("martingale residuals must not exceed delta")
    with np.errstate(divide="ignore"):
        log_term = np.where(delta == 1.0, np.log(np.where(delta == 1.0, delta - r_m, 1.0)), 0.0)
    radicand = -2.0 * (r_m + delta * log_term)
    if np.any(radicand < -RADICAND_TOL):
        raise DomainError(f"negative deviance radicand {radicand.min():.3g}")
    return np.sign(r_m) * np.sqrt(np.maximum(radicand, 0.0))


def blom_positions(n: int) -> np.ndarray:
    """Expected normal order statistics ``Phi^-1((i - 3/8)/(n + 1/4))``, i = 1..n."""
    i = np.arange(1, n + 1)
    return stats.norm.ppf((i - 0.375) / (n + 0.25))


@dataclass
class Envelope:
    positions: np.ndarray
    lower: np.ndarray
    median: np.ndarray
    upper: np.ndarray
    observed: np.ndarray
    replicates: int
    failures: int

    @property
    def coverage(self) -> float:
        """Fraction of the observed sorted residuals inside the band."""
        inside = (self.observed >= self.lower) & (self.observed <= self.upper)
        return float(inside.mean())


@dataclass
class ResidualReport:
    r_m: np.ndarray
    r_d: np.ndarray
    delta: np.ndarray
    sorted_r_d: np.ndarray
    positions: np.ndarray
    envelope: Envelope | None = None


def residuals(fit_result: FitResult, data: CensoredDataset) -> ResidualReport:
    r_m = martingale_residuals(fit_result, data)
    r_d = deviance_residuals(r_m, data.delta)
    return ResidualReport(r_m, r_d, data.delta, np.sort(r_d), blom_positions(data.n))


def envelope(fit_result: FitResult, data: CensoredDataset, K: int = 100, seed=None,
             options: FitOptions | None = None) -> Envelope:
    """Pointwise 2.5/50/97.5% bands of sorted deviance residuals from ``K`` parametric bootstraps.

    Each replicate redraws responses from the fitted model at the observed
    covariates; censored rows keep their censoring times. Refits start from the
    fitted parameters unless ``options`` says otherwise. Failed refits are
    dropped, and more than 20% failures raise :class:`TooManyFailures`.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if not fit_result.converged:
        raise OptimizerFailure("envelope needs a converged fit")
    if options is None:
        options = FitOptions(start=fit_result.theta)
    seeds = np.random.SeedSequence(seed).spawn(K)
    sims = []
    failures = 0
    for ss in seeds:
        rng = np.random.Generator(np.random.Philox(ss))
        try:
            boot = simulate_responses(fit_result, data, rng)
            refit = fit(fit_result.model, boot, options)
            if not refit.converged:
                raise OptimizerFailure(refit.message)
            r_d = deviance_residuals(martingale_residuals(refit, boot), boot.delta)
        except (OptimizerFailure, DomainError, FloatingPointError, np.linalg.LinAlgError):
            failures += 1
            continue
        sims.append(np.sort(r_d))
    if failures > MAX_FAILURE_FRACTION * K:
        raise TooManyFailures(f"{failures} of {K} envelope refits failed")
    sims = np.array(sims)
    lower, median, upper = np.percentile(sims, [2.5, 50.0, 97.5], axis=0)
    observed = np.sort(deviance_residuals(martingale_residuals(fit_result, data), data.delta))
    return Envelope(blom_positions(data.n), lower, median, upper, observed, len(sims), failures)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_residuals_csv(report: ResidualReport, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "delta", "r_M", "r_D"])
        for i, (d, rm, rd) in enumerate(zip(report.delta, report.r_m, report.r_d)):
            w.writerow([i, int(d), _fmt(rm), _fmt(rd)])
    return path


def write_envelope_csv(env: Envelope, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["position", "lower", "median", "upper", "observed"])
        for row in zip(env.positions, env.lower, env.median, env.upper, env.observed):
            w.writerow([_fmt(v) for v in row])
    return path


__all__ = [
    "Envelope",
    "ResidualReport",
    "blom_positions",
    "deviance_residuals",
    "envelope",
    "martingale_residuals",
    "residuals",
    "write_envelope_csv",
    "write_residuals_csv",
]
