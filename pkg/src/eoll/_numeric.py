"""Numerically stable elementwise helpers.

All functions accept scalars or arrays and operate elementwise in float64.
"""
from __future__ import annotations

import numpy as np
from scipy.special import expit, log_expit

LOG_MAX = float(np.log(np.finfo(float).max))  # ~709.78
LOG2 = float(np.log(2.0))

# below this, exp(u) < 2.3e-16 so log1p(exp(u)) == exp(u) to double precision
_SOFTPLUS_LINEAR = -36.0


def log1mexp(x):
    """log(1 - exp(-x)) for x > 0 (Maechler's two-branch evaluation)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x <= LOG2, np.log(-np.expm1(-x)), np.log1p(-np.exp(-x)))


def log_expm1(x):
    """log(exp(x) - 1) for x > 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        big = x > 30.0
        xs = np.where(big, 1.0, x)
        return np.where(big, x + np.log1p(-np.exp(-x)), np.log(np.expm1(xs)))


def softplus(u):
    """log(1 + exp(u))."""
    return np.logaddexp(0.0, u)


def log_softplus(u):
    """log(log(1 + exp(u))), exact down to u = -745 and beyond."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(u < _SOFTPLUS_LINEAR, u, np.log(softplus(np.maximum(u, _SOFTPLUS_LINEAR))))


def log_expm1_from_log(lx):
    """log(exp(x) - 1) given lx = log(x); safe when x underflows."""
    lx = np.asarray(lx, dtype=float)
    small = lx < _SOFTPLUS_LINEAR
    x = np.exp(np.minimum(lx, LOG_MAX))
    with np.errstate(invalid="ignore", over="ignore"):
        return np.where(small, lx + 0.5 * np.exp(lx), log_expm1(np.where(small, 1.0, x)))


def log1mexp_from_log(lx):
    """log(1 - exp(-x)) given lx = log(x); safe when x underflows or overflows."""
    lx = np.asarray(lx, dtype=float)
    small = lx < _SOFTPLUS_LINEAR
    x = np.exp(np.minimum(lx, LOG_MAX))
    with np.errstate(invalid="ignore", over="ignore"):
        return np.where(small, lx - 0.5 * np.exp(lx), log1mexp(np.where(small, 1.0, x)))


def log_weibull_cdf(logw):
    """log(1 - exp(-w)) with w = exp(logw): the log-cdf of a unit exponential at w."""
    return log1mexp_from_log(logw)


__all__ = [
    "LOG_MAX",
    "expit",
    "log1mexp",
    "log1mexp_from_log",
    "log_expit",
    "log_expm1",
    "log_expm1_from_log",
    "log_softplus",
    "log_weibull_cdf",
    "softplus",
]
