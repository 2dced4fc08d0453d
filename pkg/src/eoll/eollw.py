"""Closed-form EOLLW distribution and its log transform (LEOLLW).

``X ~ EOLLW(a, b, alpha, lam)`` is the EOLL generator applied to a Weibull
baseline; ``Y = log X ~ LEOLLW(mu, sigma, a, b)`` with ``mu = log lam`` and
``sigma = 1/alpha``. The standardized variate ``Z = (Y - mu)/sigma`` has
density ``pi(z)``, which reduces to the smallest-extreme Gumbel
``exp(z - e^z)`` when ``a = b = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numeric import log1mexp_from_log, log_softplus, softplus
from .distcore import (
    DagumParams,
    EollGParams,
    Weibull,
    _blend_logs,
    _check_u,
    _out,
    _positive,
    dagum_log_quantile,
    log_survival_from_logodds,
    U_CLAMP,
)
from .errors import DomainError, ParameterError

Z_MAX = 700.0


@dataclass(frozen=True)
class EollwParams:
    a: float
    b: float
    alpha: float
    lam: float = 1.0

    def __post_init__(self):
        for name in ("a", "b", "alpha", "lam"):
            _positive(name, getattr(self, name))

    def as_eollg(self) -> EollGParams:
        return EollGParams(self.a, self.b, Weibull(self.alpha, self.lam))

    def to_log(self) -> "LeollwParams":
        return LeollwParams(math.log(self.lam), 1.0 / self.alpha, self.a, self.b)


@dataclass(frozen=True)
class LeollwParams:
    mu: float
    sigma: float
    a: float
    b: float

    def __post_init__(self):
        if not math.isfinite(float(self.mu)):
            raise ParameterError("mu must be finite")
        for name in ("sigma", "a", "b"):
            _positive(name, getattr(self, name))

    def to_linear(self) -> EollwParams:
        return EollwParams(self.a, self.b, 1.0 / self.sigma, math.exp(self.mu))


# ---------------------------------------------------------------------------
# standardized building blocks, z on the log-Weibull scale
# ---------------------------------------------------------------------------


def _std_terms(z):
    """w = e^z, log G and log-odds log T for the unit log-Weibull baseline."""
    z = np.minimum(np.asarray(z, dtype=float), Z_MAX)
    w = np.exp(z)
    log_g = log1mexp_from_log(z)
    return z, w, log_g, log_g + w


def std_logpdf(z, a: float, b: float):
    """log pi(z)."""
    z, w, log_g, _ = _std_terms(z)
    logden = np.logaddexp(a * log_g, -a * w)
    with np.errstate(invalid="ignore"):
        out = math.log(a * b) + z - a * w + (a * b - 1.0) * log_g - (b + 1.0) * logden
    return np.where(np.isnan(out), -np.inf, out)


def std_logsf(z, a: float, b: float):
    _, _, _, log_t = _std_terms(z)
    return log_survival_from_logodds(log_t, a, b)


def std_logcdf(z, a: float, b: float):
    _, _, _, log_t = _std_terms(z)
    return -b * softplus(-a * log_t)


def std_pdf(z, a: float, b: float):
    return _out(np.exp(std_logpdf(z, a, b)))


# ---------------------------------------------------------------------------
# EOLLW
# ---------------------------------------------------------------------------


def eollw_logpdf(p: EollwParams, x):
    x = np.asarray(x, dtype=float)
    if np.isnan(x).any() or np.any(x <= 0.0):
        raise DomainError("EOLLW density is defined for x > 0")
    a, b = p.a, p.b
    logx = np.log(x)
    logw = p.alpha * (logx - math.log(p.lam))
    with np.errstate(over="ignore"):
        w = np.exp(logw)
    log_g = log1mexp_from_log(logw)
    logden = np.logaddexp(a * log_g, -a * w)
    with np.errstate(invalid="ignore"):
        out = (
            math.log(a * b * p.alpha)
            + (p.alpha - 1.0) * logx
            - p.alpha * math.log(p.lam)
            - a * w
            + (a * b - 1.0) * log_g
            - (b + 1.0) * logden
        )
    return _out(np.where(np.isnan(out), -np.inf, out))


def eollw_pdf(p: EollwParams, x):
    return _out(np.exp(eollw_logpdf(p, x)))


def _x_to_z(p: EollwParams, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return p.alpha * (np.log(np.maximum(x, 0.0)) - math.log(p.lam))


def eollw_cdf(p: EollwParams, x):
    return _out(np.exp(std_logcdf(_x_to_z(p, x), p.a, p.b)))


def eollw_survival(p: EollwParams, x):
    return _out(np.exp(std_logsf(_x_to_z(p, x), p.a, p.b)))


def eollw_hazard(p: EollwParams, x):
    x = np.asarray(x, dtype=float)
    return _out(np.exp(eollw_logpdf(p, x) - std_logsf(_x_to_z(p, x), p.a, p.b)))


def _log_cumhaz(lw, l1w):
    """``log(-log(1 - w))`` from ``log w`` and ``log(1 - w)``; exact where ``w`` underflows."""
    small = lw < -30.0
    with np.errstate(divide="ignore"):
        big = np.log(-np.where(small, -1.0, l1w))
    return np.where(small, lw + 0.5 * np.exp(lw), big)


def eollw_quantile(p: EollwParams, u):
    u = np.clip(_check_u(u), U_CLAMP, 1.0 - U_CLAMP)
    lw, l1w = _blend_logs(u, p.a, p.b)
    return _out(p.lam * np.exp(_log_cumhaz(lw, l1w) / p.alpha))


# ---------------------------------------------------------------------------
# LEOLLW
# ---------------------------------------------------------------------------


def leollw_logpdf(p: LeollwParams, y):
    y = np.asarray(y, dtype=float)
    if np.isnan(y).any():
        raise DomainError("y contains NaN")
    return _out(std_logpdf((y - p.mu) / p.sigma, p.a, p.b) - math.log(p.sigma))


def leollw_pdf(p: LeollwParams, y):
    return _out(np.exp(leollw_logpdf(p, y)))


def leollw_logsf(p: LeollwParams, y):
    y = np.asarray(y, dtype=float)
    return _out(std_logsf((y - p.mu) / p.sigma, p.a, p.b))


def leollw_survival(p: LeollwParams, y):
    return _out(np.exp(leollw_logsf(p, y)))


def leollw_cdf(p: LeollwParams, y):
    y = np.asarray(y, dtype=float)
    return _out(np.exp(std_logcdf((y - p.mu) / p.sigma, p.a, p.b)))


def leollw_quantile(p: LeollwParams, u):
    """``mu + sigma * log(-log(1 - w))`` with ``w`` the shape-blended probability."""
    u = np.clip(_check_u(u), U_CLAMP, 1.0 - U_CLAMP)
    lw, l1w = _blend_logs(u, p.a, p.b)
    return _out(p.mu + p.sigma * _log_cumhaz(lw, l1w))


def leollw_sample_via_dagum(p: LeollwParams, u):
    """``Y = mu + sigma * log(log(1 + D))`` with ``D`` Dagum(a, 1, b) at ``u``."""
    log_d = dagum_log_quantile(DagumParams(p.a, p.b), u)
    return _out(p.mu + p.sigma * log_softplus(log_d))


# ---------------------------------------------------------------------------
# auxiliary representation on (0, 1): Z = log(-log(1-U)) - log a
# ---------------------------------------------------------------------------


def _aux_logcdf(u, a: float, b: float):
    """log G(u) of the auxiliary law; ``G(A(z))`` equals the LEOLLW cdf at ``z``."""
    u = np.asarray(u, dtype=float)
    lq = np.log1p(-u) / a  # log (1-u)^(1/a)
    log_p = log1mexp_from_log(np.log(-lq))  # log(1 - (1-u)^(1/a))
    return a * b * log_p - b * np.logaddexp(a * log_p, np.log1p(-u))


def _aux_pdf(u, a: float, b: float):
    """Density of the auxiliary law, ``b P^(ab-1) / {P^a + 1 - u}^(b+1)`` with ``P = 1 - (1-u)^(1/a)``."""
    u = np.asarray(u, dtype=float)
    log_p = log1mexp_from_log(np.log(-np.log1p(-u) / a))
    return np.exp(
        math.log(b) + (a * b - 1.0) * log_p - (b + 1.0) * np.logaddexp(a * log_p, np.log1p(-u))
    )


def _aux_transform(z, a: float):
    """``A(z) = 1 - exp(-a e^z)``, the map from z to the auxiliary scale."""
    return -np.expm1(-a * np.exp(np.asarray(z, dtype=float)))


def _aux_to_z(u, a: float):
    return np.log(-np.log1p(-np.asarray(u, dtype=float))) - math.log(a)


__all__ = [
    "EollwParams",
    "LeollwParams",
    "Z_MAX",
    "eollw_cdf",
    "eollw_hazard",
    "eollw_logpdf",
    "eollw_pdf",
    "eollw_quantile",
    "eollw_survival",
    "leollw_cdf",
    "leollw_logpdf",
    "leollw_logsf",
    "leollw_pdf",
    "leollw_quantile",
    "leollw_sample_via_dagum",
    "leollw_survival",
    "std_logcdf",
    "std_logpdf",
    "std_logsf",
    "std_pdf",
]
