"""LEOLLW location-scale regression for right-censored data.

The model is ``y_i = mu_i + sigma_i z_i`` with ``mu_i = v_i' beta1``,
``log sigma_i = v_i' beta2`` and ``z_i`` standard LEOLLW(a, b). Fitting works
on the unconstrained vector ``theta = (beta1, beta2, log a, log b)``; the
nested families fix one or both shapes at 1:

======== ========= =========
family   a         b
======== ========= =========
leollw   free      free
lollw    free      1
lew      1         free
lw       1         1
======== ========= =========
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg
from scipy import optimize, special

from ._numeric import log1mexp_from_log, log_expm1_from_log, log_softplus, softplus
from .errors import DataError, OptimizerFailure, RankDeficientError
from .eollw import Z_MAX, std_logsf

INTERCEPT = "(Intercept)"
# box on log a and log b; far outside any identifiable region, keeps exp() finite
LOG_SHAPE_BOUND = 25.0

# (a free, b free)
FAMILIES: dict[str, tuple[bool, bool]] = {
    "leollw": (True, True),
    "lollw": (True, False),
    "lew": (False, True),
    "lw": (False, False),
}


# ---------------------------------------------------------------------------
# data and model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CensoredDataset:
    """Right-censored observations: log-times ``y``, indicators ``delta`` (1 = failure)
    and raw covariates ``X`` whose columns are named by ``columns``."""

    y: np.ndarray
    delta: np.ndarray
    X: np.ndarray
    columns: tuple[str, ...] = ()

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        delta = np.asarray(self.delta).ravel()
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1) if X.size else np.empty((y.size, 0))
        columns = tuple(self.columns) or tuple(f"v{j + 1}" for j in range(X.shape[1]))
        if X.shape[0] != y.size or delta.size != y.size:
            raise DataError("y, delta and covariates must have the same number of rows")
        if len(columns) != X.shape[1]:
            raise DataError("column names do not match the covariate matrix")
        if np.isnan(y).any() or np.isnan(X).any():
            raise DataError("dataset contains NaN")
        if not np.all((delta == 0) | (delta == 1)):
            raise DataError("censoring indicator must be 0 or 1")
        if not np.any(delta == 1):
            raise DataError("dataset needs at least one uncensored observation")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "delta", delta.astype(int))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "columns", columns)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def n_failures(self) -> int:
        return int(self.delta.sum())

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.columns.index(name)]


@dataclass(frozen=True)
class RegressionModel:
    """Family plus the covariate columns entering ``mu`` and ``log sigma``.

    An intercept is always included in both linear predictors.
    """

    family: str = "leollw"
    mu: tuple[str, ...] = ()
    sigma: tuple[str, ...] = ()

    def __post_init__(self):
        fam = self.family.lower()
        if fam not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {sorted(FAMILIES)}")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "mu", tuple(self.mu))
        object.__setattr__(self, "sigma", tuple(self.sigma))

    @property
    def free_shapes(self) -> tuple[bool, bool]:
        return FAMILIES[self.family]

    def with_family(self, family: str) -> "RegressionModel":
        return RegressionModel(family, self.mu, self.sigma)

    def design(self, data: CensoredDataset) -> tuple[np.ndarray, np.ndarray]:
        return _design(data, self.mu), _design(data, self.sigma)

    def param_names(self) -> list[str]:
        names = [f"beta1[{c}]" for c in (INTERCEPT, *self.mu)]
        names += [f"beta2[{c}]" for c in (INTERCEPT, *self.sigma)]
        fa, fb = self.free_shapes
        return names + (["log(a)"] if fa else []) + (["log(b)"] if fb else [])

    @property
    def n_params(self) -> int:
        return 2 + len(self.mu) + len(self.sigma) + sum(self.free_shapes)


def _design(data: CensoredDataset, cols: Sequence[str]) -> np.ndarray:
    missing = [c for c in cols if c not in data.columns]
    if missing:
        raise DataError(f"unknown covariate column(s): {', '.join(missing)}")
    return np.column_stack([np.ones(data.n)] + [data.column(c) for c in cols])


def check_rank(V: np.ndarray, name: str = "design") -> None:
    """Raise :class:`RankDeficientError` unless ``V`` has full column rank."""
    _, R, _ = scipy.linalg.qr(V, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = 1e-10 * np.max(np.linalg.norm(V, axis=0))
    rank = int(np.sum(diag > tol))
    if rank < V.shape[1]:
        raise RankDeficientError(f"{name} matrix has rank {rank} < {V.shape[1]} columns")


# ---------------------------------------------------------------------------
# log-likelihood
# ---------------------------------------------------------------------------


def _split(theta: np.ndarray, p1: int, p2: int, free: tuple[bool, bool]):
    theta = np.asarray(theta, dtype=float)
    beta1 = theta[:p1]
    beta2 = theta[p1 : p1 + p2]
    k = p1 + p2
    log_a = log_b = 0.0
    if free[0]:
        log_a = theta[k]
        k += 1
    if free[1]:
        log_b = theta[k]
    return beta1, beta2, log_a, log_b


def _loglik_core(y, delta, Vm, Vs, beta1, beta2, a, b, want_grad=True):
    """Censored log-likelihood and its gradient in (beta1, beta2, log a, log b).

    Returns ``(ll, g1, g2, g_loga, g_logb)``; gradients are None when not requested.
    """
    mu = Vm @ beta1
    log_sigma = Vs @ beta2
    sigma = np.exp(log_sigma)
    z = np.minimum((y - mu) / sigma, Z_MAX)
    w = np.exp(z)
    log_g = log1mexp_from_log(z)
    log_t = log_g + w
    fail = delta == 1
    cens = ~fail

    # uncensored: log pi(z) - log sigma
    zf, wf, lgf, ltf = z[fail], w[fail], log_g[fail], log_t[fail]
    logden = np.logaddexp(a * lgf, -a * wf)
    ll_f = math.log(a * b) + zf - a * wf + (a * b - 1.0) * lgf - (b + 1.0) * logden - log_sigma[fail]

    # censored: log S(z)
    u = -a * log_t[cens]
    lsp = log_softplus(u)
    log_bsp = math.log(b) + lsp
    ll_c = log1mexp_from_log(log_bsp)

    ll = float(ll_f.sum() + ll_c.sum())
    if not want_grad:
        return ll, None, None, None, None

    dz = np.empty_like(z)
    direct_logsigma = np.zeros_like(z)

    # uncensored derivatives
    q = np.exp(zf - ltf)  # d log G / dz = w / (e^w - 1)
    p1 = special.expit(a * ltf)
    p0 = special.expit(-a * ltf)
    dz[fail] = 1.0 - a * wf + (a * b - 1.0) * q - (b + 1.0) * a * (p1 * q - p0 * wf)
    da = np.sum(1.0 / a - wf + b * lgf - (b + 1.0) * (p1 * lgf - p0 * wf))
    db = np.sum(1.0 / b + a * lgf - logden)
    direct_logsigma[fail] = -1.0

    # censored derivatives
    zc, wc, ltc = z[cens], w[cens], log_t[cens]
    qc = np.exp(zc - ltc)
    log_em1 = log_expm1_from_log(log_bsp)
    kappa = np.exp(math.log(b) + special.log_expit(u) - log_em1)  # d log S / du
    dz[cens] = -a * kappa * (qc + wc)
    da += np.sum(-kappa * ltc)
    db += np.sum(np.exp(lsp - log_em1))

    dlogsigma = -dz * ((y - mu) / sigma) + direct_logsigma
    g1 = Vm.T @ (-dz / sigma)
    g2 = Vs.T @ dlogsigma
    return ll, g1, g2, a * da, b * db


class _Objective:
    """Negative log-likelihood over the free parameters of a model."""

    def __init__(self, model: RegressionModel, data: CensoredDataset):
        self.model = model
        self.free = model.free_shapes
        self.y, self.delta = data.y, data.delta
        self.Vm, self.Vs = model.design(data)
        self.p1, self.p2 = self.Vm.shape[1], self.Vs.shape[1]
        self.nfev = 0

    def loglik(self, theta, want_grad=True):
        beta1, beta2, log_a, log_b = _split(theta, self.p1, self.p2, self.free)
        self.nfev += 1
        try:
            with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
                ll, g1, g2, ga, gb = _loglik_core(
                    self.y, self.delta, self.Vm, self.Vs, beta1, beta2, math.exp(log_a), math.exp(log_b), want_grad
                )
        except (OverflowError, ValueError):
            nan = np.full(np.size(theta), np.nan)
            return -math.inf if not want_grad else (-math.inf, nan)
        if not want_grad:
            return ll
        grad = [g1, g2]
        if self.free[0]:
            grad.append([ga])
        if self.free[1]:
            grad.append([gb])
        return ll, np.concatenate(grad)

    def __call__(self, theta):
        try:
            ll, g = self.loglik(theta)
        except (OverflowError, FloatingPointError, ValueError):
            return math.inf, np.zeros(len(theta))
        if not (math.isfinite(ll) and np.all(np.isfinite(g))):
            return math.inf, np.zeros(len(theta))
        return -ll, -g


def loglik(theta, data: CensoredDataset, model: RegressionModel) -> float:
    """Censored log-likelihood at ``theta`` (fitting scale: shapes as logs).

    Non-finite values are returned as ``-inf`` so callers can treat them as rejections.
    """
    ll = _Objective(model, data).loglik(theta, want_grad=False)
    return ll if math.isfinite(ll) else -math.inf


def score(theta, data: CensoredDataset, model: RegressionModel) -> np.ndarray:
    """Analytic gradient of :func:`loglik` with respect to ``theta``."""
    return _Objective(model, data).loglik(theta)[1]


def loglik_natural(beta1, beta2, a: float, b: float, data: CensoredDataset, model: RegressionModel) -> float:
    """Log-likelihood with the shapes on their natural scale (no log transform)."""
    Vm, Vs = model.design(data)
    ll, *_ = _loglik_core(
        data.y, data.delta, Vm, Vs, np.asarray(beta1, float), np.asarray(beta2, float), a, b, want_grad=False
    )
    return ll


def loglik_direct(beta1, beta2, a: float, b: float, data: CensoredDataset, model: RegressionModel) -> float:
    """Reference log-likelihood from the density and survival closed forms, term by term."""
    from .eollw import LeollwParams, leollw_logpdf, leollw_logsf

    Vm, Vs = model.design(data)
    mu = Vm @ np.asarray(beta1, float)
    sigma = np.exp(Vs @ np.asarray(beta2, float))
    total = 0.0
    for yi, di, mi, si in zip(data.y, data.delta, mu, sigma):
        p = LeollwParams(mi, si, a, b)
        total += float(leollw_logpdf(p, yi)) if di == 1 else float(leollw_logsf(p, yi))
    return total


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitOptions:
    gtol: float = 1e-5
    ftol: float = 1e-9
    maxiter: int = 500
    hessian_step: float = 1e-4
    polish: bool = True
    start: np.ndarray | None = None
    restarts: bool = True


# (log a, log b) starts tried when the default start does not give a regular fit
FALLBACK_SHAPE_STARTS = (
    (0.5, 0.0), (-0.5, 0.0), (0.0, 0.5), (0.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (0.7, 0.7), (-0.7, -0.7),
)


@dataclass
class FitResult:
    model: RegressionModel
    columns: tuple[str, ...]
    theta: np.ndarray
    names: list[str]
    loglik: float
    se: np.ndarray | None
    cov: np.ndarray | None
    n: int
    n_failures: int
    grad_norm: float
    iterations: int
    converged: bool
    message: str
    history: list[float] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def n_params(self) -> int:
        return self.theta.size

    @property
    def aic(self) -> float:
        return information_criteria(self.loglik, self.n_params, self.n)[0]

    @property
    def bic(self) -> float:
        return information_criteria(self.loglik, self.n_params, self.n)[1]

    @property
    def caic(self) -> float:
        return information_criteria(self.loglik, self.n_params, self.n)[2]

    def _parts(self):
        p1 = 1 + len(self.model.mu)
        p2 = 1 + len(self.model.sigma)
        return _split(self.theta, p1, p2, self.model.free_shapes)

    @property
    def beta1(self) -> np.ndarray:
        return self._parts()[0]

    @property
    def beta2(self) -> np.ndarray:
        return self._parts()[1]

    @property
    def a(self) -> float:
        return math.exp(self._parts()[2])

    @property
    def b(self) -> float:
        return math.exp(self._parts()[3])

    def to_dict(self) -> dict:
        se = self.se.tolist() if self.se is not None else None
        return {
            "family": self.model.family,
            "mu_columns": list(self.model.mu),
            "sigma_columns": list(self.model.sigma),
            "parameters": self.names,
            "estimates": self.theta.tolist(),
            "standard_errors": se,
            "a": self.a,
            "b": self.b,
            "loglik": self.loglik,
            "n": self.n,
            "n_failures": self.n_failures,
            "n_params": self.n_params,
            "AIC": self.aic,
            "BIC": self.bic,
            "CAIC": self.caic,
            "converged": self.converged,
            "gradient_inf_norm": self.grad_norm,
            "iterations": self.iterations,
            "message": self.message,
            "diagnostics": self.diagnostics,
        }


def _lw_start(data: CensoredDataset, Vm: np.ndarray, Vs: np.ndarray) -> np.ndarray:
    """Moment start for the log-Weibull fit: OLS location, Gumbel-sd scale."""
    coef, *_ = np.linalg.lstsq(Vm, data.y, rcond=None)
    resid = data.y - Vm @ coef
    sigma = max(float(np.std(resid)) * math.sqrt(6.0) / math.pi, 1e-3)
    coef = coef.copy()
    coef[0] += np.euler_gamma * sigma  # E[z] = -gamma for the log-Weibull error
    beta2 = np.zeros(Vs.shape[1])
    beta2[0] = math.log(sigma)
    return np.concatenate([coef, beta2])


def _hessian(obj: _Objective, theta: np.ndarray, step: float) -> np.ndarray:
    """Central differences of the analytic score, step ``step * (1 + |theta_j|)``."""
    k = theta.size
    H = np.empty((k, k))
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(k):
            h = step * (1.0 + abs(theta[j]))
            tp, tm = theta.copy(), theta.copy()
            tp[j] += h
            tm[j] -= h
            _, gp = obj.loglik(tp)
            _, gm = obj.loglik(tm)
            H[:, j] = (gp - gm) / (2.0 * h)
        return 0.5 * (H + H.T)


def _minimize(obj: _Objective, theta0: np.ndarray, opts: FitOptions):
    history: list[float] = []
    n_shapes = sum(obj.free)
    bounds = [(None, None)] * (theta0.size - n_shapes) + [(-LOG_SHAPE_BOUND, LOG_SHAPE_BOUND)] * n_shapes

    def record(xk):
        history.append(-obj(xk)[0])

    res = optimize.minimize(
        obj,
        theta0,
        jac=True,
        method="L-BFGS-B",
        callback=record,
        bounds=bounds,
        options={"maxiter": opts.maxiter, "ftol": opts.ftol, "gtol": opts.gtol, "maxcor": 20},
    )
    return res, history


def _newton_polish(obj: _Objective, theta: np.ndarray, ll: float, step: float, rounds: int = 4):
    """A few safeguarded Newton steps; each is accepted only if the likelihood rises."""
    n_shapes = sum(obj.free)
    for _ in range(rounds):
        ll_cur, g = obj.loglik(theta)
        H = _hessian(obj, theta, step)
        try:
            direction = np.linalg.solve(-H, g)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(direction)) or g @ direction <= 0.0:
            break
        t = 1.0
        accepted = False
        while t > 1e-4:
            cand = theta + t * direction
            if n_shapes:
                cand[-n_shapes:] = np.clip(cand[-n_shapes:], -LOG_SHAPE_BOUND, LOG_SHAPE_BOUND)
            ll_new = obj.loglik(cand, want_grad=False)
            if math.isfinite(ll_new) and ll_new >= ll_cur:
                theta, ll = cand, ll_new
                accepted = True
                break
            t *= 0.5
        if not accepted or np.max(np.abs(t * direction)) < 1e-10:
            break
    return theta, ll


def standard_errors(fit_or_theta, data: CensoredDataset | None = None, model: RegressionModel | None = None,
                    step: float = 1e-4):
    """Standard errors from the inverse observed information.

    The Hessian is central differences of the analytic score with per-coordinate
    step ``step * (1 + |theta_j|)``. Returns ``(se, cov, diagnostic)``; ``se`` and
    ``cov`` are None when the negative Hessian is not positive definite.
    """
    if isinstance(fit_or_theta, FitResult):
        if data is None:
            raise ValueError("data is required to recompute standard errors")
        theta, model = fit_or_theta.theta, fit_or_theta.model
    else:
        theta = np.asarray(fit_or_theta, dtype=float)
    obj = _Objective(model, data)
    H = _hessian(obj, theta, step)
    info = -H
    if not np.all(np.isfinite(info)):
        return None, None, "Hessian has non-finite entries"
    try:
        L = np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        return None, None, "negative Hessian is not positive definite"
    Linv = scipy.linalg.solve_triangular(L, np.eye(theta.size), lower=True)
    cov = Linv.T @ Linv
    return np.sqrt(np.diag(cov)), cov, ""


def _fit_from(model: RegressionModel, data: CensoredDataset, obj: _Objective, theta0: np.ndarray,
              opts: FitOptions) -> FitResult:
    diagnostics: list[str] = []
    res, history = _minimize(obj, theta0, opts)
    theta = res.x
    ll = -float(res.fun)
    converged = bool(res.success) and math.isfinite(ll)
    message = str(res.message)
    if math.isfinite(ll) and opts.polish:
        theta, ll_p = _newton_polish(obj, theta, ll, opts.hessian_step)
        if ll_p > ll:
            history.append(ll_p)
    ll_check, grad = obj.loglik(theta)
    grad_norm = float(np.max(np.abs(grad))) if np.all(np.isfinite(grad)) else math.inf
    # the gradient test is authoritative after polishing
    if not converged and grad_norm < opts.gtol:
        converged = True
        message = "gradient tolerance reached after Newton polish"
    if converged and not grad_norm < 1e3 * opts.gtol:
        converged = False
        message = f"stopped with gradient inf-norm {grad_norm:.3g}"
    se, cov, diag = (None, None, "")
    if math.isfinite(ll_check):
        se, cov, diag = standard_errors(theta, data, model, opts.hessian_step)
    if diag:
        diagnostics.append(diag)
    return FitResult(
        model=model,
        columns=data.columns,
        theta=theta,
        names=model.param_names(),
        loglik=ll_check,
        se=se,
        cov=cov,
        n=data.n,
        n_failures=data.n_failures,
        grad_norm=grad_norm,
        iterations=int(res.nit),
        converged=converged,
        message=message,
        history=history,
        diagnostics=diagnostics,
    )


def _regular(res: FitResult) -> bool:
    return res.converged and res.se is not None


def fit(model: RegressionModel, data: CensoredDataset, options: FitOptions | None = None) -> FitResult:
    """Maximum-likelihood fit.

    Unless ``options.start`` is given, the location/scale coefficients start from
    a log-Weibull (``a = b = 1``) fit and the log-shapes start at 0. The
    likelihood is unbounded along a path with ``sigma`` and ``a`` both tending to
    0, so when that start does not end at a regular maximum (converged, with a
    positive definite information matrix) a few other shape starts are tried and
    the best regular maximum is kept.
    """
    opts = options or FitOptions()
    Vm, Vs = model.design(data)
    check_rank(Vm, "mu design")
    check_rank(Vs, "sigma design")
    obj = _Objective(model, data)

    if opts.start is not None:
        theta0 = np.asarray(opts.start, dtype=float).copy()
        if theta0.size != model.n_params:
            raise ValueError(f"start has {theta0.size} entries, model has {model.n_params}")
        return _fit_from(model, data, obj, theta0, opts)

    lw_obj = _Objective(model.with_family("lw"), data)
    start = _lw_start(data, Vm, Vs)
    lw_res, _ = _minimize(lw_obj, start, opts)
    lw_theta = lw_res.x if np.all(np.isfinite(lw_res.x)) else start
    n_shapes = sum(model.free_shapes)
    result = _fit_from(model, data, obj, np.concatenate([lw_theta, np.zeros(n_shapes)]), opts)
    if _regular(result) or not opts.restarts or n_shapes == 0:
        return result
    best = None
    for la, lb in FALLBACK_SHAPE_STARTS:
        shapes = [v for v, free in zip((la, lb), model.free_shapes) if free]
        cand = _fit_from(model, data, obj, np.concatenate([lw_theta, shapes]), opts)
        if _regular(cand) and (best is None or cand.loglik > best.loglik):
            best = cand
    if best is None:
        return result
    best.diagnostics.append("default start did not reach a regular maximum; kept best fallback start")
    return best


def _embed(sub: FitResult, model: RegressionModel) -> np.ndarray:
    """``sub.theta`` mapped into ``model``'s parameter vector, with fixed log-shapes set to 0."""
    k = sub.model.n_params - sum(sub.model.free_shapes)
    shapes = dict(zip((i for i, f in enumerate(sub.model.free_shapes) if f), sub.theta[k:]))
    extra = [shapes.get(i, 0.0) for i, f in enumerate(model.free_shapes) if f]
    return np.concatenate([sub.theta[:k], extra])


def fit_families(model: RegressionModel, data: CensoredDataset,
                 options: FitOptions | None = None, tol: float = 1e-6) -> dict[str, FitResult]:
    """Fit all four families with ``model``'s covariates, keeping log-likelihoods nested.

    The LEOLLW likelihood can have several local maxima. When a submodel ends
    above a model that contains it, that model is refitted from the submodel's
    optimum and the better of the two fits is kept.
    """
    fits: dict[str, FitResult] = {}
    for family in ("lw", "lollw", "lew", "leollw"):
        m = model.with_family(family)
        best = fit(m, data, options)
        for sub in fits.values():
            nested = all(f or not fs for f, fs in zip(m.free_shapes, sub.model.free_shapes))
            if nested and sub.loglik > best.loglik + tol:
                opts = replace(options or FitOptions(), start=_embed(sub, m))
                cand = fit(m, data, opts)
                if cand.loglik > best.loglik:
                    cand.diagnostics.append(f"refitted from the {sub.model.family} optimum")
                    best = cand
        fits[family] = best
    return fits


# ---------------------------------------------------------------------------
# inference
# ---------------------------------------------------------------------------


def information_criteria(loglik_value: float, n_params: int, n: int) -> tuple[float, float, float]:
    """(AIC, BIC, CAIC) = -2l + 2k, -2l + k log n, -2l + k (log n + 1)."""
    m2l = -2.0 * loglik_value
    logn = math.log(n)
    return m2l + 2.0 * n_params, m2l + n_params * logn, m2l + n_params * (logn + 1.0)


def chi2_sf(w: float, df: int) -> float:
    """Upper chi-square tail via the regularized upper incomplete gamma function."""
    if w <= 0.0:
        return 1.0
    return float(special.gammaincc(0.5 * df, 0.5 * w))


@dataclass(frozen=True)
class LRTest:
    statistic: float
    p_value: float
    df: int


def lr_test(full: FitResult, sub: FitResult, df: int | None = None, tol: float = 1e-6) -> LRTest:
    """Likelihood-ratio test of a restricted fit against the full one."""
    if df is None:
        df = full.n_params - sub.n_params
    if df < 1:
        raise ValueError("df must be at least 1")
    w = 2.0 * (full.loglik - sub.loglik)
    if w < -tol:
        raise OptimizerFailure(f"negative LR statistic {w:.3g}: the full fit did not reach the restricted optimum")
    w = max(w, 0.0)
    return LRTest(w, chi2_sf(w, df), df)


def _row_design(fit: FitResult, covariates) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(covariates, Mapping):
        row = np.array([[float(covariates[c]) for c in fit.columns]])
    else:
        row = np.atleast_2d(np.asarray(covariates, dtype=float))
    if row.shape[1] != len(fit.columns):
        raise ValueError(f"expected {len(fit.columns)} covariates ({', '.join(fit.columns)}), got {row.shape[1]}")
    idx = {c: j for j, c in enumerate(fit.columns)}
    ones = np.ones((row.shape[0], 1))
    Vm = np.hstack([ones, row[:, [idx[c] for c in fit.model.mu]]])
    Vs = np.hstack([ones, row[:, [idx[c] for c in fit.model.sigma]]])
    return Vm, Vs


def predict_location_scale(fit: FitResult, covariates) -> tuple[np.ndarray, np.ndarray]:
    Vm, Vs = _row_design(fit, covariates)
    return Vm @ fit.beta1, np.exp(Vs @ fit.beta2)


def predict_log_survival(fit: FitResult, covariates, y):
    mu, sigma = predict_location_scale(fit, covariates)
    y = np.asarray(y, dtype=float)
    out = std_logsf((y - mu) / sigma if mu.size > 1 else (y - mu[0]) / sigma[0], fit.a, fit.b)
    return out[()] if np.ndim(out) == 0 else out


def predict_survival(fit: FitResult, covariates, y):
    """Fitted ``S(y | v)``; ``covariates`` is aligned with ``fit.columns`` (or a mapping)."""
    out = np.exp(predict_log_survival(fit, covariates, y))
    return out[()] if np.ndim(out) == 0 else out


def fitted_log_survival(fit: FitResult, data: CensoredDataset) -> np.ndarray:
    """``log S(y_i | v_i)`` at the fitted parameters for every row of ``data``."""
    Vm, Vs = fit.model.design(data)
    mu = Vm @ fit.beta1
    sigma = np.exp(Vs @ fit.beta2)
    return std_logsf((data.y - mu) / sigma, fit.a, fit.b)


def simulate_responses(fit: FitResult, data: CensoredDataset, rng: np.random.Generator,
                       keep_censoring: bool = True) -> CensoredDataset:
    """Draw new log-times from the fitted model at the observed covariates.

    With ``keep_censoring`` the censored rows keep their observed censoring times.
    """
    from .eollw import LeollwParams, leollw_quantile

    Vm, Vs = fit.model.design(data)
    mu = Vm @ fit.beta1
    sigma = np.exp(Vs @ fit.beta2)
    u = rng.random(data.n)
    u = np.where(u == 0.0, 1e-15, u)
    z = leollw_quantile(LeollwParams(0.0, 1.0, fit.a, fit.b), u)
    ystar = mu + sigma * z
    if keep_censoring:
        cens = data.delta == 0
        c = np.where(cens, data.y, np.inf)
        y = np.minimum(ystar, c)
        delta = (ystar < c).astype(int)
    else:
        y, delta = ystar, np.ones(data.n, dtype=int)
    if not delta.any():
        delta[np.argmin(ystar)] = 1
        y[np.argmin(ystar)] = ystar[np.argmin(ystar)]
    return CensoredDataset(y, delta, data.X, data.columns)


__all__ = [
    "CensoredDataset",
    "FAMILIES",
    "FitOptions",
    "FitResult",
    "INTERCEPT",
    "LRTest",
    "RegressionModel",
    "check_rank",
    "chi2_sf",
    "fit",
    "fit_families",
    "fitted_log_survival",
    "information_criteria",
    "loglik",
    "loglik_direct",
    "loglik_natural",
    "lr_test",
    "predict_location_scale",
    "predict_log_survival",
    "predict_survival",
    "score",
    "simulate_responses",
    "standard_errors",
]
