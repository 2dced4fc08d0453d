"""Shape analysis for the EOLLW and LEOLLW densities.

Critical points of the EOLLW density solve ``G0(w) = H0(w)`` with
``w = (x/lam)^alpha``::

    G0(w) = (1 - (1 - alpha)/(alpha w)) (1 - e^-w)
    H0(w) = 1 + a (T^a - b) / (T^a + 1),    T = e^w - 1

and ``sign f'(x) = sign(G0 - H0)``. The LEOLLW density uses
``I0(w) = (1/w + 1)(1 - e^-w)`` in place of ``G0`` with ``w = e^z``.
Roots are located by a sign-change scan on a log-spaced grid followed by
bisection; no bound on the number of roots is assumed.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import expit

from ._numeric import log_expm1
from .errors import DomainError
from .eollw import EollwParams, eollw_logpdf, std_logsf

OMEGA_MIN = 1e-10
OMEGA_MAX = 1e4
GRID_POINTS = 4096
RTOL = 1e-12
_OMEGA_FLOOR = 1e-300

DECREASING = "decreasing"
UNIMODAL = "unimodal"
BIMODAL = "bimodal"
DID = "dec-inc-dec"
INDETERMINATE = "indeterminate"

INCREASING = "increasing"
BATHTUB = "bathtub"
UPSIDE_DOWN = "upside-down-bathtub"
IDI = "inc-dec-inc"

UPPER_HEAVY = "upper-heavy"
UPPER_LIGHT = "upper-light"
BOUNDARY = "boundary"


def _check_omega(omega) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if np.isnan(omega).any() or np.any(omega <= 0.0):
        raise DomainError("omega must be positive")
    return omega


def g0(omega, alpha: float):
    omega = _check_omega(omega)
    one_minus = -np.expm1(-omega)
    # (1 - e^-w)/w written without cancellation near 0
    return one_minus - (1.0 - alpha) / alpha * (one_minus / omega)


def h0(omega, a: float, b: float):
    omega = _check_omega(omega)
    s = a * log_expm1(omega)
    return 1.0 + a * (expit(s) - b * expit(-s))


def i0(omega):
    omega = _check_omega(omega)
    one_minus = -np.expm1(-omega)
    return one_minus / omega + one_minus


def _i0_derivative(omega):
    omega = np.asarray(omega, dtype=float)
    return -(-np.expm1(-omega)) / omega**2 + (1.0 / omega + 1.0) * np.exp(-omega)


def hazard_polynomial(a: float, b: float, t):
    """``-(1+a) t^2a + a^2(1+b) t^(a+1) + [a^2(1+b) - a(1-b) - 2] t^a + (ab - 1)``.

    With ``alpha = 1`` and odds ``t = exp(x / lambda) - 1`` its sign is the sign
    of the derivative of ``eta = -f'/f``, so a positive polynomial on
    ``(0, inf)`` gives an increasing hazard. It vanishes identically at
    ``a = b = 1`` (exponential, constant ``eta``).
    """
    t = np.asarray(t, dtype=float)
    if np.isnan(t).any() or np.any(t <= 0.0):
        raise DomainError("t must be positive")
    ta = t**a
    out = (
        -(1.0 + a) * ta * ta
        + a * a * (1.0 + b) * t ** (a + 1.0)
        + (a * a * (1.0 + b) - a * (1.0 - b) - 2.0) * ta
        + (a * b - 1.0)
    )
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# root scanning
# ---------------------------------------------------------------------------


def _bisect_log(f, lo: np.ndarray, hi: np.ndarray, rtol: float = RTOL) -> np.ndarray:
    """Vectorized bisection in log space on brackets with ``f(lo) * f(hi) < 0``."""
    llo, lhi = np.log(lo), np.log(hi)
    flo = np.sign(f(lo))
    # relative width in linear space ~ width in log space
    while np.any(lhi - llo > rtol):
        lmid = 0.5 * (llo + lhi)
        fmid = np.sign(f(np.exp(lmid)))
        left = fmid == flo
        llo = np.where(left, lmid, llo)
        lhi = np.where(left, lhi, lmid)
    return np.exp(0.5 * (llo + lhi))


@dataclass(frozen=True)
class RootScan:
    roots: np.ndarray  # sorted, on the omega scale
    start_sign: int  # sign of f just above 0


def scan_roots(
    f,
    lo: float = OMEGA_MIN,
    hi: float = OMEGA_MAX,
    n: int = GRID_POINTS,
    limit_at_zero: float | None = None,
    rtol: float = RTOL,
) -> RootScan:
    """All sign changes of ``f`` on ``[lo, hi]`` refined by bisection.

    If the sign of ``limit_at_zero`` disagrees with ``f(lo)``, the grid is
    extended down to 1e-300 so roots squeezed against the origin are found.
    """
    grid = np.geomspace(lo, hi, n)
    if limit_at_zero is not None and limit_at_zero != 0.0:
        if np.sign(f(np.array([lo])))[0] != np.sign(limit_at_zero):
            grid = np.concatenate([np.geomspace(_OMEGA_FLOOR, lo, 1024)[:-1], grid])
    vals = f(grid)
    s = np.where(vals >= 0.0, 1, -1)
    idx = np.nonzero(s[:-1] != s[1:])[0]
    roots = _bisect_log(f, grid[idx], grid[idx + 1], rtol) if idx.size else np.empty(0)
    return RootScan(np.sort(roots), int(s[0]))


# ---------------------------------------------------------------------------
# EOLLW density
# ---------------------------------------------------------------------------


def _density_scan(p: EollwParams) -> RootScan:
    def diff(w):
        return g0(w, p.alpha) - h0(w, p.a, p.b)

    return scan_roots(diff, limit_at_zero=p.a * p.b - 1.0 / p.alpha)


def density_critical_points(p: EollwParams) -> list[float]:
    """Interior critical points of the EOLLW density on the x scale, sorted."""
    roots = _density_scan(p).roots
    return [float(x) for x in p.lam * roots ** (1.0 / p.alpha)]


def _class_from_signs(start_sign: int, k: int) -> str:
    if start_sign < 0:
        return {0: DECREASING, 2: DID}.get(k, INDETERMINATE)
    return {1: UNIMODAL, 3: BIMODAL}.get(k, INDETERMINATE)


def _close(u: float, v: float) -> bool:
    return math.isclose(u, v, rel_tol=1e-12, abs_tol=1e-15)


def theorem_density_classes(p: EollwParams) -> set[str] | None:
    """Classes permitted by the modality theorems, or None outside their scope."""
    a, b, alpha = p.a, p.b, p.alpha
    allowed: set[str] | None = None
    if _close(alpha, 1.0) and float(a).is_integer():
        allowed = {DECREASING, DID} if a * b < 1.0 else {UNIMODAL}
    if a <= 1.0:
        ab, inv = a * b, 1.0 / alpha
        if _close(ab, inv):
            cls = {DECREASING, UNIMODAL, BIMODAL, DID}
        elif ab < inv:
            cls = {DECREASING, DID}
        else:
            cls = {UNIMODAL, BIMODAL}
        allowed = cls if allowed is None else allowed & cls
    return allowed


@dataclass(frozen=True)
class DensityShape:
    density_class: str
    critical_points: list[float]
    theorem_backed: bool
    theorem_classes: list[str] | None


def classify_density(p: EollwParams) -> DensityShape:
    """Modality class of the EOLLW density.

    The class comes from the sign pattern of ``G0 - H0``; ``theorem_backed``
    is set only when a modality theorem covers ``p`` and agrees.
    """
    scan = _density_scan(p)
    cls = _class_from_signs(scan.start_sign, len(scan.roots))
    allowed = theorem_density_classes(p)
    backed = allowed is not None and cls in allowed
    points = [float(x) for x in p.lam * scan.roots ** (1.0 / p.alpha)]
    return DensityShape(cls, points, backed, sorted(allowed) if allowed is not None else None)


# ---------------------------------------------------------------------------
# hazard
# ---------------------------------------------------------------------------


def in_set_b(a: float, b: float, n: int = GRID_POINTS) -> bool:
    """Numerical membership of ``(a, b)`` in the set where ``p_ab(t) > 0`` for all t > 0."""
    t = np.geomspace(1e-12, 1e8, n)
    return bool(np.all(hazard_polynomial(a, b, t) > 0.0))


def log_hazard_curve(p: EollwParams, n: int = GRID_POINTS):
    """Log hazard on a log-spaced x grid spanning survival from ~1 down to ~1e-200."""
    omega = np.geomspace(1e-8, 460.0 / p.a, n)
    x = p.lam * omega ** (1.0 / p.alpha)
    z = p.alpha * (np.log(x) - math.log(p.lam))
    return x, eollw_logpdf(p, x) - std_logsf(z, p.a, p.b)


def _numeric_hazard_class(p: EollwParams) -> tuple[str, list[float]]:
    x, lh = log_hazard_curve(p)
    d = np.diff(lh)
    # drop steps indistinguishable from rounding noise
    noise = 1e-11 * np.maximum(1.0, np.abs(lh[1:]))
    keep = np.abs(d) > noise
    s = np.sign(d[keep])
    xs = x[1:][keep]
    if s.size == 0:
        return INCREASING, []
    change = np.nonzero(s[:-1] != s[1:])[0]
    pattern = [int(s[0])] + [int(s[i + 1]) for i in change]
    turning = [float(xs[i]) for i in change]
    cls = {
        (1,): INCREASING,
        (-1,): DECREASING,
        (-1, 1): BATHTUB,
        (1, -1): UPSIDE_DOWN,
        (1, -1, 1): IDI,
        (-1, 1, -1): DID,
    }.get(tuple(pattern), INDETERMINATE)
    return cls, turning


@dataclass(frozen=True)
class HazardShape:
    hazard_class: str
    theorem_backed: bool
    turning_points: list[float] = field(default_factory=list)
    note: str = ""


def classify_hazard(p: EollwParams) -> HazardShape:
    """Hazard shape; theorem-backed only for ``alpha = 1`` under the theorem's hypotheses."""
    a, b = p.a, p.b
    num_cls, turning = _numeric_hazard_class(p)
    if not _close(p.alpha, 1.0):
        return HazardShape(num_cls, False, turning, "alpha != 1: numeric classification")
    if in_set_b(a, b):
        return HazardShape(INCREASING, True, [], "(a, b) in B (checked on a log grid)")
    coef = a * a * (1.0 + b) + a * (1.0 - b) + 2.0
    integer = float(a).is_integer()
    item2 = coef >= 0.0 and a * b > 1.0 and integer
    item3 = a * a + 3.0 * a - 1.0 > 0.0 and _close(a * b, 1.0) and integer
    if item2 or item3:
        if num_cls == INCREASING:
            return HazardShape(INCREASING, True, turning, "no hazard minimum below a/lambda")
        if num_cls == BATHTUB and turning[0] < a / p.lam:
            return HazardShape(BATHTUB, True, turning, "hazard minimum below a/lambda")
        return HazardShape(
            num_cls, False, turning, "theorem hypotheses hold but the numeric shape is outside its dichotomy"
        )
    return HazardShape(num_cls, False, turning, "outside theorem hypotheses: numeric classification")


def classify_tail(p: EollwParams) -> str:
    if _close(p.alpha, 1.0):
        return BOUNDARY
    return UPPER_HEAVY if p.alpha < 1.0 else UPPER_LIGHT


# ---------------------------------------------------------------------------
# LEOLLW
# ---------------------------------------------------------------------------


def _leollw_scan(a: float, b: float) -> RootScan:
    def diff(w):
        return i0(w) - h0(w, a, b)

    return scan_roots(diff, limit_at_zero=a * b)


def leollw_critical_points(a: float, b: float) -> list[float]:
    """Critical points of the standardized LEOLLW density on the z scale."""
    return [float(v) for v in np.log(_leollw_scan(a, b).roots)]


def classify_leollw(a: float, b: float) -> DensityShape:
    scan = _leollw_scan(a, b)
    k = len(scan.roots)
    cls = {1: UNIMODAL, 3: BIMODAL}.get(k, INDETERMINATE)
    backed = 0.0 < a <= 1.0 and cls in (UNIMODAL, BIMODAL)
    allowed = [BIMODAL, UNIMODAL] if 0.0 < a <= 1.0 else None
    return DensityShape(cls, [float(v) for v in np.log(scan.roots)], backed, allowed)


def i0_mode() -> float:
    """Maximizer of ``I0``, located with the same scan and bisection."""
    scan = scan_roots(_i0_derivative, 1e-6, 1e3)
    if len(scan.roots) != 1:
        raise RuntimeError(f"expected one stationary point of I0, found {len(scan.roots)}")
    return float(scan.roots[0])


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShapeReport:
    density_class: str
    density_critical_points: list[float]
    hazard_class: str
    tail_class: str
    density_theorem_backed: bool
    hazard_theorem_backed: bool
    notes: list[str]

    def to_dict(self) -> dict:
        return asdict(self)


def shape_report(p: EollwParams) -> ShapeReport:
    dens = classify_density(p)
    haz = classify_hazard(p)
    notes = []
    if dens.theorem_classes is not None:
        notes.append("density theorem permits: " + ", ".join(dens.theorem_classes))
    if haz.note:
        notes.append("hazard: " + haz.note)
    return ShapeReport(
        density_class=dens.density_class,
        density_critical_points=dens.critical_points,
        hazard_class=haz.hazard_class,
        tail_class=classify_tail(p),
        density_theorem_backed=dens.theorem_backed,
        hazard_theorem_backed=haz.theorem_backed,
        notes=notes,
    )


__all__ = [
    "DensityShape",
    "HazardShape",
    "RootScan",
    "ShapeReport",
    "classify_density",
    "classify_hazard",
    "classify_leollw",
    "classify_tail",
    "density_critical_points",
    "g0",
    "h0",
    "hazard_polynomial",
    "i0",
    "i0_mode",
    "in_set_b",
    "leollw_critical_points",
    "log_hazard_curve",
    "scan_roots",
    "shape_report",
    "theorem_density_classes",
]
