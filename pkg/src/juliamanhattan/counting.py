"""Multiplier-spectrum counting, joint correlation bins and witness orbits.

N_T(f) counts primitive orbits with |multiplier| <= T, i.e. lambda <= log T.
Completeness up to T is certified only heuristically. It requires every
orbit of the top stored period to have lambda > log T, on the assumption
that the smallest lambda of a period grows with the period.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .errors import InsufficientDataError, UncertifiedThresholdError
from .thermo import bowen_root

LI_ABS_TOL = 1e-10
#: below this sample variance of lambda/p the spectrum looks cohomologous to a constant
CONSTANT_VARIANCE_TOL = 1e-12
MIN_FIT_BINS = 5

CERTIFICATION_NOTE = ("certification is heuristic: it assumes the least log-multiplier "
                      "of a period grows with the period")
BIN_NOTE = "bins are half-open (T, T + epsilon] so adjacent bins partition exactly"


@dataclass(frozen=True)
class CountingRecord:
    T: float
    N_T: int
    li_value: float
    ratio: float
    certified: bool


@dataclass(frozen=True)
class CountingReport:
    records: list
    which_map: int
    exponent: float
    certified_limit: float
    hypothesis_violated: bool
    notes: tuple


@dataclass(frozen=True)
class CorrelationBin:
    T: float
    epsilon: float
    count: int


@dataclass(frozen=True)
class CorrelationFit:
    alpha_hat: float
    stderr: float
    intercept: float
    n_bins: int
    weighted: bool


def log_integral(x):
    """Offset logarithmic integral: the integral of 1/log u over [2, x]."""
    x = float(x)
    if not x >= 2.0:
        raise ValueError(f"log_integral needs x >= 2, got {x}")
    if x == 2.0:
        return 0.0
    val, _ = integrate.quad(lambda u: 1.0 / math.log(u), 2.0, x, epsabs=LI_ABS_TOL,
                            epsrel=1e-13, limit=500)
    return val


def _spectrum(db, which_map):
    lam1, lam2, periods, _ = db.spectrum()
    if which_map == 1:
        return lam1, periods
    if which_map == 2:
        return lam2, periods
    raise ValueError("which_map must be 1 or 2")


def certified_limit(db, which_map):
    """Largest log T for which counts are certified (strict bound)."""
    blk = db.block(db.max_period)
    lam = blk.lambda1 if which_map == 1 else blk.lambda2
    if db.max_period < 1 or lam.size == 0:
        return -math.inf
    return float(lam.min())


def count_N_T(db, which_map, T, exponent=None):
    """N_T with its Li(T^{2VD}) comparison; ``exponent`` defaults to the Bowen root."""
    T = float(T)
    if not T > 1.0:
        raise ValueError(f"T must exceed 1, got {T}")
    lam, _ = _spectrum(db, which_map)
    logT = math.log(T)
    n = int(np.count_nonzero(lam <= logT))
    s = bowen_root(db, which_map) if exponent is None else exponent
    li = log_integral(max(2.0, T ** s))
    ratio = n / li if li > 0 else math.nan
    return CountingRecord(T, n, li, ratio, bool(certified_limit(db, which_map) > logT))


def is_cohomologous_to_constant(db, which_map):
    """Proxy test: the sample variance of lambda/p is at most 1e-12."""
    lam, periods = _spectrum(db, which_map)
    if lam.size < 2:
        return True
    return bool(np.var(lam / periods, ddof=1) <= CONSTANT_VARIANCE_TOL)


def counting_report(db, which_map, T_grid, allow_uncertified=False):
    """``count_N_T`` over an increasing grid of thresholds.

    Thresholds beyond the certified range raise unless ``allow_uncertified``.
    In that case they are reported with ``certified = False`` and a warning.
    """
    T_grid = [float(t) for t in T_grid]
    if any(b <= a for a, b in zip(T_grid, T_grid[1:])):
        raise ValueError("T_grid must be strictly increasing")
    limit = certified_limit(db, which_map)
    beyond = [t for t in T_grid if not math.log(t) < limit]
    if beyond:
        msg = (f"{len(beyond)} threshold(s) beyond the certified range T < "
               f"{math.exp(limit):.6g}; first: {beyond[0]:.6g}")
        if not allow_uncertified:
            raise UncertifiedThresholdError(msg)
        warnings.warn(msg, RuntimeWarning)
    s = bowen_root(db, which_map)
    records = [count_N_T(db, which_map, t, exponent=s) for t in T_grid]
    violated = is_cohomologous_to_constant(db, which_map)
    notes = [CERTIFICATION_NOTE]
    if violated:
        notes.append("log|f'| looks cohomologous to a constant (lambda/p has zero variance); "
                     "the Li asymptotic does not apply to this map")
    return CountingReport(records, which_map, s, limit, violated, tuple(notes))


def default_T_grid(db, which_map, count=None):
    """Geometric thresholds with ratio d, ending just inside the certified range.

    The multiplier spectrum of z**d + c clusters near powers of d, so N_T/Li
    oscillates with period log d in log T. Sampling once per period compares
    like with like.
    """
    limit = certified_limit(db, which_map)
    if not math.isfinite(limit):
        raise InsufficientDataError("database has no orbits at its top period")
    top = limit - 1e-12 * max(1.0, abs(limit))
    step = math.log(db.d)
    k = int(math.floor((top - math.log(2.0)) / step)) + 1
    if count is not None:
        k = min(k, count)
    return [math.exp(top - step * i) for i in range(k - 1, -1, -1)]


def geometric_grid(start, stop, count):
    return list(np.geomspace(start, stop, count))


def linear_grid(start, stop, count):
    return list(np.linspace(start, stop, count))


def correlation_bins(db, epsilon, T_grid):
    """Orbits with both log-multipliers in (T, T + epsilon], for each T."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    lam1, lam2, _, _ = db.spectrum()
    low = np.minimum(lam1, lam2)
    high = np.maximum(lam1, lam2)
    out = []
    for T in T_grid:
        T = float(T)
        n = np.count_nonzero((low > T) & (high <= T + epsilon))
        out.append(CorrelationBin(T, float(epsilon), int(n)))
    return out


def single_map_bins(db, which_map, epsilon, T_grid):
    lam, _ = _spectrum(db, which_map)
    return [CorrelationBin(float(T), float(epsilon),
                           int(np.count_nonzero((lam > T) & (lam <= T + epsilon))))
            for T in T_grid]


def correlation_grid(db, epsilon, T_min=None):
    """Adjacent bins of width epsilon covering the certified range of both maps."""
    top = min(certified_limit(db, 1), certified_limit(db, 2))
    if not math.isfinite(top):
        raise InsufficientDataError("database has no orbits at its top period")
    start = math.log(db.d) if T_min is None else float(T_min)
    k = int(math.floor((top - start) / epsilon))
    return [start + i * epsilon for i in range(max(k, 0))]


def fit_correlation_exponent(bins, poisson=False):
    """Slope of log(count) + 1.5 log T against T over the nonzero bins.

    Returns a :class:`CorrelationFit`. With ``poisson`` the points are
    weighted by their counts, the inverse variance of log count under
    Poisson noise.
    """
    T = np.array([b.T for b in bins if b.count > 0], dtype=float)
    cnt = np.array([b.count for b in bins if b.count > 0], dtype=float)
    if T.size < MIN_FIT_BINS:
        raise InsufficientDataError(f"need at least {MIN_FIT_BINS} nonzero bins, got {T.size}")
    if np.any(T <= 0):
        raise ValueError("bin thresholds must be positive")
    if np.ptp(T) == 0:
        raise InsufficientDataError("all nonzero bins share one threshold")
    y = np.log(cnt) + 1.5 * np.log(T)
    if not poisson:
        res = stats.linregress(T, y)
        return CorrelationFit(float(res.slope), float(res.stderr), float(res.intercept),
                              int(T.size), False)
    w = cnt
    X = np.column_stack([np.ones_like(T), T])
    W = X * w[:, None]
    cov = np.linalg.inv(X.T @ W)
    beta = cov @ (W.T @ y)
    resid = y - X @ beta
    dof = max(T.size - 2, 1)
    sigma2 = float(np.sum(w * resid ** 2) / dof)
    return CorrelationFit(float(beta[1]), float(math.sqrt(cov[1, 1] * sigma2)), float(beta[0]),
                          int(T.size), True)


def assumption_b_witness(db):
    """Orbits z, w with lambda1(z) > lambda2(z) and lambda2(w) > lambda1(w).

    Each is the orbit with the largest gap in its direction. Returns ``None``
    when either side is empty.
    """
    lam1, lam2, _, _ = db.spectrum()
    if lam1.size == 0:
        return None
    gap = lam1 - lam2
    i, j = int(np.argmax(gap)), int(np.argmin(gap))
    if not (gap[i] > 0 and gap[j] < 0):
        return None
    return _orbit_at(db, i), _orbit_at(db, j)


def _orbit_at(db, flat):
    _, _, _, offsets = db.spectrum()
    p = int(np.searchsorted(offsets, flat, side="right"))
    return db.block(p).orbit(flat - int(offsets[p - 1]))


def spectrum_diagnostics(db):
    """Summary statistics of the marked spectrum used by the reports."""
    lam1, lam2, periods, _ = db.spectrum()
    out = {"orbits": int(lam1.size)}
    if lam1.size == 0:
        return out
    r1, r2 = lam1 / periods, lam2 / periods
    ratio = lam2 / lam1
    out.update({
        "rate1_min": float(r1.min()), "rate1_max": float(r1.max()),
        "rate2_min": float(r2.min()), "rate2_max": float(r2.max()),
        "rate1_variance": float(np.var(r1, ddof=1)) if r1.size > 1 else 0.0,
        "rate2_variance": float(np.var(r2, ddof=1)) if r2.size > 1 else 0.0,
        # proportional spectra have a constant ratio lambda2/lambda1
        "ratio_spread": float(ratio.max() - ratio.min()),
        "max_gap_12": float(np.max(lam1 - lam2)),
        "max_gap_21": float(np.max(lam2 - lam1)),
    })
    return out
