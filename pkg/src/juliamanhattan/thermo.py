"""Pressure, Bowen roots and the Manhattan curve from orbit partition sums.

For a pair of maps with marked log-multipliers (lambda1, lambda2) the
period-n partition sum at weights (a, b) is

    Z_n(a, b) = sum over x in Fix(f^n) of exp(-a S_n tau_1(x) - b S_n tau_2(x))
              = sum_{p | n} sum_{orbits O of period p} p exp(-(n/p)(a lambda1(O) + b lambda2(O)))

and the pressure P(-a tau_1 - b tau_2) is the limit of (1/n) log Z_n. The
Manhattan curve is its zero set in the closed positive quadrant.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import PeriodOutOfRangeError
from .numerics import aitken, golden_section_min, solve_decreasing

ROOT_TOL = 1e-9
GOLDEN_TOL = 1e-6
SLOPE_CHECK_TOL = 1e-3
AITKEN_TAIL = 5
MIN_PERIOD = 4


@dataclass
class PressureEstimate:
    value: float
    per_period: list
    error_estimate: float
    n_used: int
    #: log(Z_N / Z_{N-1}), reported alongside for comparison
    ratio_estimate: float = math.nan
    aitken_tail: list = field(default_factory=list)


@dataclass(frozen=True)
class CurveSample:
    a: float
    b: float
    slope: float
    pressure_residual: float


@dataclass(frozen=True)
class CorrelationPoint:
    a0: float
    b0: float
    alpha: float
    degenerate_line: bool
    slope: float
    slope_check_residual: float
    slope_check_passed: bool


def log_partition_sums(db, a, b, nmax=None):
    """``[log Z_1, ..., log Z_nmax]`` at weights (a, b)."""
    nmax = db.max_period if nmax is None else nmax
    if not 1 <= nmax <= db.max_period:
        raise PeriodOutOfRangeError(f"period {nmax} outside 1..{db.max_period}")
    lam1, lam2, _, offsets = db.spectrum()
    return kernels.log_partition_sums(lam1, lam2, offsets, a, b, nmax)


def log_partition_sum(db, a, b, n):
    """log Z_n(a, b), reconstructed from primitive orbits by divisor sums."""
    if not 1 <= n <= db.max_period:
        raise PeriodOutOfRangeError(f"period {n} outside 1..{db.max_period}")
    return float(log_partition_sums(db, a, b, n)[n - 1])


def pressure(db, a, b):
    """Aitken-extrapolated limit of P_n = (1/n) log Z_n(a, b)."""
    if db.max_period < MIN_PERIOD:
        raise PeriodOutOfRangeError(
            f"pressure needs max_period >= {MIN_PERIOD}, database has {db.max_period}")
    logz = log_partition_sums(db, a, b)
    n = np.arange(1, db.max_period + 1)
    P = logz / n
    tail = P[-AITKEN_TAIL:]
    acc = [aitken(*tail[i:i + 3]) for i in range(len(tail) - 2)]
    value = acc[-1]
    # distance travelled by the extrapolation and its last correction
    err = max(abs(value - P[-1]), abs(acc[-1] - acc[-2]))
    return PressureEstimate(
        value=float(value),
        per_period=[(int(k), float(v)) for k, v in zip(n, P)],
        error_estimate=float(err),
        n_used=int(db.max_period),
        ratio_estimate=float(logz[-1] - logz[-2]),
        aitken_tail=[float(x) for x in acc],
    )


def _pressure_value(db, a, b):
    return pressure(db, a, b).value


def _upper_bracket(db, a, b):
    # P(-s(a tau1 + b tau2)) <= log d - s * min_O (a lambda1 + b lambda2)/p
    lam1, lam2, periods, _ = db.spectrum()
    rate = float(np.min((a * lam1 + b * lam2) / periods))
    if not rate > 0:
        raise PeriodOutOfRangeError("weights give a non-positive expansion rate")
    return 2.0 * math.log(db.d) / rate


def bowen_root(db, which_map, root_tol=ROOT_TOL):
    """Zero t of t -> P(-t tau_i); equals the Hausdorff dimension of J(f_i)."""
    if which_map not in (1, 2):
        raise ValueError("which_map must be 1 or 2")
    key = ("bowen", which_map, root_tol)
    if key not in db._cache:
        a, b = (1.0, 0.0) if which_map == 1 else (0.0, 1.0)
        hi = _upper_bracket(db, a, b)
        db._cache[key] = solve_decreasing(lambda t: _pressure_value(db, t * a, t * b),
                                          0.0, hi, tol=root_tol)
    return db._cache[key]


def critical_exponent(db, a, b, root_tol=ROOT_TOL):
    """s with P(-s(a tau_1 + b tau_2)) = 0."""
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise ValueError("need a, b >= 0, not both zero")
    hi = _upper_bracket(db, a, b)
    return solve_decreasing(lambda s: _pressure_value(db, s * a, s * b), 0.0, hi, tol=root_tol)


def gibbs_slope(db, a, b, n=None):
    """db/da = -<tau_1>/<tau_2> from the period-n Gibbs weights (n = max_period)."""
    n = db.max_period if n is None else n
    if not 1 <= n <= db.max_period:
        raise PeriodOutOfRangeError(f"period {n} outside 1..{db.max_period}")
    lam1, lam2, _, offsets = db.spectrum()
    _, t1, t2 = kernels.gibbs_averages(lam1, lam2, offsets, a, b, n)
    return -t1 / t2


def manhattan_sample(db, a, root_tol=ROOT_TOL):
    """The point (a, b) of the Manhattan curve, with slope and residual."""
    top = bowen_root(db, 1, root_tol)
    if a < 0 or a > top + root_tol:
        raise ValueError(f"a = {a} outside [0, {top}]")
    if a == 0:
        b = bowen_root(db, 2, root_tol)
    elif a >= top:
        a, b = top, 0.0
    else:
        hi = _upper_bracket(db, 0.0, 1.0)
        b = solve_decreasing(lambda y: _pressure_value(db, a, y), 0.0, hi, tol=root_tol)
    return CurveSample(float(a), float(b), float(gibbs_slope(db, a, b)),
                       abs(_pressure_value(db, a, b)))


def manhattan_curve(db, num_samples, threads=1, root_tol=ROOT_TOL):
    """Samples on a uniform a-grid over [0, 2VD_1], both endpoints exact.

    Samples are independent, so ``threads > 1`` changes nothing but speed.
    """
    if num_samples < 3:
        raise ValueError("num_samples must be >= 3")
    top = bowen_root(db, 1, root_tol)
    bowen_root(db, 2, root_tol)
    db.spectrum()
    grid = [top * i / (num_samples - 1) for i in range(num_samples)]
    grid[-1] = top
    sample = lambda a: manhattan_sample(db, a, root_tol)
    if threads <= 1:
        return [sample(a) for a in grid]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(sample, grid))


def correlation_point(db, flat_tol=1e-9, root_tol=ROOT_TOL):
    """The slope -1 point of the curve, as the minimiser of a + b(a).

    When a + b(a) has no interior minimum (the curve is a line, or the
    minimum sits at an endpoint) the better endpoint is returned with
    ``degenerate_line`` set.
    """
    top = bowen_root(db, 1, root_tol)
    g = lambda a: a + manhattan_sample(db, a, root_tol).b
    a_star, g_star = golden_section_min(g, 0.0, top, GOLDEN_TOL)
    g0, g1 = bowen_root(db, 2, root_tol), top
    g_end = min(g0, g1)
    if g_end - g_star <= flat_tol or a_star <= GOLDEN_TOL or a_star >= top - GOLDEN_TOL:
        degenerate = True
        a0, b0 = (0.0, g0) if g0 <= g1 else (top, 0.0)
    else:
        degenerate = False
        a0, b0 = a_star, g_star - a_star
    slope = gibbs_slope(db, a0, b0)
    resid = abs(slope + 1.0)
    return CorrelationPoint(float(a0), float(b0), float(a0 + b0), degenerate, float(slope),
                            float(resid), bool(resid <= SLOPE_CHECK_TOL))


def bowen_root_trace(db, which_map):
    """Per-period roots t_n of (1/n) log Z_n(t e_i) = 0, n = 1..max_period."""
    a, b = (1.0, 0.0) if which_map == 1 else (0.0, 1.0)
    hi = _upper_bracket(db, a, b)
    out = []
    for n in range(1, db.max_period + 1):
        f = lambda t, n=n: log_partition_sum(db, t * a, t * b, n)
        # log Z_n(0) = log(d^n - 1) > 0; at 2 hi it is negative
        out.append((n, solve_decreasing(f, 0.0, 2 * hi, tol=ROOT_TOL)))
    return out
