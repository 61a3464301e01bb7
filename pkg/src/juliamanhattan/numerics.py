"""Scalar root finding, golden-section search and Aitken extrapolation."""
import math

from .errors import BracketError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def aitken(s0, s1, s2):
    """Aitken delta-squared limit of three consecutive terms.

    Falls back to ``s2`` when the second difference vanishes.
    """
    d1 = s2 - s1
    den = d1 - (s1 - s0)
    if den == 0.0 or not math.isfinite(den):
        return s2
    return s2 - d1 * d1 / den


def solve_decreasing(f, lo, hi, tol=1e-9, bisect_width=1e-3, maxiter=200):
    """Root of a decreasing function on ``[lo, hi]``.

    Bisection until the bracket is narrower than ``bisect_width``, then
    secant steps safeguarded by the bracket, stopping when a step is below
    ``tol``.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (flo > 0.0 > fhi):
        raise BracketError(
            f"no sign change on [{lo:.6g}, {hi:.6g}]: f = ({flo:.6g}, {fhi:.6g})")
    while hi - lo > bisect_width:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if fm > 0.0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    x0, f0 = lo, flo
    x1, f1 = hi, fhi
    for _ in range(maxiter):
        if f1 == f0:
            x2 = 0.5 * (lo + hi)
        else:
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
            if not (lo < x2 < hi):
                x2 = 0.5 * (lo + hi)
        f2 = f(x2)
        if f2 == 0.0:
            return x2
        if f2 > 0.0:
            lo, flo = x2, f2
        else:
            hi, fhi = x2, f2
        if abs(x2 - x1) < tol or hi - lo < tol:
            return x2
        x0, f0, x1, f1 = x1, f1, x2, f2
    return x1


def golden_section_min(g, lo, hi, tol=1e-6):
    """Minimiser of a unimodal function on ``[lo, hi]`` to width ``tol``.

    Returns ``(x, g(x))`` for the best point evaluated.
    """
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    g1, g2 = g(x1), g(x2)
    while hi - lo > tol:
        if g1 <= g2:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - GOLDEN * (hi - lo)
            g1 = g(x1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + GOLDEN * (hi - lo)
            g2 = g(x2)
    return (x1, g1) if g1 <= g2 else (x2, g2)
