"""Unicritical polynomials z -> z**d + c and critical-orbit evidence."""
import cmath
import math
from dataclasses import dataclass, replace

from .errors import DerivativeVanishedError, OrbitEscapedError

INFINITY = complex(math.inf, 0.0)

HYPERBOLIC = "hyperbolic-evidence"
INCONCLUSIVE = "inconclusive"
NON_HYPERBOLIC = "non-hyperbolic-evidence"

#: ``min_expansion_rate`` before any orbit has been measured
UNMEASURED = math.inf

CYCLE_TOL = 1e-10
CYCLE_REPEATS = 3
MAX_CYCLE_LAG = 64


@dataclass(frozen=True)
class UnicriticalMap:
    degree: int
    c: complex

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 2:
            raise ValueError(f"degree must be an integer >= 2, got {self.degree!r}")
        c = complex(self.c)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise ValueError(f"parameter c must be finite, got {self.c!r}")
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "c", c)

    @property
    def escape_radius(self):
        return max(2.0, abs(self.c) ** (1.0 / (self.degree - 1)) + 1.0)

    def __call__(self, z):
        return evaluate(self, z)


def _power(z, e):
    r = z
    for _ in range(e - 1):
        r = r * z
    return r


def evaluate(f, z):
    """``z**d + c``; overflow gives :data:`INFINITY` instead of raising."""
    w = _power(complex(z), f.degree) + f.c
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        return INFINITY
    return w


def iterate_with_log_derivative(f, z, n):
    """Iterate ``n`` times, accumulating the derivative of ``f**n`` at ``z``.

    Returns ``(f**n(z), log|(f**n)'(z)|, arg (f**n)'(z))`` with the argument
    in (-pi, pi].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    z = complex(z)
    d = f.degree
    radius = f.escape_radius
    log_abs = 0.0
    unit = 1.0 + 0.0j
    if abs(z) > radius:
        raise OrbitEscapedError(f"|z| = {abs(z):.6g} exceeds escape radius {radius:.6g}")
    for j in range(n):
        factor = d * _power(z, d - 1)
        if factor == 0:
            raise DerivativeVanishedError(f"orbit hits the critical point at step {j}")
        m = abs(factor)
        log_abs += math.log(m)
        unit *= factor / m
        unit /= abs(unit)
        z = evaluate(f, z)
        if abs(z) > radius:
            raise OrbitEscapedError(
                f"|f^{j + 1}(z)| = {abs(z):.6g} exceeds escape radius {radius:.6g}")
    arg = cmath.phase(unit)
    if arg == -math.pi:
        arg = math.pi
    return z, log_abs, arg


@dataclass(frozen=True)
class HyperbolicityEvidence:
    """Heuristic hyperbolicity evidence; never a certificate.

    ``attracting_cycle_period`` is the period of the cycle the critical
    orbit converges to, ``math.inf`` if it escapes, ``None`` if undetected.
    """

    attracting_cycle_period: object
    critical_orbit_iterations_used: int
    min_expansion_rate: float = UNMEASURED
    verdict: str = INCONCLUSIVE
    critical_behaviour: str = "undetected"
    expansion_margin: float = 0.0

    def with_expansion_rate(self, rate):
        return replace(self, min_expansion_rate=float(rate),
                       verdict=_verdict(self.critical_behaviour, rate, self.expansion_margin))


def _verdict(behaviour, rate, margin):
    if behaviour in ("repelling-cycle",):
        return NON_HYPERBOLIC
    if behaviour in ("attracting-cycle", "escape"):
        if math.isfinite(rate) and rate <= margin:
            return NON_HYPERBOLIC
        return HYPERBOLIC
    return INCONCLUSIVE


def classify_critical_orbit(f, budget=10_000, expansion_margin=0.0):
    """Follow the critical point 0 for up to ``budget`` steps.

    Escape beyond the escape radius, or lag-p agreement within 1e-10 for
    three consecutive steps (p <= 64), ends the scan. A detected cycle whose
    multiplier has modulus >= 1 is treated as evidence against hyperbolicity.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    radius = f.escape_radius
    history = [0j]
    streak = [0] * (MAX_CYCLE_LAG + 1)
    z = 0j
    for step in range(1, budget + 1):
        z = evaluate(f, z)
        if abs(z) > radius:
            return HyperbolicityEvidence(math.inf, step, UNMEASURED,
                                         _verdict("escape", UNMEASURED, expansion_margin),
                                         "escape", expansion_margin)
        history.append(z)
        for p in range(1, min(MAX_CYCLE_LAG, step) + 1):
            if abs(z - history[-1 - p]) < CYCLE_TOL:
                streak[p] += 1
                if streak[p] >= CYCLE_REPEATS:
                    mult = _cycle_multiplier(f, z, p)
                    behaviour = "attracting-cycle" if mult < 1.0 else "repelling-cycle"
                    return HyperbolicityEvidence(
                        p, step, UNMEASURED,
                        _verdict(behaviour, UNMEASURED, expansion_margin),
                        behaviour, expansion_margin)
            else:
                streak[p] = 0
    return HyperbolicityEvidence(None, budget, UNMEASURED, INCONCLUSIVE, "undetected",
                                 expansion_margin)


def _cycle_multiplier(f, z, p):
    m = 1.0
    for _ in range(p):
        m *= abs(f.degree * _power(z, f.degree - 1))
        z = evaluate(f, z)
    return m
