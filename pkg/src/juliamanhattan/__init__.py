"""Thermodynamic formalism for pairs of unicritical polynomials z**d + c.

Marked periodic orbits are enumerated by continuation from the power map.
From their multipliers the package computes pressure, Bowen roots
(Hausdorff dimension), the Manhattan curve and its slope -1 point, and
counting statistics of the multiplier spectrum.
"""
from .counting import (CorrelationBin, CountingRecord, assumption_b_witness, count_N_T,
                       correlation_bins, counting_report, fit_correlation_exponent,
                       log_integral)
from .errors import (BracketError, CapExceededError, CollisionError, ContinuationError,
                     InsufficientDataError, InvariantViolation, JuliaManhattanError,
                     NonHyperbolicError, NumericalFailure, UsageError)
from .io import load_database, save_database
from .kernels import BACKEND
from .maps import (HyperbolicityEvidence, UnicriticalMap, classify_critical_orbit, evaluate,
                   iterate_with_log_derivative)
from .orbits import (Marking, MarkedOrbit, OrbitDatabase, TrackingConfig, build_database,
                     seeds_at_center, track_path, verify_database)
from .thermo import (CurveSample, PressureEstimate, bowen_root, correlation_point,
                     critical_exponent, gibbs_slope, log_partition_sum, manhattan_curve,
                     manhattan_sample, pressure)

__version__ = "0.1.0"
