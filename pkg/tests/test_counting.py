import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from juliamanhattan.counting import (CorrelationBin, assumption_b_witness, certified_limit,
                                     correlation_bins, correlation_grid, count_N_T,
                                     counting_report, default_T_grid, fit_correlation_exponent,
                                     is_cohomologous_to_constant, log_integral,
                                     single_map_bins, spectrum_diagnostics)
from juliamanhattan.errors import InsufficientDataError, UncertifiedThresholdError

LOG2 = math.log(2)


def trapezoid_li(x, nodes=1_000_000):
    u = np.linspace(2.0, x, nodes)
    return float(np.trapezoid(1.0 / np.log(u), u))


# ------------------------------------------------------------ log integral

def test_log_integral_values():
    assert log_integral(2) == 0.0
    assert log_integral(math.e ** 2) == pytest.approx(trapezoid_li(math.e ** 2), abs=1e-6)
    assert log_integral(1e4) == pytest.approx(trapezoid_li(1e4), rel=1e-7)
    with pytest.raises(ValueError):
        log_integral(1.5)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(2.0, 1e6), y=st.floats(2.0, 1e6))
def test_log_integral_monotone(x, y):
    if x < y:
        assert log_integral(x) < log_integral(y)


# ------------------------------------------------------------ counts

@pytest.mark.parametrize("T, expected", [(100, 22), (2, 1), (1.5, 0)])
def test_count_power_map(db_power2, T, expected):
    rec = count_N_T(db_power2, 1, T)
    assert rec.N_T == expected
    assert rec.certified


def test_count_oracle_from_necklaces(db_power2):
    # at c = 0 every period-p orbit has lambda = p log 2
    necklace = [1, 1, 2, 3, 6, 9, 18, 30]
    for k in range(1, 9):
        # nudge past the tie: the computed lambda carries round-off
        assert count_N_T(db_power2, 2, 2.0 ** k * (1 + 1e-9)).N_T == sum(necklace[:k])
        assert count_N_T(db_power2, 2, 2.0 ** k * (1 - 1e-9)).N_T == sum(necklace[:k - 1])


def test_count_right_continuous(db_pair):
    lam = np.sort(db_pair.spectrum()[0])
    # conjugate orbits share lambda; use an index with a unique value
    k = next(i for i in range(1, lam.size - 1) if lam[i - 1] < lam[i] < lam[i + 1])
    # a threshold equal to a multiplier modulus counts that orbit
    T = math.exp(lam[k])
    while math.log(T) < lam[k]:
        T = math.nextafter(T, math.inf)
    below = T
    while math.log(below) >= lam[k]:
        below = math.nextafter(below, 0)
    assert count_N_T(db_pair, 1, T).N_T == k + 1
    assert count_N_T(db_pair, 1, below).N_T == k
    with pytest.raises(ValueError):
        count_N_T(db_pair, 1, 1.0)


def test_count_certification_boundary(db_power2):
    limit = certified_limit(db_power2, 1)
    assert limit == pytest.approx(8 * LOG2)
    assert count_N_T(db_power2, 1, math.exp(limit) * 0.99).certified
    assert not count_N_T(db_power2, 1, math.exp(limit)).certified


@settings(max_examples=20, deadline=None)
@given(t1=st.floats(1.01, 50), t2=st.floats(1.01, 50))
def test_count_monotone(db_pair, t1, t2):
    lo, hi = sorted((t1, t2))
    assert count_N_T(db_pair, 1, lo).N_T <= count_N_T(db_pair, 1, hi).N_T


def test_report_flags_power_map(db_power2):
    rep = counting_report(db_power2, 1, [4.0, 16.0, 64.0])
    assert rep.hypothesis_violated
    assert is_cohomologous_to_constant(db_power2, 1)
    assert any("cohomologous" in n for n in rep.notes)
    assert [r.N_T for r in rep.records] == [2, 7, 22]


def test_report_pair(db_pair):
    rep = counting_report(db_pair, 1, default_T_grid(db_pair, 1))
    assert not rep.hypothesis_violated
    assert all(r.certified for r in rep.records)
    ratios = [r.ratio for r in rep.records]
    assert 0.7 <= ratios[-1] <= 1.3
    # the ratio drifts towards 1 from below on this map
    assert ratios[-1] > ratios[1]
    grid = default_T_grid(db_pair, 1)
    assert np.allclose(np.diff(np.log(grid)), LOG2)
    assert math.log(grid[-1]) < certified_limit(db_pair, 1)


def test_report_uncertified(db_pair):
    big = math.exp(certified_limit(db_pair, 1)) * 2
    with pytest.raises(UncertifiedThresholdError):
        counting_report(db_pair, 1, [10.0, big])
    with pytest.warns(RuntimeWarning):
        rep = counting_report(db_pair, 1, [10.0, big], allow_uncertified=True)
    assert [r.certified for r in rep.records] == [True, False]
    with pytest.raises(ValueError):
        counting_report(db_pair, 1, [10.0, 5.0])


# ------------------------------------------------------------ correlation bins

def test_bins_power_map(db_power2):
    T = 3 * LOG2 - 0.1
    assert correlation_bins(db_power2, 0.5, [T])[0].count == 2
    assert correlation_bins(db_power2, 1e-9, [T])[0].count == 0
    with pytest.raises(ValueError):
        correlation_bins(db_power2, 0, [T])


def test_bins_swap_symmetry(db_pair):
    from juliamanhattan.orbits import build_database
    swapped = build_database(2, -0.05, 0.05, 12)
    grid = correlation_grid(db_pair, 0.25)
    assert ([b.count for b in correlation_bins(db_pair, 0.25, grid)]
            == [b.count for b in correlation_bins(swapped, 0.25, grid)])


def test_bins_partition_and_inclusion(db_pair):
    eps = 0.25
    grid = correlation_grid(db_pair, eps)
    joint = correlation_bins(db_pair, eps, grid)
    wide = correlation_bins(db_pair, eps * len(grid), [grid[0]])[0].count
    # adjacent half-open bins never count an orbit twice
    assert sum(b.count for b in joint) <= wide
    for which in (1, 2):
        single = single_map_bins(db_pair, which, eps, grid)
        assert all(j.count <= s.count for j, s in zip(joint, single))
    # single-map bins tile exactly
    lam = db_pair.spectrum()[0]
    tiles = single_map_bins(db_pair, 1, eps, grid)
    total = np.count_nonzero((lam > grid[0]) & (lam <= grid[-1] + eps))
    assert sum(b.count for b in tiles) == total


def test_correlation_grid_range(db_pair):
    grid = correlation_grid(db_pair, 0.25)
    assert grid[0] == pytest.approx(LOG2)
    top = min(certified_limit(db_pair, 1), certified_limit(db_pair, 2))
    assert grid[-1] + 0.25 <= top


# ------------------------------------------------------------ fit

def test_fit_recovers_synthetic_exponent():
    T = np.linspace(2, 12, 41)
    counts = np.rint(1e6 * np.exp(0.6 * T) * T ** -1.5).astype(int)
    bins = [CorrelationBin(float(t), 0.25, int(c)) for t, c in zip(T, counts)]
    fit = fit_correlation_exponent(bins)
    assert fit.alpha_hat == pytest.approx(0.6, abs=1e-3)
    assert fit.n_bins == 41 and not fit.weighted
    wfit = fit_correlation_exponent(bins, poisson=True)
    assert wfit.weighted and wfit.alpha_hat == pytest.approx(0.6, abs=1e-3)


def test_fit_with_noise():
    rng = np.random.default_rng(7)
    T = np.linspace(2, 10, 33)
    counts = rng.poisson(50 * np.exp(0.8 * T) * T ** -1.5)
    bins = [CorrelationBin(float(t), 0.25, int(c)) for t, c in zip(T, counts)]
    fit = fit_correlation_exponent(bins)
    assert abs(fit.alpha_hat - 0.8) < 4 * fit.stderr + 1e-3


def test_fit_insufficient(db_power2):
    # lattice spectrum: only a handful of bins are occupied
    grid = [t for t in correlation_grid(db_power2, 0.05) if t < 4.5 * LOG2]
    bins = correlation_bins(db_power2, 0.05, grid)
    assert sum(b.count > 0 for b in bins) < 5
    with pytest.raises(InsufficientDataError):
        fit_correlation_exponent(bins)


# ------------------------------------------------------------ witness

def test_witness_none_for_equal_maps(db_same, db_power2):
    assert assumption_b_witness(db_same) is None
    assert assumption_b_witness(db_power2) is None


def test_witness_pair(db_pair):
    z, w = assumption_b_witness(db_pair)
    assert z.lambda1 > z.lambda2
    assert w.lambda2 > w.lambda1
    diag = spectrum_diagnostics(db_pair)
    assert diag["max_gap_12"] == pytest.approx(z.lambda1 - z.lambda2)
    assert diag["max_gap_21"] == pytest.approx(w.lambda2 - w.lambda1)
    assert diag["ratio_spread"] > 0
