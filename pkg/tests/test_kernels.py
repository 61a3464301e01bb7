import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import logsumexp

from juliamanhattan import _pykernels, kernels
from juliamanhattan.errors import BracketError
from juliamanhattan.numerics import aitken, golden_section_min, solve_decreasing
from juliamanhattan.orbits import path_nodes, primitive_cycle_indices

compiled = pytest.mark.skipif(kernels.BACKEND != "cython", reason="extension not built")


def _cycles(n, c):
    rows = primitive_cycle_indices(2, n)
    return np.exp(2j * np.pi * rows / (2 ** n - 1)), path_nodes([0, c])


@compiled
@pytest.mark.parametrize("n, c", [(1, 0.2), (6, 0.05 + 0.1j), (11, -0.3)])
def test_track_cycles_parity(n, c):
    Z0, nodes = _cycles(n, c)
    a = kernels.track_cycles(Z0, nodes, 2, 1e-11, 50, 20, backend="python")
    b = kernels.track_cycles(Z0, nodes, 2, 1e-11, 50, 20, backend="cython")
    assert np.array_equal(a[1], b[1])
    assert np.max(np.abs(a[0] - b[0])) < 1e-13


@compiled
def test_track_cycles_failure_parity():
    # -0.75 is parabolic for the 2-cycle; both backends fail on the same row
    Z0, nodes = _cycles(2, -0.8)
    for name in ("python", "cython"):
        Z, status, fail_c = kernels.track_cycles(Z0, nodes, 2, 1e-11, 50, 20, backend=name)
        assert status.tolist() == [1]
        assert fail_c[0].real == pytest.approx(-0.75, abs=1e-6)


def test_track_cycles_trivial_inputs():
    Z0 = np.ones((0, 3), dtype=complex)
    Z, status, _ = kernels.track_cycles(Z0, np.array([0, 0.1]), 2, 1e-11, 50, 20)
    assert Z.shape == (0, 3) and status.size == 0
    Z1 = np.ones((1, 1), dtype=complex)
    Z, _, _ = kernels.track_cycles(Z1, np.array([0j]), 2, 1e-11, 50, 20)
    assert Z[0, 0] == 1


def test_thread_chunks_are_deterministic():
    Z0, nodes = _cycles(10, 0.05)
    a = kernels.track_cycles(Z0, nodes, 2, 1e-11, 50, 20, threads=1)[0]
    b = kernels.track_cycles(Z0, nodes, 2, 1e-11, 50, 20, threads=5)[0]
    assert np.array_equal(a, b)


def _brute_log_z(lam1, lam2, periods, a, b, n):
    terms = [math.log(p) - (n // p) * (a * l1 + b * l2)
             for l1, l2, p in zip(lam1, lam2, periods) if n % p == 0]
    return logsumexp(terms) if terms else -math.inf


@pytest.mark.parametrize("name", ["python", pytest.param("cython", marks=compiled)])
def test_partition_sums_against_logsumexp(name):
    rng = np.random.default_rng(1)
    periods = np.repeat(np.arange(1, 9), [1, 1, 2, 3, 6, 9, 18, 30])
    lam1 = periods * rng.uniform(0.6, 0.8, periods.size)
    lam2 = periods * rng.uniform(0.6, 0.8, periods.size)
    offsets = np.concatenate([[0], np.cumsum(np.bincount(periods)[1:])]).astype(np.int64)
    out = kernels.log_partition_sums(lam1, lam2, offsets, 0.3, 0.9, 8, backend=name)
    for n in range(1, 9):
        assert out[n - 1] == pytest.approx(_brute_log_z(lam1, lam2, periods, 0.3, 0.9, n),
                                           abs=1e-13)
    logz, t1, t2 = kernels.gibbs_averages(lam1, lam2, offsets, 0.3, 0.9, 8, backend=name)
    assert logz == pytest.approx(out[7], abs=1e-13)
    w = np.array([math.log(p) - (8 // p) * (0.3 * x + 0.9 * y) if 8 % p == 0 else -np.inf
                  for x, y, p in zip(lam1, lam2, periods)])
    w = np.exp(w - w.max())
    assert t1 == pytest.approx(np.sum(w * lam1 / periods) / w.sum(), rel=1e-13)
    assert t2 == pytest.approx(np.sum(w * lam2 / periods) / w.sum(), rel=1e-13)


def test_partition_sum_empty_level():
    offsets = np.array([0, 0, 1], dtype=np.int64)
    out = _pykernels.log_partition_sums(np.array([1.0]), np.array([1.0]), offsets, 1, 0, 2)
    assert out[0] == -math.inf and out[1] == pytest.approx(math.log(2) - 1)


def test_backend_lookup():
    assert kernels.get_backend("python") is _pykernels
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_default_threads(monkeypatch):
    monkeypatch.setenv("JULIAMANHATTAN_THREADS", "3")
    assert kernels.default_threads() == 3
    monkeypatch.delenv("JULIAMANHATTAN_THREADS")
    assert kernels.default_threads() >= 1


# ------------------------------------------------------------ numerics

@settings(max_examples=50, deadline=None)
@given(limit=st.floats(-5, 5), amp=st.floats(0.1, 3), q=st.floats(-0.9, 0.9).filter(
    lambda x: abs(x) > 0.05))
def test_aitken_exact_on_geometric(limit, amp, q):
    s = [limit + amp * q ** k for k in range(3)]
    assert aitken(*s) == pytest.approx(limit, abs=1e-9 * (1 + abs(limit)) / (1 - abs(q)) ** 2)


def test_aitken_constant_sequence():
    assert aitken(2.0, 2.0, 2.0) == 2.0


@settings(max_examples=50, deadline=None)
@given(root=st.floats(0.01, 9.99), slope=st.floats(0.01, 100))
def test_solve_decreasing_linear_and_cubic(root, slope):
    assert solve_decreasing(lambda x: slope * (root - x), 0, 10) == pytest.approx(root, abs=1e-9)
    assert solve_decreasing(lambda x: (root - x) ** 3 + (root - x), 0, 10) == \
        pytest.approx(root, abs=1e-8)


def test_solve_decreasing_bracket_error():
    with pytest.raises(BracketError):
        solve_decreasing(lambda x: 1 + x, 0, 1)
    assert solve_decreasing(lambda x: -x, 0, 1) == 0


def test_golden_section():
    x, gx = golden_section_min(lambda a: (a - 0.3) ** 2 + 1, 0, 1, 1e-8)
    assert x == pytest.approx(0.3, abs=1e-7) and gx == pytest.approx(1)
    x, _ = golden_section_min(lambda a: a, 0, 1, 1e-8)
    assert x < 1e-7
