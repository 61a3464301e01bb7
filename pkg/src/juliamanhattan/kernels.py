"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation. ``JULIAMANHATTAN_BACKEND=python`` forces the fallback.
"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

if _ckernels is not None and os.environ.get("JULIAMANHATTAN_BACKEND", "").lower() != "python":
    _impl = _ckernels
    BACKEND = "cython"
else:
    _impl = _pykernels
    BACKEND = "python"


def get_backend(name=None):
    """Return the kernel module called ``name`` ("cython" or "python")."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built")
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def default_threads():
    value = os.environ.get("JULIAMANHATTAN_THREADS")
    if not value or value == "auto":
        return os.cpu_count() or 1
    return max(1, int(value))


def track_cycles(Z0, nodes, d, tol, maxit, max_halvings, threads=1, backend=None):
    """Continue a batch of cycles; rows are split across ``threads`` workers.

    Rows are independent, so the result is identical for any thread count.
    """
    impl = get_backend(backend)
    Z0 = np.ascontiguousarray(Z0, dtype=np.complex128)
    nodes = np.ascontiguousarray(nodes, dtype=np.complex128)
    m = Z0.shape[0]
    if threads <= 1 or m < 256:
        return impl.track_cycles(Z0, nodes, d, tol, maxit, max_halvings)
    bounds = np.linspace(0, m, 4 * threads + 1).astype(int)
    chunks = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(
            lambda lh: impl.track_cycles(Z0[lh[0]:lh[1]], nodes, d, tol, maxit, max_halvings),
            chunks,
        ))
    return (np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]),
            np.concatenate([p[2] for p in parts]))


def log_partition_sums(lam1, lam2, offsets, a, b, nmax, backend=None):
    return get_backend(backend).log_partition_sums(lam1, lam2, offsets, float(a), float(b), int(nmax))


def gibbs_averages(lam1, lam2, offsets, a, b, n, backend=None):
    return get_backend(backend).gibbs_averages(lam1, lam2, offsets, float(a), float(b), int(n))
