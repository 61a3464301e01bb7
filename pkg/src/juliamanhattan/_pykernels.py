"""Pure numpy kernels, used when the compiled extension is unavailable.

Every function here has the same signature and per-row semantics as its
counterpart in ``_ckernels.pyx``. Rows are processed in lockstep, but each
row follows the same sequence of steps it would follow alone, so results do
not depend on how rows are batched.
"""
import math

import numpy as np


def _ipow(z, e):
    r = z
    for _ in range(e - 1):
        r = r * z
    return r


def _newton_cycle(Z, c, d, tol, maxit):
    """Batch Newton on z_j^d + c - z_{j+1} = 0. Returns (Z, ok)."""
    Z = Z.copy()
    m, p = Z.shape
    ok = np.zeros(m, dtype=bool)
    active = np.ones(m, dtype=bool)
    prev = np.full(m, np.inf)
    with np.errstate(all="ignore"):
        for it in range(maxit):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            z = Z[idx]
            zp = _ipow(z, d - 1)
            a = d * zp
            F = zp * z + c - np.roll(z, -1, axis=1)
            u = np.zeros(idx.size, dtype=np.complex128)
            lam = np.ones(idx.size, dtype=np.complex128)
            for j in range(p):
                u = a[:, j] * u + F[:, j]
                lam = lam * a[:, j]
            D = np.empty_like(z)
            D[:, 0] = u / (1 - lam)
            for j in range(p - 1):
                D[:, j + 1] = a[:, j] * D[:, j] + F[:, j]
            z = z + D
            Z[idx] = z
            norm = np.abs(D).max(axis=1)
            zmax = np.maximum(np.abs(z).max(axis=1), 1.0)
            bad = ~np.isfinite(norm)
            conv = ~bad & (norm <= tol * zmax)
            stall = ~bad & ~conv & (it > 0) & (norm > 0.5 * prev[idx])
            ok[idx[conv]] = True
            active[idx[conv | bad | stall]] = False
            prev[idx] = norm
    return Z, ok


def _cycle_tangent(Z, d):
    m, p = Z.shape
    a = d * _ipow(Z, d - 1)
    u = np.zeros(m, dtype=np.complex128)
    lam = np.ones(m, dtype=np.complex128)
    with np.errstate(all="ignore"):
        for j in range(p):
            u = a[:, j] * u + 1
            lam = lam * a[:, j]
        T = np.empty_like(Z)
        T[:, 0] = u / (1 - lam)
        for j in range(p - 1):
            T[:, j + 1] = a[:, j] * T[:, j] + 1
    return T


def _advance(Z, ca, cb, depth, d, tol, maxit, max_halvings, status, fail_c, rows):
    # predictor-corrector from ca to cb; failing rows bisect the interval
    T = _cycle_tangent(Z, d)
    trial, ok = _newton_cycle(Z + T * (cb - ca), cb, d, tol, maxit)
    out = np.where(ok[:, None], trial, Z)
    bad = np.flatnonzero(~ok)
    if bad.size == 0:
        return out
    if depth >= max_halvings:
        status[rows[bad]] = 1
        fail_c[rows[bad]] = ca
        return out
    mid = 0.5 * (ca + cb)
    sub_rows = rows[bad]
    sub = _advance(Z[bad], ca, mid, depth + 1, d, tol, maxit, max_halvings,
                   status, fail_c, sub_rows)
    alive = status[sub_rows] == 0
    if alive.any():
        sub[alive] = _advance(sub[alive], mid, cb, depth + 1, d, tol, maxit,
                              max_halvings, status, fail_c, sub_rows[alive])
    out[bad] = sub
    return out


def track_cycles(Z0, nodes, d, tol, maxit, max_halvings):
    Z = np.array(Z0, dtype=np.complex128, copy=True)
    m = Z.shape[0]
    status = np.zeros(m, dtype=np.int64)
    fail_c = np.zeros(m, dtype=np.complex128)
    nodes = np.asarray(nodes, dtype=np.complex128)
    if m == 0 or nodes.size < 2:
        return Z, status, fail_c
    rows = np.arange(m)
    for s in range(nodes.size - 1):
        live = status == 0
        if not live.any():
            break
        Z[live] = _advance(Z[live], nodes[s], nodes[s + 1], 0, d, tol, maxit,
                           max_halvings, status, fail_c, rows[live])
    return Z, status, fail_c


def _exponents(lam1, lam2, offsets, a, b, n):
    parts, periods = [], []
    for p in range(1, n + 1):
        if n % p:
            continue
        sl = slice(offsets[p - 1], offsets[p])
        parts.append(math.log(p) - (n // p) * (a * lam1[sl] + b * lam2[sl]))
        periods.append(np.full(parts[-1].size, p))
    return np.concatenate(parts), np.concatenate(periods), \
        np.concatenate([np.arange(offsets[p - 1], offsets[p])
                        for p in range(1, n + 1) if n % p == 0])


def log_partition_sums(lam1, lam2, offsets, a, b, nmax):
    out = np.empty(nmax)
    for n in range(1, nmax + 1):
        x, _, _ = _exponents(lam1, lam2, offsets, a, b, n)
        if x.size == 0:
            out[n - 1] = -np.inf
            continue
        mx = x.max()
        out[n - 1] = mx + math.log(math.fsum(np.exp(x - mx)))
    return out


def gibbs_averages(lam1, lam2, offsets, a, b, n):
    x, per, idx = _exponents(lam1, lam2, offsets, a, b, n)
    mx = x.max()
    e = np.exp(x - mx)
    s = math.fsum(e)
    s1 = math.fsum(e * lam1[idx] / per)
    s2 = math.fsum(e * lam2[idx] / per)
    return mx + math.log(s), s1 / s, s2 / s
