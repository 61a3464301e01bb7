# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: periodic-cycle continuation and orbit partition sums.

Mirrors :mod:`juliamanhattan._pykernels` operation for operation; the two
are interchangeable and selected in :mod:`juliamanhattan.kernels`.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, fabs, INFINITY, isfinite
from libc.stdlib cimport malloc, free

ctypedef double complex cplx

cnp.import_array()


cdef inline cplx ipow(cplx z, int e) noexcept nogil:
    cdef cplx r = z
    cdef int k
    for k in range(e - 1):
        r = r * z
    return r


cdef inline double cabs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef int newton_cycle(cplx* z, int p, cplx c, int d, double tol, int maxit,
                      cplx* a, cplx* F, cplx* D) noexcept nogil:
    # Newton on the cyclic system z_j^d + c - z_{j+1} = 0, j mod p
    cdef int it, j
    cdef cplx zp, u, lam
    cdef double norm, prev = INFINITY, zmax, m
    for it in range(maxit):
        for j in range(p - 1):
            zp = ipow(z[j], d - 1)
            a[j] = d * zp
            F[j] = zp * z[j] + c - z[j + 1]
        zp = ipow(z[p - 1], d - 1)
        a[p - 1] = d * zp
        F[p - 1] = zp * z[p - 1] + c - z[0]
        u = 0
        lam = 1
        for j in range(p):
            u = a[j] * u + F[j]
            lam = lam * a[j]
        D[0] = u / (1 - lam)
        for j in range(p - 1):
            D[j + 1] = a[j] * D[j] + F[j]
        norm = 0.0
        zmax = 1.0
        # squared magnitudes throughout
        for j in range(p):
            z[j] = z[j] + D[j]
            m = cabs2(D[j])
            if not (m <= norm):
                norm = m
            m = cabs2(z[j])
            if m > zmax:
                zmax = m
        if not isfinite(norm):
            return 1
        if norm <= tol * tol * zmax:
            return 0
        if it > 0 and norm > 0.25 * prev:
            return 1
        prev = norm
    return 1


cdef void cycle_tangent(cplx* z, int p, int d, cplx* a, cplx* T) noexcept nogil:
    # dz/dc along the cycle: T_{j+1} = a_j T_j + 1, closed around the cycle
    cdef int j
    cdef cplx u = 0, lam = 1
    for j in range(p):
        a[j] = d * ipow(z[j], d - 1)
        u = a[j] * u + 1
        lam = lam * a[j]
    T[0] = u / (1 - lam)
    for j in range(p - 1):
        T[j + 1] = a[j] * T[j] + 1


cdef int track_one(cplx* z, int p, cplx* nodes, int k, int d, double tol,
                   int maxit, int max_halvings, cplx* fail_c,
                   cplx* a, cplx* F, cplx* D, cplx* T, cplx* trial,
                   cplx* stack_c, int* stack_depth) noexcept nogil:
    cdef int s, j, top, depth
    cdef cplx cur, tgt
    for s in range(k - 1):
        cur = nodes[s]
        top = 1
        stack_c[0] = nodes[s + 1]
        stack_depth[0] = 0
        while top > 0:
            tgt = stack_c[top - 1]
            depth = stack_depth[top - 1]
            cycle_tangent(z, p, d, a, T)
            for j in range(p):
                trial[j] = z[j] + T[j] * (tgt - cur)
            if newton_cycle(trial, p, tgt, d, tol, maxit, a, F, D) == 0:
                for j in range(p):
                    z[j] = trial[j]
                cur = tgt
                top -= 1
            else:
                if depth >= max_halvings:
                    fail_c[0] = cur
                    return 1
                stack_depth[top - 1] = depth + 1
                stack_c[top] = 0.5 * (cur + tgt)
                stack_depth[top] = depth + 1
                top += 1
    return 0


def track_cycles(cplx[:, ::1] Z0, cplx[::1] nodes, int d, double tol,
                 int maxit, int max_halvings):
    """Continue each row of ``Z0`` (a period-p cycle) along the parameter nodes.

    Returns ``(Z, status, fail_c)``; ``status[i] != 0`` marks a row whose
    continuation failed at parameter ``fail_c[i]``.
    """
    cdef Py_ssize_t m = Z0.shape[0]
    cdef int p = <int>Z0.shape[1]
    cdef int k = <int>nodes.shape[0]
    Z_arr = np.array(Z0, dtype=np.complex128, copy=True)
    status_arr = np.zeros(m, dtype=np.int64)
    fail_arr = np.zeros(m, dtype=np.complex128)
    cdef cplx[:, ::1] Z = Z_arr
    cdef cnp.int64_t[::1] status = status_arr
    cdef cplx[::1] fail_c = fail_arr
    if m == 0 or k < 2:
        return Z_arr, status_arr, fail_arr
    cdef cplx* buf = <cplx*>malloc((5 * p + max_halvings + 2) * sizeof(cplx))
    cdef int* stack_depth = <int*>malloc((max_halvings + 2) * sizeof(int))
    if buf == NULL or stack_depth == NULL:
        free(buf)
        free(stack_depth)
        raise MemoryError()
    cdef Py_ssize_t i
    try:
        with nogil:
            for i in range(m):
                status[i] = track_one(&Z[i, 0], p, &nodes[0], k, d, tol, maxit,
                                      max_halvings, &fail_c[i],
                                      buf, buf + p, buf + 2 * p, buf + 3 * p,
                                      buf + 4 * p, buf + 5 * p, stack_depth)
    finally:
        free(buf)
        free(stack_depth)
    return Z_arr, status_arr, fail_arr


cdef inline void neumaier_add(double* s, double* comp, double x) noexcept nogil:
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        comp[0] += (s[0] - t) + x
    else:
        comp[0] += (x - t) + s[0]
    s[0] = t


def log_partition_sums(const double[::1] lam1, const double[::1] lam2,
                       const cnp.int64_t[::1] offsets, double a, double b,
                       int nmax):
    """``log Z_n`` for n = 1..nmax from primitive-orbit log-multipliers.

    Block ``p`` occupies ``offsets[p-1]:offsets[p]``.
    """
    out_arr = np.empty(nmax, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef int n, p, m
    cdef Py_ssize_t i
    cdef double mx, x, lp, s, comp
    with nogil:
        for n in range(1, nmax + 1):
            mx = -INFINITY
            for p in range(1, n + 1):
                if n % p:
                    continue
                m = n // p
                lp = log(<double>p)
                for i in range(offsets[p - 1], offsets[p]):
                    x = lp - m * (a * lam1[i] + b * lam2[i])
                    if x > mx:
                        mx = x
            if mx == -INFINITY:
                out[n - 1] = -INFINITY
                continue
            s = 0.0
            comp = 0.0
            for p in range(1, n + 1):
                if n % p:
                    continue
                m = n // p
                lp = log(<double>p)
                for i in range(offsets[p - 1], offsets[p]):
                    x = lp - m * (a * lam1[i] + b * lam2[i])
                    neumaier_add(&s, &comp, exp(x - mx))
            out[n - 1] = mx + log(s + comp)
    return out_arr


def gibbs_averages(const double[::1] lam1, const double[::1] lam2,
                   const cnp.int64_t[::1] offsets, double a, double b, int n):
    """Period-n Gibbs averages of the per-step log-derivatives of both maps.

    Returns ``(log Z_n, <tau_1>, <tau_2>)``.
    """
    cdef int p, m
    cdef Py_ssize_t i
    cdef double mx = -INFINITY, x, e, lp
    cdef double s = 0.0, cs = 0.0, s1 = 0.0, c1 = 0.0, s2 = 0.0, c2 = 0.0
    with nogil:
        for p in range(1, n + 1):
            if n % p:
                continue
            m = n // p
            lp = log(<double>p)
            for i in range(offsets[p - 1], offsets[p]):
                x = lp - m * (a * lam1[i] + b * lam2[i])
                if x > mx:
                    mx = x
        for p in range(1, n + 1):
            if n % p:
                continue
            m = n // p
            lp = log(<double>p)
            for i in range(offsets[p - 1], offsets[p]):
                x = lp - m * (a * lam1[i] + b * lam2[i])
                e = exp(x - mx)
                neumaier_add(&s, &cs, e)
                neumaier_add(&s1, &c1, e * lam1[i] / p)
                neumaier_add(&s2, &c2, e * lam2[i] / p)
    s += cs
    return mx + log(s), (s1 + c1) / s, (s2 + c2) / s
