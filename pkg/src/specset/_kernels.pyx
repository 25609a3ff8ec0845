# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the tree-norm kernels (see ``_kernels_py``)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, isinf
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef inline double _mod(double complex z) nogil:
    # plain sqrt; hypot's overflow guard costs more than the whole norm here
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef inline double _pnorm(double* a, Py_ssize_t k, double p) nogil:
    cdef Py_ssize_t j
    cdef double m = 0.0, s = 0.0, t
    if k == 0:
        return 0.0
    if p == 1.0:
        for j in range(k):
            s += a[j]
        return s
    for j in range(k):
        if a[j] > m:
            m = a[j]
    if isinf(p) or m == 0.0:
        return m
    if p == 2.0:
        for j in range(k):
            t = a[j] / m
            s += t * t
        return m * sqrt(s)
    for j in range(k):
        s += pow(a[j] / m, p)
    return m * pow(s, 1.0 / p)


cdef double _row_norm(const double complex* x,
                      const long long[::1] kind, const double[::1] p,
                      const long long[::1] lo, const long long[::1] hi,
                      const long long[::1] cstart, const long long[::1] cend,
                      const long long[::1] children,
                      double* vals, double* scratch) nogil:
    cdef Py_ssize_t k, j, nn = kind.shape[0]
    for k in range(nn):
        if kind[k] == 0:
            for j in range(lo[k], hi[k]):
                scratch[j - lo[k]] = _mod(x[j])
            vals[k] = _pnorm(scratch, hi[k] - lo[k], p[k])
        else:
            for j in range(cstart[k], cend[k]):
                scratch[j - cstart[k]] = vals[children[j]]
            vals[k] = _pnorm(scratch, cend[k] - cstart[k], p[k])
    return vals[nn - 1]


def tree_norms(X, kind, p, lo, hi, cstart, cend, children):
    cdef const double complex[:, ::1] xv = np.ascontiguousarray(X, dtype=np.complex128)
    cdef const long long[::1] kv = np.ascontiguousarray(kind, dtype=np.int64)
    cdef const double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef const long long[::1] lov = np.ascontiguousarray(lo, dtype=np.int64)
    cdef const long long[::1] hiv = np.ascontiguousarray(hi, dtype=np.int64)
    cdef const long long[::1] csv = np.ascontiguousarray(cstart, dtype=np.int64)
    cdef const long long[::1] cev = np.ascontiguousarray(cend, dtype=np.int64)
    cdef const long long[::1] chv = np.ascontiguousarray(children, dtype=np.int64)
    cdef Py_ssize_t m = xv.shape[0], n = xv.shape[1], r
    cdef Py_ssize_t width = n if n > kv.shape[0] else kv.shape[0]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double* vals = <double*> malloc(kv.shape[0] * sizeof(double))
    cdef double* scratch = <double*> malloc((width + 1) * sizeof(double))
    try:
        with nogil:
            for r in range(m):
                ov[r] = _row_norm(&xv[r, 0], kv, pv, lov, hiv, csv, cev, chv, vals, scratch)
    finally:
        free(vals)
        free(scratch)
    return out


def sweep_max(T, amps, phases, dom_norms, kind, p, lo, hi, cstart, cend, children):
    cdef const double complex[:, ::1] tv = np.ascontiguousarray(T, dtype=np.complex128)
    cdef const double[:, ::1] av = np.ascontiguousarray(amps, dtype=np.float64)
    E = np.ascontiguousarray(np.exp(1j * np.asarray(phases, dtype=np.float64)))
    cdef const double complex[:, ::1] ev = E
    cdef const double[::1] dn = np.ascontiguousarray(dom_norms, dtype=np.float64)
    cdef const long long[::1] kv = np.ascontiguousarray(kind, dtype=np.int64)
    cdef const double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef const long long[::1] lov = np.ascontiguousarray(lo, dtype=np.int64)
    cdef const long long[::1] hiv = np.ascontiguousarray(hi, dtype=np.int64)
    cdef const long long[::1] csv = np.ascontiguousarray(cstart, dtype=np.int64)
    cdef const long long[::1] cev = np.ascontiguousarray(cend, dtype=np.int64)
    cdef const long long[::1] chv = np.ascontiguousarray(children, dtype=np.int64)
    cdef Py_ssize_t n = tv.shape[0], na = av.shape[0], nb = ev.shape[0]
    cdef Py_ssize_t a, b, i, j
    cdef Py_ssize_t width = n if n > kv.shape[0] else kv.shape[0]
    cdef double ratio
    best_arr = np.full(na, -1.0)
    arg_arr = np.full(na, -1, dtype=np.int64)
    cdef double[::1] best = best_arr
    cdef long long[::1] arg = arg_arr
    cdef double complex acc
    cdef double complex* x = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* y = <double complex*> malloc(n * sizeof(double complex))
    cdef double* vals = <double*> malloc(kv.shape[0] * sizeof(double))
    cdef double* scratch = <double*> malloc((width + 1) * sizeof(double))
    try:
        with nogil:
            for a in range(na):
                if dn[a] <= 0.0:
                    continue
                for b in range(nb):
                    for j in range(n):
                        x[j] = av[a, j] * ev[b, j]
                    for i in range(n):
                        acc = 0.0
                        for j in range(n):
                            acc = acc + tv[i, j] * x[j]
                        y[i] = acc
                    ratio = _row_norm(y, kv, pv, lov, hiv, csv, cev, chv, vals, scratch) / dn[a]
                    if ratio > best[a]:
                        best[a] = ratio
                        arg[a] = b
    finally:
        free(x)
        free(y)
        free(vals)
        free(scratch)
    return best_arr, arg_arr
