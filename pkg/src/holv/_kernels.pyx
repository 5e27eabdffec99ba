# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled dense contraction kernels.

Summation runs in ascending multi-index order over the flat row-major
entry array, so results are bit-reproducible and independent of BLAS.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def tvp(cnp.ndarray entries, cnp.ndarray x):
    cdef int m = entries.ndim
    cdef int n = entries.shape[0]
    cdef const double[::1] a = np.ascontiguousarray(entries, dtype=np.float64).ravel()
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t total = a.shape[0]
    cdef Py_ssize_t flat
    cdef int idx[8]
    cdef int q
    cdef double prod
    for q in range(m):
        idx[q] = 0
    for flat in range(total):
        prod = a[flat]
        for q in range(1, m):
            prod *= xv[idx[q]]
        ov[idx[0]] += prod
        # odometer increment, last index fastest (row-major ascending)
        q = m - 1
        while q >= 0:
            idx[q] += 1
            if idx[q] < n:
                break
            idx[q] = 0
            q -= 1
    return out


def tvp_jacobian(cnp.ndarray entries, cnp.ndarray x):
    cdef int m = entries.ndim
    cdef int n = entries.shape[0]
    if m == 2:
        return np.array(entries, dtype=np.float64, copy=True)
    cdef const double[::1] a = np.ascontiguousarray(entries, dtype=np.float64).ravel()
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] J = out
    cdef Py_ssize_t total = a.shape[0]
    cdef Py_ssize_t flat
    cdef int idx[8]
    cdef int p, q
    cdef double v, prod
    for q in range(m):
        idx[q] = 0
    for flat in range(total):
        v = a[flat]
        if v != 0.0:
            for p in range(1, m):
                prod = v
                for q in range(1, m):
                    if q != p:
                        prod *= xv[idx[q]]
                J[idx[0], idx[p]] += prod
        q = m - 1
        while q >= 0:
            idx[q] += 1
            if idx[q] < n:
                break
            idx[q] = 0
            q -= 1
    return out
