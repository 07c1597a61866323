# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the dense-table kernels.

Mirrors the calling convention of ``_kernels_py`` exactly; see that module
for the semantics.  Tables here are tiny (a handful of axes with small
cardinalities), so the win over numpy comes from skipping per-call array
machinery, not from vectorization.
"""

import numpy as np

cimport numpy as cnp

NAME = "cython"

DEF MAX_AXES = 32


def multiply(const cnp.int64_t[::1] dims, const double[::1] a, const cnp.int64_t[::1] a_strides,
             const double[::1] b, const cnp.int64_t[::1] b_strides):
    cdef Py_ssize_t k = dims.shape[0]
    if k > MAX_AXES:
        raise ValueError("too many axes")
    cdef Py_ssize_t n = 1, d, i
    for d in range(k):
        n *= dims[d]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t ctr[MAX_AXES]
    cdef Py_ssize_t ai = 0, bi = 0
    for d in range(k):
        ctr[d] = 0
    for i in range(n):
        out[i] = a[ai] * b[bi]
        d = k - 1
        while d >= 0:
            ctr[d] += 1
            ai += a_strides[d]
            bi += b_strides[d]
            if ctr[d] < dims[d]:
                break
            ctr[d] = 0
            ai -= dims[d] * a_strides[d]
            bi -= dims[d] * b_strides[d]
            d -= 1
    return out_arr


def sum_out(const cnp.int64_t[::1] dims, const double[::1] values, const cnp.int64_t[::1] keep_mask):
    cdef Py_ssize_t k = dims.shape[0]
    if k > MAX_AXES:
        raise ValueError("too many axes")
    cdef Py_ssize_t n = 1, out_size = 1, d, i
    cdef Py_ssize_t out_strides[MAX_AXES]
    for d in range(k):
        n *= dims[d]
    # canonical strides of the kept-axes layout, computed right to left
    cdef Py_ssize_t acc = 1
    for d in range(k - 1, -1, -1):
        if keep_mask[d]:
            out_strides[d] = acc
            acc *= dims[d]
        else:
            out_strides[d] = 0
    out_size = acc
    out_arr = np.zeros(out_size, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t ctr[MAX_AXES]
    cdef Py_ssize_t oi = 0
    for d in range(k):
        ctr[d] = 0
    for i in range(n):
        out[oi] += values[i]
        d = k - 1
        while d >= 0:
            ctr[d] += 1
            oi += out_strides[d]
            if ctr[d] < dims[d]:
                break
            ctr[d] = 0
            oi -= dims[d] * out_strides[d]
            d -= 1
    return out_arr


def divide(const cnp.int64_t[::1] dims, const double[::1] num, const double[::1] den,
           const cnp.int64_t[::1] den_strides):
    cdef Py_ssize_t k = dims.shape[0]
    if k > MAX_AXES:
        raise ValueError("too many axes")
    cdef Py_ssize_t n = 1, d, i
    for d in range(k):
        n *= dims[d]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t ctr[MAX_AXES]
    cdef Py_ssize_t di = 0, bad = -1
    cdef double dv
    for d in range(k):
        ctr[d] = 0
    for i in range(n):
        dv = den[di]
        if dv == 0.0:
            out[i] = 0.0
            if num[i] != 0.0 and bad < 0:
                bad = i
        else:
            out[i] = num[i] / dv
        d = k - 1
        while d >= 0:
            ctr[d] += 1
            di += den_strides[d]
            if ctr[d] < dims[d]:
                break
            ctr[d] = 0
            di -= dims[d] * den_strides[d]
            d -= 1
    return out_arr, bad


def weighted_marginal(const cnp.int64_t[::1] dims, const double[::1] table,
                      const double[:, ::1] incoming, Py_ssize_t keep_axis):
    cdef Py_ssize_t k = dims.shape[0]
    if k > MAX_AXES:
        raise ValueError("too many axes")
    cdef Py_ssize_t n = 1, d, i
    for d in range(k):
        n *= dims[d]
    out_arr = np.zeros(dims[keep_axis], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t ctr[MAX_AXES]
    cdef double w
    for d in range(k):
        ctr[d] = 0
    for i in range(n):
        w = table[i]
        for d in range(k):
            w *= incoming[d, ctr[d]]
        out[ctr[keep_axis]] += w
        d = k - 1
        while d >= 0:
            ctr[d] += 1
            if ctr[d] < dims[d]:
                break
            ctr[d] = 0
            d -= 1
    return out_arr
