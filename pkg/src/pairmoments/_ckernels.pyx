# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluation of the pairwise-difference moment kernels.

Semantics match ``_kernels_pure`` (same recursions, same bases); only the
evaluation strategy differs: scalar C recursion with a per-row memo table,
looped over rows without the GIL.
"""

from libc.string cimport memset

import numpy as np

DEF KCAP = 16
DEF MEMO = (KCAP + 1) * (KCAP + 1)

KIND_MINIMAL = 0
KIND_RAW = 1
KIND_EVEN = 2
KIND_PRODUCT = 3

cdef double _CHOOSE[MEMO]


cdef void _init_choose() noexcept:
    cdef int n, j
    for n in range(KCAP + 1):
        for j in range(KCAP + 1):
            _CHOOSE[n * (KCAP + 1) + j] = 0.0
    _CHOOSE[0] = 1.0
    for n in range(1, KCAP + 1):
        _CHOOSE[n * (KCAP + 1)] = 1.0
        for j in range(1, n + 1):
            _CHOOSE[n * (KCAP + 1) + j] = (
                _CHOOSE[(n - 1) * (KCAP + 1) + j - 1]
                + _CHOOSE[(n - 1) * (KCAP + 1) + j]
            )


_init_choose()


cdef inline double _powi(double b, int e) noexcept nogil:
    cdef double r = 1.0
    cdef int i
    for i in range(e):
        r *= b
    return r


cdef double _rec(const double* x, int off, int a, double* memo,
                 signed char* have, bint sym3) noexcept nogil:
    cdef int idx = off * (KCAP + 1) + a
    if have[idx]:
        return memo[idx]
    cdef double v, d12, d13, d34
    cdef int j
    cdef double sign
    if a == 1:
        v = 0.0
    elif a == 2:
        d12 = x[off] - x[off + 1]
        v = 0.5 * d12 * d12
    elif a == 3:
        d12 = x[off] - x[off + 1]
        if sym3:
            v = 0.5 * d12 * d12 * ((x[off] - x[off + 2]) + (x[off + 1] - x[off + 2]))
        else:
            v = (x[off] - x[off + 2]) * d12 * d12
    elif a == 4:
        d12 = x[off] - x[off + 1]
        d34 = x[off + 2] - x[off + 3]
        v = 0.5 * _powi(d12, 4) - 0.75 * d12 * d12 * d34 * d34
    else:
        d12 = x[off] - x[off + 1]
        d13 = x[off] - x[off + 2]
        v = d13 * _powi(d12, a - 1)
        for j in range(2, a - 1):
            sign = -1.0 if j & 1 else 1.0
            v = v - sign * _CHOOSE[(a - 1) * (KCAP + 1) + j] \
                * _rec(x, off, j, memo, have, sym3) \
                * _rec(x, off + j, a - j, memo, have, sym3)
    memo[idx] = v
    have[idx] = 1
    return v


cdef double _even(const double* x, int a, double* memo,
                  signed char* have) noexcept nogil:
    cdef double d12 = x[0] - x[1]
    cdef double acc = _powi(d12, a)
    cdef int j
    cdef double sign
    for j in range(2, a - 1):
        sign = -1.0 if j & 1 else 1.0
        acc = acc - sign * _CHOOSE[a * (KCAP + 1) + j] \
            * _rec(x, 0, j, memo, have, 0) \
            * _rec(x, j, a - j, memo, have, 0)
    return 0.5 * acc


cdef double _product(const double* x, int a) noexcept nogil:
    cdef double v = 1.0
    cdef int i
    for i in range(1, a):
        v *= x[0] - x[i]
    return v


cdef inline double _dispatch(const double* x, int kind, int k, double* memo,
                             signed char* have) noexcept nogil:
    if kind == 0:
        return _rec(x, 0, k, memo, have, 1)
    elif kind == 1:
        if k == 1:
            return 0.0
        return _rec(x, 0, k, memo, have, 0)
    elif kind == 2:
        return _even(x, k, memo, have)
    else:
        return _product(x, k + 1)


cdef int _arity(int kind, int k) noexcept:
    return k + 1 if kind == 3 else k


def kernel_value(int kind, int k, double[::1] x):
    """Evaluate one kernel on a single tuple."""
    if kind < 0 or kind > 3:
        raise ValueError("unknown kernel kind id")
    if k < 1 or k > KCAP:
        raise ValueError("order outside the compiled cap")
    if x.shape[0] != _arity(kind, k):
        raise ValueError("tuple length does not match the kernel arity")
    cdef double memo[MEMO]
    cdef signed char have[MEMO]
    memset(have, 0, MEMO)
    return _dispatch(&x[0], kind, k, memo, have)


def kernel_values(int kind, int k, double[:, ::1] X):
    """Evaluate one kernel on every row of a C-contiguous batch."""
    if kind < 0 or kind > 3:
        raise ValueError("unknown kernel kind id")
    if k < 1 or k > KCAP:
        raise ValueError("order outside the compiled cap")
    if X.shape[1] != _arity(kind, k):
        raise ValueError("row length does not match the kernel arity")
    cdef Py_ssize_t n = X.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double memo[MEMO]
    cdef signed char have[MEMO]
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            memset(have, 0, MEMO)
            o[i] = _dispatch(&X[i, 0], kind, k, memo, have)
    return out
