# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Fused single-pass evaluation of a term table over point arrays."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow

cnp.import_array()


cdef inline double _ipow(double x, long n) noexcept nogil:
    cdef double result = 1.0
    cdef bint neg = n < 0
    if neg:
        n = -n
    while n:
        if n & 1:
            result *= x
        x *= x
        n >>= 1
    return 1.0 / result if neg else result


cdef inline double _pw(double x, double e, long ie, bint is_int) noexcept nogil:
    if e == 0.0:
        return 1.0
    if is_int:
        return _ipow(x, ie)
    return pow(x, e)


def eval_terms(const double[::1] coeffs, const double[:, ::1] exps,
               const double[::1] x1, const double[::1] x2, const double[::1] x3, const double[::1] s,
               double tstar):
    cdef Py_ssize_t n = x1.shape[0]
    cdef Py_ssize_t m = coeffs.shape[0]
    cdef Py_ssize_t i, j, c
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    iexp_arr = np.zeros((m, 5), dtype=np.int_)
    isint_arr = np.zeros((m, 5), dtype=np.uint8)
    pref_arr = np.empty(m, dtype=np.float64)
    cdef long[:, ::1] iexp = iexp_arr
    cdef unsigned char[:, ::1] isint = isint_arr
    cdef double[::1] pref = pref_arr
    cdef double e, acc, term, R
    for j in range(m):
        pref[j] = coeffs[j] * (pow(tstar, exps[j, 5]) if exps[j, 5] != 0.0 else 1.0)
        for c in range(5):
            e = exps[j, c]
            if e == <double>(<long>e):
                isint[j, c] = 1
                iexp[j, c] = <long>e
    with nogil:
        for i in range(n):
            R = x1[i] * x1[i] + x2[i] * x2[i]
            acc = 0.0
            for j in range(m):
                term = pref[j]
                term *= _pw(x1[i], exps[j, 0], iexp[j, 0], isint[j, 0])
                term *= _pw(x2[i], exps[j, 1], iexp[j, 1], isint[j, 1])
                term *= _pw(x3[i], exps[j, 2], iexp[j, 2], isint[j, 2])
                term *= _pw(R, exps[j, 3], iexp[j, 3], isint[j, 3])
                term *= _pw(s[i], exps[j, 4], iexp[j, 4], isint[j, 4])
                acc += term
            out[i] = acc
    return out_arr
