# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled greedy-selection kernels.

Same contracts as grfactive._fast_py; operates in place on the full
covariance buffer so a whole greedy run allocates nothing per step.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport NAN

cnp.import_array()


def candidate_reductions(double[:, ::1] sigma, double diag_tol,
                         cnp.intp_t[::1] cand, cnp.intp_t[::1] test,
                         bint survey):
    # sigma is symmetric, so the candidate's column is read as its row,
    # keeping the inner loop on contiguous memory
    cdef Py_ssize_t m = cand.shape[0]
    cdef Py_ssize_t nt = test.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t ci, ti
    cdef cnp.intp_t v
    cdef double acc, pivot, x
    with nogil:
        for ci in range(m):
            v = cand[ci]
            pivot = sigma[v, v]
            if pivot <= diag_tol:
                out[ci] = NAN
                continue
            acc = 0.0
            if survey:
                for ti in range(nt):
                    acc += sigma[v, test[ti]]
                out[ci] = acc * acc / pivot
            else:
                for ti in range(nt):
                    x = sigma[v, test[ti]]
                    acc += x * x
                out[ci] = acc / pivot
    return out_arr


def downdate(double[:, ::1] sigma, Py_ssize_t pos):
    cdef Py_ssize_t n = sigma.shape[0]
    row_arr = np.array(sigma[pos, :], copy=True)
    cdef double[::1] row = row_arr
    cdef double pivot = row[pos]
    cdef Py_ssize_t i, j
    cdef double c
    with nogil:
        for i in range(n):
            c = sigma[i, pos] / pivot
            if c != 0.0:
                for j in range(n):
                    sigma[i, j] -= c * row[j]
        for i in range(n):
            sigma[pos, i] = 0.0
            sigma[i, pos] = 0.0
