# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tensor-interpolant evaluation kernel (same contract as _kernels_py)."""

import numpy as np
from libc.stdlib cimport malloc, free


def eval_tensor(const double[:, ::1] lo, const double[:, ::1] hi,
                const double[:, ::1] values, const double[::1] ynodes,
                const double[::1] weights, const long[::1] cell_idx,
                const double[:, ::1] pts, double[::1] out):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t l = pts.shape[1]
    cdef Py_ssize_t s = ynodes.shape[0]
    cdef Py_ssize_t total = values.shape[1]
    cdef Py_ssize_t i, d, j, k, size, c, hit
    cdef double y, diff, den, acc
    cdef double *B = <double *> malloc(l * s * sizeof(double))
    cdef double *w = <double *> malloc(total * sizeof(double))
    if B == NULL or w == NULL:
        free(B)
        free(w)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                c = cell_idx[i]
                for d in range(l):
                    y = (pts[i, d] - lo[c, d]) / (hi[c, d] - lo[c, d])
                    hit = -1
                    den = 0.0
                    for j in range(s):
                        diff = y - ynodes[j]
                        if diff == 0.0:
                            hit = j
                            break
                        B[d * s + j] = weights[j] / diff
                        den = den + B[d * s + j]
                    if hit >= 0:
                        for j in range(s):
                            B[d * s + j] = 0.0
                        B[d * s + hit] = 1.0
                    else:
                        for j in range(s):
                            B[d * s + j] = B[d * s + j] / den
                # contract the last axis first, reading values on the first pass
                size = total // s
                for k in range(size):
                    acc = 0.0
                    for j in range(s):
                        acc = acc + values[c, k * s + j] * B[(l - 1) * s + j]
                    w[k] = acc
                for d in range(l - 2, -1, -1):
                    size = size // s
                    for k in range(size):
                        acc = 0.0
                        for j in range(s):
                            acc = acc + w[k * s + j] * B[d * s + j]
                        w[k] = acc
                out[i] = w[0]
    finally:
        free(B)
        free(w)
    return np.asarray(out)
