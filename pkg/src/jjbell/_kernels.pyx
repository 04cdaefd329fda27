# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; same signatures as _kernels_py."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def rotate_pairs(const double complex[:, ::1] amps,
                 const double complex[:, :, ::1] u1,
                 const double complex[:, :, ::1] u2):
    cdef Py_ssize_t m, n = amps.shape[0]
    cdef double complex a00, a01, a10, a11, b00, b01, b10, b11
    out = np.empty((n, 4), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    with nogil:
        for m in range(n):
            # apply u2 to the second qubit index
            b00 = u2[m, 0, 0] * amps[m, 0] + u2[m, 0, 1] * amps[m, 1]
            b01 = u2[m, 1, 0] * amps[m, 0] + u2[m, 1, 1] * amps[m, 1]
            b10 = u2[m, 0, 0] * amps[m, 2] + u2[m, 0, 1] * amps[m, 3]
            b11 = u2[m, 1, 0] * amps[m, 2] + u2[m, 1, 1] * amps[m, 3]
            # then u1 to the first
            o[m, 0] = u1[m, 0, 0] * b00 + u1[m, 0, 1] * b10
            o[m, 1] = u1[m, 0, 0] * b01 + u1[m, 0, 1] * b11
            o[m, 2] = u1[m, 1, 0] * b00 + u1[m, 1, 1] * b10
            o[m, 3] = u1[m, 1, 0] * b01 + u1[m, 1, 1] * b11
    return out


def rotated_probs(const double complex[:, ::1] amps,
                  const double complex[:, :, ::1] u1,
                  const double complex[:, :, ::1] u2):
    cdef Py_ssize_t m, k, n = amps.shape[0]
    cdef double complex b00, b01, b10, b11, z
    cdef double complex r[4]
    out = np.empty((n, 4), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for m in range(n):
            b00 = u2[m, 0, 0] * amps[m, 0] + u2[m, 0, 1] * amps[m, 1]
            b01 = u2[m, 1, 0] * amps[m, 0] + u2[m, 1, 1] * amps[m, 1]
            b10 = u2[m, 0, 0] * amps[m, 2] + u2[m, 0, 1] * amps[m, 3]
            b11 = u2[m, 1, 0] * amps[m, 2] + u2[m, 1, 1] * amps[m, 3]
            r[0] = u1[m, 0, 0] * b00 + u1[m, 0, 1] * b10
            r[1] = u1[m, 0, 0] * b01 + u1[m, 0, 1] * b11
            r[2] = u1[m, 1, 0] * b00 + u1[m, 1, 1] * b10
            r[3] = u1[m, 1, 0] * b01 + u1[m, 1, 1] * b11
            for k in range(4):
                z = r[k]
                o[m, k] = z.real * z.real + z.imag * z.imag
    return out


def draw_outcomes(const double[::1] cdf, const double[::1] uniforms):
    cdef Py_ssize_t i, n = uniforms.shape[0]
    cdef double u, c0 = cdf[0], c1 = cdf[1], c2 = cdf[2]
    out = np.empty(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] o = out
    with nogil:
        for i in range(n):
            u = uniforms[i]
            if u < c0:
                o[i] = 0
            elif u < c1:
                o[i] = 1
            elif u < c2:
                o[i] = 2
            else:
                o[i] = 3
    return out
