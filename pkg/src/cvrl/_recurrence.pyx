# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Fock-basis recurrence for single-mode Gaussian states."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def gaussian_fock_block(double complex a00, double complex a01, double complex a11,
                        double complex b0, double complex b1, double complex scale,
                        int cutoff):
    """Fill ``scale * G[m, n] / sqrt(m! n!)`` for ``m, n < cutoff``.

    ``G`` is the two-index Hermite table of the quadratic form ``(A, b)``.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.zeros((cutoff, cutoff), dtype=np.complex128)
    cdef double complex[:, ::1] R = out
    cdef double[::1] s = np.sqrt(np.arange(cutoff + 1, dtype=np.float64))
    cdef Py_ssize_t m, n
    cdef double complex acc

    R[0, 0] = 1.0
    for n in range(cutoff - 1):
        acc = b1 * R[0, n]
        if n > 0:
            acc = acc + a11 * s[n] * R[0, n - 1]
        R[0, n + 1] = acc / s[n + 1]
    for m in range(cutoff - 1):
        for n in range(cutoff):
            acc = b0 * R[m, n]
            if m > 0:
                acc = acc + a00 * s[m] * R[m - 1, n]
            if n > 0:
                acc = acc + a01 * s[n] * R[m, n - 1]
            R[m + 1, n] = acc / s[m + 1]
    for m in range(cutoff):
        for n in range(cutoff):
            R[m, n] = R[m, n] * scale
    return out
