"""Pure numpy fallback for the Gaussian Fock-basis recurrence.

Rows are generated one at a time; each row only depends on the two
previous ones, so the inner index is vectorised.
"""
import numpy as np


def gaussian_fock_block(a00, a01, a11, b0, b1, scale, cutoff):
    R = np.zeros((cutoff, cutoff), dtype=np.complex128)
    s = np.sqrt(np.arange(cutoff + 1, dtype=np.float64))
    R[0, 0] = 1.0
    for n in range(cutoff - 1):
        acc = b1 * R[0, n]
        if n > 0:
            acc += a11 * s[n] * R[0, n - 1]
        R[0, n + 1] = acc / s[n + 1]
    for m in range(cutoff - 1):
        row = b0 * R[m]
        if m > 0:
            row += a00 * s[m] * R[m - 1]
        row[1:] += a01 * s[1:cutoff] * R[m, :-1]
        R[m + 1] = row / s[m + 1]
    return R * scale
