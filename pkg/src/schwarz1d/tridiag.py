"""Complex tridiagonal LU (Thomas algorithm, no pivoting) compiled with numba."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _factor(lower, diag, upper):
    n = diag.size
    piv = np.empty(n, dtype=np.complex128)
    mult = np.empty(max(n - 1, 0), dtype=np.complex128)
    piv[0] = diag[0]
    for k in range(1, n):
        if piv[k - 1] == 0:
            # zero pivot: leave the rest zero so the caller sees a singular factor
            piv[k:] = 0.0
            mult[k - 1 :] = 0.0
            break
        m = lower[k - 1] / piv[k - 1]
        mult[k - 1] = m
        piv[k] = diag[k] - m * upper[k - 1]
    return mult, piv


@njit(cache=True, nogil=True)
def _solve(mult, piv, upper, b):
    n = piv.size
    x = np.empty(n, dtype=np.complex128)
    x[0] = b[0]
    for k in range(1, n):
        x[k] = b[k] - mult[k - 1] * x[k - 1]
    x[n - 1] = x[n - 1] / piv[n - 1]
    for k in range(n - 2, -1, -1):
        x[k] = (x[k] - upper[k] * x[k + 1]) / piv[k]
    return x


def factor(lower, diag, upper):
    """Return ``(mult, piv)`` such that the matrix is ``L U`` with unit-lower ``L``
    (subdiagonal ``mult``) and upper ``U`` (diagonal ``piv``, superdiagonal ``upper``)."""
    return _factor(
        np.ascontiguousarray(lower, dtype=np.complex128),
        np.ascontiguousarray(diag, dtype=np.complex128),
        np.ascontiguousarray(upper, dtype=np.complex128),
    )


def solve(mult, piv, upper, b):
    return _solve(mult, piv, np.ascontiguousarray(upper, dtype=np.complex128), np.ascontiguousarray(b, dtype=np.complex128))
