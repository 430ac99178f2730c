"""Eigenvalues of a dense complex matrix: Householder Hessenberg reduction followed
by single-shift complex QR with Wilkinson shifts and deflation."""

import numpy as np
from numba import njit

from .exceptions import ConvergenceError


def hessenberg(A: np.ndarray) -> np.ndarray:
    """Unitary similarity to upper Hessenberg form (a copy; ``A`` is untouched)."""
    H = np.array(A, dtype=np.complex128)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1 :, k]
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * xnorm
        v /= np.linalg.norm(v)
        H[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1 :, k:])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v.conj())
        H[k + 2 :, k] = 0.0
    return H


@njit(cache=True)
def _shifted_qr(H, max_its):
    n = H.shape[0]
    eig = np.empty(n, dtype=np.complex128)
    eps = 2.220446049250313e-16
    hnorm = 0.0
    for i in range(n):
        for j in range(n):
            hnorm = max(hnorm, abs(H[i, j]))
    cs = np.empty(n, dtype=np.float64)
    sn = np.empty(n, dtype=np.complex128)
    hi = n - 1
    its = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = H[0, 0]
            break
        lo = hi
        while lo > 0:
            s = abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])
            if s == 0.0:
                s = hnorm
            if abs(H[lo, lo - 1]) <= eps * s:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eig[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        its += 1
        if its > max_its:
            return eig, hi
        if its % 11 == 0:
            # exceptional shift to break cycles
            mu = H[hi, hi] + 0.75 * abs(H[hi, hi - 1])
        else:
            a = H[hi - 1, hi - 1]
            b = H[hi - 1, hi]
            c = H[hi, hi - 1]
            d = H[hi, hi]
            half = 0.5 * (a + d)
            disc = np.sqrt(0.25 * (a - d) * (a - d) + b * c)
            mu1 = half + disc
            mu2 = half - disc
            mu = mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2
        for k in range(lo, hi + 1):
            H[k, k] -= mu
        for k in range(lo, hi):
            a = H[k, k]
            b = H[k + 1, k]
            r = np.hypot(abs(a), abs(b))
            if r == 0.0:
                c_, s_ = 1.0, 0.0j
            elif a == 0:
                c_, s_ = 0.0, 1.0 + 0.0j
            else:
                c_ = abs(a) / r
                s_ = (a / abs(a)) * np.conj(b) / r
            cs[k] = c_
            sn[k] = s_
            for j in range(k, hi + 1):
                t1 = H[k, j]
                t2 = H[k + 1, j]
                H[k, j] = c_ * t1 + s_ * t2
                H[k + 1, j] = -np.conj(s_) * t1 + c_ * t2
        for k in range(lo, hi):
            c_ = cs[k]
            s_ = sn[k]
            for i in range(lo, min(k + 2, hi) + 1):
                t1 = H[i, k]
                t2 = H[i, k + 1]
                H[i, k] = c_ * t1 + np.conj(s_) * t2
                H[i, k + 1] = -s_ * t1 + c_ * t2
        for k in range(lo, hi + 1):
            H[k, k] += mu
    return eig, -1


def eigenvalues_dense(M, max_its=100) -> np.ndarray:
    """All eigenvalues of the square matrix ``M`` (unordered)."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] == 0:
        return np.zeros(0, dtype=np.complex128)
    H = hessenberg(M)
    eig, failed = _shifted_qr(H, max_its)
    if failed >= 0:
        raise ConvergenceError(f"QR iteration did not converge for eigenvalue {failed} within {max_its} sweeps", max_its)
    return eig
