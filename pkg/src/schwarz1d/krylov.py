"""Matrix-free GMRES and BiCGStab with optional left preconditioning.

Both stop on the (preconditioned) relative residual
``||M (b - A x)|| <= tol ||M b||`` and return ``(x, iterations, rel_residual)``.
"""

from __future__ import annotations

import numpy as np

from .exceptions import BreakdownError, ConvergenceError, StagnationError


def _identity(y):
    return y


def _givens(a, b):
    r = np.hypot(abs(a), abs(b))
    if r == 0.0:
        return 1.0, 0.0
    if a == 0:
        return 0.0, 1.0
    c = abs(a) / r
    s = (a / abs(a)) * np.conj(b) / r
    return c, s


def gmres(matvec, b, x0=None, tol=1e-9, max_k=None, precond=None):
    """Unrestarted GMRES (Arnoldi with two passes of classical Gram-Schmidt)."""
    M = precond or _identity
    b = np.asarray(b, dtype=np.complex128)
    n = b.size
    max_k = n if max_k is None else max_k
    x = np.zeros(n, dtype=np.complex128) if x0 is None else np.array(x0, dtype=np.complex128)
    bnorm = np.linalg.norm(M(b))
    if bnorm == 0.0:
        return np.zeros(n, dtype=np.complex128), 0, 0.0
    r = M(b - matvec(x))
    beta = np.linalg.norm(r)
    if beta <= tol * bnorm:
        return x, 0, beta / bnorm

    m = min(max_k, n)
    V = np.zeros((m + 1, n), dtype=np.complex128)
    H = np.zeros((m + 1, m), dtype=np.complex128)
    cs = np.zeros(m)
    sn = np.zeros(m, dtype=np.complex128)
    e = np.zeros(m + 1, dtype=np.complex128)
    e[0] = beta
    V[0] = r / beta
    res = beta
    for k in range(m):
        w = M(matvec(V[k]))
        wnorm = np.linalg.norm(w)
        for _ in range(2):
            h = V[: k + 1].conj() @ w
            w = w - h @ V[: k + 1]
            H[: k + 1, k] += h
        hk = np.linalg.norm(w)
        H[k + 1, k] = hk
        for i in range(k):
            a, c = H[i, k], H[i + 1, k]
            H[i, k] = cs[i] * a + sn[i] * c
            H[i + 1, k] = -np.conj(sn[i]) * a + cs[i] * c
        cs[k], sn[k] = _givens(H[k, k], H[k + 1, k])
        H[k, k] = cs[k] * H[k, k] + sn[k] * H[k + 1, k]
        H[k + 1, k] = 0.0
        e[k + 1] = -np.conj(sn[k]) * e[k]
        e[k] = cs[k] * e[k]
        res = abs(e[k + 1])
        if res <= tol * bnorm:
            y = _upper_solve(H[: k + 1, : k + 1], e[: k + 1])
            return x + y @ V[: k + 1], k + 1, res / bnorm
        if hk <= 1e-14 * max(wnorm, 1e-300):
            # invariant subspace reached without solving: the operator is singular on it
            raise StagnationError(f"GMRES broke down at residual {res / bnorm:.3e}", k + 1, res / bnorm)
        if k + 1 == n:
            raise StagnationError(f"GMRES exhausted the {n}-dimensional space at residual {res / bnorm:.3e}", k + 1, res / bnorm)
        V[k + 1] = w / hk
    raise ConvergenceError(f"GMRES did not converge in {max_k} iterations", max_k, res / bnorm)


def _upper_solve(R, y):
    k = y.size
    x = np.zeros(k, dtype=np.complex128)
    for i in range(k - 1, -1, -1):
        x[i] = (y[i] - R[i, i + 1 :] @ x[i + 1 :]) / R[i, i]
    return x


def bicgstab(matvec, b, x0=None, tol=1e-9, max_k=1000, precond=None, stall=50):
    """BiCGStab (van der Vorst); one iteration costs two operator applications."""
    M = precond or _identity
    b = np.asarray(b, dtype=np.complex128)
    n = b.size
    x = np.zeros(n, dtype=np.complex128) if x0 is None else np.array(x0, dtype=np.complex128)
    bnorm = np.linalg.norm(M(b))
    if bnorm == 0.0:
        return np.zeros(n, dtype=np.complex128), 0, 0.0
    r = M(b - matvec(x))
    rnorm = np.linalg.norm(r)
    if rnorm <= tol * bnorm:
        return x, 0, rnorm / bnorm
    r_hat = r.copy()
    rhat_norm = rnorm
    eps = np.finfo(float).eps
    p = np.zeros_like(r)
    v = np.zeros_like(r)
    rho_old = alpha = omega = 1.0
    best, since_best = rnorm, 0
    for k in range(1, max_k + 1):
        rho = np.vdot(r_hat, r)
        if abs(rho) <= eps * rhat_norm * rnorm:
            raise BreakdownError(f"BiCGStab breakdown (rho = {abs(rho):.3e}) at iteration {k}", k, rnorm / bnorm)
        if k == 1:
            p = r.copy()
        else:
            beta = (rho / rho_old) * (alpha / omega)
            p = r + beta * (p - omega * v)
        v = M(matvec(p))
        denom = np.vdot(r_hat, v)
        if denom == 0:
            raise BreakdownError(f"BiCGStab breakdown (r_hat . v = 0) at iteration {k}", k, rnorm / bnorm)
        alpha = rho / denom
        s = r - alpha * v
        snorm = np.linalg.norm(s)
        if snorm <= tol * bnorm:
            return x + alpha * p, k, snorm / bnorm
        t = M(matvec(s))
        tt = np.vdot(t, t).real
        if tt == 0.0:
            raise BreakdownError(f"BiCGStab breakdown (t = 0) at iteration {k}", k, snorm / bnorm)
        omega = np.vdot(t, s) / tt
        x = x + alpha * p + omega * s
        r = s - omega * t
        rnorm = np.linalg.norm(r)
        if rnorm <= tol * bnorm:
            return x, k, rnorm / bnorm
        if omega == 0:
            raise BreakdownError(f"BiCGStab breakdown (omega = 0) at iteration {k}", k, rnorm / bnorm)
        if rnorm < best:
            best, since_best = rnorm, 0
        else:
            since_best += 1
            if since_best >= stall:
                raise StagnationError(f"BiCGStab stagnated at residual {best / bnorm:.3e}", k, best / bnorm)
        rho_old = rho
    raise ConvergenceError(f"BiCGStab did not converge in {max_k} iterations", max_k, rnorm / bnorm)
