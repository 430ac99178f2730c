"""Subdomain Robin problems: linear solve and nonlinear fixed point."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tridiag
from .exceptions import ConvergenceError, SingularMatrixError
from .fem import LocalSystem, Tridiag

PIVOT_GUARD = 1e-300


@dataclass
class TriFactor:
    mult: np.ndarray
    piv: np.ndarray
    upper: np.ndarray

    @property
    def n(self) -> int:
        return self.piv.size

    def solve(self, b) -> np.ndarray:
        return tridiag.solve(self.mult, self.piv, self.upper, b)


def factorize_matrix(mat: Tridiag) -> TriFactor:
    mult, piv = tridiag.factor(mat.lower, mat.diag, mat.upper)
    k = int(np.argmin(np.abs(piv)))
    if not np.isfinite(piv).all() or abs(piv[k]) < PIVOT_GUARD:
        raise SingularMatrixError(f"pivot {k} has magnitude {abs(piv[k]):.3e}")
    return TriFactor(mult, piv, np.ascontiguousarray(mat.upper, dtype=np.complex128))


def factorize(sys: LocalSystem) -> TriFactor:
    """LU factors of ``A + ip M^Gamma``."""
    return factorize_matrix(sys.robin_matrix())


def local_rhs(sys: LocalSystem, u_prev) -> np.ndarray:
    """``(2i/dt) M u_prev``, the flux-free right-hand side."""
    u_prev = np.asarray(u_prev, dtype=np.complex128)
    if u_prev.shape != (sys.n,):
        raise ValueError(f"u_prev has shape {u_prev.shape}, expected ({sys.n},)")
    return (2j / sys.dt) * sys.mass.matvec(u_prev)


def _with_fluxes(rhs: np.ndarray, l, r) -> np.ndarray:
    b = rhs.copy()
    b[0] -= l
    b[-1] -= r
    return b


def solve_local_linear(fac: TriFactor, sys: LocalSystem, u_prev, l=0.0, r=0.0, rhs=None) -> np.ndarray:
    """Solve ``(A + ip M^Gamma) v = (2i/dt) M u_prev - Q^T (l, r)``.

    ``rhs`` may carry a precomputed ``local_rhs(sys, u_prev)``.
    """
    if rhs is None:
        rhs = local_rhs(sys, u_prev)
    return fac.solve(_with_fluxes(rhs, l, r))


def solve_local_nonlinear(fac: TriFactor, sys: LocalSystem, u_prev, l, r, f, tol=1e-12, max_q=100, rhs=None):
    """Fixed point ``zeta^q = (A + ip M^Gamma)^{-1} (rhs - b_f(zeta^{q-1}) - Q^T (l, r))``.

    ``f`` maps nodal values ``zeta`` to nodal values of ``f(t_mid, x, zeta)``.
    Starts from ``zeta^0 = u_prev``; returns ``(zeta, q_used)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if rhs is None:
        rhs = local_rhs(sys, u_prev)
    base = _with_fluxes(rhs, l, r)
    zeta = np.asarray(u_prev, dtype=np.complex128)
    bf = sys.mass.matvec(f(zeta) * zeta)
    diff = np.inf
    for q in range(1, max_q + 1):
        new = fac.solve(base - bf)
        bf_new = sys.mass.matvec(f(new) * new)
        diff = np.max(np.abs(new - zeta))
        if not np.isfinite(diff):
            raise ConvergenceError(f"nonlinear local fixed point diverged at iteration {q}", q, diff)
        zeta = new
        # identical load vector => the next iterate would repeat this one exactly
        if diff <= tol * max(1.0, np.max(np.abs(new))) or np.array_equal(bf_new, bf):
            return zeta, q
        bf = bf_new
    raise ConvergenceError(f"nonlinear local fixed point did not converge in {max_q} iterations", max_q, diff)
