"""Explicit interface problem ``(I - L) g = d`` and the free-Schrodinger preconditioner.

For a linear potential one Schwarz sweep is affine, ``R(g) = L g + d``. With
``a_j, b_j`` the responses of subdomain ``j`` to a unit flux on its first and
last node, the local solution is ``v_j = v_j^0 - l_j a_j - r_j b_j`` and the
flux update gives, for the rows fed by subdomain ``j``::

    new r_{j-1} = (-1 + 2ip a_j[0]) l_j + 2ip b_j[0] r_j - 2ip v_j^0[0]
    new l_{j+1} = 2ip a_j[-1] l_j + (-1 + 2ip b_j[-1]) r_j - 2ip v_j^0[-1]
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from . import krylov
from .exceptions import ConvergenceError, SingularMatrixError
from .mesh import Decomposition
from .potentials import catalog
from .schwarz import apply_R, left_index, right_index
from .workers import Cluster

SINGULAR_RTOL = 1e-13


def build_L(cluster: Cluster) -> np.ndarray:
    """Dense ``(2N-2) x (2N-2)`` interface matrix; two local solves per subdomain."""
    n_sub = cluster.n_sub
    size = 2 * n_sub - 2
    L = np.zeros((size, size), dtype=np.complex128)
    responses = cluster.map(lambda w: w.interface_responses())
    two_ip = 2j * cluster.p
    for j, (a, b) in enumerate(responses):
        cols = []
        if j > 0:
            cols.append((left_index(j), a))
        if j < n_sub - 1:
            cols.append((right_index(j), b))
        for col, resp in cols:
            if j > 0:
                L[right_index(j - 1), col] = two_ip * resp[0]
            if j < n_sub - 1:
                L[left_index(j + 1), col] = two_ip * resp[-1]
        if j > 0:
            L[right_index(j - 1), left_index(j)] -= 1.0
        if j < n_sub - 1:
            L[left_index(j + 1), right_index(j)] -= 1.0
    return L


def build_d(cluster: Cluster) -> np.ndarray:
    """``d = R(0)``: one local solve per subdomain with zero incoming fluxes."""
    if not cluster.is_linear:
        raise ValueError("the affine splitting R(g) = L g + d needs a linear potential")
    n_sub = cluster.n_sub
    d = np.empty(2 * n_sub - 2, dtype=np.complex128)
    v0 = cluster.map(lambda w: w.solve(0.0, 0.0))
    for j, (w, v) in enumerate(zip(cluster.workers, v0)):
        to_left, to_right = w.outgoing(0.0, 0.0, v)
        if j > 0:
            d[right_index(j - 1)] = to_left
        if j < n_sub - 1:
            d[left_index(j + 1)] = to_right
    return d


class InterfaceLU:
    """Dense LU (partial pivoting) of ``I - L``; factor once, solve for every time step."""

    def __init__(self, L: np.ndarray):
        self.L = np.asarray(L, dtype=np.complex128)
        A = np.eye(self.L.shape[0]) - self.L
        with warnings.catch_warnings():
            # an exactly singular factor is reported below as SingularMatrixError
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            self.lu, self.piv = scipy.linalg.lu_factor(A, check_finite=True)
        u = np.abs(np.diag(self.lu))
        if u.size and (u.min() <= SINGULAR_RTOL * max(u.max(), 1e-300)):
            raise SingularMatrixError(f"I - L is numerically singular (min |u_ii| = {u.min():.3e})")

    def solve(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=np.complex128)
        if d.size == 0:
            return d.copy()
        return scipy.linalg.lu_solve((self.lu, self.piv), d)


def solve_interface_lu(L, d, lu: InterfaceLU | None = None) -> np.ndarray:
    return (lu or InterfaceLU(L)).solve(d)


class MatrixOperator:
    """``g -> (I - L) g`` for an assembled ``L``."""

    def __init__(self, L):
        self.L = np.asarray(L, dtype=np.complex128)
        self.applications = 0

    def __call__(self, g):
        self.applications += 1
        return g - self.L @ g


class MatrixFreeOperator:
    """``g -> g - (R(g) - R(0))``; one Schwarz sweep per application.

    ``R(0)`` is computed once at construction unless ``d`` is given.
    """

    def __init__(self, cluster: Cluster, d=None):
        if not cluster.is_linear:
            raise ValueError("Krylov methods need a linear interface operator")
        self.cluster = cluster
        self.d = apply_R(cluster, np.zeros(cluster.interface_size, dtype=np.complex128))[0] if d is None else np.asarray(d)
        self.applications = 0

    def __call__(self, g):
        self.applications += 1
        return g - (apply_R(self.cluster, g)[0] - self.d)


def solve_interface_krylov(op, d, method="gmres", precond=None, tol=3e-12, max_k=1000, g0=None):
    """Solve ``op(g) = d`` with GMRES or BiCGStab; returns ``(g, k_used)``.

    ``k_used`` counts the Krylov steps plus the operator application spent on
    the initial residual when ``g0`` is nonzero (with ``g0 = 0`` the residual
    is ``d`` and costs nothing). A 2x2 system from a random guess thus reports 3.
    """
    apply = precond.apply if precond is not None else None
    method = method.lower()
    if method == "gmres":
        g, k, _ = krylov.gmres(op, d, x0=g0, tol=tol, max_k=max_k, precond=apply)
    elif method == "bicgstab":
        g, k, _ = krylov.bicgstab(op, d, x0=g0, tol=tol, max_k=max_k, precond=apply)
    else:
        raise ValueError(f"unknown Krylov method {method!r}")
    if g0 is not None and np.any(np.asarray(g0) != 0):
        k += 1
    return g, k


class Preconditioner:
    """``P = I - L_0`` with ``L_0`` the interface matrix of the free equation (V = 0, f = 0)."""

    def __init__(self, L0: np.ndarray):
        self.L0 = np.asarray(L0, dtype=np.complex128)
        self._lu = InterfaceLU(self.L0)
        self.applications = 0

    @property
    def size(self) -> int:
        return self.L0.shape[0]

    def apply(self, y) -> np.ndarray:
        """``z = P^{-1} y`` by solving ``(I - L_0) z = y``."""
        self.applications += 1
        return self._lu.solve(y)

    def matrix(self) -> np.ndarray:
        return np.eye(self.size) - self.L0


def build_preconditioner(decomp: Decomposition, dt: float, p: float, workers: int = 1) -> Preconditioner:
    """Assemble ``L_0`` on the target mesh with the same ``dt`` and ``p``, and factor ``I - L_0``."""
    with Cluster(decomp, catalog("zero"), dt, p, workers=workers) as free:
        free.prepare(1, [np.zeros(m.n_nodes) for m in decomp.meshes])
        L0 = build_L(free)
    return Preconditioner(L0)


def solve_interface_fixed_pc(cluster: Cluster, P: Preconditioner, g0, tol=3e-12, max_k=1000):
    """Preconditioned Richardson ``g <- g - P^{-1} (g - R(g))``; valid for nonlinear ``R`` too.

    Same stopping rule as the classical iteration. Returns ``(g, k_used, vs)``.
    """
    g = np.array(g0, dtype=np.complex128)
    diff = np.inf
    for k in range(1, max_k + 1):
        Rg, vs = apply_R(cluster, g)
        g_new = g - P.apply(g - Rg)
        diff = np.linalg.norm(g_new - g)
        scale = max(1.0, np.linalg.norm(g))
        g = g_new
        if diff <= tol * scale:
            return g, k, vs
    raise ConvergenceError(f"preconditioned fixed point did not converge in {max_k} iterations", max_k, diff)
