"""P1 finite element matrices on a uniform subdomain mesh."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import SubMesh


@dataclass
class Tridiag:
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        n = self.diag.size
        if self.lower.size != n - 1 or self.upper.size != n - 1:
            raise ValueError("off-diagonals must have length n - 1")

    @property
    def n(self) -> int:
        return self.diag.size

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[:-1] += self.upper * x[1:]
        y[1:] += self.lower * x[:-1]
        return y

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.upper, 1) + np.diag(self.lower, -1)

    def scaled(self, c) -> "Tridiag":
        return Tridiag(c * self.lower, c * self.diag, c * self.upper)

    def __add__(self, other: "Tridiag") -> "Tridiag":
        return Tridiag(self.lower + other.lower, self.diag + other.diag, self.upper + other.upper)

    def __sub__(self, other: "Tridiag") -> "Tridiag":
        return Tridiag(self.lower - other.lower, self.diag - other.diag, self.upper - other.upper)


def _check(mesh: SubMesh):
    if mesh.n_nodes < 2:
        raise ValueError("a P1 mesh needs at least 2 nodes")


def assemble_mass(mesh: SubMesh) -> Tridiag:
    _check(mesh)
    n, h = mesh.n_nodes, mesh.h
    diag = np.full(n, 2.0 * h / 3.0)
    diag[0] = diag[-1] = h / 3.0
    off = np.full(n - 1, h / 6.0)
    return Tridiag(off, diag, off.copy())


def assemble_stiff(mesh: SubMesh) -> Tridiag:
    """Entries ``int phi_i' phi_j'``; positive semi-definite."""
    _check(mesh)
    n, h = mesh.n_nodes, mesh.h
    diag = np.full(n, 2.0 / h)
    diag[0] = diag[-1] = 1.0 / h
    off = np.full(n - 1, -1.0 / h)
    return Tridiag(off, diag, off.copy())


def assemble_pot_mass(mesh: SubMesh, w_nodal) -> Tridiag:
    """Weighted mass matrix ``int w phi_i phi_j`` with ``w`` replaced by its P1 interpolant.

    The integral of the cubic integrand is exact on each element.
    """
    _check(mesh)
    w = np.asarray(w_nodal, dtype=float)
    if w.shape != (mesh.n_nodes,):
        raise ValueError(f"w_nodal has shape {w.shape}, expected ({mesh.n_nodes},)")
    c = mesh.h / 12.0
    wl, wr = w[:-1], w[1:]
    diag = np.zeros(mesh.n_nodes)
    diag[:-1] += c * (3.0 * wl + wr)
    diag[1:] += c * (wl + 3.0 * wr)
    off = c * (wl + wr)
    return Tridiag(off, diag, off.copy())


def assemble_nonlinear_rhs(mesh: SubMesh, mass: Tridiag, zeta, f_nodal) -> np.ndarray:
    """Load vector of ``int f(zeta) zeta phi_i`` with the integrand interpolated in P1."""
    zeta = np.asarray(zeta)
    f_nodal = np.asarray(f_nodal)
    if zeta.shape != (mesh.n_nodes,) or f_nodal.shape != (mesh.n_nodes,):
        raise ValueError("zeta and f_nodal must have one entry per node")
    return mass.matvec(f_nodal * zeta)


@dataclass
class LocalSystem:
    """Matrices of one subdomain problem at one time level.

    ``a_mat`` is ``(2i/dt) M - S + M_W``; the Robin term ``ip`` acts on the
    diagonal entries listed in ``boundary_idx`` (interface nodes only, the
    physical boundary keeps its homogeneous Neumann condition).
    """

    mass: Tridiag
    stiff: Tridiag
    pot_mass: Tridiag
    a_mat: Tridiag
    boundary_idx: tuple[int, ...]
    robin_p: float
    dt: float

    @property
    def n(self) -> int:
        return self.a_mat.n

    def robin_matrix(self) -> Tridiag:
        """``A + ip M^Gamma``."""
        diag = self.a_mat.diag.copy()
        for i in self.boundary_idx:
            diag[i] += 1j * self.robin_p
        return Tridiag(self.a_mat.lower, diag, self.a_mat.upper)


def build_local_system(mesh: SubMesh, w_nodal, dt: float, p: float, mass=None, stiff=None) -> LocalSystem:
    """Assemble the subdomain system; ``mass``/``stiff`` may be passed in to reuse them across steps."""
    mass = assemble_mass(mesh) if mass is None else mass
    stiff = assemble_stiff(mesh) if stiff is None else stiff
    pot = assemble_pot_mass(mesh, w_nodal)
    a_mat = mass.scaled(2j / dt) - stiff + pot
    return LocalSystem(mass, stiff, pot, a_mat, mesh.interface_nodes, float(p), float(dt))
