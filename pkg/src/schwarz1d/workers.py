"""Subdomain workers and the coordinator that drives them.

One :class:`Worker` owns the matrices, factorization and time-level state of
one subdomain. A :class:`Cluster` runs them either serially (``workers=1``)
or with one thread per subdomain (``workers=n_sub``); the numba kernels
release the GIL. Workers never touch each other's state: between solves they
only hand two complex fluxes to each neighbour, routed by the coordinator.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .fem import assemble_mass, assemble_stiff, build_local_system
from .local import factorize, local_rhs, solve_local_nonlinear
from .mesh import Decomposition, SubMesh
from .potentials import PotentialSpec, averaged_linear, eval_nonlinear


class Worker:
    def __init__(self, mesh: SubMesh, potential: PotentialSpec, dt: float, p: float, nonlinear_tol=1e-12, max_q=100):
        self.mesh = mesh
        self.potential = potential
        self.dt = float(dt)
        self.p = float(p)
        self.nonlinear_tol = nonlinear_tol
        self.max_q = max_q
        self.mass = assemble_mass(mesh)
        self.stiff = assemble_stiff(mesh)
        self.system = None
        self.factor = None
        self._system_step = None
        self.n = 0
        self.u_prev = None
        self.rhs = None
        self.t_mid = 0.0
        # operation counters
        self.solves = 0
        self.factorizations = 0
        self.inner_iterations = 0

    @property
    def index(self) -> int:
        return self.mesh.index

    @property
    def is_linear(self) -> bool:
        return self.potential.is_linear

    def prepare(self, n: int, u_prev) -> None:
        """Load time level ``n`` with data ``u_{n-1}``; reassemble only if ``W_n`` changed."""
        if self.system is None or (self.potential.time_dependent and n != self._system_step):
            w = averaged_linear(self.potential, n, self.dt, self.mesh.nodes)
            self.system = build_local_system(self.mesh, w, self.dt, self.p, self.mass, self.stiff)
            self.factor = factorize(self.system)
            self.factorizations += 1
            self._system_step = n
        self.n = n
        self.t_mid = (n - 0.5) * self.dt
        self.u_prev = np.array(u_prev, dtype=np.complex128)
        self.rhs = local_rhs(self.system, self.u_prev)

    def solve_rhs(self, b) -> np.ndarray:
        self.solves += 1
        return self.factor.solve(b)

    def _f(self, zeta):
        return eval_nonlinear(self.potential, self.t_mid, self.mesh.nodes, zeta)

    def solve(self, l=0.0, r=0.0) -> np.ndarray:
        """Local solution for incoming fluxes ``(l, r)``."""
        if self.is_linear:
            b = self.rhs.copy()
            b[0] -= l
            b[-1] -= r
            return self.solve_rhs(b)
        v, q = solve_local_nonlinear(self.factor, self.system, self.u_prev, l, r, self._f, self.nonlinear_tol, self.max_q, rhs=self.rhs)
        self.solves += q
        self.inner_iterations += q
        return v

    def interface_responses(self):
        """``(A + ip M^Gamma)^{-1}`` applied to the first and to the last unit vector."""
        n = self.mesh.n_nodes
        e = np.zeros(n, dtype=np.complex128)
        e[0] = 1.0
        w_l = self.solve_rhs(e)
        e[0] = 0.0
        e[-1] = 1.0
        w_r = self.solve_rhs(e)
        return w_l, w_r

    def outgoing(self, l, r, v):
        """Fluxes for the neighbours: ``(new r_{j-1}, new l_{j+1})``."""
        two_ip = 2j * self.p
        return -l - two_ip * v[0], -r - two_ip * v[-1]


class Cluster:
    """Coordinator over the workers of one decomposition."""

    def __init__(self, decomp: Decomposition, potential: PotentialSpec, dt: float, p: float, workers: int = 1, nonlinear_tol=1e-12, max_q=100):
        if workers not in (1, decomp.n_sub):
            raise ValueError(f"workers must be 1 or n_sub={decomp.n_sub}, got {workers}")
        self.decomp = decomp
        self.potential = potential
        self.dt = float(dt)
        self.p = float(p)
        self.workers = [Worker(m, potential, dt, p, nonlinear_tol, max_q) for m in decomp.meshes]
        self.n_threads = workers
        self._pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
        self.exchanged = 0  # complex values passed between neighbours

    @property
    def n_sub(self) -> int:
        return self.decomp.n_sub

    @property
    def interface_size(self) -> int:
        return 2 * self.n_sub - 2

    @property
    def is_linear(self) -> bool:
        return self.potential.is_linear

    def map(self, fn, *args):
        """``[fn(worker_j, args[0][j], ...)]`` in worker order."""
        if self._pool is None:
            return [fn(w, *a) for w, *a in zip(self.workers, *args)]
        return list(self._pool.map(fn, self.workers, *args))

    def prepare(self, n: int, u_prev) -> None:
        self.map(lambda w, u: w.prepare(n, u), u_prev)

    def u_prev(self):
        return [w.u_prev for w in self.workers]

    def solves(self):
        return [w.solves for w in self.workers]

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
