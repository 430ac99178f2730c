"""Time evolution with the monodomain scheme or one of the Schwarz algorithms.

Each step solves the stationary problem for ``v_n = (u_n + u_{n-1}) / 2`` and
recovers ``u_n = 2 v_n - u_{n-1}``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .exceptions import ConvergenceError
from .interface import (
    InterfaceLU,
    MatrixFreeOperator,
    MatrixOperator,
    build_d,
    build_L,
    build_preconditioner,
    solve_interface_fixed_pc,
    solve_interface_krylov,
)
from .mesh import Decomposition, Domain, decompose
from .potentials import PotentialSpec, catalog
from .schwarz import classical_iterate, initial_guess, split_fluxes
from .workers import Cluster

log = logging.getLogger(__name__)


def initial_condition(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-((x + 1.0) ** 2) + 1j * (x + 1.0))


class Algorithm(str, Enum):
    CLASSICAL = "classical"
    DIRECT = "direct"
    PRECONDITIONED = "preconditioned"


class InterfaceSolver(str, Enum):
    FIXED = "fixed"
    GMRES = "gmres"
    BICGSTAB = "bicgstab"
    LU = "lu"


ALLOWED_SOLVERS = {
    Algorithm.CLASSICAL: {InterfaceSolver.FIXED, InterfaceSolver.GMRES, InterfaceSolver.BICGSTAB},
    Algorithm.DIRECT: set(InterfaceSolver),
    Algorithm.PRECONDITIONED: {InterfaceSolver.FIXED, InterfaceSolver.GMRES, InterfaceSolver.BICGSTAB},
}


@dataclass
class EvolutionState:
    n: int
    u_prev: list
    algorithm: Algorithm
    interface_solver: InterfaceSolver
    iteration_log: list = field(default_factory=list)
    g_prev: Optional[np.ndarray] = None


@dataclass
class Trajectory:
    x: np.ndarray
    times: list
    snapshots: list
    masses: np.ndarray
    iterations: list


def discrete_mass(cluster: Cluster, u_list) -> float:
    """``u^H M u`` summed over subdomains (equals the global mass matrix form)."""
    return float(sum(np.vdot(u, w.mass.matvec(u)).real for w, u in zip(cluster.workers, u_list)))


class Evolution:
    """Domain-decomposed time stepping.

    ``guess`` is ``'zero'`` or ``'random'``; with ``warm_start`` the previous
    step's interface solution seeds the iterative paths instead.
    """

    def __init__(
        self,
        decomp: Decomposition,
        potential: PotentialSpec,
        p: float,
        algorithm=Algorithm.DIRECT,
        interface_solver=None,
        *,
        tol: float = 3e-12,
        nonlinear_tol: float = 1e-12,
        guess: str = "zero",
        seed: Optional[int] = None,
        warm_start: bool = False,
        workers: int = 1,
        max_k: int = 10000,
        u0: Callable = initial_condition,
    ):
        algorithm = Algorithm(algorithm)
        if interface_solver is None:
            interface_solver = InterfaceSolver.LU if algorithm is Algorithm.DIRECT else InterfaceSolver.FIXED
        interface_solver = InterfaceSolver(interface_solver)
        if interface_solver not in ALLOWED_SOLVERS[algorithm]:
            raise ValueError(f"{algorithm.value} algorithm cannot use the {interface_solver.value} interface solver")
        if decomp.n_sub > 1 and not potential.is_linear and (algorithm is Algorithm.DIRECT or interface_solver is not InterfaceSolver.FIXED):
            raise ValueError("a nonlinear potential allows only the fixed-point classical or preconditioned iterations")
        self.decomp = decomp
        self.potential = potential
        self.p = p
        self.tol = tol
        self.guess = guess
        self.seed = seed
        self.warm_start = warm_start
        self.max_k = max_k
        self.cluster = Cluster(decomp, potential, decomp.domain.dt, p, workers=workers, nonlinear_tol=nonlinear_tol)
        u_init = [np.asarray(u0(m.nodes), dtype=np.complex128) for m in decomp.meshes]
        self.state = EvolutionState(0, u_init, algorithm, interface_solver)
        self.L = None
        self.lu = None
        self.L_builds = 0
        self.P = None

    def close(self):
        self.cluster.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @property
    def size(self) -> int:
        return self.decomp.interface_size

    def _guess(self, n):
        if self.warm_start and self.state.g_prev is not None:
            return self.state.g_prev.copy()
        seed = None if self.seed is None else self.seed + n - 1
        return initial_guess(self.guess, self.size, seed)

    def _reconstruct(self, g):
        l, r = split_fluxes(g, self.decomp.n_sub)
        return self.cluster.map(lambda w, lj, rj: w.solve(lj, rj), l, r)

    def _preconditioner(self):
        if self.P is None:
            self.P = build_preconditioner(self.decomp, self.decomp.domain.dt, self.p, workers=self.cluster.n_threads)
        return self.P

    def _direct(self, n):
        solver = self.state.interface_solver
        if self.L is None or self.potential.time_dependent:
            self.L = build_L(self.cluster)
            self.L_builds += 1
            self.lu = InterfaceLU(self.L) if solver is InterfaceSolver.LU else None
        d = build_d(self.cluster)
        if solver is InterfaceSolver.LU:
            g, k = self.lu.solve(d), 0
        elif solver is InterfaceSolver.FIXED:
            g, k = self._explicit_fixed(d, self._guess(n))
        else:
            g, k = solve_interface_krylov(MatrixOperator(self.L), d, solver.value, None, self.tol, self.max_k, self._guess(n))
        return g, k, self._reconstruct(g)

    def _explicit_fixed(self, d, g):
        for k in range(1, self.max_k + 1):
            g_new = self.L @ g + d
            done = np.linalg.norm(g_new - g) <= self.tol * max(1.0, np.linalg.norm(g))
            g = g_new
            if done:
                return g, k
        raise ConvergenceError(f"fixed point on the explicit interface matrix did not converge in {self.max_k} iterations", self.max_k)

    def _iterative(self, n):
        solver = self.state.interface_solver
        pre = self.state.algorithm is Algorithm.PRECONDITIONED
        g0 = self._guess(n)
        if solver is InterfaceSolver.FIXED:
            if pre:
                return solve_interface_fixed_pc(self.cluster, self._preconditioner(), g0, self.tol, self.max_k)
            return classical_iterate(self.cluster, g0, self.tol, self.max_k)
        op = MatrixFreeOperator(self.cluster)
        g, k = solve_interface_krylov(op, op.d, solver.value, self._preconditioner() if pre else None, self.tol, self.max_k, g0)
        return g, k, self._reconstruct(g)

    def step(self) -> EvolutionState:
        st = self.state
        n = st.n + 1
        self.cluster.prepare(n, st.u_prev)
        try:
            if self.decomp.n_sub == 1:
                g, k, vs = np.zeros(0, dtype=np.complex128), 0, [self.cluster.workers[0].solve(0.0, 0.0)]
            elif st.algorithm is Algorithm.DIRECT:
                g, k, vs = self._direct(n)
            else:
                g, k, vs = self._iterative(n)
        except ConvergenceError as exc:
            raise ConvergenceError(f"step n={n}: {exc} (k={exc.iterations}, residual={exc.residual})", exc.iterations, exc.residual) from exc
        st.u_prev = [2.0 * v - u for v, u in zip(vs, st.u_prev)]
        st.n = n
        st.g_prev = g
        st.iteration_log.append(k)
        return st

    def mass(self) -> float:
        return discrete_mass(self.cluster, self.state.u_prev)

    def global_solution(self) -> np.ndarray:
        return self.decomp.gather(self.state.u_prev)

    def run(self, n_steps=None, stride=None) -> Trajectory:
        n_steps = self.decomp.domain.n_steps if n_steps is None else n_steps
        dt = self.decomp.domain.dt
        x = self.decomp.global_nodes()
        times, snaps = [self.state.n * dt], [self.global_solution()]
        masses = [self.mass()]
        for _ in range(n_steps):
            self.step()
            masses.append(self.mass())
            if stride and self.state.n % stride == 0:
                times.append(self.state.n * dt)
                snaps.append(self.global_solution())
        if not stride or self.state.n % stride:
            times.append(self.state.n * dt)
            snaps.append(self.global_solution())
        return Trajectory(x, times, snaps, np.array(masses), list(self.state.iteration_log))


def monodomain_solve(domain: Domain, potential, u0=initial_condition, n_steps=None, stride=None, mesh: Optional[Decomposition] = None, nonlinear_tol=1e-12) -> Trajectory:
    """Undecomposed reference solve (Neumann box, one subdomain)."""
    spec = catalog(potential) if isinstance(potential, str) else potential
    mesh = decompose(domain, 1) if mesh is None else mesh
    if mesh.n_sub != 1:
        raise ValueError("monodomain_solve needs a single-subdomain mesh")
    with Evolution(mesh, spec, 0.0, Algorithm.DIRECT, nonlinear_tol=nonlinear_tol, u0=u0) as ev:
        return ev.run(n_steps, stride)
