"""Optimized Schwarz domain decomposition for the 1D Schrodinger equation.

Crank-Nicolson in time, P1 finite elements in space, Robin transmission
conditions between non-overlapping subdomains.
"""

from .exceptions import BreakdownError, ConvergenceError, SingularMatrixError, StagnationError
from .interface import build_d, build_L, build_preconditioner, solve_interface_fixed_pc, solve_interface_krylov, solve_interface_lu
from .mesh import Decomposition, Domain, decompose
from .potentials import PotentialSpec, PotentialTag, catalog
from .schwarz import apply_R, classical_iterate, initial_guess
from .spectral import SpectrumReport, spectrum_study
from .timeloop import Algorithm, Evolution, InterfaceSolver, initial_condition, monodomain_solve
from .workers import Cluster

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "BreakdownError",
    "Cluster",
    "ConvergenceError",
    "Decomposition",
    "Domain",
    "Evolution",
    "InterfaceSolver",
    "PotentialSpec",
    "PotentialTag",
    "SingularMatrixError",
    "SpectrumReport",
    "StagnationError",
    "apply_R",
    "build_L",
    "build_d",
    "build_preconditioner",
    "catalog",
    "classical_iterate",
    "decompose",
    "initial_condition",
    "initial_guess",
    "monodomain_solve",
    "solve_interface_fixed_pc",
    "solve_interface_krylov",
    "solve_interface_lu",
    "spectrum_study",
]
