"""Spectra of the interface operators ``I - L`` and ``P^{-1} (I - L)``."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .eigen import eigenvalues_dense
from .interface import Preconditioner, build_L, build_preconditioner
from .mesh import Domain, decompose
from .potentials import catalog
from .timeloop import initial_condition
from .workers import Cluster


class MatrixTag(str, Enum):
    PLAIN = "plain"
    PRECONDITIONED = "preconditioned"


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    matrix_tag: MatrixTag
    params: dict = field(default_factory=dict)

    def distance_from_one(self) -> float:
        return float(np.max(np.abs(self.eigenvalues - 1.0))) if self.eigenvalues.size else 0.0

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im"])
            for z in self.eigenvalues:
                w.writerow([f"{z.real:.17g}", f"{z.imag:.17g}"])


def sort_spectrum(eigs) -> np.ndarray:
    eigs = np.asarray(eigs, dtype=np.complex128)
    return eigs[np.lexsort((eigs.imag, eigs.real))]


def preconditioned_matrix(P: Preconditioner, A: np.ndarray) -> np.ndarray:
    """``P^{-1} A`` assembled one column at a time through the preconditioner solve."""
    out = np.empty_like(A, dtype=np.complex128)
    for m in range(A.shape[1]):
        out[:, m] = P.apply(A[:, m])
    return out


def interface_operator(cluster: Cluster) -> np.ndarray:
    L = build_L(cluster)
    return np.eye(L.shape[0]) - L


def spectrum_study(domain: Domain, n_sub: int, potential, p: float, tag=MatrixTag.PLAIN, workers: int = 1) -> SpectrumReport:
    """Sorted spectrum of the interface operator at the first time step (``n = 1``)."""
    tag = MatrixTag(tag)
    spec = catalog(potential) if isinstance(potential, str) else potential
    if not spec.is_linear:
        raise ValueError("the interface matrix exists only for linear potentials")
    decomp = decompose(domain, n_sub)
    with Cluster(decomp, spec, domain.dt, p, workers=workers) as cluster:
        cluster.prepare(1, [initial_condition(m.nodes) for m in decomp.meshes])
        A = interface_operator(cluster)
    if tag is MatrixTag.PRECONDITIONED:
        A = preconditioned_matrix(build_preconditioner(decomp, domain.dt, p, workers=workers), A)
    params = dict(N=n_sub, p=p, dt=domain.dt, dx=domain.dx, potential=spec.tag.value)
    return SpectrumReport(sort_spectrum(eigenvalues_dense(A)), tag, params)
