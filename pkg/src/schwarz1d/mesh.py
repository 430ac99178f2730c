"""Global 1D domain, uniform mesh and its non-overlapping decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Domain:
    """Space-time box ``(a0, b0) x (0, T)`` with time step ``dt`` and target mesh width ``dx``."""

    a0: float
    b0: float
    T: float
    dt: float
    dx: float

    def __post_init__(self):
        if not self.a0 < self.b0:
            raise ValueError(f"need a0 < b0, got ({self.a0}, {self.b0})")
        if self.dt <= 0 or self.dx <= 0 or self.T <= 0:
            raise ValueError("T, dt and dx must be positive")
        if self.n_steps < 1:
            raise ValueError(f"T/dt = {self.T / self.dt} gives no time step")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    @property
    def length(self) -> float:
        return self.b0 - self.a0


@dataclass(frozen=True)
class SubMesh:
    """Uniform mesh of one subdomain. Endpoint nodes are shared with the neighbours."""

    index: int
    n_sub: int
    nodes: np.ndarray = field(repr=False)
    h: float

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    @property
    def is_first(self) -> bool:
        return self.index == 0

    @property
    def is_last(self) -> bool:
        return self.index == self.n_sub - 1

    @property
    def interface_nodes(self) -> tuple[int, ...]:
        """Local indices of the nodes lying on an interface (not on the physical boundary)."""
        idx = []
        if not self.is_first:
            idx.append(0)
        if not self.is_last:
            idx.append(self.n_nodes - 1)
        return tuple(idx)


@dataclass(frozen=True)
class Decomposition:
    domain: Domain
    n_sub: int
    cells_per_sub: int
    boundaries: tuple[float, ...]
    meshes: tuple[SubMesh, ...] = field(repr=False)

    @property
    def node_counts(self) -> list[int]:
        return [m.n_nodes for m in self.meshes]

    @property
    def n_cells(self) -> int:
        return self.n_sub * self.cells_per_sub

    @property
    def h(self) -> float:
        return self.meshes[0].h

    @property
    def interface_size(self) -> int:
        return 2 * self.n_sub - 2

    def global_nodes(self) -> np.ndarray:
        return self.gather([m.nodes for m in self.meshes])

    def gather(self, fields) -> np.ndarray:
        """Concatenate per-subdomain nodal fields, keeping one copy of each interface node.

        The right neighbour's copy is dropped for every interface.
        """
        parts = [np.asarray(f) for f in fields]
        if len(parts) != self.n_sub:
            raise ValueError(f"expected {self.n_sub} fields, got {len(parts)}")
        return np.concatenate([parts[0]] + [f[1:] for f in parts[1:]])

    def scatter(self, values: np.ndarray) -> list[np.ndarray]:
        """Restrict a global nodal field to each subdomain (interface values duplicated)."""
        values = np.asarray(values)
        if values.shape[0] != self.n_cells + 1:
            raise ValueError(f"global field has {values.shape[0]} nodes, mesh has {self.n_cells + 1}")
        m = self.cells_per_sub
        return [values[j * m : (j + 1) * m + 1].copy() for j in range(self.n_sub)]

    def monodomain(self) -> "Decomposition":
        """The same global mesh as a single subdomain."""
        return _build(self.domain, 1, self.n_cells)


def _cells_for(length: float, dx: float) -> int:
    # rounding before ceil absorbs representation error in length/dx (0.125/1e-5 -> 12499.999...)
    return math.ceil(round(length / dx, 9))


def _build(domain: Domain, n_sub: int, cells_per_sub: int) -> Decomposition:
    n_cells = n_sub * cells_per_sub
    a0, b0 = domain.a0, domain.b0
    k = np.arange(n_cells + 1, dtype=float)
    # convex combination: exact at both endpoints and identical for shared nodes
    x = (a0 * (n_cells - k) + b0 * k) / n_cells
    x.setflags(write=False)
    h = (b0 - a0) / n_cells
    meshes = []
    for j in range(n_sub):
        nodes = x[j * cells_per_sub : (j + 1) * cells_per_sub + 1]
        meshes.append(SubMesh(index=j, n_sub=n_sub, nodes=nodes, h=h))
    boundaries = tuple(float(x[j * cells_per_sub]) for j in range(n_sub + 1))
    return Decomposition(domain, n_sub, cells_per_sub, boundaries, tuple(meshes))


def decompose(domain: Domain, n_sub: int) -> Decomposition:
    """Split ``domain`` into ``n_sub`` equal subintervals with uniform meshes of width <= dx."""
    if n_sub < 1:
        raise ValueError(f"n_sub must be >= 1, got {n_sub}")
    cells = _cells_for(domain.length / n_sub, domain.dx)
    if cells < 1:
        raise ValueError("a subdomain would contain fewer than 2 nodes")
    return _build(domain, n_sub, cells)
