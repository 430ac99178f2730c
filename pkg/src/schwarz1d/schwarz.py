"""Classical optimized Schwarz iteration on the interface vector.

The interface vector is a plain complex array of length ``2N - 2`` ordered
``(r_1, l_2, r_2, ..., l_{N-1}, r_{N-1}, l_N)``. Subdomain ``j`` (0-based)
owns ``l`` at index ``2j - 1`` and ``r`` at index ``2j``.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .exceptions import ConvergenceError
from .workers import Cluster


def left_index(j: int) -> int:
    return 2 * j - 1


def right_index(j: int) -> int:
    return 2 * j


def owner(index: int) -> int:
    """Subdomain (0-based) owning entry ``index`` of the interface vector."""
    return (index + 1) // 2


def split_fluxes(g, n_sub: int):
    """Per-subdomain incoming ``(l, r)``; the physical-boundary fluxes are identically 0."""
    g = np.asarray(g, dtype=np.complex128)
    if g.shape != (2 * n_sub - 2,):
        raise ValueError(f"interface vector has shape {g.shape}, expected ({2 * n_sub - 2},)")
    l = np.zeros(n_sub, dtype=np.complex128)
    r = np.zeros(n_sub, dtype=np.complex128)
    l[1:] = g[1::2]
    r[:-1] = g[0::2]
    return l, r


def initial_guess(mode: str, size: int, seed: Optional[int] = None) -> np.ndarray:
    """``'zero'`` or ``'random'`` (real and imaginary parts uniform on [0, 1])."""
    if mode == "zero":
        return np.zeros(size, dtype=np.complex128)
    if mode == "random":
        rng = np.random.default_rng(seed)
        return rng.uniform(0.0, 1.0, size) + 1j * rng.uniform(0.0, 1.0, size)
    raise ValueError(f"unknown initial guess mode {mode!r}")


def apply_R(cluster: Cluster, g):
    """One Schwarz sweep: local solves with incoming fluxes, then neighbour exchange.

    Returns ``(R(g), [v_j])``.
    """
    n_sub = cluster.n_sub
    l, r = split_fluxes(g, n_sub)
    vs = cluster.map(lambda w, lj, rj: w.solve(lj, rj), l, r)
    out = cluster.map(lambda w, lj, rj, v: w.outgoing(lj, rj, v), l, r, vs)
    g_new = np.empty(2 * n_sub - 2, dtype=np.complex128)
    for j, (to_left, to_right) in enumerate(out):
        if j > 0:
            g_new[right_index(j - 1)] = to_left
        if j < n_sub - 1:
            g_new[left_index(j + 1)] = to_right
    cluster.exchanged += g_new.size
    return g_new, vs


def classical_iterate(cluster: Cluster, g0, tol=3e-12, max_k=10000):
    """Fixed point ``g <- R(g)`` until ``||g_new - g|| <= tol max(1, ||g||)``.

    Returns ``(g, k_used, vs)``; ``k_used`` counts applications of ``R``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = np.array(g0, dtype=np.complex128)
    diff = np.inf
    for k in range(1, max_k + 1):
        g_new, vs = apply_R(cluster, g)
        diff = np.linalg.norm(g_new - g)
        scale = max(1.0, np.linalg.norm(g))
        g = g_new
        if diff <= tol * scale:
            return g, k, vs
    raise ConvergenceError(f"Schwarz iteration did not converge in {max_k} iterations", max_k, diff)
