"""Real potentials ``V(t, x) + f(t, x, u)`` and the time-averaged linear part."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np


class PotentialTag(str, Enum):
    ZERO = "zero"
    HARMONIC_NEG = "neg_x2"
    LINEAR_TX = "5tx"
    CUBIC_TRAP = "x2_10_cubic"
    CUSTOM = "custom"


class NoNonlinearPartError(ValueError):
    pass


LinearFn = Callable[[float, np.ndarray], np.ndarray]
NonlinearFn = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PotentialSpec:
    linear: LinearFn
    nonlinear: Optional[NonlinearFn] = None
    tag: PotentialTag = PotentialTag.CUSTOM
    time_dependent: bool = True

    @property
    def is_linear(self) -> bool:
        return self.nonlinear is None


def _zero(t, x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _neg_x2(t, x):
    x = np.asarray(x, dtype=float)
    return -(x**2)


def _five_tx(t, x):
    return 5.0 * t * np.asarray(x, dtype=float)


def _x2_over_10(t, x):
    x = np.asarray(x, dtype=float)
    return x**2 / 10.0


def _neg_abs2(t, x, u):
    return -(np.abs(u) ** 2)


CATALOG = {
    PotentialTag.ZERO: PotentialSpec(_zero, None, PotentialTag.ZERO, time_dependent=False),
    PotentialTag.HARMONIC_NEG: PotentialSpec(_neg_x2, None, PotentialTag.HARMONIC_NEG, time_dependent=False),
    PotentialTag.LINEAR_TX: PotentialSpec(_five_tx, None, PotentialTag.LINEAR_TX, time_dependent=True),
    PotentialTag.CUBIC_TRAP: PotentialSpec(_x2_over_10, _neg_abs2, PotentialTag.CUBIC_TRAP, time_dependent=False),
}


def catalog(tag) -> PotentialSpec:
    """Look up a catalog potential by tag or config string ("zero", "neg_x2", "5tx", "x2_10_cubic")."""
    tag = PotentialTag(tag)
    if tag is PotentialTag.CUSTOM:
        raise ValueError("custom potentials are built with PotentialSpec(...) directly")
    return CATALOG[tag]


def averaged_linear(spec: PotentialSpec, n: int, dt: float, x):
    """``W_n(x) = (V(n dt, x) + V((n-1) dt, x)) / 2``."""
    if n < 1:
        raise ValueError(f"time index must be >= 1, got {n}")
    return 0.5 * (np.asarray(spec.linear(n * dt, x), dtype=float) + np.asarray(spec.linear((n - 1) * dt, x), dtype=float))


def eval_nonlinear(spec: PotentialSpec, t: float, x, u):
    if spec.nonlinear is None:
        raise NoNonlinearPartError(f"potential {spec.tag.value!r} has no nonlinear part")
    return np.real(spec.nonlinear(t, x, u))
