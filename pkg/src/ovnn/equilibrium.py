"""Equilibrium search through the delay-free companion network."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .criteria import LambdaVec, check_unique_equilibrium
from .network import NetworkSpec, delayed_term, instant_term, rhs_real
from .octonion import DIM


@dataclass
class FixedPointResult:
    point: np.ndarray
    spread: float
    residual: float
    finals: np.ndarray


def companion_rhs(net: NetworkSpec, z: np.ndarray) -> np.ndarray:
    """``-d z + A f(z) + B g(z) + I``: every delayed argument replaced by the current state."""
    return instant_term(net, z) + delayed_term(net, np.broadcast_to(z, (net.n, net.n, DIM)))


def companion_fixed_point(
    net: NetworkSpec,
    inits,
    lam: LambdaVec | None = None,
    t_end: float = 5.0,
    h: float = 1e-3,
) -> FixedPointResult:
    """Integrate the companion system from each initial state with RK4.

    Returns the mean end state, the largest pairwise Lambda-norm distance
    between end states and the max-abs residual of the network equation at
    the returned point.  Warns when the uniqueness criterion does not hold.
    """
    lam = LambdaVec.uniform(net.n, 1.0) if lam is None else lam
    if not check_unique_equilibrium(net, lam).satisfied:
        warnings.warn("uniqueness criterion fails for this Lambda; runs may not share a limit", stacklevel=2)
    starts = [np.asarray(z, dtype=float).reshape(net.n, DIM) for z in inits]
    if not starts:
        raise ValueError("at least one initial state is required")
    steps = int(np.ceil(t_end / h - 1e-9))
    finals = []
    for z in starts:
        z = z.copy()
        for _ in range(steps):
            k1 = companion_rhs(net, z)
            k2 = companion_rhs(net, z + 0.5 * h * k1)
            k3 = companion_rhs(net, z + 0.5 * h * k2)
            k4 = companion_rhs(net, z + h * k3)
            z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(z)):
                raise FloatingPointError("companion system diverged")
        finals.append(z)
    finals = np.stack(finals)
    spread = max(
        (float(np.max(np.abs(a - b) / lam.blocks)) for a, b in itertools.combinations(finals, 2)),
        default=0.0,
    )
    point = finals.mean(axis=0)
    wd = np.broadcast_to(point, (net.n, net.n, DIM))
    residual = float(np.max(np.abs(rhs_real(net, point, wd))))
    return FixedPointResult(point, spread, residual, finals)
