"""Uniform-grid trajectory storage with cubic Hermite dense output."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

HistoryFn = Callable[[float], np.ndarray]


class ConstantHistory:
    """Initial history equal to a fixed state for every ``t <= t_start``."""

    def __init__(self, value) -> None:
        self.value = np.array(value, dtype=float)
        self.value.setflags(write=False)

    def __call__(self, t: float) -> np.ndarray:
        return self.value


def hermite(theta, h: float, y0, y1, m0, m1):
    """Cubic Hermite interpolant on an interval of length ``h`` at local coordinate ``theta``."""
    t2 = theta * theta
    t3 = t2 * theta
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + theta
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    return h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1


_POWERS = np.arange(4.0)
_PAIR = np.array([0, 1])
# rows: powers of theta; columns: weights of y0, h m0, y1, h m1
_HERMITE_COEF = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-3.0, -2.0, 3.0, -1.0],
        [2.0, 1.0, -2.0, 1.0],
    ]
)


@dataclass
class HistoryTrajectory:
    """States and derivatives on the grid ``t0 + k h``, ``k = 0..N``.

    ``pre_states[i]`` is the initial history at ``t0 - (m - i) h`` for the
    ``m`` grid points preceding ``t0`` that delayed lookups can reach.
    """

    t0: float
    h: float
    states: np.ndarray
    derivs: np.ndarray
    initial_history: HistoryFn
    pre_states: np.ndarray

    @property
    def grid(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.states.shape[0])

    @property
    def t_last(self) -> float:
        return self.t0 + self.h * (self.states.shape[0] - 1)

    @property
    def pre_grid(self) -> np.ndarray:
        m = self.pre_states.shape[0]
        return self.t0 - self.h * np.arange(m, 0, -1)


def sample_history(traj: HistoryTrajectory, t: float) -> np.ndarray:
    """State at time ``t``: initial history before the start, Hermite interpolation after."""
    if t <= traj.t0:
        return np.asarray(traj.initial_history(t), dtype=float)
    last = traj.states.shape[0] - 1
    if t > traj.t_last:
        raise ValueError(f"t={t} is beyond the last grid time {traj.t_last}")
    kk = int(round((t - traj.t0) / traj.h))
    if traj.t0 + kk * traj.h == t:
        return traj.states[kk].copy()
    k = min(int(math.floor((t - traj.t0) / traj.h)), last - 1)
    theta = (t - (traj.t0 + k * traj.h)) / traj.h
    return hermite(theta, traj.h, traj.states[k], traj.states[k + 1], traj.derivs[k], traj.derivs[k + 1])


class LiveHistory:
    """History buffer filled during integration; answers vectorized delayed lookups.

    ``count`` states and ``known`` derivatives are stored.  Lookups past the
    last fully known interval extrapolate that interval's Hermite cubic.
    """

    def __init__(self, t0: float, h: float, steps: int, n: int, dim: int, history: HistoryFn) -> None:
        self.t0 = t0
        self.h = h
        self.dim = dim
        # state and derivative side by side so one gather fetches both
        self.buf = np.empty((steps + 1, n, 2 * dim))
        self.states = self.buf[..., :dim]
        self.derivs = self.buf[..., dim:]
        self.count = 0
        self.known = 0
        self.history = history
        self._cols = np.broadcast_to(np.arange(n), (n, n))
        self._const = history.value if isinstance(history, ConstantHistory) else None
        self._coef = _HERMITE_COEF * np.array([1.0, h, 1.0, h])

    def push_state(self, w: np.ndarray) -> None:
        self.states[self.count] = w
        self.count += 1

    def push_deriv(self, dw: np.ndarray) -> None:
        self.derivs[self.known] = dw
        self.known += 1

    def _pre(self, s: np.ndarray, out: np.ndarray, mask: np.ndarray) -> None:
        if self._const is not None:
            out[mask] = self._const[self._cols[mask]]
            return
        for p, q in zip(*np.nonzero(mask)):
            out[p, q] = np.asarray(self.history(float(s[p, q])), dtype=float)[q]

    def lookup(self, s: np.ndarray) -> np.ndarray:
        """``out[p, q]`` = state of neuron ``q`` at time ``s[p, q]``."""
        pre = s <= self.t0
        if pre.all():
            out = np.empty(s.shape + (self.dim,))
            self._pre(s, out, pre)
            return out
        if self.known == 0:
            raise RuntimeError("delayed lookup after the start before any derivative is known")
        dim = self.dim
        if self.known == 1:
            g0 = self.buf[0][self._cols]
            out = g0[..., :dim] + (s - self.t0)[..., None] * g0[..., dim:]
        else:
            j = np.floor((s - self.t0) / self.h).astype(np.intp)
            j = np.minimum(np.maximum(j, 0), self.known - 2)
            theta = (s - self.t0) / self.h - j
            weights = (theta[..., None] ** _POWERS) @ self._coef
            ends = j[..., None] + _PAIR
            nodes = self.buf[ends, self._cols[..., None]].reshape(s.shape + (4, dim))
            out = (weights[..., None, :] @ nodes)[..., 0, :]
        if pre.any():
            self._pre(s, out, pre)
        return out
