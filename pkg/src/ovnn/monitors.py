"""Weighted norms, windowed suprema and the convergence monitors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .criteria import LambdaVec
from .network import RateFunction


def lambda_inf_norm(lam: LambdaVec, y) -> float:
    """``max_{p,l} |y_p^l| / Lambda_p[l]`` for a state of shape ``(n, 8)`` or ``8n``."""
    arr = np.asarray(y, dtype=float).reshape(lam.n, -1)
    return float(np.max(np.abs(arr) / lam.blocks))


def lambda_inf_norms(lam: LambdaVec, ys: np.ndarray) -> np.ndarray:
    """Row-wise norms for a stack of states ``(..., n, 8)``."""
    arr = np.asarray(ys, dtype=float)
    return np.max(np.abs(arr) / lam.blocks, axis=(-2, -1))


class RangeMax:
    """Sparse table answering ``max(values[i:j+1])`` in O(1) after O(N log N) setup."""

    def __init__(self, values) -> None:
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("RangeMax needs a nonempty 1-d array")
        self.levels = [vals]
        span = 1
        while 2 * span <= vals.size:
            prev = self.levels[-1]
            self.levels.append(np.maximum(prev[:-span], prev[span:]))
            span *= 2

    def query(self, lo, hi):
        """Inclusive ranges; ``lo`` and ``hi`` may be integer arrays."""
        lo = np.asarray(lo, dtype=np.intp)
        hi = np.asarray(hi, dtype=np.intp)
        if np.any(lo > hi):
            raise ValueError("empty range")
        length = hi - lo + 1
        k = np.floor(np.log2(length)).astype(np.intp)
        out = np.empty(np.broadcast(lo, hi).shape)
        for level in np.unique(k):
            sel = k == level
            tab = self.levels[level]
            out[sel] = np.maximum(tab[lo[sel]], tab[hi[sel] - (1 << level) + 1])
        return out if out.ndim else float(out)


def _window_bounds(result, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Indices into the combined (pre-start + simulated) series for ``[t - tau(t), t]``."""
    traj = result.trajectory
    m = traj.pre_states.shape[0]
    h, t0 = traj.h, traj.t0
    bound = np.array([result.delay_bound(t) for t in times])
    starts = np.ceil((times - bound - t0) / h - 1e-9).astype(np.intp) + m
    ends = np.floor((times - t0) / h + 1e-9).astype(np.intp) + m
    return np.clip(starts, 0, None), ends


def _combined_norms(result, lam: LambdaVec) -> tuple[np.ndarray, np.ndarray]:
    traj = result.trajectory
    z = result.target_array
    pre = lambda_inf_norms(lam, traj.pre_states - z) if traj.pre_states.shape[0] else np.empty(0)
    main = lambda_inf_norms(lam, traj.states - z)
    return np.concatenate([traj.pre_grid, traj.grid]), np.concatenate([pre, main])


def _needs_history(result, starts: np.ndarray) -> None:
    if np.any(starts < 0):
        raise ValueError("window reaches before the available history")


def window_sup_series(result, lam: LambdaVec, rate: RateFunction | None = None, theta: float = 0.0) -> np.ndarray:
    """Windowed supremum of ``w(s) * norm(s) + theta s`` at every simulated grid point.

    ``w`` is ``mu`` when ``rate`` is given and 1 otherwise.
    """
    times, norms = _combined_norms(result, lam)
    vals = norms * rate.mu(times) if rate is not None else norms.copy()
    if theta:
        vals = vals + theta * times
    grid = result.trajectory.grid
    lo, hi = _window_bounds(result, grid)
    return RangeMax(vals).query(lo, hi)


def window_sup_norm(result, lam: LambdaVec, t: float, rate: RateFunction | None = None) -> float:
    """Maximum of the (optionally mu-weighted) norm over grid points in ``[t - tau(t), t]``."""
    traj = result.trajectory
    if t < traj.t0 - 1e-12 or t > traj.t_last + 1e-12:
        raise ValueError(f"t={t} lies outside the simulated range")
    times, norms = _combined_norms(result, lam)
    vals = norms * rate.mu(times) if rate is not None else norms
    lo, hi = _window_bounds(result, np.array([float(t)]))
    return float(np.max(vals[lo[0] : hi[0] + 1]))


@dataclass
class MonitorSeries:
    """A monitor evaluated on the simulation grid plus its empirical onset of non-increase."""

    times: np.ndarray
    values: np.ndarray
    onset_index: int
    atol: float

    @property
    def onset(self) -> float:
        return float(self.times[self.onset_index])

    def increases(self, start: float | None = None, stop: float | None = None) -> int:
        """Number of steps in ``[start, stop]`` where the series rises by more than ``atol``."""
        lo = 0 if start is None else int(np.searchsorted(self.times, start - 1e-12))
        hi = len(self.times) if stop is None else int(np.searchsorted(self.times, stop + 1e-12))
        seg = self.values[lo:hi]
        return int(np.sum(np.diff(seg) > self.atol))


def _onset(values: np.ndarray, atol: float) -> int:
    rises = np.nonzero(np.diff(values) > atol)[0]
    return int(rises[-1] + 1) if rises.size else 0


def monitor_p(result, lam: LambdaVec, rate: RateFunction, rtol: float = 1e-9) -> MonitorSeries:
    """``P(t) = sup mu(s) ||Y(s)||`` over the delay window, with its onset of non-increase.

    ``atol`` for the onset is ``rtol`` times the largest value of ``P``.
    """
    vals = window_sup_series(result, lam, rate)
    atol = rtol * float(np.max(vals)) if vals.size else 0.0
    return MonitorSeries(result.trajectory.grid, vals, _onset(vals, atol), atol)


def monitor_phase2(result, lam: LambdaVec, theta: float, rtol: float = 1e-9) -> MonitorSeries:
    """``P2(t) = sup (||Y-hat(s)|| + theta s)`` over the delay window."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    vals = window_sup_series(result, lam, theta=theta)
    atol = rtol * max(float(np.max(np.abs(vals))), 1.0)
    return MonitorSeries(result.trajectory.grid, vals, _onset(vals, atol), atol)


@dataclass
class Phases:
    """Finite-time phase boundaries; ``None`` means not reached within the horizon."""

    T1: float | None
    T2: float | None
    t_zero: float | None

    def to_dict(self) -> dict:
        return {"T1": self.T1, "T2": self.T2, "t_zero": self.t_zero}


def _settle_index(mask: np.ndarray) -> int | None:
    """First index from which ``mask`` holds through the end."""
    if not mask[-1]:
        return None
    bad = np.nonzero(~mask)[0]
    return int(bad[-1] + 1) if bad.size else 0


def detect_phases(result, lam: LambdaVec, tol: float = 1e-6) -> Phases:
    """``T1``: first time the windowed sup is ``<= 1``.  ``T2``: first time ``>= T1``
    from which the norm stays ``<= tol``.  ``t_zero`` is the same for exact zero."""
    grid = result.trajectory.grid
    sup = window_sup_series(result, lam)
    hits = np.nonzero(sup <= 1.0)[0]
    if hits.size == 0:
        return Phases(None, None, None)
    i1 = int(hits[0])
    norms = result.norms
    i2 = _settle_index(norms <= tol)
    iz = _settle_index(norms == 0.0)
    t2 = None if i2 is None else float(grid[max(i2, i1)])
    tz = None if iz is None else float(grid[max(iz, i1)])
    return Phases(float(grid[i1]), t2, tz)


def feasible_theta(gains, lam: LambdaVec, kappa_hat=None, fraction: float = 0.5) -> float:
    """A ``theta`` strictly inside the phase-II inequality:
    ``fraction * min (kappa_hat - kappa_hat_min) / Lambda_p[l]``."""
    kh = gains.kappa_hat if kappa_hat is None else np.asarray(kappa_hat, dtype=float)
    slack = float(np.min((kh - gains.kappa_hat_min) / lam.blocks))
    if not slack > 0 or not math.isfinite(slack):
        raise ValueError("kappa_hat does not exceed its lower bound; no feasible theta")
    return fraction * slack
