"""Fixed-step RK4 integration of delayed octonion networks, with or without control.

The state is integrated in error coordinates ``e = w - z`` where ``z`` is the
target (zero when none is given); because the shifted system has the same
vector field as the original one, only the controller sees ``e``.

Sign handling.  With ``sign_treatment="implicit"`` (default) the
discontinuous ``-kappa_hat sign(e)`` term is frozen at the step start for
components that are away from zero, and components that start at zero or
would cross zero are resolved by soft-thresholding, which is the exact
Filippov sliding motion for a constant drift.  This reaches and keeps exact
zeros.  ``sign_treatment="explicit"`` evaluates ``sign`` at every RK4 stage,
which chatters with amplitude about ``h * kappa_hat``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .control import (
    BRANCH_ZERO,
    ControllerConfig,
    adaptive_branch,
    adaptive_rates,
    sign_band,
)
from .criteria import LambdaVec
from .history import ConstantHistory, HistoryFn, HistoryTrajectory, LiveHistory
from .network import NetworkSpec, RateFunction, delayed_term, instant_term, rhs_octonion
from .octonion import DIM, Octonion

SIGN_TREATMENTS = ("implicit", "explicit")
FORMS = ("real", "octonion")


class DivergenceError(RuntimeError):
    """Raised when the state becomes non-finite or too large; carries the partial result."""

    def __init__(self, message: str, result: "SimResult") -> None:
        super().__init__(message)
        self.result = result


def as_history(initial) -> HistoryFn:
    """Constant arrays become :class:`ConstantHistory`; callables are used as given."""
    if callable(initial):
        return initial
    return ConstantHistory(np.asarray(initial, dtype=float))


@dataclass(frozen=True, eq=False)
class SimConfig:
    t_start: float = 0.0
    t_end: float = 10.0
    h: float = 1e-3
    initial_history: object = None
    norm_zero_tol: float = 1e-9
    target: np.ndarray | None = None
    sign_treatment: str = "implicit"
    dead_band: float = 0.0
    form: str = "real"
    divergence_norm: float = 1e12

    def __post_init__(self) -> None:
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if not self.h > 0:
            raise ValueError("step h must be positive")
        if not self.norm_zero_tol > 0:
            raise ValueError("norm_zero_tol must be positive")
        if self.initial_history is None:
            raise ValueError("an initial history (state array or callable) is required")
        if self.sign_treatment not in SIGN_TREATMENTS:
            raise ValueError(f"sign_treatment must be one of {SIGN_TREATMENTS}")
        if self.form not in FORMS:
            raise ValueError(f"form must be one of {FORMS}")
        if self.dead_band < 0:
            raise ValueError("dead_band must be nonnegative")

    @property
    def steps(self) -> int:
        return max(1, int(math.ceil((self.t_end - self.t_start) / self.h - 1e-9)))


@dataclass
class SimResult:
    """Grid trajectory plus per-step norms and (when adaptive) gains."""

    trajectory: HistoryTrajectory
    norms: np.ndarray
    lam: LambdaVec
    target_array: np.ndarray
    delay_bound: Callable[[float], float]
    kappa: np.ndarray | None = None
    kappa_hat: np.ndarray | None = None
    monitors: dict = field(default_factory=dict)
    phases: object = None
    diverged: bool = False

    @property
    def times(self) -> np.ndarray:
        return self.trajectory.grid

    @property
    def states(self) -> np.ndarray:
        return self.trajectory.states


def _pre_states(history: HistoryFn, t0: float, h: float, m: int, shape) -> np.ndarray:
    if m == 0:
        return np.empty((0,) + tuple(shape))
    if isinstance(history, ConstantHistory):
        return np.broadcast_to(history.value, (m,) + tuple(shape)).copy()
    times = t0 - h * np.arange(m, 0, -1)
    return np.stack([np.asarray(history(float(t)), dtype=float) for t in times])


def _pre_count(bound: Callable[[float], float], t0: float, h: float, steps: int) -> int:
    grid = t0 + h * np.arange(steps + 1)
    earliest = min(float(t - bound(float(t))) for t in grid)
    return max(0, int(math.ceil((t0 - earliest) / h - 1e-9)))


def solve_dde(
    rhs: Callable[[float, np.ndarray, np.ndarray], np.ndarray],
    tau: Callable[[float], np.ndarray],
    history: HistoryFn,
    t0: float,
    t_end: float,
    h: float,
) -> HistoryTrajectory:
    """RK4 for ``y' = rhs(t, y, y_delayed)`` with ``y`` of shape ``(n, m)``.

    ``tau(t)`` returns an ``(n, n)`` matrix and ``y_delayed[p, q]`` is row ``q``
    of ``y`` at ``t - tau(t)[p, q]``.  Uncontrolled plumbing shared with the
    tests; no pre-start window is recorded.
    """
    y = np.array(history(t0), dtype=float)
    if y.ndim != 2:
        raise ValueError("states must be 2-d arrays (n, m)")
    steps = max(1, int(math.ceil((t_end - t0) / h - 1e-9)))
    live = LiveHistory(t0, h, steps, y.shape[0], y.shape[1], history)
    live.push_state(y)
    for k in range(steps):
        t = t0 + k * h
        k1 = rhs(t, y, live.lookup(t - tau(t)))
        live.push_deriv(k1)
        th = t + 0.5 * h
        k2 = rhs(th, y + 0.5 * h * k1, live.lookup(th - tau(th)))
        k3 = rhs(th, y + 0.5 * h * k2, live.lookup(th - tau(th)))
        t1 = t + h
        k4 = rhs(t1, y + h * k3, live.lookup(t1 - tau(t1)))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise FloatingPointError(f"non-finite state at t={t1}")
        live.push_state(y)
    t_last = t0 + steps * h
    live.push_deriv(rhs(t_last, y, live.lookup(t_last - tau(t_last))))
    return HistoryTrajectory(t0, h, live.states, live.derivs, history, np.empty((0,) + y.shape))


def _octonion_rhs(net: NetworkSpec, w: np.ndarray, wd: np.ndarray) -> np.ndarray:
    ws = [Octonion.from_array(row) for row in w]
    wds = [[Octonion.from_array(wd[p, q]) for q in range(net.n)] for p in range(net.n)]
    return np.array([o.c for o in rhs_octonion(net, ws, wds)])


class _Shifted:
    """Initial history seen in error coordinates."""

    def __init__(self, history: HistoryFn, z: np.ndarray) -> None:
        self.history = history
        self.z = z

    def __call__(self, t: float) -> np.ndarray:
        return np.asarray(self.history(t), dtype=float) - self.z


def integrate(
    net: NetworkSpec,
    controller: ControllerConfig,
    lam: LambdaVec | None,
    rate: RateFunction | None,
    config: SimConfig,
) -> SimResult:
    """Integrate the (controlled) network on ``[t_start, t_end]`` with step ``h``.

    Records states, Lambda-norms of ``w - z`` and adaptive gains.  Raises
    :class:`DivergenceError` (with the partial result attached) when the
    state blows up.
    """
    n = net.n
    lam = LambdaVec.uniform(n, 1.0) if lam is None else lam
    if lam.n != n:
        raise ValueError(f"Lambda is for {lam.n} neurons, network has {n}")
    z = np.zeros((n, DIM)) if config.target is None else np.asarray(config.target, dtype=float).reshape(n, DIM)
    if controller.variant == "fixed" and controller.kappa.shape != (n, DIM):
        raise ValueError(f"fixed gains must have shape {(n, DIM)}")
    adaptive = controller.variant == "adaptive"
    controlled = controller.variant != "none"
    if adaptive and rate is None:
        raise ValueError("adaptive control needs a rate function for mu(t)")
    implicit = config.sign_treatment == "implicit"
    db = config.dead_band

    history = as_history(config.initial_history)
    e_hist = ConstantHistory(history.value - z) if isinstance(history, ConstantHistory) else _Shifted(history, z)
    t0, h, steps = config.t_start, config.h, config.steps
    delays = net.delays
    m = _pre_count(delays.tau_bound, t0, h, steps)
    pre = _pre_states(history, t0, h, m, (n, DIM))

    inv_lam = 1.0 / lam.blocks
    pre_norms = np.max(np.abs(pre - z) * inv_lam, axis=(1, 2)) if m else np.empty(0)
    all_norms = np.empty(m + steps + 1)
    all_norms[:m] = pre_norms
    kap_series = np.empty(steps + 1) if adaptive else None
    khat_series = np.empty(steps + 1) if adaptive else None

    if controller.variant == "fixed":
        kap_k, khat_k = controller.kappa, controller.kappa_hat
    elif adaptive:
        kap_k, khat_k = float(controller.kappa0), float(controller.kappa_hat0)
    else:
        kap_k, khat_k = 0.0, 0.0

    real_form = config.form == "real"

    def delayed(t: float) -> np.ndarray:
        ed = live.lookup(t - delays.tau(t)) + z
        return delayed_term(net, ed) if real_form else ed

    def drift(e: np.ndarray, dl: np.ndarray) -> np.ndarray:
        if real_form:
            return instant_term(net, e + z) + dl
        return _octonion_rhs(net, e + z, dl)

    e = np.array(e_hist(t0), dtype=float).reshape(n, DIM)
    live = LiveHistory(t0, h, steps, n, DIM, e_hist)
    live.push_state(e)
    all_norms[m] = float(np.max(np.abs(e) * inv_lam))
    window_start = np.array(
        [int(math.ceil((t0 + k * h - delays.tau_bound(t0 + k * h) - t0) / h - 1e-9)) + m for k in range(steps + 1)]
    )
    np.maximum(window_start, 0, out=window_start)

    def finish(count: int, diverged: bool) -> SimResult:
        traj = HistoryTrajectory(t0, h, live.states[:count] + z, live.derivs[:count].copy(), history, pre)
        if live.known < count:
            traj.derivs[live.known :] = np.nan
        return SimResult(
            traj,
            all_norms[m : m + count].copy(),
            lam,
            z,
            delays.tau_bound,
            None if kap_series is None else kap_series[:count].copy(),
            None if khat_series is None else khat_series[:count].copy(),
            diverged=diverged,
        )

    def filippov(s: np.ndarray, e_now: np.ndarray, khat) -> np.ndarray:
        zero = e_now == 0.0
        if not np.any(zero):
            return s
        return np.where(zero, s - np.clip(s, -khat, khat), s)

    c1, c2, c3 = controller.c1, controller.c2, controller.c3
    branch, khat_rate = BRANCH_ZERO, 0.0

    def kap_rate(ts: float, e_s: np.ndarray) -> float:
        if branch == BRANCH_ZERO:
            return 0.0
        norm = float(np.max(np.abs(e_s) * inv_lam))
        return adaptive_rates(branch, norm, float(rate.mu(ts)), c1, c2, c3)[0]

    def field_(e_s: np.ndarray, dl: np.ndarray, kap, khat, sigma) -> np.ndarray:
        out = drift(e_s, dl)
        if not controlled:
            return out
        sig = sigma if implicit else sign_band(e_s, db)
        return out - kap * e_s - khat * sig

    for k in range(steps):
        t = t0 + k * h
        th, t1 = t + 0.5 * h, t + h
        if adaptive:
            kap_series[k], khat_series[k] = kap_k, khat_k
            sup = float(np.max(all_norms[window_start[k] : m + k + 1]))
            branch = adaptive_branch(sup, config.norm_zero_tol)
            khat_rate = adaptive_rates(branch, 0.0, 0.0, c1, c2, c3)[1]
        sigma = sign_band(e, db) if controlled and implicit else None
        khat_h = khat_k + 0.5 * h * khat_rate
        khat_1 = khat_k + h * khat_rate

        # k1 doubles as the stored derivative at t_k
        dl = delayed(t)
        s1 = drift(e, dl)
        if controlled:
            live.push_deriv(filippov(s1 - kap_k * e - khat_k * np.sign(e), e, khat_k))
            f1 = s1 - kap_k * e - khat_k * (sigma if implicit else sign_band(e, db))
        else:
            live.push_deriv(s1)
            f1 = s1
        r1 = kap_rate(t, e) if adaptive else 0.0

        dl = delayed(th)
        e2 = e + 0.5 * h * f1
        f2 = field_(e2, dl, kap_k + 0.5 * h * r1, khat_h, sigma)
        r2 = kap_rate(th, e2) if adaptive else 0.0
        e3 = e + 0.5 * h * f2
        f3 = field_(e3, dl, kap_k + 0.5 * h * r2, khat_h, sigma)
        r3 = kap_rate(th, e3) if adaptive else 0.0
        e4 = e + h * f3
        f4 = field_(e4, delayed(t1), kap_k + h * r3, khat_1, sigma)
        e_new = e + (h / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4)

        if controlled and implicit:
            moving = sigma != 0.0
            # a frozen-sign step that overshoots zero lands on the sliding surface
            e_new = np.where(moving & (np.sign(e_new) != sigma), 0.0, e_new)
            if not np.all(moving):
                shrunk = np.sign(e_new) * np.maximum(np.abs(e_new) - h * khat_h, 0.0)
                e_new = np.where(moving, e_new, shrunk)

        if adaptive:
            r4 = kap_rate(t1, e4)
            kap_k = kap_k + (h / 6.0) * (r1 + 2.0 * r2 + 2.0 * r3 + r4)
            khat_k = khat_1

        e = e_new
        norm = float(np.max(np.abs(e) * inv_lam))
        all_norms[m + k + 1] = norm if math.isfinite(norm) else np.inf
        if not np.all(np.isfinite(e)) or not norm <= config.divergence_norm:
            live.push_state(e)
            if adaptive:
                kap_series[k + 1], khat_series[k + 1] = kap_k, khat_k
            raise DivergenceError(f"state diverged at t={t1:.6g}", finish(k + 2, True))
        live.push_state(e)

    t_last = t0 + steps * h
    if adaptive:
        kap_series[steps], khat_series[steps] = kap_k, khat_k
    s_last = drift(e, delayed(t_last))
    if controlled:
        s_last = filippov(s_last - kap_k * e - khat_k * np.sign(e), e, khat_k)
    live.push_deriv(s_last)
    return finish(steps + 1, False)
