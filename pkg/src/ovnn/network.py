"""Octonion-valued network model, its real decomposition and delay/rate profiles.

Neuron states are handled as arrays of shape ``(n, 8)``: row ``p`` is the
coefficient vector of neuron ``p`` in basis order.  Weights ``A`` and ``B``
have shape ``(n, n, 8)`` and inputs ``I`` shape ``(n, 8)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .octonion import DIM, Octonion, left_rows, oct_add, oct_mul, oct_scale

ArrayFn = Callable[[np.ndarray], np.ndarray]


def sign0(x: np.ndarray) -> np.ndarray:
    """Sign with ``sign(0) = 0``."""
    return np.sign(x)


def _readonly(arr, shape: tuple[int, ...] | None = None, name: str = "array") -> np.ndarray:
    out = np.array(arr, dtype=float)
    if shape is not None and out.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} must be finite")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ActivationSpec:
    """Undelayed/delayed activations acting on the 8 real coordinates.

    ``f`` and ``g`` map arrays of shape ``(..., 8)`` to the same shape.  The
    bound matrices hold upper bounds for the partial derivatives,
    ``0 <= d f^l1 / d w^l2 <= lambda_bound[l1, l2]``.
    """

    f: ArrayFn
    g: ArrayFn
    lambda_bound: np.ndarray
    delta_bound: np.ndarray
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for attr in ("lambda_bound", "delta_bound"):
            mat = _readonly(getattr(self, attr), (DIM, DIM), attr)
            if np.any(mat < 0):
                raise ValueError(f"{attr} must be elementwise nonnegative")
            object.__setattr__(self, attr, mat)


@dataclass(frozen=True, eq=False)
class DelayProfile:
    """Per-channel delays ``tau[p, q](t)`` together with a common bound ``tau(t)``.

    ``kind`` is ``"constant"`` (``values`` are the delays), ``"proportional"``
    (``values`` are the ratios ``omega`` with ``tau = omega * t``) or
    ``"custom"`` (closures supplied by the caller).
    """

    kind: str
    values: np.ndarray | None = None
    custom_tau: Callable[[float], np.ndarray] | None = None
    custom_bound: Callable[[float], float] | None = None

    @classmethod
    def constant(cls, delays) -> DelayProfile:
        vals = np.array(delays, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1] or np.any(vals < 0):
            raise ValueError("constant delays must be a nonnegative square matrix")
        return cls("constant", _readonly(vals, name="delays"))

    @classmethod
    def proportional(cls, ratios) -> DelayProfile:
        vals = np.array(ratios, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise ValueError("delay ratios must be a square matrix")
        if np.any(vals < 0) or np.any(vals >= 1):
            raise ValueError("proportional delay ratios must lie in [0, 1)")
        return cls("proportional", _readonly(vals, name="ratios"))

    @classmethod
    def custom(cls, tau: Callable[[float], np.ndarray], bound: Callable[[float], float]) -> DelayProfile:
        return cls("custom", None, tau, bound)

    @property
    def n(self) -> int | None:
        return None if self.values is None else self.values.shape[0]

    def tau(self, t: float) -> np.ndarray:
        if self.kind == "constant":
            return self.values
        if self.kind == "proportional":
            return self.values * t
        return np.asarray(self.custom_tau(t), dtype=float)

    def tau_bound(self, t: float) -> float:
        if self.kind == "constant":
            return float(self.values.max())
        if self.kind == "proportional":
            return float(self.values.max()) * t
        return float(self.custom_bound(t))

    @property
    def omega(self) -> float:
        if self.kind != "proportional":
            raise ValueError("omega is only defined for proportional delays")
        return float(self.values.max())

    def check(self, times: Sequence[float]) -> list[str]:
        """Return a list of invariant violations found at the sampled times."""
        problems = []
        prev = -math.inf
        for t in times:
            taus = self.tau(t)
            bound = self.tau_bound(t)
            if np.any(taus < 0):
                problems.append(f"negative delay at t={t}")
            if np.any(taus > bound + 1e-12):
                problems.append(f"delay exceeds its bound at t={t}")
            lag = t - bound
            if lag < prev - 1e-12:
                problems.append(f"t - tau(t) decreases at t={t}")
            prev = lag
        return problems

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.values is not None:
            out["values"] = self.values.tolist()
        return out


@dataclass(frozen=True, eq=False)
class RateFunction:
    """A growth rate ``mu(t)`` with its limits ``alpha`` and ``beta``."""

    kind: str
    param: float
    alpha: float
    beta: float
    custom_mu: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")

    @classmethod
    def exponential(cls, alpha: float, delays: DelayProfile) -> RateFunction:
        """``mu(t) = exp(alpha t)``; needs bounded delays, ``beta = exp(alpha tau) - 1``."""
        if alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if delays.kind != "constant":
            raise ValueError(
                "an exponential rate needs bounded (constant) delays; "
                f"got {delays.kind} delays, for which mu(t)/mu(t - tau(t)) is unbounded"
            )
        tau = delays.tau_bound(0.0)
        return cls("exponential", alpha, alpha, math.expm1(alpha * tau))

    @classmethod
    def power(cls, gamma: float, delays: DelayProfile) -> RateFunction:
        """``mu(t) = t**gamma``; ``alpha = 0`` and ``beta = (1 - omega)**-gamma - 1``."""
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        if delays.kind == "proportional":
            beta = (1.0 - delays.omega) ** (-gamma) - 1.0
        elif delays.kind == "constant":
            beta = 0.0
        else:
            raise ValueError("power rate needs constant or proportional delays; use RateFunction.custom")
        return cls("power", gamma, 0.0, beta)

    @classmethod
    def custom(cls, mu: Callable[[np.ndarray], np.ndarray], alpha: float, beta: float) -> RateFunction:
        return cls("custom", float("nan"), alpha, beta, mu)

    def mu(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "exponential":
            return np.exp(self.param * t)
        if self.kind == "power":
            return np.power(np.maximum(t, 0.0), self.param)
        return np.asarray(self.custom_mu(t), dtype=float)

    def describe(self) -> dict:
        return {"kind": self.kind, "param": self.param, "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """An ``n``-neuron octonion network with self-decay, weights and inputs."""

    d: np.ndarray
    A: np.ndarray
    B: np.ndarray
    I: np.ndarray
    activations: tuple[ActivationSpec, ...]
    delays: DelayProfile

    def __post_init__(self) -> None:
        d = _readonly(self.d, name="d")
        if d.ndim != 1:
            raise ValueError("d must be a vector")
        n = d.shape[0]
        if np.any(d <= 0):
            raise ValueError("self-decay rates d_p must be positive")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "A", _readonly(self.A, (n, n, DIM), "A"))
        object.__setattr__(self, "B", _readonly(self.B, (n, n, DIM), "B"))
        object.__setattr__(self, "I", _readonly(self.I, (n, DIM), "I"))
        acts = tuple(self.activations)
        if len(acts) != n:
            raise ValueError(f"expected {n} activation specs, got {len(acts)}")
        object.__setattr__(self, "activations", acts)
        if self.delays.n is not None and self.delays.n != n:
            raise ValueError(f"delay matrix is {self.delays.n}x{self.delays.n}, network has {n} neurons")

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @cached_property
    def a_rows(self) -> np.ndarray:
        """``a_rows[p, q, l] = a~_pq^T M^l``, shape ``(n, n, 8, 8)``."""
        return left_rows(self.A)

    @cached_property
    def b_rows(self) -> np.ndarray:
        return left_rows(self.B)

    @cached_property
    def _a_big(self) -> np.ndarray:
        n = self.n
        return self.a_rows.transpose(0, 2, 1, 3).reshape(n * DIM, n * DIM)

    @cached_property
    def _b_big(self) -> np.ndarray:
        n = self.n
        return self.b_rows.transpose(0, 2, 1, 3).reshape(n, DIM, n * DIM)

    @cached_property
    def _b_big_t(self) -> np.ndarray:
        return np.ascontiguousarray(self._b_big.transpose(0, 2, 1))

    @cached_property
    def _shared_activation(self) -> bool:
        first = self.activations[0]
        return all(act is first for act in self.activations)

    def apply_f(self, w: np.ndarray) -> np.ndarray:
        """Undelayed activations of an ``(n, 8)`` state."""
        if self._shared_activation:
            return np.asarray(self.activations[0].f(w), dtype=float)
        return np.stack([np.asarray(act.f(w[q]), dtype=float) for q, act in enumerate(self.activations)])

    def apply_g(self, w_delayed: np.ndarray) -> np.ndarray:
        """Delayed activations; ``w_delayed[p, q]`` is neuron ``q`` as seen by ``p``."""
        if self._shared_activation:
            return np.asarray(self.activations[0].g(w_delayed), dtype=float)
        return np.stack(
            [np.asarray(act.g(w_delayed[:, q]), dtype=float) for q, act in enumerate(self.activations)],
            axis=1,
        )

    def with_matrices(self, matrices: np.ndarray) -> NetworkSpec:
        """Copy whose weight rows are built from an alternative set of ``M^l``."""
        clone = NetworkSpec(self.d, self.A, self.B, self.I, self.activations, self.delays)
        clone.__dict__["a_rows"] = left_rows(self.A, matrices)
        clone.__dict__["b_rows"] = left_rows(self.B, matrices)
        return clone


def _as_states(net: NetworkSpec, w) -> np.ndarray:
    arr = np.asarray(w, dtype=float)
    if arr.size != net.n * DIM:
        raise ValueError(f"state must hold {net.n * DIM} reals, got {arr.size}")
    return arr.reshape(net.n, DIM)


def instant_term(net: NetworkSpec, w: np.ndarray) -> np.ndarray:
    """Undelayed part ``-d_p w_p + sum_q a~_pq^T M^l f~_q(w_q) + I_p`` of an ``(n, 8)`` state."""
    n = net.n
    fw = net.apply_f(w).reshape(n * DIM)
    return (net._a_big @ fw).reshape(n, DIM) - net.d[:, None] * w + net.I


def delayed_term(net: NetworkSpec, w_delayed: np.ndarray) -> np.ndarray:
    """Delayed part ``sum_q b~_pq^T M^l g~_q(w_delayed[p, q])``."""
    gw = net.apply_g(w_delayed).reshape(net.n, 1, net.n * DIM)
    return (gw @ net._b_big_t)[:, 0, :]


def rhs_real(net: NetworkSpec, w, w_delayed, u=None) -> np.ndarray:
    """Right-hand side of the decomposed 8n-dimensional real system.

    Component ``(p, l)`` is ``-d_p w_p^l + sum_q a~_pq^T M^l f~_q(w_q)
    + sum_q b~_pq^T M^l g~_q(w_delayed[p, q]) + I_p^l + u_p^l``.
    """
    n = net.n
    w = _as_states(net, w)
    wd = np.asarray(w_delayed, dtype=float)
    if wd.shape != (n, n, DIM):
        raise ValueError(f"delayed states must have shape {(n, n, DIM)}, got {wd.shape}")
    out = instant_term(net, w) + delayed_term(net, wd)
    if u is not None:
        out += _as_states(net, u)
    return out


def rhs_octonion(
    net: NetworkSpec,
    w: Sequence[Octonion],
    w_delayed: Sequence[Sequence[Octonion]],
    u: Sequence[Octonion] | None = None,
) -> list[Octonion]:
    """Direct octonion-product evaluation of the network equation (cross-check oracle)."""
    n = net.n
    if len(w) != n or len(w_delayed) != n or any(len(row) != n for row in w_delayed):
        raise ValueError("state dimensions do not match the network")
    if u is not None and len(u) != n:
        raise ValueError("control dimensions do not match the network")
    fvals = [Octonion.from_array(net.activations[q].f(w[q].to_array())) for q in range(n)]
    out = []
    for p in range(n):
        acc = oct_add(oct_scale(-float(net.d[p]), w[p]), Octonion.from_array(net.I[p]))
        for q in range(n):
            a_pq = Octonion.from_array(net.A[p, q])
            b_pq = Octonion.from_array(net.B[p, q])
            g_del = Octonion.from_array(net.activations[q].g(w_delayed[p][q].to_array()))
            acc = oct_add(acc, oct_mul(a_pq, fvals[q]))
            acc = oct_add(acc, oct_mul(b_pq, g_del))
        if u is not None:
            acc = oct_add(acc, u[p])
        out.append(acc)
    return out


def effective_input(net: NetworkSpec, z_hat) -> np.ndarray:
    """Constant input of the system shifted to the target ``z_hat``.

    ``I_p - d_p z_p + sum_q [a~_pq^T M^l f~_q(z_q) + b~_pq^T M^l g~_q(z_q)]``;
    zero exactly when ``z_hat`` is an equilibrium.
    """
    z = _as_states(net, z_hat)
    z_del = np.broadcast_to(z, (net.n, net.n, DIM))
    return rhs_real(net, z, z_del)


@dataclass
class DerivativeBoundReport:
    """Finite-difference partials compared against a bound matrix."""

    max_partial: np.ndarray
    min_partial: np.ndarray
    bound: np.ndarray
    tol: float

    @property
    def worst_violation(self) -> np.ndarray:
        """Per-entry amount by which the sampled partials leave ``[0, bound]``."""
        over = self.max_partial - self.bound
        under = -self.min_partial
        return np.maximum(np.maximum(over, under), 0.0)

    @property
    def ok(self) -> bool:
        return bool(np.all(self.worst_violation <= self.tol))


def verify_derivative_bounds(
    act: ActivationSpec,
    samples: int = 1000,
    box: tuple[float, float] = (-5.0, 5.0),
    tol: float = 1e-6,
    which: str = "f",
    step: float = 1e-6,
    seed: int = 0,
) -> DerivativeBoundReport:
    """Sample central-difference Jacobians of ``act.f`` (or ``act.g``) in a box."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    fn, bound = (act.f, act.lambda_bound) if which == "f" else (act.g, act.delta_bound)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(box[0], box[1], size=(samples, DIM))
    jac = np.empty((samples, DIM, DIM))
    for j in range(DIM):
        shift = np.zeros(DIM)
        shift[j] = step
        hi = np.asarray(fn(pts + shift), dtype=float)
        lo = np.asarray(fn(pts - shift), dtype=float)
        if not (np.all(np.isfinite(hi)) and np.all(np.isfinite(lo))):
            raise ValueError("activation produced non-finite output")
        jac[:, :, j] = (hi - lo) / (2 * step)
    return DerivativeBoundReport(jac.max(axis=0), jac.min(axis=0), bound, tol)
